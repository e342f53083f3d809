use clap::error::ErrorKind;
use clap::Parser;

use echograph::core::centrality::PageRankFailure;

mod cli;
mod commands;

use cli::{Cli, Command};

/// Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical
/// non-convergence.
fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            std::process::exit(code);
        }
    };

    let result = match cli.command {
        Command::Ingest(args) => commands::cmd_ingest(args),
        Command::Graph(cli::GraphCommand::Build(args)) => commands::cmd_graph_build(args),
        Command::Score(cli::ScoreCommand::Lexicon(args)) => commands::cmd_score_lexicon(args),
        Command::Diffuse(args) => commands::cmd_diffuse(args),
        Command::Segment(args) => commands::cmd_segment(args),
        Command::Analyze(cmd) => commands::cmd_analyze(cmd),
        Command::Eval(cmd) => commands::cmd_eval(cmd),
        Command::Annotate(cmd) => commands::cmd_annotate(cmd),
        Command::Synth(args) => commands::cmd_synth(args),
        Command::Run(args) => commands::cmd_run(args).map(|_| ()),
    };

    if let Err(err) = result {
        eprintln!("error: {err:#}");
        let code = if err.downcast_ref::<PageRankFailure>().is_some() {
            3
        } else {
            2
        };
        std::process::exit(code);
    }
}
