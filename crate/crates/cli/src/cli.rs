//! Command-line surface.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(
    name = "echograph",
    version,
    about = "Repost-network belief diffusion and user-group analytics",
    propagate_version = true
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse platform dumps into a normalized cache directory.
    Ingest(IngestArgs),
    /// Graph construction over a populated cache.
    #[command(subcommand)]
    Graph(GraphCommand),
    /// Per-post scoring.
    #[command(subcommand)]
    Score(ScoreCommand),
    /// Seed selection and belief diffusion.
    Diffuse(DiffuseArgs),
    /// Activity filter and group assignment.
    Segment(SegmentArgs),
    /// Group-level analytics reports.
    #[command(subcommand)]
    Analyze(AnalyzeCommand),
    /// Evaluation against labeled data.
    #[command(subcommand)]
    Eval(EvalCommand),
    /// Annotation aggregation, agreement, and sampling.
    #[command(subcommand)]
    Annotate(AnnotateCommand),
    /// Generate a synthetic corpus.
    Synth(SynthArgs),
    /// Run the whole pipeline from a config file.
    Run(RunArgs),
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    /// Newline-delimited posts dump.
    #[arg(long)]
    pub posts: PathBuf,
    /// Newline-delimited users dump.
    #[arg(long)]
    pub users: Option<PathBuf>,
    /// Abort on the first malformed record instead of skipping it.
    #[arg(long)]
    pub strict: bool,
    /// Cache directory to populate.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum GraphCommand {
    /// Build the weighted repost network from the cached posts.
    Build(GraphBuildArgs),
}

#[derive(Debug, Args)]
pub struct GraphBuildArgs {
    #[arg(long)]
    pub cache: PathBuf,
    /// What counts toward a node's self-loop.
    #[arg(long, value_name = "originals|originals+replies|all", default_value = "originals+replies")]
    pub self_loop: String,
}

#[derive(Debug, Subcommand)]
pub enum ScoreCommand {
    /// Keyword-baseline scoring: 1.0 for posts matching the lexicon.
    Lexicon(ScoreLexiconArgs),
}

#[derive(Debug, Args)]
pub struct ScoreLexiconArgs {
    /// One term per line; `#` comments.
    #[arg(long)]
    pub lexicon: PathBuf,
    #[arg(long)]
    pub cache: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Disable naive `-s` plural matching.
    #[arg(long)]
    pub no_plural: bool,
}

#[derive(Debug, Args)]
pub struct DiffuseArgs {
    #[arg(long)]
    pub cache: PathBuf,
    /// CSV `post_id,score`.
    #[arg(long)]
    pub scores: PathBuf,
    /// Seed posts must score strictly above this.
    #[arg(long, default_value_t = 0.95)]
    pub tau: f64,
    /// Seed accounts need at least this many qualifying posts.
    #[arg(long, default_value_t = 10)]
    pub min_posts: u64,
    #[arg(long, value_name = "standard|clamped", default_value = "clamped")]
    pub mode: String,
    #[arg(long, default_value_t = 3)]
    pub iterations: u32,
    /// Worker threads (0 = automatic); does not affect the output bytes.
    #[arg(long, default_value_t = 0)]
    pub threads: usize,
    /// Output CSV `user_id,belief,is_seed`.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SegmentArgs {
    #[arg(long)]
    pub beliefs: PathBuf,
    #[arg(long)]
    pub cache: PathBuf,
    #[arg(long, default_value_t = 0.25)]
    pub theta_low: f64,
    #[arg(long, default_value_t = 0.75)]
    pub theta_high: f64,
    #[arg(long, value_name = "score_range|population_quantile", default_value = "score_range")]
    pub mode: String,
    #[arg(long, default_value_t = 5)]
    pub min_items: u64,
    #[arg(long, default_value_t = 60.0)]
    pub min_age_days: f64,
    /// Output CSV `user_id,group,belief`.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum AnalyzeCommand {
    /// Activity, popularity, and biography statistics per group.
    Profile(AnalyzeCommonArgs),
    /// Per-group share of posts, replies, reposts, and all content.
    Share(AnalyzeCommonArgs),
    /// Degree centralities, betweenness, and PageRank per group.
    Centrality(AnalyzeCentralityArgs),
    /// Degree distribution tables per group.
    DegreeDist(AnalyzeDegreeDistArgs),
    /// Corpus-level hate prevalence.
    Prevalence(AnalyzePrevalenceArgs),
    /// Emotion distribution and median sentiment per group.
    Affect(AnalyzeAffectArgs),
}

#[derive(Debug, Args)]
pub struct AnalyzeCommonArgs {
    #[arg(long)]
    pub cache: PathBuf,
    #[arg(long)]
    pub groups: PathBuf,
    /// Directory receiving the JSON and CSV reports.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct AnalyzeCentralityArgs {
    #[command(flatten)]
    pub common: AnalyzeCommonArgs,
    /// Spread PageRank uniformly over partners instead of by repost count.
    #[arg(long)]
    pub unweighted_pagerank: bool,
    /// Divide betweenness by (n-1)(n-2).
    #[arg(long)]
    pub normalized_betweenness: bool,
    /// Switch to pivot sampling above this node count.
    #[arg(long, default_value_t = 100_000)]
    pub exact_threshold: usize,
    #[arg(long, default_value_t = 256)]
    pub pivots: usize,
    /// Seed for the pivot sample.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct AnalyzeDegreeDistArgs {
    #[command(flatten)]
    pub common: AnalyzeCommonArgs,
    #[arg(long, value_name = "in|out", default_value = "in")]
    pub direction: String,
    /// Also emit logarithmically binned tables with this base.
    #[arg(long)]
    pub log_base: Option<f64>,
}

#[derive(Debug, Args)]
pub struct AnalyzePrevalenceArgs {
    #[arg(long)]
    pub cache: PathBuf,
    #[arg(long)]
    pub scores: PathBuf,
    #[arg(long, default_value_t = 0.95)]
    pub tau: f64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct AnalyzeAffectArgs {
    #[command(flatten)]
    pub common: AnalyzeCommonArgs,
    /// CSV `post_id,sentiment,emotion`.
    #[arg(long)]
    pub affect: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum EvalCommand {
    /// Post-level precision-recall curve.
    Pr(EvalPrArgs),
    /// User-level precision/recall/F1 with HM as the positive prediction.
    Users(EvalUsersArgs),
}

#[derive(Debug, Args)]
pub struct EvalPrArgs {
    /// CSV `post_id,score`.
    #[arg(long)]
    pub scores: PathBuf,
    /// CSV `post_id,label`; aggregated annotation files are accepted.
    #[arg(long)]
    pub labels: PathBuf,
    /// Output CSV `threshold,precision,recall`.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvalUsersArgs {
    /// CSV `user_id,group,belief`.
    #[arg(long)]
    pub groups: PathBuf,
    /// CSV `user_id,label`.
    #[arg(long)]
    pub labels: PathBuf,
    /// JSON report path.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum AnnotateCommand {
    /// Label each annotation triple and summarize the counts.
    Aggregate(AnnotateAggregateArgs),
    /// Agreement rate and slot-pair Cohen's kappa.
    Kappa(AnnotateKappaArgs),
    /// Stratified sample of annotation-eligible posts.
    Sample(AnnotateSampleArgs),
}

#[derive(Debug, Args)]
pub struct AnnotateAggregateArgs {
    /// CSV `post_id,score1,score2,score3`.
    #[arg(long)]
    pub annotations: PathBuf,
    /// Output CSV `post_id,label,mean`.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct AnnotateKappaArgs {
    #[arg(long)]
    pub annotations: PathBuf,
    /// Optional JSON report path (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AnnotateSampleArgs {
    #[arg(long)]
    pub cache: PathBuf,
    #[arg(long)]
    pub scores: PathBuf,
    /// Ascending stratum edges, e.g. `0,0.25,0.5,0.75,1.0`. Strata are
    /// half-open `[lo, hi)`.
    #[arg(long)]
    pub strata: String,
    /// Comma-separated sample size per stratum.
    #[arg(long)]
    pub per_stratum: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Minimum body length in characters.
    #[arg(long, default_value_t = 10)]
    pub min_chars: usize,
    /// Output CSV `post_id,stratum,score`.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Flat key=value config: n_users, communities, intra_rate, cross_rate,
    /// posts_min, posts_max, seed.
    #[arg(long)]
    pub config: PathBuf,
    /// Directory receiving posts.ndjson, users.ndjson, ground_truth.csv.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Flat key=value pipeline config; flags below override file values.
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub posts: Option<PathBuf>,
    #[arg(long)]
    pub users: Option<PathBuf>,
    #[arg(long)]
    pub scores: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub tau: Option<f64>,
    #[arg(long)]
    pub min_posts: Option<u64>,
    #[arg(long)]
    pub iterations: Option<u32>,
    #[arg(long)]
    pub mode: Option<String>,
    #[arg(long)]
    pub theta_low: Option<f64>,
    #[arg(long)]
    pub theta_high: Option<f64>,
    #[arg(long)]
    pub segmentation: Option<String>,
    #[arg(long)]
    pub threads: Option<usize>,
    /// Recompute every stage even when cached digests match.
    #[arg(long)]
    pub force: bool,
}
