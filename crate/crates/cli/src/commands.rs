//! Subcommand implementations.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};

use echograph_core::analytics::{
    affect_aggregation, centrality_suite, content_share, degree_distribution,
    group_profile_stats, log_bin, prevalence_stats, CentralitySuiteConfig,
};
use echograph_core::annotations::{
    aggregate_annotations, pairwise_kappa, stratified_sample, EligibilityRule,
};
use echograph_core::centrality::{BetweennessConfig, Direction, PageRankConfig};
use echograph_core::diffusion::{DiffusionConfig, DiffusionMode, SeedSelector};
use echograph_core::evaluation::{pr_curve, user_level_eval};
use echograph_core::graph::{RepostGraph, RepostGraphBuilder, SelfLoopPolicy};
use echograph_core::records::{PostRecord, StatsAccumulator, UserRecord};
use echograph_core::segmentation::{
    assign_groups, ActivityFilter, ProfileBuilder, SegmentationEntry, SegmentationMode,
};
use echograph_core::synth::{synth_network, SynthConfig};

use echograph::cache;
use echograph::csvio;
use echograph::ingest;
use echograph::parallel;
use echograph::pipeline::{run_pipeline, PipelineConfig};
use echograph::reports;

use crate::cli::*;

fn eprintln_progress(line: &str) {
    eprintln!("[echograph] {line}");
}

fn cache_posts(cache: &Path) -> Result<Vec<PostRecord>> {
    let path = cache.join("posts.ndjson");
    let file = File::open(&path)
        .with_context(|| format!("{}: run `ingest` first", path.display()))?;
    let (posts, _) = ingest::parse_posts(BufReader::new(file), true)?;
    Ok(posts)
}

fn cache_users(cache: &Path) -> Result<Vec<UserRecord>> {
    let path = cache.join("users.ndjson");
    if !path.exists() {
        return Ok(Vec::new());
    }
    let (users, _) = ingest::parse_users(BufReader::new(File::open(&path)?), true)?;
    Ok(users)
}

fn cache_graph(cache: &Path) -> Result<RepostGraph> {
    let path = cache.join("graph.bin");
    let (graph, _) = cache::read_graph(&path)
        .with_context(|| format!("{}: run `graph build` first", path.display()))?;
    Ok(graph)
}

pub fn cmd_ingest(args: IngestArgs) -> Result<()> {
    std::fs::create_dir_all(&args.out)?;
    let file = File::open(&args.posts)
        .with_context(|| format!("cannot open {}", args.posts.display()))?;
    let (posts, posts_report) = ingest::parse_posts(BufReader::new(file), args.strict)?;
    let (users, users_report) = match &args.users {
        Some(path) => {
            let file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
            ingest::parse_users(BufReader::new(file), args.strict)?
        }
        None => (Vec::new(), ingest::IngestReport::default()),
    };

    let mut acc = StatsAccumulator::default();
    for p in &posts {
        acc.observe_post(p);
    }
    for u in &users {
        acc.observe_user(u);
    }
    let stats = acc.finish();

    ingest::write_posts(BufWriter::new(File::create(args.out.join("posts.ndjson"))?), &posts)?;
    ingest::write_users(BufWriter::new(File::create(args.out.join("users.ndjson"))?), &users)?;
    #[derive(serde::Serialize)]
    struct StatsFile<'a> {
        stats: &'a echograph_core::records::CorpusStats,
        posts_report: &'a ingest::IngestReport,
        users_report: &'a ingest::IngestReport,
    }
    reports::write_json(
        &args.out.join("stats.json"),
        &StatsFile {
            stats: &stats,
            posts_report: &posts_report,
            users_report: &users_report,
        },
    )?;

    eprintln_progress(&format!(
        "ingested {} posts ({} skipped), {} users ({} skipped)",
        posts_report.parsed, posts_report.skipped, users_report.parsed, users_report.skipped
    ));
    println!("{}", serde_json::to_string_pretty(&stats)?);
    Ok(())
}

pub fn cmd_graph_build(args: GraphBuildArgs) -> Result<()> {
    let policy = SelfLoopPolicy::parse(&args.self_loop)
        .with_context(|| format!("unknown self-loop policy `{}`", args.self_loop))?;
    let posts = cache_posts(&args.cache)?;
    let mut builder = RepostGraphBuilder::new(policy);
    for post in &posts {
        builder.observe(post);
    }
    let graph = builder.finish();
    cache::write_graph(&args.cache.join("graph.bin"), &graph, policy)?;
    let diag = graph.diagnostics();
    eprintln_progress(&format!(
        "graph: {} nodes, {} edges, {} unresolved reposts, {} self-reposts folded",
        graph.node_count(),
        graph.edge_count(),
        diag.unresolved_reposts,
        diag.self_reposts_folded
    ));
    Ok(())
}

pub fn cmd_score_lexicon(args: ScoreLexiconArgs) -> Result<()> {
    let lexicon = csvio::read_lexicon(&args.lexicon, !args.no_plural)?;
    let posts = cache_posts(&args.cache)?;
    let mut matched = 0u64;
    let rows: Vec<(String, f64)> = posts
        .iter()
        .map(|post| {
            let hit = post
                .body
                .as_deref()
                .is_some_and(|body| lexicon.is_match(body));
            if hit {
                matched += 1;
            }
            (post.id.clone(), if hit { 1.0 } else { 0.0 })
        })
        .collect();
    csvio::write_scores(&args.out, rows.iter().map(|(id, s)| (id.as_str(), *s)))?;
    eprintln_progress(&format!(
        "lexicon matched {matched} of {} posts",
        rows.len()
    ));
    Ok(())
}

pub fn cmd_diffuse(args: DiffuseArgs) -> Result<()> {
    let mode = DiffusionMode::parse(&args.mode)
        .with_context(|| format!("unknown diffusion mode `{}`", args.mode))?;
    if args.iterations < 1 {
        bail!("--iterations must be at least 1");
    }
    let graph = cache_graph(&args.cache)?;
    let posts = cache_posts(&args.cache)?;
    let scores = csvio::read_scores(&args.scores)?;

    let mut selector = SeedSelector::new(args.tau, args.min_posts);
    {
        let author_of: std::collections::HashMap<&str, Option<u32>> = posts
            .iter()
            .map(|p| (p.id.as_str(), graph.node_index(p.author.as_str())))
            .collect();
        for (post_id, score) in scores.iter() {
            selector.observe(author_of.get(post_id).copied().flatten(), score);
        }
    }
    let selection = selector.finish(graph.node_count());
    if selection.unknown_posts > 0 {
        eprintln_progress(&format!(
            "{} scores referenced posts missing from the cache",
            selection.unknown_posts
        ));
    }
    eprintln_progress(&format!("{} seed accounts", selection.seeds.len()));

    let net = graph.to_belief_network();
    let pool = parallel::build_pool(args.threads)?;
    let beliefs = parallel::diffuse_parallel(
        &pool,
        &net,
        &selection.seeds,
        &DiffusionConfig {
            iterations: args.iterations,
            mode,
        },
    );
    csvio::write_beliefs(
        &args.out,
        (0..graph.node_count() as u32).map(|v| {
            (
                graph.user_id(v).as_str(),
                beliefs[v as usize],
                selection.seeds.contains(v),
            )
        }),
    )?;
    Ok(())
}

pub fn cmd_segment(args: SegmentArgs) -> Result<()> {
    let mode = SegmentationMode::parse(&args.mode)
        .with_context(|| format!("unknown segmentation mode `{}`", args.mode))?;
    let posts = cache_posts(&args.cache)?;
    let users = cache_users(&args.cache)?;
    let beliefs = csvio::read_beliefs(&args.beliefs)?;

    let mut builder = ProfileBuilder::new();
    for p in &posts {
        builder.observe_post(p);
    }
    for u in &users {
        builder.observe_user(u);
    }
    let (profiles, _) = builder.finish(None);

    let filter = ActivityFilter {
        min_items: args.min_items,
        min_age_days: args.min_age_days,
    };
    let belief_of: std::collections::HashMap<&str, f64> = beliefs
        .iter()
        .map(|(id, b, _)| (id.as_str(), *b))
        .collect();
    let entries: Vec<SegmentationEntry> = profiles
        .iter()
        .map(|p| SegmentationEntry {
            user_id: p.user_id.clone(),
            belief: belief_of.get(p.user_id.as_str()).copied().unwrap_or(0.0),
            active: filter.is_active(p),
        })
        .collect();
    let segmentation = assign_groups(&entries, args.theta_low, args.theta_high, mode)?;
    if segmentation.degenerate_quantiles {
        eprintln_progress("degenerate quantiles: every active user assigned HM_TILDE");
    }
    csvio::write_groups(&args.out, &segmentation.assignments)?;

    let mut counts: BTreeMap<&str, u64> = BTreeMap::new();
    for a in &segmentation.assignments {
        *counts.entry(a.group.as_str()).or_insert(0) += 1;
    }
    eprintln_progress(&format!("group counts: {counts:?}"));
    Ok(())
}

pub fn cmd_analyze(cmd: AnalyzeCommand) -> Result<()> {
    match cmd {
        AnalyzeCommand::Profile(args) => {
            let posts = cache_posts(&args.cache)?;
            let users = cache_users(&args.cache)?;
            let assignments = csvio::read_groups(&args.groups)?;
            let mut builder = ProfileBuilder::new();
            for p in &posts {
                builder.observe_post(p);
            }
            for u in &users {
                builder.observe_user(u);
            }
            let (profiles, _) = builder.finish(None);
            let report = group_profile_stats(&assignments, &profiles, &users);
            std::fs::create_dir_all(&args.out)?;
            reports::write_profile_reports(
                &args.out.join("profile.json"),
                &args.out.join("profile.csv"),
                &report,
            )?;
        }
        AnalyzeCommand::Share(args) => {
            let posts = cache_posts(&args.cache)?;
            let assignments = csvio::read_groups(&args.groups)?;
            let mut builder = ProfileBuilder::new();
            for p in &posts {
                builder.observe_post(p);
            }
            let (profiles, _) = builder.finish(None);
            let report = content_share(&assignments, &profiles);
            std::fs::create_dir_all(&args.out)?;
            reports::write_share_reports(
                &args.out.join("share.json"),
                &args.out.join("share.csv"),
                &report,
            )?;
        }
        AnalyzeCommand::Centrality(args) => {
            let graph = cache_graph(&args.common.cache)?;
            let assignments = csvio::read_groups(&args.common.groups)?;
            let config = CentralitySuiteConfig {
                pagerank: PageRankConfig {
                    weighted: !args.unweighted_pagerank,
                    ..PageRankConfig::default()
                },
                betweenness: BetweennessConfig {
                    exact_threshold: args.exact_threshold,
                    pivots: args.pivots,
                    seed: args.seed,
                    normalized: args.normalized_betweenness,
                },
            };
            let report =
                centrality_suite(&graph, &assignments, &config).map_err(anyhow::Error::new)?;
            std::fs::create_dir_all(&args.common.out)?;
            reports::write_centrality_reports(
                &args.common.out.join("centrality.json"),
                &args.common.out.join("centrality.csv"),
                &report,
            )?;
            if !report.betweenness_exact {
                eprintln_progress("betweenness used pivot sampling (node count above threshold)");
            }
        }
        AnalyzeCommand::DegreeDist(args) => {
            let direction = Direction::parse(&args.direction)
                .with_context(|| format!("unknown direction `{}`", args.direction))?;
            let graph = cache_graph(&args.common.cache)?;
            let assignments = csvio::read_groups(&args.common.groups)?;
            let dist = degree_distribution(&graph, &assignments, direction);
            let binned = args.log_base.map(|base| {
                dist.iter()
                    .map(|(&g, pmf)| (g, log_bin(pmf, base)))
                    .collect::<BTreeMap<_, _>>()
            });
            std::fs::create_dir_all(&args.common.out)?;
            let stem = format!("degree_dist_{}", direction.as_str());
            reports::write_degree_dist_reports(
                &args.common.out.join(format!("{stem}.json")),
                &args.common.out.join(format!("{stem}.csv")),
                &dist,
                binned.as_ref(),
                &args.common.out.join(format!("{stem}_logbin.csv")),
            )?;
        }
        AnalyzeCommand::Prevalence(args) => {
            let posts = cache_posts(&args.cache)?;
            let scores = csvio::read_scores(&args.scores)?;
            let report = prevalence_stats(&posts, |id| scores.get(id), args.tau);
            std::fs::create_dir_all(&args.out)?;
            reports::write_prevalence_report(&args.out.join("prevalence.json"), &report)?;
            println!("{}", serde_json::to_string_pretty(&report)?);
        }
        AnalyzeCommand::Affect(args) => {
            let posts = cache_posts(&args.common.cache)?;
            let assignments = csvio::read_groups(&args.common.groups)?;
            let rows = csvio::read_affect(&args.affect)?;
            let author_of: std::collections::HashMap<&str, &str> = posts
                .iter()
                .map(|p| (p.id.as_str(), p.author.as_str()))
                .collect();
            let group_of = echograph_core::segmentation::group_index(&assignments);
            let report = affect_aggregation(&rows, |id| author_of.get(id).copied(), &group_of);
            if report.unknown_posts > 0 {
                eprintln_progress(&format!(
                    "{} affect rows had no matching post author",
                    report.unknown_posts
                ));
            }
            std::fs::create_dir_all(&args.common.out)?;
            reports::write_affect_reports(
                &args.common.out.join("affect.json"),
                &args.common.out.join("affect.csv"),
                &report,
            )?;
        }
    }
    Ok(())
}

/// Post labels: 2-column `post_id,label` or the 3-column aggregate output
/// where only hateful / non_hateful rows carry a usable binary label.
fn read_post_labels(path: &Path) -> Result<std::collections::HashMap<String, bool>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_path(path)
        .with_context(|| format!("cannot open {}", path.display()))?;
    let mut labels = std::collections::HashMap::new();
    for (idx, record) in rdr.records().enumerate() {
        let record = record?;
        if record.len() < 2 {
            bail!("{}: row {}: expected at least 2 columns", path.display(), idx + 2);
        }
        let label = match record[1].trim().to_lowercase().as_str() {
            "1" | "true" | "hateful" => Some(true),
            "0" | "false" | "non_hateful" => Some(false),
            // Aggregate output rows that carry no binary decision.
            "omitted_mean3" | "filtered_low_agreement" => None,
            other => bail!("{}: row {}: bad label `{other}`", path.display(), idx + 2),
        };
        if let Some(label) = label {
            labels.insert(record[0].to_string(), label);
        }
    }
    Ok(labels)
}

pub fn cmd_eval(cmd: EvalCommand) -> Result<()> {
    match cmd {
        EvalCommand::Pr(args) => {
            let scores = csvio::read_scores(&args.scores)?;
            let labels = read_post_labels(&args.labels)?;
            let mut pairs = Vec::with_capacity(labels.len());
            for (post_id, &label) in &labels {
                let Some(score) = scores.get(post_id) else {
                    bail!("labeled post `{post_id}` has no score");
                };
                pairs.push((score, label));
            }
            let (points, warning) = pr_curve(&pairs);
            if let Some(warning) = warning {
                eprintln_progress(&format!("pr curve warning: {warning:?}"));
            }
            reports::write_pr_curve(&args.out, &points)?;
            eprintln_progress(&format!("{} PR points over {} labeled posts", points.len(), pairs.len()));
        }
        EvalCommand::Users(args) => {
            let assignments = csvio::read_groups(&args.groups)?;
            let labels = csvio::read_user_labels(&args.labels)?;
            let (report, missing) =
                user_level_eval(&assignments, &labels).map_err(anyhow::Error::new)?;
            if !missing.is_empty() {
                eprintln_progress(&format!(
                    "{} labeled users missing from assignments",
                    missing.len()
                ));
            }
            reports::write_user_eval_report(&args.out, &report)?;
            println!("{}", serde_json::to_string_pretty(&report)?);
        }
    }
    Ok(())
}

pub fn cmd_annotate(cmd: AnnotateCommand) -> Result<()> {
    match cmd {
        AnnotateCommand::Aggregate(args) => {
            let triples = csvio::read_annotations(&args.annotations)?;
            let (labels, summary) = aggregate_annotations(&triples);
            csvio::write_aggregated(&args.out, &labels)?;
            println!("{}", serde_json::to_string_pretty(&summary)?);
        }
        AnnotateCommand::Kappa(args) => {
            let triples = csvio::read_annotations(&args.annotations)?;
            let report = pairwise_kappa(&triples).map_err(anyhow::Error::new)?;
            let text = serde_json::to_string_pretty(&report)?;
            match &args.out {
                Some(path) => csvio::write_text(path, &format!("{text}\n"))?,
                None => println!("{text}"),
            }
        }
        AnnotateCommand::Sample(args) => {
            let posts = cache_posts(&args.cache)?;
            let scores = csvio::read_scores(&args.scores)?;
            let edges: Vec<f64> = args
                .strata
                .split(',')
                .map(|s| s.trim().parse::<f64>().context("bad stratum edge"))
                .collect::<Result<_>>()?;
            let per_stratum: Vec<u64> = args
                .per_stratum
                .split(',')
                .map(|s| s.trim().parse::<u64>().context("bad per-stratum count"))
                .collect::<Result<_>>()?;
            let rule = EligibilityRule {
                min_chars: args.min_chars,
            };
            let report = stratified_sample(
                &posts,
                |id| scores.get(id),
                &edges,
                &per_stratum,
                args.seed,
                &rule,
            )
            .map_err(anyhow::Error::new)?;
            csvio::write_sample(&args.out, &report.sampled)?;
            eprintln_progress(&format!(
                "sampled {} posts; eligible per stratum {:?}; {} eligible posts fell outside the strata",
                report.sampled.len(),
                report.eligible_per_stratum,
                report.out_of_strata
            ));
        }
    }
    Ok(())
}

fn parse_synth_config(path: &Path) -> Result<SynthConfig> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read config {}", path.display()))?;
    let mut config = SynthConfig::default();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            bail!("{}:{}: expected `key = value`", path.display(), idx + 1);
        };
        let (key, value) = (key.trim(), value.trim());
        match key {
            "n_users" => config.n_users = value.parse()?,
            "communities" => {
                config.communities = value
                    .split(',')
                    .filter(|s| !s.trim().is_empty())
                    .map(|s| s.trim().parse::<u32>().context("bad community size"))
                    .collect::<Result<_>>()?
            }
            "intra_rate" => config.intra_rate = value.parse()?,
            "cross_rate" => config.cross_rate = value.parse()?,
            "posts_min" => config.posts_min = value.parse()?,
            "posts_max" => config.posts_max = value.parse()?,
            "seed" => config.seed = value.parse()?,
            other => bail!("{}:{}: unknown key `{other}`", path.display(), idx + 1),
        }
    }
    Ok(config)
}

pub fn cmd_synth(args: SynthArgs) -> Result<()> {
    let config = parse_synth_config(&args.config)?;
    let output = synth_network(&config).map_err(anyhow::Error::new)?;
    std::fs::create_dir_all(&args.out)?;
    ingest::write_posts(
        BufWriter::new(File::create(args.out.join("posts.ndjson"))?),
        &output.posts,
    )?;
    ingest::write_users(
        BufWriter::new(File::create(args.out.join("users.ndjson"))?),
        &output.users,
    )?;
    csvio::write_ground_truth(&args.out.join("ground_truth.csv"), &output.communities)?;
    eprintln_progress(&format!(
        "synthesized {} users, {} posts",
        output.users.len(),
        output.posts.len()
    ));
    Ok(())
}

pub fn cmd_run(args: RunArgs) -> Result<PathBuf> {
    let mut config = PipelineConfig::from_file(&args.config)?;
    if let Some(v) = args.posts {
        config.posts = v;
    }
    if let Some(v) = args.users {
        config.users = Some(v);
    }
    if let Some(v) = args.scores {
        config.scores = v;
    }
    if let Some(v) = args.out {
        config.out = v;
    }
    if let Some(v) = args.tau {
        config.tau = v;
    }
    if let Some(v) = args.min_posts {
        config.min_posts = v;
    }
    if let Some(v) = args.iterations {
        config.iterations = v;
    }
    if let Some(v) = &args.mode {
        config.mode = DiffusionMode::parse(v).with_context(|| format!("unknown mode `{v}`"))?;
    }
    if let Some(v) = args.theta_low {
        config.theta_low = v;
    }
    if let Some(v) = args.theta_high {
        config.theta_high = v;
    }
    if let Some(v) = &args.segmentation {
        config.segmentation = SegmentationMode::parse(v)
            .with_context(|| format!("unknown segmentation mode `{v}`"))?;
    }
    if let Some(v) = args.threads {
        config.threads = v;
    }
    config.force |= args.force;

    let outcome = run_pipeline(&config, &mut |line| eprintln_progress(line))?;
    println!(
        "{}",
        serde_json::to_string_pretty(&serde_json::json!({
            "graph_nodes": outcome.graph_nodes,
            "graph_edges": outcome.graph_edges,
            "seeds": outcome.seed_count,
            "groups": outcome
                .group_counts
                .iter()
                .map(|(g, c)| (g.as_str().to_string(), *c))
                .collect::<BTreeMap<_, _>>(),
            "manifest": outcome.manifest_path.display().to_string(),
        }))?
    );
    Ok(outcome.manifest_path)
}
