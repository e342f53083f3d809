//! End-to-end pipeline: ingest → graph → diffusion → segmentation →
//! analytics → evaluation, with cached intermediates and a reproducibility
//! manifest.
//!
//! Every stage records a digest of its inputs and parameters in
//! `stage_state.json` inside the output directory; a rerun with unchanged
//! digests loads the stage's outputs from disk instead of recomputing
//! (`force` overrides). The manifest lists parameters, input digests, and a
//! digest of every produced file. Worker-thread count is an execution detail
//! and deliberately stays out of the manifest: outputs are bitwise identical
//! at any thread count.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use sha2::{Digest, Sha256};

use echograph_core::analytics::{
    affect_aggregation, centrality_suite, content_share, degree_distribution,
    group_profile_stats, log_bin, prevalence_stats, AffectReport, CentralityReport,
    CentralitySuiteConfig, ContentShare, GroupProfile, PrevalenceReport,
};
use echograph_core::centrality::Direction;
use echograph_core::diffusion::{DiffusionConfig, DiffusionMode, SeedSelector, SeedSet};
use echograph_core::evaluation::{user_level_eval, UserEvalReport};
use echograph_core::graph::{RepostGraph, RepostGraphBuilder, SelfLoopPolicy};
use echograph_core::records::{CorpusStats, PostRecord, StatsAccumulator, UserRecord};
use echograph_core::segmentation::{
    assign_groups, ActivityFilter, Group, ProfileBuilder, SegmentationEntry, SegmentationMode,
};

use crate::cache;
use crate::csvio;
use crate::ingest::{self, IngestReport};
use crate::parallel;
use crate::reports;

#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub posts: PathBuf,
    pub users: Option<PathBuf>,
    pub scores: PathBuf,
    pub out: PathBuf,
    pub strict: bool,
    pub self_loop: SelfLoopPolicy,
    pub tau: f64,
    pub min_posts: u64,
    pub iterations: u32,
    pub mode: DiffusionMode,
    pub theta_low: f64,
    pub theta_high: f64,
    pub segmentation: SegmentationMode,
    pub min_items: u64,
    pub min_age_days: f64,
    pub affect: Option<PathBuf>,
    pub user_labels: Option<PathBuf>,
    pub log_base: Option<f64>,
    /// Worker threads (0 = automatic). Not part of the manifest.
    pub threads: usize,
    /// Recompute every stage even when digests match.
    pub force: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            posts: PathBuf::new(),
            users: None,
            scores: PathBuf::new(),
            out: PathBuf::new(),
            strict: false,
            self_loop: SelfLoopPolicy::default(),
            tau: 0.95,
            min_posts: 10,
            iterations: 3,
            mode: DiffusionMode::Clamped,
            theta_low: 0.25,
            theta_high: 0.75,
            segmentation: SegmentationMode::ScoreRange,
            min_items: 5,
            min_age_days: 60.0,
            affect: None,
            user_labels: None,
            log_base: None,
            threads: 0,
            force: false,
        }
    }
}

impl PipelineConfig {
    /// Parse a flat `key = value` config file (`#` comments). Keys mirror
    /// the CLI flag names.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        let mut config = Self::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                bail!("{}:{}: expected `key = value`", path.display(), idx + 1);
            };
            config
                .apply_kv(key.trim(), value.trim())
                .with_context(|| format!("{}:{}", path.display(), idx + 1))?;
        }
        Ok(config)
    }

    pub fn apply_kv(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "posts" => self.posts = PathBuf::from(value),
            "users" => self.users = Some(PathBuf::from(value)),
            "scores" => self.scores = PathBuf::from(value),
            "out" => self.out = PathBuf::from(value),
            "strict" => self.strict = parse_bool(value)?,
            "self_loop" => {
                self.self_loop = SelfLoopPolicy::parse(value)
                    .with_context(|| format!("unknown self_loop policy `{value}`"))?
            }
            "tau" => self.tau = value.parse()?,
            "min_posts" => self.min_posts = value.parse()?,
            "iterations" => self.iterations = value.parse()?,
            "mode" => {
                self.mode = DiffusionMode::parse(value)
                    .with_context(|| format!("unknown diffusion mode `{value}`"))?
            }
            "theta_low" => self.theta_low = value.parse()?,
            "theta_high" => self.theta_high = value.parse()?,
            "segmentation" => {
                self.segmentation = SegmentationMode::parse(value)
                    .with_context(|| format!("unknown segmentation mode `{value}`"))?
            }
            "min_items" => self.min_items = value.parse()?,
            "min_age_days" => self.min_age_days = value.parse()?,
            "affect" => self.affect = Some(PathBuf::from(value)),
            "user_labels" => self.user_labels = Some(PathBuf::from(value)),
            "log_base" => self.log_base = Some(value.parse()?),
            "threads" => self.threads = value.parse()?,
            other => bail!("unknown config key `{other}`"),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.posts.as_os_str().is_empty() {
            bail!("config is missing `posts`");
        }
        if self.scores.as_os_str().is_empty() {
            bail!("config is missing `scores`");
        }
        if self.out.as_os_str().is_empty() {
            bail!("config is missing `out`");
        }
        if self.iterations < 1 {
            bail!("iterations must be at least 1");
        }
        if !(0.0..=1.0).contains(&self.tau) {
            bail!("tau must lie in [0, 1]");
        }
        Ok(())
    }

    /// Manifest parameters: everything that can affect the outputs.
    fn parameters(&self) -> BTreeMap<String, String> {
        let mut p = BTreeMap::new();
        p.insert("strict".into(), self.strict.to_string());
        p.insert("self_loop".into(), self.self_loop.as_str().into());
        p.insert("tau".into(), self.tau.to_string());
        p.insert("min_posts".into(), self.min_posts.to_string());
        p.insert("iterations".into(), self.iterations.to_string());
        p.insert("mode".into(), self.mode.as_str().into());
        p.insert("theta_low".into(), self.theta_low.to_string());
        p.insert("theta_high".into(), self.theta_high.to_string());
        p.insert("segmentation".into(), self.segmentation.as_str().into());
        p.insert("min_items".into(), self.min_items.to_string());
        p.insert("min_age_days".into(), self.min_age_days.to_string());
        if let Some(base) = self.log_base {
            p.insert("log_base".into(), base.to_string());
        }
        p
    }
}

fn parse_bool(value: &str) -> Result<bool> {
    match value {
        "true" | "1" | "yes" | "on" => Ok(true),
        "false" | "0" | "no" | "off" => Ok(false),
        other => bail!("expected a boolean, got `{other}`"),
    }
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    let mut reader = BufReader::new(file);
    let mut hasher = Sha256::new();
    let mut buf = [0u8; 64 * 1024];
    loop {
        let n = reader.read(&mut buf)?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
    }
    Ok(format!("sha256:{}", hex::encode(hasher.finalize())))
}

fn digest_parts(parts: &[&str]) -> String {
    let mut hasher = Sha256::new();
    for part in parts {
        hasher.update((part.len() as u64).to_le_bytes());
        hasher.update(part.as_bytes());
    }
    format!("sha256:{}", hex::encode(hasher.finalize()))
}

/// Per-stage input digests from the previous run.
#[derive(Debug, Default, serde::Serialize, serde::Deserialize)]
struct StageState(BTreeMap<String, String>);

impl StageState {
    fn load(path: &Path) -> Self {
        std::fs::read_to_string(path)
            .ok()
            .and_then(|text| serde_json::from_str(&text).ok())
            .unwrap_or_default()
    }

    fn save(&self, path: &Path) -> Result<()> {
        csvio::write_text(path, &serde_json::to_string_pretty(self)?)
    }

    fn fresh(&self, stage: &str, digest: &str, outputs: &[PathBuf], force: bool) -> bool {
        !force
            && self.0.get(stage).map(String::as_str) == Some(digest)
            && outputs.iter().all(|p| p.exists())
    }
}

#[derive(Debug, Clone, serde::Serialize)]
struct StatsFile {
    stats: CorpusStats,
    posts_report: IngestReport,
    users_report: IngestReport,
    unresolved_reposts: Option<u64>,
}

/// In-memory results of a full pipeline run; everything is also on disk
/// under `config.out`.
pub struct PipelineOutcome {
    pub stats: CorpusStats,
    pub graph_nodes: usize,
    pub graph_edges: usize,
    pub seed_count: usize,
    pub group_counts: BTreeMap<Group, u64>,
    pub prevalence: PrevalenceReport,
    pub share: ContentShare,
    pub profile: BTreeMap<Group, GroupProfile>,
    pub centrality: CentralityReport,
    pub affect: Option<AffectReport>,
    pub eval: Option<UserEvalReport>,
    pub manifest_path: PathBuf,
}

struct Paths {
    posts_cache: PathBuf,
    users_cache: PathBuf,
    stats: PathBuf,
    graph: PathBuf,
    beliefs: PathBuf,
    groups: PathBuf,
    reports: PathBuf,
    manifest: PathBuf,
    stage_state: PathBuf,
}

impl Paths {
    fn new(out: &Path) -> Self {
        Self {
            posts_cache: out.join("posts.ndjson"),
            users_cache: out.join("users.ndjson"),
            stats: out.join("stats.json"),
            graph: out.join("graph.bin"),
            beliefs: out.join("beliefs.csv"),
            groups: out.join("groups.csv"),
            reports: out.join("reports"),
            manifest: out.join("manifest.json"),
            stage_state: out.join("stage_state.json"),
        }
    }
}

pub fn run_pipeline(config: &PipelineConfig, log: &mut dyn FnMut(&str)) -> Result<PipelineOutcome> {
    config.validate()?;
    std::fs::create_dir_all(&config.out)?;
    let paths = Paths::new(&config.out);
    std::fs::create_dir_all(&paths.reports)?;
    let mut state = StageState::load(&paths.stage_state);

    // --- ingest ------------------------------------------------------
    let posts_digest = sha256_file(&config.posts)?;
    let users_digest = match &config.users {
        Some(path) => sha256_file(path)?,
        None => "absent".to_string(),
    };
    let ingest_digest = digest_parts(&[
        "ingest",
        &posts_digest,
        &users_digest,
        &config.strict.to_string(),
    ]);
    let ingest_outputs = [
        paths.posts_cache.clone(),
        paths.users_cache.clone(),
        paths.stats.clone(),
    ];
    if state.fresh("ingest", &ingest_digest, &ingest_outputs, config.force) {
        log("ingest: cached");
    } else {
        log("ingest: parsing dumps");
        let file = File::open(&config.posts)
            .with_context(|| format!("cannot open {}", config.posts.display()))?;
        let (posts, posts_report) = ingest::parse_posts(BufReader::new(file), config.strict)?;
        let (users, users_report) = match &config.users {
            Some(path) => {
                let file =
                    File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
                ingest::parse_users(BufReader::new(file), config.strict)?
            }
            None => (Vec::new(), IngestReport::default()),
        };
        let mut acc = StatsAccumulator::default();
        for p in &posts {
            acc.observe_post(p);
        }
        for u in &users {
            acc.observe_user(u);
        }
        let stats = acc.finish();
        ingest::write_posts(BufWriter::new(File::create(&paths.posts_cache)?), &posts)?;
        ingest::write_users(BufWriter::new(File::create(&paths.users_cache)?), &users)?;
        reports::write_json(
            &paths.stats,
            &StatsFile {
                stats,
                posts_report,
                users_report,
                unresolved_reposts: None,
            },
        )?;
        state.0.insert("ingest".into(), ingest_digest.clone());
        state.save(&paths.stage_state)?;
    }

    let load_posts = || -> Result<Vec<PostRecord>> {
        let file = File::open(&paths.posts_cache)?;
        let (posts, _) = ingest::parse_posts(BufReader::new(file), true)?;
        Ok(posts)
    };
    let load_users = || -> Result<Vec<UserRecord>> {
        let file = File::open(&paths.users_cache)?;
        let (users, _) = ingest::parse_users(BufReader::new(file), true)?;
        Ok(users)
    };

    // --- graph -------------------------------------------------------
    let posts_cache_digest = sha256_file(&paths.posts_cache)?;
    let graph_digest = digest_parts(&["graph", &posts_cache_digest, self_loop_name(config)]);
    let graph_outputs = [paths.graph.clone()];
    let posts = load_posts()?;
    if state.fresh("graph", &graph_digest, &graph_outputs, config.force) {
        log("graph: cached");
    } else {
        log("graph: building repost network");
        let mut builder = RepostGraphBuilder::new(config.self_loop);
        for post in &posts {
            builder.observe(post);
        }
        let graph = builder.finish();
        cache::write_graph(&paths.graph, &graph, config.self_loop)?;
        state.0.insert("graph".into(), graph_digest.clone());
        state.save(&paths.stage_state)?;
    }
    let (graph, _) = cache::read_graph(&paths.graph)?;

    // --- diffusion ---------------------------------------------------
    let scores_digest = sha256_file(&config.scores)?;
    let graph_file_digest = sha256_file(&paths.graph)?;
    let diffuse_digest = digest_parts(&[
        "diffuse",
        &graph_file_digest,
        &scores_digest,
        &config.tau.to_string(),
        &config.min_posts.to_string(),
        &config.iterations.to_string(),
        config.mode.as_str(),
    ]);
    let scores = csvio::read_scores(&config.scores)?;
    if state.fresh("diffuse", &diffuse_digest, &[paths.beliefs.clone()], config.force) {
        log("diffuse: cached");
    } else {
        log("diffuse: selecting seeds and propagating beliefs");
        let mut selector = SeedSelector::new(config.tau, config.min_posts);
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
            log(&format!(
                "diffuse: {} scores referenced unknown posts",
                selection.unknown_posts
            ));
        }
        let net = graph.to_belief_network();
        let pool = parallel::build_pool(config.threads)?;
        let beliefs = parallel::diffuse_parallel(
            &pool,
            &net,
            &selection.seeds,
            &DiffusionConfig {
                iterations: config.iterations,
                mode: config.mode,
            },
        );
        csvio::write_beliefs(
            &paths.beliefs,
            (0..graph.node_count() as u32).map(|v| {
                (
                    graph.user_id(v).as_str(),
                    beliefs[v as usize],
                    selection.seeds.contains(v),
                )
            }),
        )?;
        state.0.insert("diffuse".into(), diffuse_digest.clone());
        state.save(&paths.stage_state)?;
    }
    let beliefs = csvio::read_beliefs(&paths.beliefs)?;
    let seed_count = beliefs.iter().filter(|(_, _, s)| *s).count();

    // --- segmentation ------------------------------------------------
    let beliefs_digest = sha256_file(&paths.beliefs)?;
    let users_cache_digest = sha256_file(&paths.users_cache)?;
    let segment_digest = digest_parts(&[
        "segment",
        &beliefs_digest,
        &posts_cache_digest,
        &users_cache_digest,
        &config.theta_low.to_string(),
        &config.theta_high.to_string(),
        config.segmentation.as_str(),
        &config.min_items.to_string(),
        &config.min_age_days.to_string(),
    ]);
    let users = load_users()?;
    let profiles = {
        let mut builder = ProfileBuilder::new();
        for p in &posts {
            builder.observe_post(p);
        }
        for u in &users {
            builder.observe_user(u);
        }
        builder.finish(None).0
    };
    if state.fresh("segment", &segment_digest, &[paths.groups.clone()], config.force) {
        log("segment: cached");
    } else {
        log("segment: applying activity filter and thresholds");
        let filter = ActivityFilter {
            min_items: config.min_items,
            min_age_days: config.min_age_days,
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
        let segmentation = assign_groups(
            &entries,
            config.theta_low,
            config.theta_high,
            config.segmentation,
        )?;
        if segmentation.degenerate_quantiles {
            log("segment: degenerate quantiles, every active user is HM_TILDE");
        }
        csvio::write_groups(&paths.groups, &segmentation.assignments)?;
        state.0.insert("segment".into(), segment_digest.clone());
        state.save(&paths.stage_state)?;
    }
    let assignments = csvio::read_groups(&paths.groups)?;
    let mut group_counts: BTreeMap<Group, u64> = BTreeMap::new();
    for a in &assignments {
        *group_counts.entry(a.group).or_insert(0) += 1;
    }

    // --- analytics ---------------------------------------------------
    log("analyze: computing group statistics");
    let profile = group_profile_stats(&assignments, &profiles, &users);
    reports::write_profile_reports(
        &paths.reports.join("profile.json"),
        &paths.reports.join("profile.csv"),
        &profile,
    )?;
    let share = content_share(&assignments, &profiles);
    reports::write_share_reports(
        &paths.reports.join("share.json"),
        &paths.reports.join("share.csv"),
        &share,
    )?;
    let centrality = centrality_suite(&graph, &assignments, &CentralitySuiteConfig::default())
        .map_err(anyhow::Error::new)?;
    reports::write_centrality_reports(
        &paths.reports.join("centrality.json"),
        &paths.reports.join("centrality.csv"),
        &centrality,
    )?;
    for direction in [Direction::In, Direction::Out] {
        let dist = degree_distribution(&graph, &assignments, direction);
        let binned = config.log_base.map(|base| {
            dist.iter()
                .map(|(&g, pmf)| (g, log_bin(pmf, base)))
                .collect::<BTreeMap<_, _>>()
        });
        let stem = format!("degree_dist_{}", direction.as_str());
        reports::write_degree_dist_reports(
            &paths.reports.join(format!("{stem}.json")),
            &paths.reports.join(format!("{stem}.csv")),
            &dist,
            binned.as_ref(),
            &paths.reports.join(format!("{stem}_logbin.csv")),
        )?;
    }
    let prevalence = prevalence_stats(&posts, |id| scores.get(id), config.tau);
    reports::write_prevalence_report(&paths.reports.join("prevalence.json"), &prevalence)?;

    let affect_report = match &config.affect {
        Some(path) => {
            let rows = csvio::read_affect(path)?;
            let author_of: std::collections::HashMap<&str, &str> = posts
                .iter()
                .map(|p| (p.id.as_str(), p.author.as_str()))
                .collect();
            let group_of = echograph_core::segmentation::group_index(&assignments);
            let report = affect_aggregation(&rows, |id| author_of.get(id).copied(), &group_of);
            reports::write_affect_reports(
                &paths.reports.join("affect.json"),
                &paths.reports.join("affect.csv"),
                &report,
            )?;
            Some(report)
        }
        None => None,
    };

    // --- evaluation --------------------------------------------------
    let eval_report = match &config.user_labels {
        Some(path) => {
            log("eval: scoring against labeled users");
            let labels = csvio::read_user_labels(path)?;
            let (report, missing) = user_level_eval(&assignments, &labels)?;
            if !missing.is_empty() {
                log(&format!("eval: {} labeled users not in assignments", missing.len()));
            }
            reports::write_user_eval_report(&paths.reports.join("eval_users.json"), &report)?;
            Some(report)
        }
        None => None,
    };

    // --- manifest ----------------------------------------------------
    let stats: StatsFile = serde_json::from_str(&std::fs::read_to_string(&paths.stats)?)
        .context("stats.json is unreadable")?;
    let mut inputs = BTreeMap::new();
    inputs.insert(config.posts.display().to_string(), posts_digest);
    if let Some(path) = &config.users {
        inputs.insert(path.display().to_string(), users_digest.clone());
    }
    inputs.insert(config.scores.display().to_string(), scores_digest);
    if let Some(path) = &config.affect {
        inputs.insert(path.display().to_string(), sha256_file(path)?);
    }
    if let Some(path) = &config.user_labels {
        inputs.insert(path.display().to_string(), sha256_file(path)?);
    }

    let mut report_files: Vec<PathBuf> = vec![
        paths.posts_cache.clone(),
        paths.users_cache.clone(),
        paths.stats.clone(),
        paths.graph.clone(),
        paths.beliefs.clone(),
        paths.groups.clone(),
    ];
    let mut dir_entries: Vec<PathBuf> = std::fs::read_dir(&paths.reports)?
        .map(|e| e.map(|e| e.path()))
        .collect::<std::io::Result<_>>()?;
    dir_entries.sort();
    report_files.extend(dir_entries);
    let mut report_digests = BTreeMap::new();
    for file in &report_files {
        let name = file
            .strip_prefix(&config.out)
            .unwrap_or(file)
            .display()
            .to_string()
            .replace('\\', "/");
        report_digests.insert(name, sha256_file(file)?);
    }

    #[derive(serde::Serialize)]
    struct Manifest {
        tool: &'static str,
        version: &'static str,
        parameters: BTreeMap<String, String>,
        inputs: BTreeMap<String, String>,
        reports: BTreeMap<String, String>,
    }
    reports::write_json(
        &paths.manifest,
        &Manifest {
            tool: "echograph",
            version: env!("CARGO_PKG_VERSION"),
            parameters: config.parameters(),
            inputs,
            reports: report_digests,
        },
    )?;
    log("run: complete");

    Ok(PipelineOutcome {
        stats: stats.stats,
        graph_nodes: graph.node_count(),
        graph_edges: graph.edge_count(),
        seed_count,
        group_counts,
        prevalence,
        share,
        profile,
        centrality,
        affect: affect_report,
        eval: eval_report,
        manifest_path: paths.manifest,
    })
}

fn self_loop_name(config: &PipelineConfig) -> &'static str {
    config.self_loop.as_str()
}
