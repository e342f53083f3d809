//! CSV readers and writers for the flat tables the pipeline exchanges:
//! scores, beliefs, group assignments, annotation triples, affect labels,
//! user labels, and the plain-text lexicon. All tables carry a header row;
//! floats are written in Rust's shortest round-trip form.

use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};

use echograph_core::analytics::{AffectInput, Emotion};
use echograph_core::annotations::AnnotationTriple;
use echograph_core::evaluation::UserLabel;
use echograph_core::records::UserId;
use echograph_core::scoring::{Lexicon, ScoreSet};
use echograph_core::segmentation::{Group, GroupAssignment};

fn reader(path: &Path) -> Result<csv::Reader<File>> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_path(path)
        .with_context(|| format!("cannot open {}", path.display()))
}

fn writer(path: &Path) -> Result<csv::Writer<File>> {
    csv::WriterBuilder::new()
        .from_path(path)
        .with_context(|| format!("cannot create {}", path.display()))
}

/// `post_id,score` with scores validated into `[0, 1]`.
pub fn read_scores(path: &Path) -> Result<ScoreSet> {
    let mut rdr = reader(path)?;
    let mut rows = Vec::new();
    for (idx, record) in rdr.records().enumerate() {
        let record = record.with_context(|| format!("{}: row {}", path.display(), idx + 2))?;
        if record.len() != 2 {
            bail!("{}: row {}: expected 2 columns", path.display(), idx + 2);
        }
        let score: f64 = record[1]
            .trim()
            .parse()
            .with_context(|| format!("{}: row {}: bad score", path.display(), idx + 2))?;
        rows.push((record[0].to_string(), score));
    }
    ScoreSet::from_rows(rows).with_context(|| format!("invalid scores in {}", path.display()))
}

pub fn write_scores<'a>(
    path: &Path,
    rows: impl Iterator<Item = (&'a str, f64)>,
) -> Result<()> {
    let mut wtr = writer(path)?;
    wtr.write_record(["post_id", "score"])?;
    for (post_id, score) in rows {
        wtr.write_record([post_id, &score.to_string()])?;
    }
    wtr.flush()?;
    Ok(())
}

/// Lexicon file: one term per line, `#` starts a comment.
pub fn read_lexicon(path: &Path, plural_s: bool) -> Result<Lexicon> {
    let file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    let mut terms = Vec::new();
    for line in BufReader::new(file).lines() {
        let line = line?;
        let term = line.split('#').next().unwrap_or("").trim();
        if !term.is_empty() {
            terms.push(term.to_string());
        }
    }
    Lexicon::new(terms, plural_s).with_context(|| format!("invalid lexicon {}", path.display()))
}

/// `user_id,belief,is_seed`.
pub fn write_beliefs<'a>(
    path: &Path,
    rows: impl Iterator<Item = (&'a str, f64, bool)>,
) -> Result<()> {
    let mut wtr = writer(path)?;
    wtr.write_record(["user_id", "belief", "is_seed"])?;
    for (user, belief, is_seed) in rows {
        wtr.write_record([user, &belief.to_string(), if is_seed { "true" } else { "false" }])?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn read_beliefs(path: &Path) -> Result<Vec<(UserId, f64, bool)>> {
    let mut rdr = reader(path)?;
    let mut rows = Vec::new();
    for (idx, record) in rdr.records().enumerate() {
        let record = record?;
        if record.len() != 3 {
            bail!("{}: row {}: expected 3 columns", path.display(), idx + 2);
        }
        let belief: f64 = record[1].trim().parse()?;
        let is_seed = match record[2].trim() {
            "true" | "1" => true,
            "false" | "0" => false,
            other => bail!("{}: row {}: bad is_seed `{other}`", path.display(), idx + 2),
        };
        rows.push((UserId::new(&record[0]), belief, is_seed));
    }
    Ok(rows)
}

/// `user_id,group,belief` with the group wire names.
pub fn write_groups(path: &Path, assignments: &[GroupAssignment]) -> Result<()> {
    let mut wtr = writer(path)?;
    wtr.write_record(["user_id", "group", "belief"])?;
    for a in assignments {
        wtr.write_record([a.user_id.as_str(), a.group.as_str(), &a.belief.to_string()])?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn read_groups(path: &Path) -> Result<Vec<GroupAssignment>> {
    let mut rdr = reader(path)?;
    let mut rows = Vec::new();
    for (idx, record) in rdr.records().enumerate() {
        let record = record?;
        if record.len() != 3 {
            bail!("{}: row {}: expected 3 columns", path.display(), idx + 2);
        }
        let group = Group::parse(record[1].trim()).with_context(|| {
            format!("{}: row {}: unknown group `{}`", path.display(), idx + 2, &record[1])
        })?;
        rows.push(GroupAssignment {
            user_id: UserId::new(&record[0]),
            group,
            belief: record[2].trim().parse()?,
        });
    }
    Ok(rows)
}

/// `post_id,score1,score2,score3`.
pub fn read_annotations(path: &Path) -> Result<Vec<AnnotationTriple>> {
    let mut rdr = reader(path)?;
    let mut rows = Vec::new();
    for (idx, record) in rdr.records().enumerate() {
        let record = record?;
        if record.len() != 4 {
            bail!("{}: row {}: expected 4 columns", path.display(), idx + 2);
        }
        let mut scores = [0u8; 3];
        for (slot, field) in scores.iter_mut().zip(record.iter().skip(1)) {
            *slot = field
                .trim()
                .parse()
                .with_context(|| format!("{}: row {}: bad score", path.display(), idx + 2))?;
        }
        rows.push(
            AnnotationTriple::new(record[0].to_string(), scores)
                .with_context(|| format!("{}: row {}", path.display(), idx + 2))?,
        );
    }
    Ok(rows)
}

/// `post_id,label,mean` written from aggregation output.
pub fn write_aggregated(
    path: &Path,
    labels: &[echograph_core::annotations::AggregatedLabel],
) -> Result<()> {
    let mut wtr = writer(path)?;
    wtr.write_record(["post_id", "label", "mean"])?;
    for row in labels {
        wtr.write_record([&row.post_id, row.label.as_str(), &row.mean_score.to_string()])?;
    }
    wtr.flush()?;
    Ok(())
}

/// `post_id,sentiment,emotion`.
pub fn read_affect(path: &Path) -> Result<Vec<AffectInput>> {
    let mut rdr = reader(path)?;
    let mut rows = Vec::new();
    for (idx, record) in rdr.records().enumerate() {
        let record = record?;
        if record.len() != 3 {
            bail!("{}: row {}: expected 3 columns", path.display(), idx + 2);
        }
        let sentiment: f64 = record[1].trim().parse()?;
        let emotion = Emotion::parse(record[2].trim().to_lowercase().as_str())
            .with_context(|| format!("{}: row {}: unknown emotion `{}`", path.display(), idx + 2, &record[2]))?;
        rows.push(
            AffectInput::new(record[0].to_string(), sentiment, emotion)
                .with_context(|| format!("{}: row {}", path.display(), idx + 2))?,
        );
    }
    Ok(rows)
}

/// `user_id,label` where the label is `1`/`0`, `true`/`false`, or
/// `hateful`/`non_hateful`.
pub fn read_user_labels(path: &Path) -> Result<Vec<UserLabel>> {
    let mut rdr = reader(path)?;
    let mut rows = Vec::new();
    for (idx, record) in rdr.records().enumerate() {
        let record = record?;
        if record.len() != 2 {
            bail!("{}: row {}: expected 2 columns", path.display(), idx + 2);
        }
        let is_hateful = match record[1].trim().to_lowercase().as_str() {
            "1" | "true" | "hateful" | "hate" => true,
            "0" | "false" | "non_hateful" | "normal" => false,
            other => bail!("{}: row {}: bad label `{other}`", path.display(), idx + 2),
        };
        rows.push(UserLabel {
            user_id: UserId::new(&record[0]),
            is_hateful,
        });
    }
    Ok(rows)
}

/// `post_id,stratum,score` for annotation samples.
pub fn write_sample(path: &Path, sample: &[echograph_core::annotations::SampledPost]) -> Result<()> {
    let mut wtr = writer(path)?;
    wtr.write_record(["post_id", "stratum", "score"])?;
    for row in sample {
        wtr.write_record([&row.post_id, &row.stratum.to_string(), &row.score.to_string()])?;
    }
    wtr.flush()?;
    Ok(())
}

/// `user_id,community` ground truth from the synthetic generator; background
/// users get an empty community field.
pub fn write_ground_truth(path: &Path, rows: &[(UserId, Option<u32>)]) -> Result<()> {
    let mut wtr = writer(path)?;
    wtr.write_record(["user_id", "community"])?;
    for (user, community) in rows {
        let field = community.map(|c| c.to_string()).unwrap_or_default();
        wtr.write_record([user.as_str(), &field])?;
    }
    wtr.flush()?;
    Ok(())
}

/// Generic two-or-more-column table writer used by the report exporters.
pub fn write_table(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut wtr = writer(path)?;
    wtr.write_record(header)?;
    for row in rows {
        wtr.write_record(row)?;
    }
    wtr.flush()?;
    Ok(())
}

/// Write `text` to `path`, creating parent directories.
pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    let mut file = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    file.write_all(text.as_bytes())?;
    Ok(())
}
