//! JSON and plot-ready CSV exports for the analytics results. JSON output
//! uses sorted maps and fixed field order throughout, so identical inputs
//! serialize to identical bytes.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::Result;
use serde::Serialize;

use echograph_core::analytics::{
    AffectReport, CentralityReport, ContentShare, GroupProfile, LogBin, MetricSummary,
    PrevalenceReport, EMOTIONS,
};
use echograph_core::evaluation::{PrPoint, UserEvalReport};
use echograph_core::segmentation::Group;

use crate::csvio::{write_table, write_text};

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_text(path, &text)
}

fn f(v: f64) -> String {
    v.to_string()
}

pub fn write_profile_reports(
    json_path: &Path,
    csv_path: &Path,
    profile: &BTreeMap<Group, GroupProfile>,
) -> Result<()> {
    write_json(json_path, profile)?;
    let mut rows = Vec::new();
    let mut push = |group: Group, metric: &str, s: &MetricSummary| {
        rows.push(vec![
            group.as_str().to_string(),
            metric.to_string(),
            s.count.to_string(),
            f(s.mean),
            f(s.median),
            f(s.std_dev),
            f(s.trim_lo),
            f(s.trim_hi),
        ]);
    };
    for (&group, p) in profile {
        push(group, "posts", &p.originals);
        push(group, "replies", &p.replies);
        push(group, "reposts", &p.reposts);
        push(group, "age_days", &p.age_days);
        if let Some(s) = &p.followers {
            push(group, "followers", s);
        }
        if let Some(s) = &p.followees {
            push(group, "followees", s);
        }
        if let Some(s) = &p.bio_length {
            push(group, "bio_length", s);
        }
        rows.push(vec![
            group.as_str().to_string(),
            "bio_present".to_string(),
            p.members.to_string(),
            f(p.bio_present_fraction),
            String::new(),
            String::new(),
            String::new(),
            String::new(),
        ]);
    }
    write_table(
        csv_path,
        &["group", "metric", "count", "mean", "median", "std", "trim_lo", "trim_hi"],
        &rows,
    )
}

pub fn write_share_reports(json_path: &Path, csv_path: &Path, share: &ContentShare) -> Result<()> {
    write_json(json_path, share)?;
    let rows: Vec<Vec<String>> = share
        .by_group
        .iter()
        .map(|(group, row)| {
            vec![
                group.as_str().to_string(),
                row.n_originals.to_string(),
                row.n_replies.to_string(),
                row.n_reposts.to_string(),
                f(row.originals),
                f(row.replies),
                f(row.reposts),
                f(row.all),
            ]
        })
        .collect();
    write_table(
        csv_path,
        &[
            "group",
            "n_posts",
            "n_replies",
            "n_reposts",
            "share_posts",
            "share_replies",
            "share_reposts",
            "share_all",
        ],
        &rows,
    )
}

pub fn write_centrality_reports(
    json_path: &Path,
    csv_path: &Path,
    report: &CentralityReport,
) -> Result<()> {
    write_json(json_path, report)?;
    let rows: Vec<Vec<String>> = report
        .by_group
        .iter()
        .map(|(group, row)| {
            vec![
                group.as_str().to_string(),
                row.members_in_graph.to_string(),
                f(row.in_degree),
                f(row.out_degree),
                f(row.in_degree_weighted),
                f(row.out_degree_weighted),
                f(row.betweenness),
                f(row.pagerank),
            ]
        })
        .collect();
    write_table(
        csv_path,
        &[
            "group",
            "members",
            "id_centrality",
            "od_centrality",
            "id_centrality_weighted",
            "od_centrality_weighted",
            "betweenness",
            "pagerank",
        ],
        &rows,
    )
}

pub fn write_degree_dist_reports(
    json_path: &Path,
    csv_path: &Path,
    dist: &BTreeMap<Group, Vec<(u64, f64)>>,
    log_bins: Option<&BTreeMap<Group, Vec<LogBin>>>,
    log_csv_path: &Path,
) -> Result<()> {
    write_json(json_path, dist)?;
    let mut rows = Vec::new();
    for (group, pmf) in dist {
        for &(k, p) in pmf {
            rows.push(vec![group.as_str().to_string(), k.to_string(), f(p)]);
        }
    }
    write_table(csv_path, &["group", "degree", "p"], &rows)?;
    if let Some(binned) = log_bins {
        let mut rows = Vec::new();
        for (group, bins) in binned {
            for bin in bins {
                rows.push(vec![
                    group.as_str().to_string(),
                    f(bin.lo),
                    f(bin.hi),
                    f(bin.p),
                ]);
            }
        }
        write_table(log_csv_path, &["group", "bin_lo", "bin_hi", "p"], &rows)?;
    }
    Ok(())
}

pub fn write_prevalence_report(json_path: &Path, report: &PrevalenceReport) -> Result<()> {
    write_json(json_path, report)
}

pub fn write_affect_reports(json_path: &Path, csv_path: &Path, report: &AffectReport) -> Result<()> {
    write_json(json_path, report)?;
    let mut rows = Vec::new();
    for (group, summary) in &report.by_group {
        let mut row = vec![group.as_str().to_string(), summary.n_posts.to_string()];
        row.extend(summary.emotion_shares.iter().map(|&s| f(s)));
        row.push(f(summary.median_sentiment));
        rows.push(row);
    }
    let mut header = vec!["group", "n_posts"];
    header.extend(EMOTIONS.iter().map(|e| e.as_str()));
    header.push("median_sentiment");
    write_table(csv_path, &header, &rows)
}

pub fn write_user_eval_report(json_path: &Path, report: &UserEvalReport) -> Result<()> {
    write_json(json_path, report)
}

pub fn write_pr_curve(csv_path: &Path, points: &[PrPoint]) -> Result<()> {
    let rows: Vec<Vec<String>> = points
        .iter()
        .map(|p| vec![f(p.threshold), f(p.precision), f(p.recall)])
        .collect();
    write_table(csv_path, &["threshold", "precision", "recall"], &rows)
}
