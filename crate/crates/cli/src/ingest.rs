//! Streaming ingestion of newline-delimited post and user dumps.
//!
//! One JSON object per line. Posts carry `id`, `author`, `kind`,
//! `parent_id`, `root_author`, `created_at`, `body`; users carry `id`,
//! `registered_at`, `followers`, `followees`, `bio`. Timestamps may be
//! integer epoch seconds or ISO-8601 text and are normalized to epoch
//! seconds. A missing `kind` is inferred: a record with a `root_author` is a
//! repost, one with only a `parent_id` is a reply, anything else is an
//! original.
//!
//! Malformed lines are skipped and counted in lenient mode; strict mode
//! aborts with the offending line number. Records written back out with the
//! `write_*` functions use a canonical field order and integer timestamps,
//! so a parse → serialize → parse cycle is lossless.

use std::io::{BufRead, Write};

use chrono::{DateTime, NaiveDate, NaiveDateTime};
use serde::{Deserialize, Serialize};

use echograph_core::records::{PostKind, PostRecord, UserId, UserRecord};

#[derive(Debug, thiserror::Error)]
pub enum IngestError {
    #[error("line {line}: {reason}")]
    Malformed { line: u64, reason: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Accepts both integer epoch seconds and textual timestamps.
#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(untagged)]
enum TimeValue {
    Seconds(i64),
    Text(String),
}

fn parse_timestamp(value: &TimeValue) -> Option<i64> {
    match value {
        TimeValue::Seconds(s) => Some(*s),
        TimeValue::Text(text) => {
            if let Ok(s) = text.parse::<i64>() {
                return Some(s);
            }
            if let Ok(dt) = DateTime::parse_from_rfc3339(text) {
                return Some(dt.timestamp());
            }
            for format in ["%Y-%m-%dT%H:%M:%S", "%Y-%m-%d %H:%M:%S"] {
                if let Ok(dt) = NaiveDateTime::parse_from_str(text, format) {
                    return Some(dt.and_utc().timestamp());
                }
            }
            NaiveDate::parse_from_str(text, "%Y-%m-%d")
                .ok()
                .map(|d| d.and_hms_opt(0, 0, 0).unwrap().and_utc().timestamp())
        }
    }
}

#[derive(Debug, Deserialize)]
struct RawPost {
    id: Option<String>,
    author: Option<String>,
    kind: Option<String>,
    parent_id: Option<String>,
    root_author: Option<String>,
    created_at: Option<TimeValue>,
    body: Option<String>,
}

fn convert_post(raw: RawPost) -> Result<PostRecord, String> {
    let id = match raw.id {
        Some(id) if !id.is_empty() => id,
        _ => return Err("missing or empty id".into()),
    };
    let author = match raw.author {
        Some(a) if !a.is_empty() => UserId::new(a),
        _ => return Err("missing or empty author".into()),
    };
    let kind = match raw.kind.as_deref() {
        Some(k) => PostKind::parse(k).ok_or_else(|| format!("unknown kind `{k}`"))?,
        None if raw.root_author.is_some() => PostKind::Repost,
        None if raw.parent_id.is_some() => PostKind::Reply,
        None => PostKind::Original,
    };
    if kind != PostKind::Original && raw.parent_id.is_none() && raw.root_author.is_none() {
        return Err(format!("{} without parent_id or root_author", kind.as_str()));
    }
    let created_at = raw
        .created_at
        .as_ref()
        .and_then(parse_timestamp)
        .ok_or("missing or unparseable created_at")?;
    Ok(PostRecord {
        id,
        author,
        kind,
        parent_id: raw.parent_id.filter(|p| !p.is_empty()),
        root_author: raw.root_author.filter(|r| !r.is_empty()).map(UserId::new),
        created_at,
        body: raw.body,
    })
}

#[derive(Debug, Deserialize)]
struct RawUser {
    id: Option<String>,
    registered_at: Option<TimeValue>,
    followers: Option<i64>,
    followees: Option<i64>,
    bio: Option<String>,
}

fn convert_user(raw: RawUser) -> Result<UserRecord, String> {
    let id = match raw.id {
        Some(id) if !id.is_empty() => UserId::new(id),
        _ => return Err("missing or empty id".into()),
    };
    let registered_at = match &raw.registered_at {
        None => None,
        Some(v) => Some(parse_timestamp(v).ok_or("unparseable registered_at")?),
    };
    let count = |v: Option<i64>, name: &str| -> Result<Option<u64>, String> {
        match v {
            None => Ok(None),
            Some(n) if n >= 0 => Ok(Some(n as u64)),
            Some(n) => Err(format!("negative {name} count {n}")),
        }
    };
    Ok(UserRecord {
        id,
        registered_at,
        follower_count: count(raw.followers, "follower")?,
        followee_count: count(raw.followees, "followee")?,
        bio: raw.bio,
    })
}

/// Per-run ingestion tallies. `parsed + skipped` equals the number of input
/// lines.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct IngestReport {
    pub parsed: u64,
    pub skipped: u64,
    /// First few skip reasons, as `line N: reason`.
    pub skip_samples: Vec<String>,
}

const SKIP_SAMPLES: usize = 5;

fn ingest_lines<T, R: BufRead>(
    reader: R,
    strict: bool,
    parse: impl Fn(&str) -> Result<T, String>,
    mut sink: impl FnMut(T),
) -> Result<IngestReport, IngestError> {
    let mut report = IngestReport::default();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = idx as u64 + 1;
        match parse(&line) {
            Ok(record) => {
                report.parsed += 1;
                sink(record);
            }
            Err(reason) if strict => {
                return Err(IngestError::Malformed {
                    line: lineno,
                    reason,
                })
            }
            Err(reason) => {
                report.skipped += 1;
                if report.skip_samples.len() < SKIP_SAMPLES {
                    report.skip_samples.push(format!("line {lineno}: {reason}"));
                }
            }
        }
    }
    Ok(report)
}

fn parse_post_line(line: &str) -> Result<PostRecord, String> {
    if line.trim().is_empty() {
        return Err("empty line".into());
    }
    let raw: RawPost = serde_json::from_str(line).map_err(|e| e.to_string())?;
    convert_post(raw)
}

fn parse_user_line(line: &str) -> Result<UserRecord, String> {
    if line.trim().is_empty() {
        return Err("empty line".into());
    }
    let raw: RawUser = serde_json::from_str(line).map_err(|e| e.to_string())?;
    convert_user(raw)
}

/// Stream-parse posts, passing each valid record to `sink`.
pub fn parse_posts_with<R: BufRead>(
    reader: R,
    strict: bool,
    sink: impl FnMut(PostRecord),
) -> Result<IngestReport, IngestError> {
    ingest_lines(reader, strict, parse_post_line, sink)
}

pub fn parse_posts<R: BufRead>(
    reader: R,
    strict: bool,
) -> Result<(Vec<PostRecord>, IngestReport), IngestError> {
    let mut posts = Vec::new();
    let report = parse_posts_with(reader, strict, |p| posts.push(p))?;
    Ok((posts, report))
}

/// Parse users, deduplicated by id with the last record winning.
pub fn parse_users<R: BufRead>(
    reader: R,
    strict: bool,
) -> Result<(Vec<UserRecord>, IngestReport), IngestError> {
    let mut order: Vec<UserId> = Vec::new();
    let mut latest: std::collections::HashMap<UserId, UserRecord> = std::collections::HashMap::new();
    let report = ingest_lines(reader, strict, parse_user_line, |user: UserRecord| {
        if !latest.contains_key(&user.id) {
            order.push(user.id.clone());
        }
        latest.insert(user.id.clone(), user);
    })?;
    let users = order
        .into_iter()
        .map(|id| latest.remove(&id).unwrap())
        .collect();
    Ok((users, report))
}

/// Canonical single-line JSON for a post: fixed key order, integer
/// timestamp, absent optionals omitted.
pub fn post_to_line(post: &PostRecord) -> String {
    #[derive(Serialize)]
    struct Canon<'a> {
        id: &'a str,
        author: &'a str,
        kind: &'a str,
        #[serde(skip_serializing_if = "Option::is_none")]
        parent_id: Option<&'a str>,
        #[serde(skip_serializing_if = "Option::is_none")]
        root_author: Option<&'a str>,
        created_at: i64,
        #[serde(skip_serializing_if = "Option::is_none")]
        body: Option<&'a str>,
    }
    serde_json::to_string(&Canon {
        id: &post.id,
        author: post.author.as_str(),
        kind: post.kind.as_str(),
        parent_id: post.parent_id.as_deref(),
        root_author: post.root_author.as_ref().map(|r| r.as_str()),
        created_at: post.created_at,
        body: post.body.as_deref(),
    })
    .expect("post serialization cannot fail")
}

pub fn user_to_line(user: &UserRecord) -> String {
    #[derive(Serialize)]
    struct Canon<'a> {
        id: &'a str,
        #[serde(skip_serializing_if = "Option::is_none")]
        registered_at: Option<i64>,
        #[serde(skip_serializing_if = "Option::is_none")]
        followers: Option<u64>,
        #[serde(skip_serializing_if = "Option::is_none")]
        followees: Option<u64>,
        #[serde(skip_serializing_if = "Option::is_none")]
        bio: Option<&'a str>,
    }
    serde_json::to_string(&Canon {
        id: user.id.as_str(),
        registered_at: user.registered_at,
        followers: user.follower_count,
        followees: user.followee_count,
        bio: user.bio.as_deref(),
    })
    .expect("user serialization cannot fail")
}

pub fn write_posts<W: Write>(mut out: W, posts: &[PostRecord]) -> std::io::Result<()> {
    for post in posts {
        writeln!(out, "{}", post_to_line(post))?;
    }
    Ok(())
}

pub fn write_users<W: Write>(mut out: W, users: &[UserRecord]) -> std::io::Result<()> {
    for user in users {
        writeln!(out, "{}", user_to_line(user))?;
    }
    Ok(())
}
