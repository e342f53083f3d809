//! Shared fixtures for unit tests.

use alloc::format;
use alloc::vec::Vec;

use crate::graph::{RepostGraph, RepostGraphBuilder, SelfLoopPolicy};
use crate::records::{PostKind, PostRecord, UserId};

/// Graph from explicit repost edges `(reposter, author, count)`; authored
/// self-loop counts stay at zero.
pub(crate) fn graph_from_edges(edges: &[(&str, &str, u64)]) -> RepostGraph {
    let mut builder = RepostGraphBuilder::new(SelfLoopPolicy::Originals);
    let mut serial = 0;
    for &(src, dst, count) in edges {
        for _ in 0..count {
            serial += 1;
            builder.observe(&PostRecord {
                id: format!("r{serial}"),
                author: UserId::from(src),
                kind: PostKind::Repost,
                parent_id: Some(format!("x{serial}")),
                root_author: Some(UserId::from(dst)),
                created_at: 0,
                body: None,
            });
        }
    }
    builder.finish()
}

/// Convenience: borrow an owned edge list.
pub(crate) fn borrow_edges(edges: &[(alloc::string::String, alloc::string::String)]) -> Vec<(&str, &str, u64)> {
    edges.iter().map(|(a, b)| (a.as_str(), b.as_str(), 1)).collect()
}
