//! Core algorithms for repost-network hate analysis: weighted repost-graph
//! construction, belief-network normalization, DeGroot-style belief diffusion
//! with a clamped-seed variant, user segmentation, annotation aggregation,
//! centrality measures, and group-level analytics.
//!
//! This crate is `no_std`-compatible (`alloc` required). All file formats,
//! ingestion, and the command-line front end live in the companion
//! `echograph` crate.
//!
//! Everything here is deterministic: node influence lists are summed in a
//! canonical order, all randomness flows through the counter-based generator
//! in [`rng`], and identical inputs produce bitwise-identical outputs
//! regardless of how the work is scheduled.

#![cfg_attr(not(feature = "std"), no_std)]
#![deny(unsafe_code)]

extern crate alloc;

#[cfg(all(not(feature = "std"), not(feature = "libm")))]
compile_error!("echograph-core requires either the `std` or the `libm` feature");

pub mod analytics;
pub mod annotations;
pub mod centrality;
pub mod diffusion;
pub mod evaluation;
pub mod graph;
pub mod records;
pub mod rng;
pub mod scoring;
pub mod segmentation;
pub mod synth;

mod math;

#[cfg(test)]
pub(crate) mod testutil;

pub use graph::{BeliefNetwork, RepostGraph, RepostGraphBuilder, SelfLoopPolicy};
pub use records::{CorpusStats, PostKind, PostRecord, UserId, UserRecord};
