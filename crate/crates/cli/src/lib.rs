//! File formats, caching, and pipeline orchestration for the echograph
//! command-line tool. The algorithms live in `echograph-core`; this crate
//! owns everything that touches a file descriptor.

pub mod cache;
pub mod csvio;
pub mod ingest;
pub mod parallel;
pub mod pipeline;
pub mod reports;

pub use echograph_core as core;
