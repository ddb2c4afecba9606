//! Spatiotemporal persistence landscapes of time series.
//!
//! The pipeline delay-embeds a series, cuts it into windows, builds Rips
//! complexes on each window and on each pair of neighbouring windows, and
//! reads generalized-rank invariants of the resulting grid of homology groups.

pub mod complex;
pub mod error;
pub mod f2linalg;
pub mod grid;
pub mod homology;
pub mod landscape;
pub mod pipeline;
pub mod signal;
pub mod zigzag;

pub use error::{Error, Result};
