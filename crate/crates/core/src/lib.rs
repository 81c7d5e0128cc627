//! Orbit counting, hyperbolic heat kernels and weighted-graph walk models for
//! groups of isometries of hyperbolic 3-space.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod error;
pub mod fit;
pub mod graph;
pub mod heat;
pub mod hyperbolic;
pub mod orbits;
pub mod par;
pub mod quad;

pub use error::{Error, Result};
pub use hyperbolic::{dist, Isometry, PointH3};

/// Crate version, echoed in provenance headers.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
