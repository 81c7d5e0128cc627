//! Weighted graph models of the coarse geometry of quotient manifolds.

pub mod analysis;
pub mod discretise;
pub mod models;
pub mod spectral;
pub mod walk;
pub mod weighted;

pub use analysis::{
    delta_f, doubling_constant, poincare_random, poincare_sup, radial_sobolev_check, sobolev_report, PoincareReport,
    RadialProfile, SobolevReport, SobolevRow,
};
pub use discretise::{discretise, orbit_points, quasi_isometry, Net, QuasiIsometry};
pub use models::{build_mixed, build_star, Component, GfModel, Part, RadialModel};
pub use spectral::{dirichlet_bottom, spectral_bottom, spectral_sweep, SpectralSweep, DEPTHS};
pub use walk::{
    absorbed_ray_return, decay_fit, series_csv, walk_depth, walk_distribution, walk_kernel, AbsorbedSeries, DecayFit,
    WalkSeries,
};
pub use weighted::{VertexLabel, WeightedGraph};
