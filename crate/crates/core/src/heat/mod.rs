//! Heat kernels on H3 and on its quotients.

pub mod checks;
pub mod kernel;
pub mod quotient;

pub use checks::{
    chopped_integrals, derivative_grid_check, gaussian_tail_check, sandwich_grid, sandwich_ratio, Chopped,
    DerivativeReport, GaussianTail, SandwichReport,
};
pub use kernel::{dp3_drho, ln_p3, p3, p5, semigroup_defect, total_mass};
pub use quotient::{
    injectivity_lower_bound, log_limit_estimate, neumaier_sum, quotient_kernel, stieltjes_check, upper_bound_ratio,
    upper_bound_table, CountingBound, HeatValue, LogLimit, StieltjesReport, UpperBoundRow,
};
