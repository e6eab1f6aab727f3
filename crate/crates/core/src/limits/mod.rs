//! Infinitesimal arrays, their limit laws and bi-free infinite divisibility.

mod approx;
mod array;
mod boundary;
mod levy;

pub use approx::{id_from_levy_poisson_approx, PoissonApprox};
pub use array::{
    accompany, centering_constant, normal_row, poisson_row, h_function, haar_limit_check,
    limit_parameters, limit_sweep, p3_bound, richardson_ratio, ArrayRow, HaarLevel, HaarLimitReport,
    InfinitesimalArray, SweepLevel, SweepReport, DEFAULT_CUTOFF,
};
pub use boundary::{
    levy_sigma_extract, sigma_convergence_table, SigmaApproximant, CONVERGENCE_RADII, DEFAULT_BOUNDARY_RADIUS,
};
pub use levy::{f_kernel, id_law, id_root, poisson_sigma_closed, LevyData, COMPATIBILITY_TOL};
