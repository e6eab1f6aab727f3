//! Boundary recovery of the marginal Lévy measure from `η⁻¹` near `T`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::convolution::FreeLaw1D;
use crate::error::{Error, Result};

pub const DEFAULT_BOUNDARY_RADIUS: f64 = 0.995;
/// Radii of [`sigma_convergence_table`].
pub const CONVERGENCE_RADII: [f64; 3] = [0.9, 0.99, 0.995];

/// Samples of `(1/2π) log(|η⁻¹(re^{iθ})|/r)` on a uniform grid, read as a
/// density for `σ` at `e^{−iθ}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SigmaApproximant {
    pub radius: f64,
    pub thetas: Vec<f64>,
    pub density: Vec<f64>,
    /// `|m|/m` of the law.
    pub gamma: Complex64,
}

impl SigmaApproximant {
    /// Midpoint rule for `∫ φ(e^{−iθ}) density(θ) dθ`.
    pub fn integrate<F: Fn(Complex64) -> Complex64>(&self, phi: F) -> Complex64 {
        let step = 2.0 * PI / self.thetas.len() as f64;
        self.thetas
            .iter()
            .zip(&self.density)
            .map(|(&theta, &d)| phi(Complex64::from_polar(1.0, -theta)) * d * step)
            .sum()
    }

    pub fn total_mass(&self) -> f64 {
        self.integrate(|_| Complex64::new(1.0, 0.0)).re
    }
}

pub fn levy_sigma_extract(fl: &FreeLaw1D, r: f64, grid: usize) -> Result<SigmaApproximant> {
    if !(r > 0.0 && r < 1.0) || grid < 4 {
        return Err(Error::InvalidArgument(format!("radius {r} or grid {grid} out of range")));
    }
    let thetas: Vec<f64> = (0..grid).map(|k| -PI + 2.0 * PI * (k as f64 + 0.5) / grid as f64).collect();
    let density = thetas
        .iter()
        .map(|&theta| Ok((fl.eta_inv(Complex64::from_polar(r, theta))?.norm() / r).ln() / (2.0 * PI)))
        .collect::<Result<Vec<f64>>>()?;
    let m = fl.mean();
    Ok(SigmaApproximant {
        radius: r,
        thetas,
        density,
        gamma: m.norm() / m,
    })
}

/// Approximants at each of [`CONVERGENCE_RADII`], for judging how far the
/// finite-radius density is from its boundary limit.
pub fn sigma_convergence_table(fl: &FreeLaw1D, grid: usize) -> Result<Vec<SigmaApproximant>> {
    CONVERGENCE_RADII.iter().map(|&r| levy_sigma_extract(fl, r, grid)).collect()
}
