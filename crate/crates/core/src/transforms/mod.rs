//! Pointwise and series evaluation of the ψ, H, η, η⁻¹, Σ, S, Σᵒᵖ and Sᵒᵖ
//! transforms of atomic measures, and the evaluator form [`TransformLaw`].

mod expansion;
mod inverse;
mod law;
mod sigma;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::{AtomicMeasure1D, AtomicMeasure2D};

pub use expansion::{sigma_series, sigma_series_from_table};
pub use inverse::{eta_inv_pointwise, eta_ratio, psi_inv};
pub(crate) use inverse::{eta_ratio_with_derivative, solve_inverse_ratio};
pub use law::{CoordinatePoint, LawFactor, Provenance, TransformLaw};
pub use sigma::{
    s_op_transform, s_transform, sigma_op_pointwise, sigma_pointwise, AtomicKernel,
};

/// Evaluation is refused when `| |z| - 1 | <` this band.
pub const TORUS_BAND: f64 = 1e-9;

/// Initial radius of the adaptive window search.
pub const WINDOW_START: f64 = 0.5;
/// Smallest radius the adaptive window search will try.
pub const WINDOW_MIN: f64 = 0.05;
/// Required lower bound on `|H|`-type denominators on the sampled ring.
pub const DENOMINATOR_MARGIN: f64 = 0.1;

/// Which connected component of `(ℂ∖T)²` a point lies in: `D` is the open
/// unit disk, `U` the exterior of the closed disk.
#[allow(clippy::upper_case_acronyms)]
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DomainComponent {
    DD,
    DU,
    UD,
    UU,
}

impl DomainComponent {
    pub fn classify(z: Complex64, w: Complex64) -> Result<Self> {
        let bz = is_bounded(z)?;
        let bw = is_bounded(w)?;
        Ok(match (bz, bw) {
            (true, true) => Self::DD,
            (true, false) => Self::DU,
            (false, true) => Self::UD,
            (false, false) => Self::UU,
        })
    }

    pub fn tag(self) -> &'static str {
        match self {
            Self::DD => "DD",
            Self::DU => "DU",
            Self::UD => "UD",
            Self::UU => "UU",
        }
    }
}

/// `true` inside the disk, `false` outside; error within [`TORUS_BAND`]
/// of the circle or for non-finite input.
pub fn is_bounded(z: Complex64) -> Result<bool> {
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::InvalidArgument(format!("non-finite point {z}")));
    }
    let r = z.norm();
    if (r - 1.0).abs() < TORUS_BAND {
        return Err(Error::OnTorus(z));
    }
    Ok(r < 1.0)
}

/// `1 / conj(z)`, the reflection across the unit circle.
pub fn reflect_point(z: Complex64) -> Complex64 {
    1.0 / z.conj()
}

/// The working radius `r` of `Ω_r = (D_r ∪ Δ_r)²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DomainWindow {
    pub r: f64,
}

impl DomainWindow {
    pub fn new(r: f64) -> Result<Self> {
        if !(r > 0.0 && r < 1.0) {
            return Err(Error::InvalidArgument(format!("window radius {r} not in (0,1)")));
        }
        Ok(Self { r })
    }

    /// `z ∈ D_r ∪ Δ_r`.
    pub fn contains(&self, z: Complex64) -> bool {
        let m = z.norm();
        m < self.r || m > 1.0 / self.r
    }

    pub fn check(&self, z: Complex64) -> Result<()> {
        if self.contains(z) {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!(
                "point {z} outside the window of radius {}",
                self.r
            )))
        }
    }

    pub fn halved(&self) -> Self {
        Self { r: self.r / 2.0 }
    }
}

impl Default for DomainWindow {
    fn default() -> Self {
        Self { r: WINDOW_START }
    }
}

/// `ψ_ν(z) = ∫ zx/(1−zx) dν(x)`.
pub fn psi1(nu: &AtomicMeasure1D, z: Complex64) -> Result<Complex64> {
    is_bounded(z)?;
    Ok(psi1_unchecked(nu, z))
}

pub(crate) fn psi1_unchecked(nu: &AtomicMeasure1D, z: Complex64) -> Complex64 {
    nu.points()
        .iter()
        .map(|&(x, wt)| wt * (z * x) / (1.0 - z * x))
        .sum()
}

/// `ψ_μ(z,w) = ∫ zs/(1−zs) · wt/(1−wt) dμ(s,t)`.
pub fn psi2(mu: &AtomicMeasure2D, z: Complex64, w: Complex64) -> Result<Complex64> {
    DomainComponent::classify(z, w)?;
    Ok(mu
        .points()
        .iter()
        .map(|&(s, t, wt)| wt * (z * s) / (1.0 - z * s) * (w * t) / (1.0 - w * t))
        .sum())
}

/// `H_μ(z,w) = ∫ 1/((1−zs)(1−wt)) dμ(s,t)`.
pub fn h2(mu: &AtomicMeasure2D, z: Complex64, w: Complex64) -> Result<Complex64> {
    DomainComponent::classify(z, w)?;
    Ok(mu
        .points()
        .iter()
        .map(|&(s, t, wt)| wt / ((1.0 - z * s) * (1.0 - w * t)))
        .sum())
}

/// `η_ν(z) = ψ_ν(z) / (1 + ψ_ν(z))`.
pub fn eta(nu: &AtomicMeasure1D, z: Complex64) -> Result<Complex64> {
    let p = psi1(nu, z)?;
    let d = 1.0 + p;
    if d.norm() <= 1e-14 * (1.0 + p.norm()) {
        return Err(Error::EtaPole(z));
    }
    Ok(p / d)
}

/// `ψ` of the marginal `j` of `μ`.
pub fn psi_marginal(mu: &AtomicMeasure2D, j: usize, z: Complex64) -> Result<Complex64> {
    psi1(&mu.marginal(j), z)
}

/// Rejects measures outside `P×`.
pub fn require_px(mu: &AtomicMeasure2D) -> Result<()> {
    if mu.in_class_px() {
        Ok(())
    } else {
        Err(Error::NotInPx(format!(
            "marginal means {:.3e}, {:.3e}, m11 {:.3e}",
            mu.moment(1, 0).norm(),
            mu.moment(0, 1).norm(),
            mu.moment(1, 1).norm()
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::MeasureSampler;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn point_mass_values() {
        let d = AtomicMeasure2D::point_mass(0.0, 0.0);
        assert!((psi2(&d, c(0.5, 0.0), c(0.5, 0.0)).unwrap() - 1.0).norm() < 1e-15);
        assert!((h2(&d, c(0.5, 0.0), c(0.5, 0.0)).unwrap() - 4.0).norm() < 1e-15);
        let a = c(0.6, 0.8);
        let nu = AtomicMeasure1D::from_points(&[(a, 1.0)]).unwrap();
        let z = c(0.3, -0.2);
        assert!((eta(&nu, z).unwrap() - a * z).norm() < 1e-15);
        assert!((psi1(&nu, z).unwrap() - z * a / (1.0 - z * a)).norm() < 1e-15);
        assert_eq!(psi1(&nu, c(0.0, 0.0)).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn torus_points_rejected() {
        let d = AtomicMeasure2D::point_mass(0.0, 0.0);
        assert!(matches!(psi2(&d, c(1.0, 0.0), c(0.2, 0.0)), Err(Error::OnTorus(_))));
        assert!(matches!(
            DomainComponent::classify(c(0.1, 0.0), c(0.0, 1.0 + 1e-10)),
            Err(Error::OnTorus(_))
        ));
        assert_eq!(
            DomainComponent::classify(c(2.0, 0.0), c(0.1, 0.0)).unwrap(),
            DomainComponent::UD
        );
    }

    #[test]
    fn identities_on_random_measures() {
        let mut sampler = MeasureSampler::new(11);
        for _ in 0..5 {
            let mu = sampler.measure_2d(5);
            let m1 = mu.marginal(1);
            let m2 = mu.marginal(2);
            for _ in 0..20 {
                let z = sampler.off_torus_point();
                let w = sampler.off_torus_point();
                let p = psi2(&mu, z, w).unwrap();
                let p1 = psi1(&m1, z).unwrap();
                let p2 = psi1(&m2, w).unwrap();
                let h = h2(&mu, z, w).unwrap();
                assert!((h - (p + p1 + p2 + 1.0)).norm() < 1e-10 * (1.0 + h.norm()));
                let refl = psi2(&mu, reflect_point(z), reflect_point(w)).unwrap();
                assert!((p + p1 + p2 + 1.0 - refl.conj()).norm() < 1e-10 * (1.0 + h.norm()));
                let rz = psi1(&m1, reflect_point(z)).unwrap();
                assert!((p1 + 1.0 + rz.conj()).norm() < 1e-10 * (1.0 + p1.norm()));
            }
        }
    }
}
