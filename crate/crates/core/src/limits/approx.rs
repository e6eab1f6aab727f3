//! Existence of the law with given Lévy data by Poisson truncation:
//! `Poi(r_m, μ_m) ⊠⊠ N(a − a_m)` built from the restriction of `ρ` to
//! `A_m × A_m`, `A_m = {e^{iθ} : 1/m < |θ| ≤ π}`.

use num_complex::Complex64;

use super::levy::{id_law, LevyData};
use crate::error::{Error, Result};
use crate::measure::AtomicMeasure2D;
use crate::transforms::TransformLaw;

/// Output of one truncation level.
#[derive(Debug, Clone)]
pub struct PoissonApprox {
    pub law: TransformLaw,
    pub r_m: f64,
    /// `None` when nothing of `ρ` lies in `A_m × A_m`.
    pub mu_m: Option<AtomicMeasure2D>,
    pub a_m: f64,
    /// Drift `a − a_m` of the normal factor.
    pub normal_part: f64,
}

impl PoissonApprox {
    pub fn sigma(&self, z: Complex64, w: Complex64) -> Result<Complex64> {
        self.law.sigma(z, w)
    }
}

fn in_ring(theta: f64, m: usize) -> bool {
    theta.abs() > 1.0 / m as f64
}

/// Truncation `m ≥ 1` of the Poisson approximation to `ld`. `γ` does not
/// enter `Σ`, so the marginal rotations are those of the approximants.
pub fn id_from_levy_poisson_approx(ld: &LevyData, m: usize) -> Result<PoissonApprox> {
    if m == 0 {
        return Err(Error::InvalidArgument("truncation index must be positive".into()));
    }
    ld.check_compatibility()?;
    let rho = ld.joint_measure();
    if rho.is_empty() {
        // ρ₁ must then live on t = 1 and ρ₂ on s = 1
        let stray = ld.rho1.points().iter().any(|&(_, t, _)| t.im.abs() > 1e-12)
            || ld.rho2.points().iter().any(|&(s, _, _)| s.im.abs() > 1e-12);
        if stray {
            return Err(Error::IncompatibleLevy("ρ = 0 but ρⱼ charges the open torus".into()));
        }
        return Ok(PoissonApprox {
            law: id_law(&LevyData::normal(ld.a))?,
            r_m: 0.0,
            mu_m: None,
            a_m: 0.0,
            normal_part: ld.a,
        });
    }
    let restricted: Vec<(f64, f64, f64)> = rho
        .atoms()
        .iter()
        .filter(|a| in_ring(a.s_angle, m) && in_ring(a.t_angle, m))
        .map(|a| (a.s_angle, a.t_angle, a.weight / ((1.0 - a.s_angle.cos()) * (1.0 - a.t_angle.cos()))))
        .collect();
    let r_m: f64 = restricted.iter().map(|a| a.2).sum();
    let (mu_m, a_m) = if r_m > 0.0 {
        let mu = AtomicMeasure2D::probability(restricted.iter().map(|&(s, t, w)| (s, t, w / r_m)))?;
        let a_m = r_m * mu.points().iter().map(|&(s, t, w)| w * s.im * t.im).sum::<f64>();
        (Some(mu), a_m)
    } else {
        (None, 0.0)
    };
    let normal_part = ld.a - a_m;
    let mut law = id_law(&LevyData::normal(normal_part))?;
    if let Some(mu) = &mu_m {
        law = id_law(&LevyData::poisson(r_m, mu)?)?.convolve(&law).revalidated()?;
    }
    Ok(PoissonApprox {
        law,
        r_m,
        mu_m,
        a_m,
        normal_part,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::limits::levy::{f_kernel, poisson_sigma_closed};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sample() -> LevyData {
        let rho = AtomicMeasure2D::finite([(0.8, -0.5, 0.1), (-1.2, 2.0, 0.2), (0.3, 0.9, 0.01)]).unwrap();
        let rho1 = AtomicMeasure2D::finite(rho.atoms().iter().map(|a| (a.s_angle, a.t_angle, a.weight / (1.0 - a.t_angle.cos())))).unwrap();
        let rho2 = AtomicMeasure2D::finite(rho.atoms().iter().map(|a| (a.s_angle, a.t_angle, a.weight / (1.0 - a.s_angle.cos())))).unwrap();
        LevyData::new(rho1, rho2, 0.4, c(1.0, 0.0), c(1.0, 0.0)).unwrap()
    }

    #[test]
    fn zero_rho_gives_normal() {
        let p = id_from_levy_poisson_approx(&LevyData::normal(0.7), 3).unwrap();
        assert!(p.mu_m.is_none());
        let (z, w) = (c(0.2, 0.1), c(-0.1, 0.3));
        let expected = (-0.7 * f_kernel(z, w).unwrap()).exp();
        assert!((p.sigma(z, w).unwrap() - expected).norm() < 1e-12);
    }

    #[test]
    fn truncation_recovers_exponent_once_atoms_are_in() {
        let ld = sample();
        let pts = [(c(0.2, 0.1), c(-0.1, 0.3)), (c(0.0, 0.0), c(0.0, 0.0)), (c(-0.3, 0.2), c(0.25, -0.1))];
        let partial = id_from_levy_poisson_approx(&ld, 2).unwrap();
        let full = id_from_levy_poisson_approx(&ld, 4).unwrap();
        let gap = |p: &PoissonApprox| {
            pts.iter()
                .map(|&(z, w)| (p.sigma(z, w).unwrap() - ld.sigma(z, w).unwrap()).norm())
                .fold(0.0, f64::max)
        };
        assert!(gap(&full) < 1e-10);
        assert!(gap(&partial) > 1e-6);
        let mu = full.mu_m.as_ref().unwrap();
        for &(z, w) in &pts {
            let independent = poisson_sigma_closed(full.r_m, mu, z, w) * (-full.normal_part * f_kernel(z, w).unwrap()).exp();
            assert!((independent - ld.sigma(z, w).unwrap()).norm() < 1e-10);
        }
    }
}
