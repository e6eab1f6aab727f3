//! Lévy data `(ρ₁, ρ₂, a, γ₁, γ₂)` and the infinitely divisible laws they
//! parameterize through `Σ = exp(f·F)`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::measure::{AtomicMeasure1D, AtomicMeasure2D, ATOM_MERGE_TOL};
use crate::transforms::TransformLaw;

/// Per-atom tolerance of the compatibility condition.
pub const COMPATIBILITY_TOL: f64 = 1e-10;

/// `(1+zx)/(1−zx)`.
fn herglotz(z: Complex64, x: Complex64) -> Complex64 {
    (1.0 + z * x) / (1.0 - z * x)
}

/// `f(z,w) = (1−zw)/((1−z)(1−w))`.
pub fn f_kernel(z: Complex64, w: Complex64) -> Result<Complex64> {
    let d = (1.0 - z) * (1.0 - w);
    if (1.0 - z).norm() == 0.0 || (1.0 - w).norm() == 0.0 {
        return Err(Error::InvalidArgument(format!("f has a pole at ({z}, {w})")));
    }
    Ok((1.0 - z * w) / d)
}

/// Parameters of a bi-free infinitely divisible law.
#[derive(Debug, Clone, PartialEq)]
pub struct LevyData {
    pub rho1: AtomicMeasure2D,
    pub rho2: AtomicMeasure2D,
    pub a: f64,
    pub gamma1: Complex64,
    pub gamma2: Complex64,
}

impl LevyData {
    /// Validated constructor.
    pub fn new(
        rho1: AtomicMeasure2D,
        rho2: AtomicMeasure2D,
        a: f64,
        gamma1: Complex64,
        gamma2: Complex64,
    ) -> Result<Self> {
        for g in [gamma1, gamma2] {
            if (g.norm() - 1.0).abs() > 1e-12 {
                return Err(Error::IncompatibleLevy(format!("γ = {g} is not unimodular")));
            }
        }
        if !a.is_finite() {
            return Err(Error::IncompatibleLevy("a is not finite".into()));
        }
        let ld = Self {
            rho1,
            rho2,
            a,
            gamma1,
            gamma2,
        };
        ld.check_compatibility()?;
        Ok(ld)
    }

    /// Data of `δ_(1,1)`.
    pub fn zero() -> Self {
        Self {
            rho1: AtomicMeasure2D::zero(),
            rho2: AtomicMeasure2D::zero(),
            a: 0.0,
            gamma1: Complex64::new(1.0, 0.0),
            gamma2: Complex64::new(1.0, 0.0),
        }
    }

    /// The normal law `N(a)`: `ρ₁ = ρ₂ = (|a|/2) δ_(1,1)`.
    pub fn normal(a: f64) -> Self {
        let rho = if a == 0.0 {
            AtomicMeasure2D::zero()
        } else {
            AtomicMeasure2D::point_mass(0.0, 0.0).scaled(a.abs() / 2.0)
        };
        Self {
            rho1: rho.clone(),
            rho2: rho,
            a,
            ..Self::zero()
        }
    }

    /// The compound Poisson law `Poi(r, μ)`.
    pub fn poisson(r: f64, mu: &AtomicMeasure2D) -> Result<Self> {
        if !(r >= 0.0) {
            return Err(Error::InvalidArgument(format!("Poisson rate {r} is negative")));
        }
        let jumps = mu.scaled(r);
        let a = jumps
            .points()
            .iter()
            .map(|&(s, t, w)| w * s.im * t.im)
            .sum();
        let gamma = |j: usize| {
            let drift: f64 = jumps.marginal(j).points().iter().map(|&(x, w)| w * x.im).sum();
            Complex64::from_polar(1.0, -drift)
        };
        Ok(Self {
            rho1: jumps.with_density(|s, _| 1.0 - s.re),
            rho2: jumps.with_density(|_, t| 1.0 - t.re),
            a,
            gamma1: gamma(1),
            gamma2: gamma(2),
        })
    }

    pub fn gamma(&self, j: usize) -> Complex64 {
        if j == 1 {
            self.gamma1
        } else {
            self.gamma2
        }
    }

    pub fn rho(&self, j: usize) -> &AtomicMeasure2D {
        if j == 1 {
            &self.rho1
        } else {
            &self.rho2
        }
    }

    /// `σ_j = ρ_j ∘ π_j⁻¹`.
    pub fn marginal_sigma(&self, j: usize) -> AtomicMeasure1D {
        self.rho(j).marginal(j)
    }

    /// The common measure `ρ = (1−Re t) dρ₁ = (1−Re s) dρ₂`.
    pub fn joint_measure(&self) -> AtomicMeasure2D {
        self.rho1.with_density(|_, t| 1.0 - t.re)
    }

    /// Checks `(1−Re t) dρ₁ = (1−Re s) dρ₂` atom by atom.
    pub fn check_compatibility(&self) -> Result<()> {
        let left = self.rho1.with_density(|_, t| 1.0 - t.re);
        let right = self.rho2.with_density(|s, _| 1.0 - s.re);
        let weight_at = |m: &AtomicMeasure2D, s: f64, t: f64| -> f64 {
            m.atoms()
                .iter()
                .filter(|b| {
                    angle_gap(b.s_angle, s) <= ATOM_MERGE_TOL && angle_gap(b.t_angle, t) <= ATOM_MERGE_TOL
                })
                .map(|b| b.weight)
                .sum()
        };
        for m in [&left, &right] {
            for atom in m.atoms() {
                let dl = weight_at(&left, atom.s_angle, atom.t_angle);
                let dr = weight_at(&right, atom.s_angle, atom.t_angle);
                if (dl - dr).abs() > COMPATIBILITY_TOL {
                    return Err(Error::IncompatibleLevy(format!(
                        "atom at ({:.6}, {:.6}): {dl:.3e} vs {dr:.3e}",
                        atom.s_angle, atom.t_angle
                    )));
                }
            }
        }
        Ok(())
    }

    /// `F_{ρ₁,ρ₂,a}(z,w)`.
    pub fn levy_exponent(&self, z: Complex64, w: Complex64) -> Complex64 {
        let i = Complex64::new(0.0, 1.0);
        let mut out = Complex64::new(-self.a, 0.0);
        for &(s, t, wt) in self.rho1.points() {
            let hz = herglotz(z, s);
            out += wt * (hz * herglotz(w, t) * (1.0 - t.re) - i * hz * t.im);
        }
        for &(s, t, wt) in self.rho2.points() {
            out -= wt * i * herglotz(w, t) * s.im;
        }
        out
    }

    /// `Σ = exp(f·F)`.
    pub fn sigma(&self, z: Complex64, w: Complex64) -> Result<Complex64> {
        Ok((f_kernel(z, w)? * self.levy_exponent(z, w)).exp())
    }

    /// Divides `ρ₁, ρ₂, a` by `n` and takes principal `n`-th roots of `γⱼ`.
    pub fn root(&self, n: u32) -> Self {
        let k = n as f64;
        let root = |g: Complex64| Complex64::from_polar(1.0, g.arg() / k);
        Self {
            rho1: self.rho1.scaled(1.0 / k),
            rho2: self.rho2.scaled(1.0 / k),
            a: self.a / k,
            gamma1: root(self.gamma1),
            gamma2: root(self.gamma2),
        }
    }

    /// Largest difference of the two data sets: atom weights, `a` and `γ`.
    pub fn distance(&self, other: &Self) -> f64 {
        let diff = |x: &AtomicMeasure2D, y: &AtomicMeasure2D| {
            x.atoms()
                .iter()
                .chain(y.atoms())
                .map(|atom| {
                    let at = |m: &AtomicMeasure2D| -> f64 {
                        m.atoms()
                            .iter()
                            .filter(|b| {
                                angle_gap(b.s_angle, atom.s_angle) <= ATOM_MERGE_TOL
                                    && angle_gap(b.t_angle, atom.t_angle) <= ATOM_MERGE_TOL
                            })
                            .map(|b| b.weight)
                            .sum()
                    };
                    (at(x) - at(y)).abs()
                })
                .fold(0.0, f64::max)
        };
        diff(&self.rho1, &other.rho1)
            .max(diff(&self.rho2, &other.rho2))
            .max((self.a - other.a).abs())
            .max((self.gamma1 - other.gamma1).norm())
            .max((self.gamma2 - other.gamma2).norm())
    }
}

fn angle_gap(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(2.0 * std::f64::consts::PI);
    d.min(2.0 * std::f64::consts::PI - d)
}

/// `Σ_{Poi(r,μ)}(z,w) = exp(∫ (1−zw)(1−s)(1−t)/((1−zs)(1−wt)) d[rμ])`.
pub fn poisson_sigma_closed(r: f64, mu: &AtomicMeasure2D, z: Complex64, w: Complex64) -> Complex64 {
    let sum: Complex64 = mu
        .points()
        .iter()
        .map(|&(s, t, wt)| wt * (1.0 - s) * (1.0 - t) / ((1.0 - z * s) * (1.0 - w * t)))
        .sum();
    (r * (1.0 - z * w) * sum).exp()
}

/// The infinitely divisible law of `ld`.
pub fn id_law(ld: &LevyData) -> Result<TransformLaw> {
    TransformLaw::from_levy(ld)
}

/// Lévy data of an `n`-th convolution root.
pub fn id_root(ld: &LevyData, n: u32) -> Result<LevyData> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("root order {n} must be at least 2")));
    }
    ld.check_compatibility()?;
    Ok(ld.root(n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::MeasureSampler;
    use crate::transforms::reflect_point;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn kernel_values() {
        assert_eq!(f_kernel(c(0.0, 0.0), c(0.0, 0.0)).unwrap(), c(1.0, 0.0));
        let z = c(0.3, 0.4);
        assert!(f_kernel(z, 1.0 / z).unwrap().norm() < 1e-15);
        assert!(f_kernel(c(1e-8, 0.0), c(1e8, 0.0)).unwrap().norm() < 1e-7);
        assert!(f_kernel(c(1.0, 0.0), z).is_err());
    }

    #[test]
    fn normal_exponent_is_constant() {
        let ld = LevyData::normal(1.3);
        ld.check_compatibility().unwrap();
        let z = c(0.2, -0.1);
        let w = c(3.0, 1.0);
        assert!((ld.levy_exponent(z, w) + 1.3).norm() < 1e-15);
        let expected = (-1.3 * f_kernel(z, w).unwrap()).exp();
        assert!((ld.sigma(z, w).unwrap() - expected).norm() < 1e-14);
    }

    #[test]
    fn poisson_matches_closed_form() {
        let mut s = MeasureSampler::new(40);
        for _ in 0..5 {
            let mu = s.measure_2d(3);
            let ld = LevyData::poisson(1.7, &mu).unwrap();
            ld.check_compatibility().unwrap();
            for _ in 0..20 {
                let z = s.off_torus_point();
                let w = s.off_torus_point();
                let a = ld.sigma(z, w).unwrap();
                let b = poisson_sigma_closed(1.7, &mu, z, w);
                assert!((a - b).norm() < 1e-12 * (1.0 + b.norm()), "{a} vs {b}");
            }
        }
    }

    #[test]
    fn exponent_symmetry() {
        let mut s = MeasureSampler::new(41);
        let ld = LevyData::poisson(0.8, &s.measure_2d(4)).unwrap();
        for _ in 0..50 {
            let z = s.off_torus_point();
            let w = s.off_torus_point();
            let a = ld.sigma(z, w).unwrap();
            let b = ld.sigma(reflect_point(z), reflect_point(w)).unwrap();
            assert!((a - 1.0 / b.conj()).norm() < 1e-10 * (1.0 + a.norm()));
        }
    }

    #[test]
    fn incompatible_rejected_and_roots() {
        let rho1 = AtomicMeasure2D::finite([(0.5, 1.0, 1.0)]).unwrap();
        let bad = LevyData::new(rho1, AtomicMeasure2D::zero(), 0.0, c(1.0, 0.0), c(1.0, 0.0));
        assert!(matches!(bad, Err(Error::IncompatibleLevy(_))));
        let ld = LevyData {
            gamma1: c(0.0, 1.0),
            ..LevyData::normal(1.0)
        };
        let root = id_root(&ld, 2).unwrap();
        assert!((root.gamma1 - Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4)).norm() < 1e-15);
        assert!(root.distance(&LevyData { gamma1: root.gamma1, ..LevyData::normal(0.5) }) < 1e-15);
    }
}
