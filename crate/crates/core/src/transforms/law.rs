//! Laws presented through transforms: a rotation, marginal inverse
//! η-transforms and a Σ-transform.
//!
//! A [`TransformLaw`] is `δ_λ ⊠⊠ F₁^{⊠⊠n₁} ⊠⊠ ... ⊠⊠ F_K^{⊠⊠n_K}`, where
//! every factor is an atomic measure or an infinitely divisible law given
//! by its Lévy data. Its Σ-transform is `Π Σ_k^{n_k}` and each marginal is
//! the corresponding product of inverse η-transforms.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::sigma::{weights, AtomicKernel};
use super::{is_bounded, reflect_point, require_px, DomainComponent, DomainWindow};
use super::{DENOMINATOR_MARGIN, WINDOW_MIN, WINDOW_START};
use crate::convolution::{FreeFactor, FreeLaw1D, Provenance1D};
use crate::error::{Error, Result};
use crate::limits::LevyData;
use crate::measure::{AtomicMeasure2D, PX_THRESHOLD};

/// One factor of a [`TransformLaw`].
#[derive(Debug, Clone, PartialEq)]
pub enum LawFactor {
    Atomic(AtomicMeasure2D),
    Levy(LevyData),
}

impl LawFactor {
    fn marginal(&self, j: usize) -> FreeFactor {
        match self {
            Self::Atomic(mu) => FreeFactor::Atomic(mu.marginal(j)),
            Self::Levy(ld) => FreeFactor::Levy {
                gamma: ld.gamma(j),
                sigma: ld.marginal_sigma(j),
            },
        }
    }
}

/// Origin of a law.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Atomic,
    Convolution,
    IdLaw,
}

/// A point of one coordinate with everything the Σ kernels need: its
/// bounded representative and, per factor, the ratio `η_k⁻¹(rep)/rep`.
#[derive(Debug, Clone)]
pub struct CoordinatePoint {
    /// The argument of Σ in this coordinate.
    pub value: Complex64,
    pub bounded: bool,
    /// `value` if bounded, else `1/conj(value)`.
    pub rep: Complex64,
    pub ratios: Vec<Complex64>,
    /// Atomic kernels in the form matching `bounded`.
    kernels: Vec<Option<AtomicKernel>>,
    /// Atomic kernels of `rep` (only stored for unbounded points).
    rep_kernels: Vec<Option<AtomicKernel>>,
}

/// A law given by its rotation and factors.
#[derive(Debug, Clone, PartialEq)]
pub struct TransformLaw {
    rotation: [Complex64; 2],
    factors: Vec<(LawFactor, u32)>,
    window: DomainWindow,
    provenance: Provenance,
}

impl TransformLaw {
    /// The law of an atomic measure in `P×`.
    pub fn from_atomic(mu: &AtomicMeasure2D) -> Result<Self> {
        require_px(mu)?;
        let mut law = Self {
            rotation: [Complex64::new(1.0, 0.0); 2],
            factors: vec![(LawFactor::Atomic(mu.clone()), 1)],
            window: DomainWindow::default(),
            provenance: Provenance::Atomic,
        };
        law.window = law.select_window()?;
        Ok(law)
    }

    /// The infinitely divisible law with Σ = exp(f·F) and exponential-form
    /// marginals.
    pub fn from_levy(ld: &LevyData) -> Result<Self> {
        ld.check_compatibility()?;
        let mut law = Self {
            rotation: [Complex64::new(1.0, 0.0); 2],
            factors: vec![(LawFactor::Levy(ld.clone()), 1)],
            window: DomainWindow::default(),
            provenance: Provenance::IdLaw,
        };
        law.require_px()?;
        law.window = law.select_window()?;
        Ok(law)
    }

    /// The point mass `δ_(λ₁,λ₂)`.
    pub fn point_mass(lambda1: Complex64, lambda2: Complex64) -> Self {
        Self {
            rotation: [lambda1, lambda2],
            factors: Vec::new(),
            window: DomainWindow::default(),
            provenance: Provenance::Atomic,
        }
    }

    pub fn rotation(&self) -> [Complex64; 2] {
        self.rotation
    }

    pub fn factors(&self) -> &[(LawFactor, u32)] {
        &self.factors
    }

    pub fn window(&self) -> DomainWindow {
        self.window
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    /// `δ_λ ⊠⊠ self`.
    pub fn rotated(&self, lambda1: Complex64, lambda2: Complex64) -> Self {
        let mut out = self.clone();
        out.rotation = [self.rotation[0] * lambda1, self.rotation[1] * lambda2];
        out
    }

    /// `self ⊠⊠ other` on the intersected window.
    pub fn convolve(&self, other: &Self) -> Self {
        let mut factors = self.factors.clone();
        factors.extend(other.factors.iter().cloned());
        Self {
            rotation: [
                self.rotation[0] * other.rotation[0],
                self.rotation[1] * other.rotation[1],
            ],
            factors,
            window: DomainWindow {
                r: self.window.r.min(other.window.r),
            },
            provenance: Provenance::Convolution,
        }
    }

    /// `self^{⊠⊠n}`: `Σⁿ` and `(η⁻¹)ⁿ / z^{n−1}` marginals.
    pub fn power(&self, n: u32) -> Self {
        Self {
            rotation: [self.rotation[0].powu(n), self.rotation[1].powu(n)],
            factors: self.factors.iter().map(|(f, k)| (f.clone(), k * n)).collect(),
            window: self.window,
            provenance: if n == 1 {
                self.provenance
            } else {
                Provenance::Convolution
            },
        }
    }

    /// The marginal law `j` (1 or 2).
    pub fn marginal(&self, j: usize) -> FreeLaw1D {
        let factors = self
            .factors
            .iter()
            .map(|(f, n)| (f.marginal(j), *n))
            .collect();
        let provenance = match self.provenance {
            Provenance::Atomic if self.factors.len() <= 1 => Provenance1D::Atomic,
            Provenance::IdLaw => Provenance1D::IdMarginal,
            _ => Provenance1D::ProductOfInverses,
        };
        FreeLaw1D::from_parts(self.rotation[j - 1], factors, provenance)
    }

    /// `η_j⁻¹(z)` on `D_r ∪ Δ_r`.
    pub fn eta_inv(&self, j: usize, z: Complex64) -> Result<Complex64> {
        self.window.check(z)?;
        self.marginal(j).eta_inv(z)
    }

    /// `Σ(0,0)`.
    pub fn sigma_at_origin(&self) -> Result<Complex64> {
        let zero = Complex64::new(0.0, 0.0);
        self.sigma_unchecked(zero, zero)
    }

    fn require_px(&self) -> Result<()> {
        let m1 = self.marginal(1).mean().norm();
        let m2 = self.marginal(2).mean().norm();
        let s0 = self.sigma_at_origin()?.norm();
        if m1 > PX_THRESHOLD && m2 > PX_THRESHOLD && s0 > PX_THRESHOLD {
            Ok(())
        } else {
            Err(Error::NotInPx(format!(
                "marginal means {m1:.3e}, {m2:.3e}, Σ(0,0) {s0:.3e}"
            )))
        }
    }

    fn build_kernels(&self, j: usize, bounded: bool, rep: Complex64, ratios: &[Complex64]) -> Vec<Option<AtomicKernel>> {
        self.factors
            .iter()
            .zip(ratios)
            .map(|((f, _), &r)| match f {
                LawFactor::Atomic(mu) => Some(AtomicKernel::new(
                    mu.points().iter().map(|p| if j == 1 { p.0 } else { p.1 }),
                    bounded,
                    rep * r,
                    r,
                )),
                LawFactor::Levy(_) => None,
            })
            .collect()
    }

    /// Assembles a coordinate point from the bounded representative and the
    /// factor ratios there.
    pub fn coordinate_point(&self, j: usize, bounded: bool, rep: Complex64, ratios: Vec<Complex64>) -> CoordinatePoint {
        let kernels = self.build_kernels(j, bounded, rep, &ratios);
        let rep_kernels = if bounded {
            Vec::new()
        } else {
            self.build_kernels(j, true, rep, &ratios)
        };
        CoordinatePoint {
            value: if bounded { rep } else { reflect_point(rep) },
            bounded,
            rep,
            ratios,
            kernels,
            rep_kernels,
        }
    }

    /// Coordinate point for Σ evaluation at `z` using each factor's own
    /// inverse continued along the ray from 0 (the window evaluator).
    pub fn window_point(&self, j: usize, z: Complex64) -> Result<CoordinatePoint> {
        let bounded = is_bounded(z)?;
        let rep = if bounded { z } else { reflect_point(z) };
        let marginal = self.marginal(j);
        let ratios = marginal
            .factors()
            .iter()
            .map(|(f, _)| f.inverse_ratio(rep))
            .collect::<Result<Vec<_>>>()?;
        Ok(self.coordinate_point(j, bounded, rep, ratios))
    }

    /// Re-runs the window search from the current radius.
    pub fn revalidated(mut self) -> Result<Self> {
        self.window = self.select_window()?;
        Ok(self)
    }

    /// Coordinate point at `y = η_j(x)` along the subordination branch,
    /// for `x` anywhere off the circle. Returns `(η_j(x), point)`.
    pub fn subordinated_point(&self, j: usize, x: Complex64) -> Result<(Complex64, CoordinatePoint)> {
        let bounded = is_bounded(x)?;
        let rep = if bounded { x } else { reflect_point(x) };
        let fp = self.marginal(j).forward(rep)?;
        if !bounded && fp.eta.norm() == 0.0 {
            return Err(Error::EtaPole(x));
        }
        let point = self.coordinate_point(j, bounded, fp.eta, fp.ratios);
        Ok((point.value, point))
    }

    /// `Σ` at two prepared coordinate points.
    pub fn sigma_at(&self, p1: &CoordinatePoint, p2: &CoordinatePoint) -> Result<Complex64> {
        if !p1.bounded && !p2.bounded {
            let inner = self.sigma_kernels(&p1.rep_kernels, &p2.rep_kernels, p1.rep, p2.rep)?;
            return Ok(1.0 / inner.conj());
        }
        self.sigma_kernels(&p1.kernels, &p2.kernels, p1.value, p2.value)
    }

    fn sigma_kernels(
        &self,
        k1: &[Option<AtomicKernel>],
        k2: &[Option<AtomicKernel>],
        z: Complex64,
        w: Complex64,
    ) -> Result<Complex64> {
        let mut out = Complex64::new(1.0, 0.0);
        for (i, (f, n)) in self.factors.iter().enumerate() {
            let value = match f {
                LawFactor::Atomic(mu) => {
                    let (a, b) = (k1[i].as_ref().unwrap(), k2[i].as_ref().unwrap());
                    AtomicKernel::pair(a, b, weights(mu))
                        .map_err(|_| Error::VanishingDenominator { z, w })?
                }
                LawFactor::Levy(ld) => ld.sigma(z, w)?,
            };
            out *= value.powu(*n);
        }
        Ok(out)
    }

    fn sigma_unchecked(&self, z: Complex64, w: Complex64) -> Result<Complex64> {
        let p1 = self.window_point(1, z)?;
        let p2 = self.window_point(2, w)?;
        self.sigma_at(&p1, &p2)
    }

    /// `Σ(z,w)` on `Ω_r`.
    pub fn sigma(&self, z: Complex64, w: Complex64) -> Result<Complex64> {
        self.window.check(z)?;
        self.window.check(w)?;
        DomainComponent::classify(z, w)?;
        self.sigma_unchecked(z, w)
    }

    /// Smallest `|H|`-type denominator of the atomic factors over the ring
    /// `|z| = |w| = r`, sampled at `samples` angles per coordinate.
    fn ring_margin(&self, r: f64, samples: usize) -> Result<f64> {
        let points = |j: usize| -> Result<Vec<CoordinatePoint>> {
            (0..samples)
                .map(|k| {
                    let z = Complex64::from_polar(r, 2.0 * PI * (k as f64 + 0.5) / samples as f64);
                    self.window_point(j, z)
                })
                .collect()
        };
        let first = points(1)?;
        let second = points(2)?;
        let mut margin = f64::INFINITY;
        for (i, (f, _)) in self.factors.iter().enumerate() {
            let LawFactor::Atomic(mu) = f else { continue };
            for a in &first {
                for b in &second {
                    let (ka, kb) = (a.kernels[i].as_ref().unwrap(), b.kernels[i].as_ref().unwrap());
                    margin = margin.min(AtomicKernel::denominator(ka, kb, weights(mu)).norm());
                }
            }
        }
        Ok(margin)
    }

    /// Starts at the current radius (0.5 for a fresh law) and halves until
    /// every inversion on the sampled ring converges and the Σ denominators
    /// stay above the margin.
    pub fn select_window(&self) -> Result<DomainWindow> {
        let mut r = self.window.r.min(WINDOW_START);
        while r >= WINDOW_MIN {
            match self.ring_margin(r, 16) {
                Ok(m) if m >= DENOMINATOR_MARGIN => return DomainWindow::new(r),
                _ => r /= 2.0,
            }
        }
        Err(Error::WindowExhausted { radius: r })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::MeasureSampler;
    use crate::transforms::sigma_pointwise;

    #[test]
    fn atomic_law_matches_pointwise_sigma() {
        let mut s = MeasureSampler::new(31);
        let mu = s.px_measure_2d(4);
        let law = TransformLaw::from_atomic(&mu).unwrap();
        let r = law.window().r * 0.9;
        for _ in 0..20 {
            let z = s.disk_point(r);
            let w = reflect_point(s.disk_point(r));
            let a = law.sigma(z, w).unwrap();
            let b = sigma_pointwise(&mu, z, w, &law.window()).unwrap();
            assert!((a - b).norm() < 1e-13);
        }
    }

    #[test]
    fn power_multiplies_sigma() {
        let mut s = MeasureSampler::new(32);
        let mu = s.px_measure_2d(3);
        let law = TransformLaw::from_atomic(&mu).unwrap();
        let cube = law.power(3);
        let z = s.disk_point(0.1);
        let w = s.disk_point(0.1);
        let one = law.sigma(z, w).unwrap();
        assert!((cube.sigma(z, w).unwrap() - one.powu(3)).norm() < 1e-12);
        let m = cube.marginal(1).mean();
        assert!((m - mu.moment(1, 0).powu(3)).norm() < 1e-14);
    }
}
