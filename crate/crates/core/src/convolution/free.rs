//! Free multiplicative convolution on the circle.
//!
//! A [`FreeLaw1D`] is `δ_λ ⊠ ν₁^{⊠n₁} ⊠ ... ⊠ ν_K^{⊠n_K}`, represented by
//! `η⁻¹(y) = y · R(y)` with `R = (1/λ) Π R_k^{n_k}` and `R_k = η_k⁻¹(y)/y`.
//!
//! The forward map `y = η(x)` is found together with the ratios `R_k` of
//! the atomic factors by solving
//!
//! ```text
//! y · Π R_k(y)^{n_k} = λ x,      r_k · e_k(y r_k) = 1  (atomic k),
//! ```
//!
//! where `e_k(u) = η_k(u)/u`, continued along the ray from `x = 0`. This
//! tracks the subordination branch `ω_k = y r_k = η_k⁻¹(η(x))`, which is
//! analytic on the whole disk, so the forward map is not confined to the
//! window where each `η_k⁻¹` is univalent.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::measure::{AtomicMeasure1D, PX_THRESHOLD};
use crate::transforms::{
    eta, eta_ratio_with_derivative, is_bounded, reflect_point, solve_inverse_ratio,
};

const FORWARD_TOL: f64 = 1e-14;
const FORWARD_MAX_ITER: usize = 50;
const FORWARD_STEP: f64 = 0.1;
const FORWARD_MIN_STEP: f64 = 1e-4;

/// One factor of a free law.
#[derive(Debug, Clone, PartialEq)]
pub enum FreeFactor {
    Atomic(AtomicMeasure1D),
    /// `η⁻¹(z) = γ z exp(∫ (1+xz)/(1−xz) dσ(x))`.
    Levy { gamma: Complex64, sigma: AtomicMeasure1D },
}

impl FreeFactor {
    pub fn mean(&self) -> Complex64 {
        match self {
            Self::Atomic(nu) => nu.mean(),
            Self::Levy { gamma, sigma } => gamma.conj() * (-sigma.total_mass()).exp(),
        }
    }

    /// `(L(y), L'(y)/L(y))` for a Lévy factor.
    fn levy_ratio(gamma: Complex64, sigma: &AtomicMeasure1D, y: Complex64) -> (Complex64, Complex64) {
        let mut expo = Complex64::new(0.0, 0.0);
        let mut dlog = Complex64::new(0.0, 0.0);
        for &(x, wt) in sigma.points() {
            let d = 1.0 - x * y;
            expo += wt * (1.0 + x * y) / d;
            dlog += wt * 2.0 * x / (d * d);
        }
        (gamma * expo.exp(), dlog)
    }

    /// `η⁻¹(y)/y` for `|y| < 1`.
    pub fn inverse_ratio(&self, y: Complex64) -> Result<Complex64> {
        match self {
            Self::Atomic(nu) => solve_inverse_ratio(nu, y),
            Self::Levy { gamma, sigma } => Ok(Self::levy_ratio(*gamma, sigma, y).0),
        }
    }
}

/// Where a free law came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance1D {
    Atomic,
    ProductOfInverses,
    IdMarginal,
}

/// Result of the forward solve at a bounded point.
#[derive(Debug, Clone, PartialEq)]
pub struct ForwardPoint {
    /// `η(x)`.
    pub eta: Complex64,
    /// `η_k⁻¹(η(x)) / η(x)` for every factor (the limit `1/m_k` at 0).
    pub ratios: Vec<Complex64>,
}

/// A circle law presented through its inverse η-transform.
#[derive(Debug, Clone, PartialEq)]
pub struct FreeLaw1D {
    rotation: Complex64,
    factors: Vec<(FreeFactor, u32)>,
    provenance: Provenance1D,
}

impl FreeLaw1D {
    pub fn from_atomic(nu: &AtomicMeasure1D) -> Result<Self> {
        let m = nu.mean();
        if m.norm() <= PX_THRESHOLD {
            return Err(Error::MeanBelowThreshold(m.norm()));
        }
        Ok(Self {
            rotation: Complex64::new(1.0, 0.0),
            factors: vec![(FreeFactor::Atomic(nu.clone()), 1)],
            provenance: Provenance1D::Atomic,
        })
    }

    pub fn from_levy(gamma: Complex64, sigma: AtomicMeasure1D) -> Self {
        Self {
            rotation: Complex64::new(1.0, 0.0),
            factors: vec![(FreeFactor::Levy { gamma, sigma }, 1)],
            provenance: Provenance1D::IdMarginal,
        }
    }

    pub(crate) fn from_parts(
        rotation: Complex64,
        factors: Vec<(FreeFactor, u32)>,
        provenance: Provenance1D,
    ) -> Self {
        Self {
            rotation,
            factors,
            provenance,
        }
    }

    pub fn rotation(&self) -> Complex64 {
        self.rotation
    }

    pub fn factors(&self) -> &[(FreeFactor, u32)] {
        &self.factors
    }

    pub fn provenance(&self) -> Provenance1D {
        self.provenance
    }

    /// `self ⊠ other`.
    pub fn convolve(&self, other: &Self) -> Self {
        let mut factors = self.factors.clone();
        factors.extend(other.factors.iter().cloned());
        Self {
            rotation: self.rotation * other.rotation,
            factors,
            provenance: Provenance1D::ProductOfInverses,
        }
    }

    /// `self^{⊠n}`.
    pub fn power(&self, n: u32) -> Self {
        Self {
            rotation: self.rotation.powu(n),
            factors: self.factors.iter().map(|(f, k)| (f.clone(), k * n)).collect(),
            provenance: Provenance1D::ProductOfInverses,
        }
    }

    /// `δ_λ ⊠ self`.
    pub fn rotated(&self, lambda: Complex64) -> Self {
        Self {
            rotation: self.rotation * lambda,
            ..self.clone()
        }
    }

    pub fn mean(&self) -> Complex64 {
        self.factors
            .iter()
            .fold(self.rotation, |acc, (f, n)| acc * f.mean().powu(*n))
    }

    /// `η⁻¹(z)` by continuation of each factor's inverse along `[0, z]`;
    /// unbounded points through the reflection `η⁻¹(z) = conj(1/η⁻¹(1/z̄))`.
    pub fn eta_inv(&self, z: Complex64) -> Result<Complex64> {
        if is_bounded(z)? {
            Ok(z * self.inverse_ratio(z)?)
        } else {
            Ok(reflect_point(self.eta_inv(reflect_point(z))?))
        }
    }

    /// `η⁻¹(y)/y` at a bounded point.
    pub fn inverse_ratio(&self, y: Complex64) -> Result<Complex64> {
        let mut r = 1.0 / self.rotation;
        for (f, n) in &self.factors {
            r *= f.inverse_ratio(y)?.powu(*n);
        }
        Ok(r)
    }

    /// Forward map at a bounded point, with the factor ratios along the
    /// subordination branch.
    pub fn forward(&self, x: Complex64) -> Result<ForwardPoint> {
        if !is_bounded(x)? {
            return Err(Error::InvalidArgument(format!("forward solve needs |x| < 1, got {x}")));
        }
        let zero = Complex64::new(0.0, 0.0);
        let at_origin: Vec<Complex64> = self.factors.iter().map(|(f, _)| 1.0 / f.mean()).collect();
        if x == zero {
            return Ok(ForwardPoint {
                eta: zero,
                ratios: at_origin,
            });
        }
        if let [(FreeFactor::Atomic(nu), 1)] = self.factors.as_slice() {
            // η_ν⁻¹(y) = λx, so y = η_ν(λx) directly.
            let omega = self.rotation * x;
            let y = eta(nu, omega)?;
            if y.norm() == 0.0 {
                return Err(Error::EtaPole(omega));
            }
            return Ok(ForwardPoint {
                eta: y,
                ratios: vec![omega / y],
            });
        }
        self.continue_forward(x, at_origin)
    }

    fn atomic_indices(&self) -> Vec<usize> {
        self.factors
            .iter()
            .enumerate()
            .filter(|(_, (f, _))| matches!(f, FreeFactor::Atomic(_)))
            .map(|(i, _)| i)
            .collect()
    }

    fn continue_forward(&self, x: Complex64, at_origin: Vec<Complex64>) -> Result<ForwardPoint> {
        let atomic = self.atomic_indices();
        // unknowns: y followed by the atomic ratios
        let mut state: Vec<Complex64> = std::iter::once(Complex64::new(0.0, 0.0))
            .chain(atomic.iter().map(|&i| at_origin[i]))
            .collect();
        let mut prev: Option<(f64, Vec<Complex64>)> = None;
        let mut t = 0.0;
        let mut h = FORWARD_STEP;
        while t < 1.0 {
            let t_next = (t + h).min(1.0);
            let guess: Vec<Complex64> = match &prev {
                Some((tp, sp)) => {
                    let k = (t_next - t) / (t - tp);
                    state.iter().zip(sp).map(|(s, p)| s + (s - p) * k).collect()
                }
                None => {
                    let mut g = state.clone();
                    g[0] = x * t_next * self.mean();
                    g
                }
            };
            match self.newton_forward(x * t_next, &atomic, guess.clone()) {
                Some(next) if jump_ok(&guess, &next) => {
                    prev = Some((t, std::mem::replace(&mut state, next)));
                    t = t_next;
                }
                _ => {
                    h /= 2.0;
                    if h < FORWARD_MIN_STEP {
                        return Err(Error::NoConvergence { point: x });
                    }
                }
            }
        }
        let y = state[0];
        let mut ratios = Vec::with_capacity(self.factors.len());
        let mut next_atomic = 1;
        for (f, _) in &self.factors {
            match f {
                FreeFactor::Atomic(_) => {
                    ratios.push(state[next_atomic]);
                    next_atomic += 1;
                }
                FreeFactor::Levy { gamma, sigma } => {
                    ratios.push(FreeFactor::levy_ratio(*gamma, sigma, y).0)
                }
            }
        }
        Ok(ForwardPoint { eta: y, ratios })
    }

    fn residual(&self, x: Complex64, atomic: &[usize], state: &[Complex64]) -> (DVector<Complex64>, DMatrix<Complex64>) {
        let k = atomic.len();
        let y = state[0];
        let mut res = DVector::zeros(k + 1);
        let mut jac = DMatrix::zeros(k + 1, k + 1);
        let mut product = Complex64::new(1.0, 0.0);
        let mut dlog_y = Complex64::new(0.0, 0.0);
        let mut slot = 1;
        for (f, n) in &self.factors {
            match f {
                FreeFactor::Atomic(_) => {
                    product *= state[slot].powu(*n);
                    slot += 1;
                }
                FreeFactor::Levy { gamma, sigma } => {
                    let (l, dl) = FreeFactor::levy_ratio(*gamma, sigma, y);
                    product *= l.powu(*n);
                    dlog_y += dl * *n as f64;
                }
            }
        }
        res[0] = y * product - self.rotation * x;
        jac[(0, 0)] = product * (1.0 + y * dlog_y);
        for (slot, &fi) in atomic.iter().enumerate() {
            let row = slot + 1;
            let r = state[row];
            let n = self.factors[fi].1 as f64;
            jac[(0, row)] = y * product * n / r;
            let FreeFactor::Atomic(nu) = &self.factors[fi].0 else {
                unreachable!()
            };
            let (e, de) = eta_ratio_with_derivative(nu, y * r);
            res[row] = r * e - 1.0;
            jac[(row, 0)] = r * r * de;
            jac[(row, row)] = e + y * r * de;
        }
        (res, jac)
    }

    fn newton_forward(&self, x: Complex64, atomic: &[usize], mut state: Vec<Complex64>) -> Option<Vec<Complex64>> {
        for _ in 0..FORWARD_MAX_ITER {
            let (res, jac) = self.residual(x, atomic, &state);
            let step = jac.lu().solve(&res)?;
            let mut size = 0.0f64;
            for (s, d) in state.iter_mut().zip(step.iter()) {
                *s -= d;
                size = size.max(d.norm() / (1.0 + s.norm()));
            }
            if state.iter().any(|s| !(s.re.is_finite() && s.im.is_finite())) {
                return None;
            }
            if size <= FORWARD_TOL {
                let (res, _) = self.residual(x, atomic, &state);
                let scale = 1.0 + x.norm();
                return (res.iter().all(|r| r.norm() <= 1e-11 * scale)).then_some(state);
            }
        }
        None
    }

    /// `η(x)` at any off-torus point.
    pub fn eta(&self, x: Complex64) -> Result<Complex64> {
        if is_bounded(x)? {
            Ok(self.forward(x)?.eta)
        } else {
            Ok(reflect_point(self.forward(reflect_point(x))?.eta))
        }
    }

    /// `ψ(x) = η(x)/(1 − η(x))`.
    pub fn psi(&self, x: Complex64) -> Result<Complex64> {
        let y = self.eta(x)?;
        Ok(y / (1.0 - y))
    }

    /// Moments `m_0, ..., m_order` from the DFT of `ψ` on the circle of the
    /// given radius with `grid` points.
    pub fn moments(&self, order: usize, radius: f64, grid: usize) -> Result<Vec<Complex64>> {
        let mut values: Vec<Complex64> = (0..grid)
            .map(|k| {
                let x = Complex64::from_polar(radius, 2.0 * std::f64::consts::PI * k as f64 / grid as f64);
                self.psi(x)
            })
            .collect::<Result<_>>()?;
        FftPlanner::new().plan_fft_forward(grid).process(&mut values);
        let mut out = vec![Complex64::new(1.0, 0.0)];
        for p in 1..=order {
            out.push(values[p] / (grid as f64 * radius.powi(p as i32)));
        }
        Ok(out)
    }
}

fn jump_ok(guess: &[Complex64], next: &[Complex64]) -> bool {
    guess
        .iter()
        .zip(next)
        .all(|(g, n)| (g - n).norm() <= 0.25 * (1.0 + g.norm()))
}

/// `ν₁ ⊠ ν₂` for atomic circle measures.
pub fn free_convolve(nu1: &AtomicMeasure1D, nu2: &AtomicMeasure1D) -> Result<FreeLaw1D> {
    Ok(FreeLaw1D::from_atomic(nu1)?.convolve(&FreeLaw1D::from_atomic(nu2)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convolution::series_engine::free_convolution_moments_series;
    use crate::sampling::MeasureSampler;

    #[test]
    fn point_masses_multiply() {
        let law = free_convolve(&AtomicMeasure1D::point_mass(0.3), &AtomicMeasure1D::point_mass(1.1)).unwrap();
        let ab = Complex64::from_polar(1.0, 1.4);
        let z = Complex64::new(0.2, 0.1);
        assert!((law.eta_inv(z).unwrap() - z / ab).norm() < 1e-14);
        assert!((law.eta(z).unwrap() - z * ab).norm() < 1e-13);
    }

    #[test]
    fn rotation_rotates_moments() {
        let mut s = MeasureSampler::new(2);
        let nu = s.px_measure_1d(4);
        let law = free_convolve(&AtomicMeasure1D::point_mass(0.8), &nu).unwrap();
        let m = law.moments(8, 0.4, 128).unwrap();
        for p in 1..=8 {
            let expected = Complex64::from_polar(1.0, 0.8 * p as f64) * nu.moment(p as i32);
            assert!((m[p] - expected).norm() < 1e-10, "p={p}");
        }
    }

    #[test]
    fn pointwise_agrees_with_series_engine() {
        let nu = AtomicMeasure1D::probability([(0.0, 0.75), (std::f64::consts::PI, 0.25)]).unwrap();
        let law = free_convolve(&nu, &nu).unwrap();
        let m = law.moments(8, 0.4, 256).unwrap();
        let series = free_convolution_moments_series(&[(nu.clone(), 1), (nu, 1)], 8).unwrap();
        for p in 1..=8 {
            assert!((m[p] - series[p]).norm() < 1e-9, "p={p}: {} vs {}", m[p], series[p]);
        }
    }

    #[test]
    fn forward_round_trips_inverse() {
        let mut s = MeasureSampler::new(3);
        let law = FreeLaw1D::from_atomic(&s.px_measure_1d(3))
            .unwrap()
            .convolve(&FreeLaw1D::from_atomic(&s.px_measure_1d(4)).unwrap())
            .power(3);
        for _ in 0..20 {
            let x = s.disk_point(0.3);
            let y = law.eta(x).unwrap();
            assert!((law.eta_inv(y).unwrap() - x).norm() < 1e-12);
        }
    }

    #[test]
    fn mean_zero_rejected() {
        let nu = AtomicMeasure1D::probability([(0.0, 0.5), (std::f64::consts::PI, 0.5)]).unwrap();
        assert!(matches!(FreeLaw1D::from_atomic(&nu), Err(Error::MeanBelowThreshold(_))));
    }
}
