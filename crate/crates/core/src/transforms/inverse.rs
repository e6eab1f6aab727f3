//! Inversion of η for atomic circle measures.
//!
//! Near 0, `η_ν(u) = u · e(u)` with `e(0) = m(ν)`. Instead of solving
//! `η(u) = z` for `u` we solve `r · e(z r) = 1` for the ratio
//! `r = η⁻¹(z)/z`, which is regular at `z = 0` with `r(0) = 1/m(ν)`.
//! The solution is continued along the ray from 0 to `z`.

use num_complex::Complex64;

use super::{eta, is_bounded, reflect_point, DomainWindow};
use crate::error::{Error, Result};
use crate::measure::{AtomicMeasure1D, PX_THRESHOLD};

/// Newton step tolerance (relative).
pub const NEWTON_TOL: f64 = 1e-13;
/// Newton iterations allowed per continuation step.
pub const NEWTON_MAX_ITER: usize = 50;
/// Initial continuation step, as a fraction of the path.
pub const CONTINUATION_STEP: f64 = 0.1;
const MIN_STEP: f64 = 1e-4;

/// `(e(u), e'(u))` where `e(u) = η_ν(u)/u`.
pub(crate) fn eta_ratio_with_derivative(nu: &AtomicMeasure1D, u: Complex64) -> (Complex64, Complex64) {
    let mut phi = Complex64::new(0.0, 0.0);
    let mut dphi = Complex64::new(0.0, 0.0);
    for &(x, wt) in nu.points() {
        let g = x / (1.0 - u * x);
        phi += wt * g;
        dphi += wt * g * g;
    }
    let psi = u * phi;
    let dpsi = phi + u * dphi;
    let d = 1.0 + psi;
    (phi / d, (dphi * d - phi * dpsi) / (d * d))
}

/// `η_ν(u)/u`, equal to `m(ν)` at `u = 0`.
pub fn eta_ratio(nu: &AtomicMeasure1D, u: Complex64) -> Complex64 {
    eta_ratio_with_derivative(nu, u).0
}

fn newton_ratio(nu: &AtomicMeasure1D, y: Complex64, start: Complex64) -> Option<Complex64> {
    let mut r = start;
    for _ in 0..NEWTON_MAX_ITER {
        let (e, de) = eta_ratio_with_derivative(nu, y * r);
        let f = r * e - 1.0;
        let j = e + y * r * de;
        let step = f / j;
        r -= step;
        if !(r.re.is_finite() && r.im.is_finite()) {
            return None;
        }
        if step.norm() <= NEWTON_TOL * (1.0 + r.norm()) {
            return Some(r);
        }
    }
    None
}

/// The ratio `η_ν⁻¹(y)/y` for `|y| < 1`, continued along `[0, y]`.
pub(crate) fn solve_inverse_ratio(nu: &AtomicMeasure1D, y: Complex64) -> Result<Complex64> {
    let m = nu.mean();
    if m.norm() <= PX_THRESHOLD {
        return Err(Error::MeanBelowThreshold(m.norm()));
    }
    let mut r = 1.0 / m;
    if y == Complex64::new(0.0, 0.0) {
        return Ok(r);
    }
    let mut t = 0.0;
    let mut h = CONTINUATION_STEP;
    let mut prev: Option<(f64, Complex64)> = None;
    while t < 1.0 {
        let t_next = (t + h).min(1.0);
        let guess = match prev {
            Some((tp, rp)) => r + (r - rp) * ((t_next - t) / (t - tp)),
            None => r,
        };
        match newton_ratio(nu, y * t_next, guess) {
            Some(rn) if (rn - guess).norm() <= 0.25 * (1.0 + r.norm()) => {
                prev = Some((t, r));
                t = t_next;
                r = rn;
            }
            _ => {
                h /= 2.0;
                if h < MIN_STEP {
                    return Err(Error::NoConvergence { point: y });
                }
            }
        }
    }
    Ok(r)
}

/// `η_ν⁻¹(z)` for `z ∈ D_r ∪ Δ_r`. Values on `Δ_r` come from the reflection
/// `η⁻¹(z) = conj(1 / η⁻¹(1/z̄))`.
pub fn eta_inv_pointwise(
    nu: &AtomicMeasure1D,
    z: Complex64,
    window: &DomainWindow,
) -> Result<Complex64> {
    window.check(z)?;
    if is_bounded(z)? {
        eta_inv_bounded(nu, z)
    } else {
        let u = eta_inv_bounded(nu, reflect_point(z))?;
        Ok(reflect_point(u))
    }
}

fn eta_inv_bounded(nu: &AtomicMeasure1D, z: Complex64) -> Result<Complex64> {
    let u = z * solve_inverse_ratio(nu, z)?;
    let back = eta(nu, u)?;
    if (back - z).norm() > 1e-12 * (1.0 + z.norm()) {
        return Err(Error::NoConvergence { point: z });
    }
    Ok(u)
}

/// `ψ_ν⁻¹(z) = η_ν⁻¹(z/(1+z))`.
pub fn psi_inv(nu: &AtomicMeasure1D, z: Complex64, window: &DomainWindow) -> Result<Complex64> {
    eta_inv_pointwise(nu, z / (1.0 + z), window)
}
