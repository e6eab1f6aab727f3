//! Σ, S, Σᵒᵖ and Sᵒᵖ of atomic measures.
//!
//! Writing `u = η⁻¹(z)` and `ρ = u/z`, the Σ quotient becomes
//! `Σ = ∫ N₁ N₂ dμ / ∫ D₁ D₂ dμ` with `N = ρ s/(1−us)` and `D = 1/(1−us)`
//! for a bounded coordinate. For an unbounded coordinate with bounded
//! representative `z' = 1/z̄`, `u' = η⁻¹(z')`, `ρ' = u'/z'`, both factors
//! are rescaled by the same constant to
//! `N = t/(c−t)`, `D = κ/(c−t)` where `c = conj(u')`, `κ = conj(ρ')`,
//! which stays finite as `|w| → ∞`.

use num_complex::Complex64;

use super::inverse::solve_inverse_ratio;
use super::{h2, is_bounded, psi_inv, reflect_point, require_px, DomainComponent, DomainWindow};
use crate::error::{Error, Result};
use crate::measure::{AtomicMeasure1D, AtomicMeasure2D};

/// Per-atom numerator and denominator factors of one coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomicKernel {
    pub num: Vec<Complex64>,
    pub den: Vec<Complex64>,
}

impl AtomicKernel {
    /// Kernel for a coordinate whose bounded representative has inverse
    /// value `u` and ratio `ratio = u / rep`; `bounded` selects the form.
    pub fn new<I>(coords: I, bounded: bool, u: Complex64, ratio: Complex64) -> Self
    where
        I: IntoIterator<Item = Complex64>,
    {
        let mut num = Vec::new();
        let mut den = Vec::new();
        if bounded {
            for x in coords {
                let g = 1.0 / (1.0 - u * x);
                num.push(ratio * x * g);
                den.push(g);
            }
        } else {
            let c = u.conj();
            let kappa = ratio.conj();
            for x in coords {
                let g = 1.0 / (c - x);
                num.push(x * g);
                den.push(kappa * g);
            }
        }
        Self { num, den }
    }

    /// `∫ N₁N₂ dμ / ∫ D₁D₂ dμ`.
    pub fn pair<W: IntoIterator<Item = f64>>(first: &Self, second: &Self, weights: W) -> Result<Complex64> {
        let mut num = Complex64::new(0.0, 0.0);
        let mut den = Complex64::new(0.0, 0.0);
        for (i, wt) in weights.into_iter().enumerate() {
            num += wt * first.num[i] * second.num[i];
            den += wt * first.den[i] * second.den[i];
        }
        if den.norm() <= 1e-13 * (1.0 + num.norm()) {
            return Err(Error::VanishingDenominator {
                z: Complex64::new(f64::NAN, f64::NAN),
                w: Complex64::new(f64::NAN, f64::NAN),
            });
        }
        Ok(num / den)
    }

    /// `∫ D₁D₂ dμ`, the rescaled `H` value.
    pub fn denominator<W: IntoIterator<Item = f64>>(first: &Self, second: &Self, weights: W) -> Complex64 {
        weights
            .into_iter()
            .enumerate()
            .map(|(i, wt)| wt * first.den[i] * second.den[i])
            .sum()
    }
}

pub(crate) fn weights(mu: &AtomicMeasure2D) -> impl Iterator<Item = f64> + '_ {
    mu.points().iter().map(|p| p.2)
}

fn coords(mu: &AtomicMeasure2D, j: usize) -> impl Iterator<Item = Complex64> + '_ {
    mu.points().iter().map(move |p| if j == 1 { p.0 } else { p.1 })
}

/// Inverse data `(bounded, u', ratio')` of a point for the marginal `nu`.
pub(crate) fn prepare(nu: &AtomicMeasure1D, z: Complex64) -> Result<(bool, Complex64, Complex64)> {
    let bounded = is_bounded(z)?;
    let rep = if bounded { z } else { reflect_point(z) };
    let ratio = solve_inverse_ratio(nu, rep)?;
    Ok((bounded, rep * ratio, ratio))
}

/// Σ of an atomic measure from prepared coordinates.
pub(crate) fn sigma_from_prepared(
    mu: &AtomicMeasure2D,
    first: (bool, Complex64, Complex64),
    second: (bool, Complex64, Complex64),
) -> Result<Complex64> {
    if !first.0 && !second.0 {
        let k1 = AtomicKernel::new(coords(mu, 1), true, first.1, first.2);
        let k2 = AtomicKernel::new(coords(mu, 2), true, second.1, second.2);
        return Ok(1.0 / AtomicKernel::pair(&k1, &k2, weights(mu))?.conj());
    }
    let k1 = AtomicKernel::new(coords(mu, 1), first.0, first.1, first.2);
    let k2 = AtomicKernel::new(coords(mu, 2), second.0, second.1, second.2);
    AtomicKernel::pair(&k1, &k2, weights(mu))
}

fn with_point(err: Error, z: Complex64, w: Complex64) -> Error {
    match err {
        Error::VanishingDenominator { .. } => Error::VanishingDenominator { z, w },
        other => other,
    }
}

/// `Σ_μ(z,w) = ψ_μ(η₁⁻¹(z), η₂⁻¹(w)) / (zw H_μ(η₁⁻¹(z), η₂⁻¹(w)))` on `Ω_r`.
/// On `Δ_r × Δ_r` the value comes from `Σ(z,w) = 1/conj(Σ(1/z̄, 1/w̄))`.
pub fn sigma_pointwise(
    mu: &AtomicMeasure2D,
    z: Complex64,
    w: Complex64,
    window: &DomainWindow,
) -> Result<Complex64> {
    require_px(mu)?;
    window.check(z)?;
    window.check(w)?;
    DomainComponent::classify(z, w)?;
    let p1 = prepare(&mu.marginal(1), z)?;
    let p2 = prepare(&mu.marginal(2), w)?;
    sigma_from_prepared(mu, p1, p2).map_err(|e| with_point(e, z, w))
}

fn nonzero(z: Complex64, w: Complex64) -> Result<()> {
    if z.norm() == 0.0 || w.norm() == 0.0 {
        return Err(Error::InvalidArgument("S-transforms need z, w nonzero".into()));
    }
    Ok(())
}

/// `S_μ(z,w) = (1+z)/z · (1+w)/w · [1 − (1+z+w)/H_μ(ψ₁⁻¹(z), ψ₂⁻¹(w))]`.
pub fn s_transform(
    mu: &AtomicMeasure2D,
    z: Complex64,
    w: Complex64,
    window: &DomainWindow,
) -> Result<Complex64> {
    require_px(mu)?;
    nonzero(z, w)?;
    let u = psi_inv(&mu.marginal(1), z, window)?;
    let v = psi_inv(&mu.marginal(2), w, window)?;
    let h = h2(mu, u, v)?;
    Ok((1.0 + z) / z * (1.0 + w) / w * (1.0 - (1.0 + z + w) / h))
}

fn check_bidisk(z: Complex64, w: Complex64, window: &DomainWindow) -> Result<()> {
    if z.norm() < window.r && w.norm() < window.r {
        Ok(())
    } else {
        Err(Error::OutsideBidisk { z, w })
    }
}

/// `Σᵒᵖ_μ(z,w) = [ψ_μ(u,v)/z + 1/(1−z)] / [ψ_μ(u,v)/w + 1/(1−w)]` with
/// `u = η₁⁻¹(z)`, `v = η₂⁻¹(w)`, on the bidisk `D_r × D_r` only.
pub fn sigma_op_pointwise(
    mu: &AtomicMeasure2D,
    z: Complex64,
    w: Complex64,
    window: &DomainWindow,
) -> Result<Complex64> {
    require_px(mu)?;
    check_bidisk(z, w, window)?;
    let ru = solve_inverse_ratio(&mu.marginal(1), z)?;
    let rv = solve_inverse_ratio(&mu.marginal(2), w)?;
    let (u, v) = (z * ru, w * rv);
    let mut psi_over_z = Complex64::new(0.0, 0.0);
    let mut psi_over_w = Complex64::new(0.0, 0.0);
    for &(s, t, wt) in mu.points() {
        let gs = 1.0 / (1.0 - u * s);
        let gt = 1.0 / (1.0 - v * t);
        psi_over_z += wt * ru * s * gs * v * t * gt;
        psi_over_w += wt * u * s * gs * rv * t * gt;
    }
    let num = psi_over_z + 1.0 / (1.0 - z);
    let den = psi_over_w + 1.0 / (1.0 - w);
    if den.norm() <= 1e-13 {
        return Err(Error::VanishingDenominator { z, w });
    }
    Ok(num / den)
}

/// `Sᵒᵖ_μ(z,w) = w(z+1)/(z(w+1)) · [1 + (z−w)/(H_μ(ψ₁⁻¹(z), ψ₂⁻¹(w)) − z − 1)]`.
pub fn s_op_transform(
    mu: &AtomicMeasure2D,
    z: Complex64,
    w: Complex64,
    window: &DomainWindow,
) -> Result<Complex64> {
    require_px(mu)?;
    nonzero(z, w)?;
    check_bidisk(z / (1.0 + z), w / (1.0 + w), window)?;
    let u = psi_inv(&mu.marginal(1), z, window)?;
    let v = psi_inv(&mu.marginal(2), w, window)?;
    let h = h2(mu, u, v)?;
    let den = h - z - 1.0;
    if den.norm() <= 1e-13 {
        return Err(Error::VanishingDenominator { z, w });
    }
    Ok(w * (z + 1.0) / (z * (w + 1.0)) * (1.0 + (z - w) / den))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::product_measure;
    use crate::sampling::MeasureSampler;

    fn window() -> DomainWindow {
        DomainWindow::new(0.3).unwrap()
    }

    fn sample_point(s: &mut MeasureSampler, r: f64) -> Complex64 {
        let z = s.disk_point(r);
        if s.uniform(0.0, 1.0) < 0.5 {
            z
        } else {
            reflect_point(z)
        }
    }

    #[test]
    fn point_mass_sigma_is_one() {
        let mu = AtomicMeasure2D::point_mass(0.4, -2.0);
        let mut s = MeasureSampler::new(3);
        for _ in 0..50 {
            let z = sample_point(&mut s, 0.29);
            let w = sample_point(&mut s, 0.29);
            let v = sigma_pointwise(&mu, z, w, &window()).unwrap();
            assert!((v - 1.0).norm() < 1e-12);
        }
    }

    #[test]
    fn product_measure_sigma_is_one() {
        let mut s = MeasureSampler::new(4);
        let mu = product_measure(&s.px_measure_1d(3), &s.px_measure_1d(4));
        for _ in 0..50 {
            let z = sample_point(&mut s, 0.29);
            let w = sample_point(&mut s, 0.29);
            let v = sigma_pointwise(&mu, z, w, &window()).unwrap();
            assert!((v - 1.0).norm() < 1e-10, "{v}");
        }
    }

    #[test]
    fn value_at_origin_and_symmetry() {
        let mut s = MeasureSampler::new(8);
        for _ in 0..10 {
            let mu = s.px_measure_2d(4);
            let zero = Complex64::new(0.0, 0.0);
            let v = sigma_pointwise(&mu, zero, zero, &window()).unwrap();
            let expected = mu.moment(1, 1) / (mu.moment(1, 0) * mu.moment(0, 1));
            assert!((v - expected).norm() < 1e-12);
            for _ in 0..10 {
                let z = sample_point(&mut s, 0.29);
                let w = sample_point(&mut s, 0.29);
                let a = sigma_pointwise(&mu, z, w, &window()).unwrap();
                let b = sigma_pointwise(&mu, reflect_point(z), reflect_point(w), &window()).unwrap();
                assert!((a - 1.0 / b.conj()).norm() < 1e-10 * (1.0 + a.norm()));
            }
            let far = sigma_pointwise(&mu, Complex64::new(1e-6, 0.0), Complex64::new(0.0, 1e6), &window())
                .unwrap();
            assert!((far - 1.0).norm() < 1e-5);
        }
    }

    #[test]
    fn s_transform_substitution() {
        let mut s = MeasureSampler::new(9);
        for _ in 0..10 {
            let mu = s.px_measure_2d(3);
            let z = s.disk_point(0.2);
            let w = s.disk_point(0.2);
            let st = s_transform(&mu, z, w, &window()).unwrap();
            let sg = sigma_pointwise(&mu, z / (1.0 + z), w / (1.0 + w), &window()).unwrap();
            assert!((st - sg).norm() < 1e-10);
        }
    }

    #[test]
    fn opposite_reflection_identity() {
        let mut s = MeasureSampler::new(10);
        for _ in 0..10 {
            let mu = s.px_measure_2d(4);
            let star = mu.reflect();
            for _ in 0..10 {
                let z = s.disk_point(0.2);
                let w = s.disk_point(0.2);
                let op = sigma_op_pointwise(&star, z, w, &window()).unwrap();
                let direct = sigma_pointwise(&mu, z, 1.0 / w, &window()).unwrap();
                assert!((op - direct).norm() < 1e-10);
                let sop = s_op_transform(&mu, z, w, &DomainWindow::new(0.5).unwrap()).unwrap();
                let sig = sigma_op_pointwise(&mu, z / (1.0 + z), w / (1.0 + w), &window()).unwrap();
                assert!((sop - sig).norm() < 1e-10);
            }
        }
        let d = AtomicMeasure2D::point_mass(1.0, 2.0);
        let v = sigma_op_pointwise(&d, Complex64::new(0.1, 0.1), Complex64::new(-0.2, 0.0), &window()).unwrap();
        assert!((v - 1.0).norm() < 1e-13);
        assert!(matches!(
            sigma_op_pointwise(&d, Complex64::new(3.0, 0.0), Complex64::new(0.1, 0.0), &window()),
            Err(Error::OutsideBidisk { .. })
        ));
    }
}
