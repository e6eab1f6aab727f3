//! The formal power-series engine: convolution moments by series
//! reversion, composition and multiplication, independent of the
//! pointwise solvers.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::measure::{AtomicMeasure1D, AtomicMeasure2D, MomentTable2D, PX_THRESHOLD};
use crate::series::{Series1, Series2};
use crate::transforms::{sigma_series, sigma_series_from_table};

const ONE: Complex64 = Complex64::new(1.0, 0.0);

fn eta_series(nu: &AtomicMeasure1D, order: usize) -> Result<Series1> {
    let psi = Series1::from_fn(order, |k| if k == 0 { 0.0.into() } else { nu.moment(k as i32) });
    psi.div(&psi.add_constant(ONE))
}

/// η-series of `ν₁^{⊠n₁} ⊠ ...`: `η⁻¹ = z Π (η_k⁻¹/z)^{n_k}`, reverted.
pub fn free_convolution_eta_series(factors: &[(AtomicMeasure1D, u32)], order: usize) -> Result<Series1> {
    let mut ratio = Series1::constant(ONE, order);
    for (nu, n) in factors {
        if nu.mean().norm() <= PX_THRESHOLD {
            return Err(Error::MeanBelowThreshold(nu.mean().norm()));
        }
        let inverse = eta_series(nu, order)?.revert()?;
        ratio = ratio.mul(&inverse.shift_down().powi(*n));
    }
    ratio.shift_up().revert()
}

/// Moments `m_0, ..., m_order` of a free convolution of atomic measures.
pub fn free_convolution_moments_series(factors: &[(AtomicMeasure1D, u32)], order: usize) -> Result<Vec<Complex64>> {
    let eta = free_convolution_eta_series(factors, order)?;
    let psi = eta.div(&eta.scale(-ONE).add_constant(ONE))?;
    let mut out = psi.coeffs().to_vec();
    out[0] = ONE;
    Ok(out)
}

/// `m_{p,q}`, `0 ≤ p, q ≤ order`, of `μ₁^{⊠⊠n₁} ⊠⊠ ...` from the Σ-series
/// product and the marginal η-series:
/// `ψ = [ψ⁽¹⁾ + ψ⁽²⁾ + 1] · E/(1−E)`, `E = η⁽¹⁾ η⁽²⁾ Σ(η⁽¹⁾, η⁽²⁾)`.
pub fn bifree_moments_series(factors: &[(AtomicMeasure2D, u32)], order: usize) -> Result<Series2> {
    let mut sigma = Series2::constant(ONE, order);
    for (mu, n) in factors {
        let s = sigma_series(mu, order)?;
        for _ in 0..*n {
            sigma = sigma.mul(&s);
        }
    }
    let marginal = |j: usize| -> Result<Series1> {
        let list: Vec<(AtomicMeasure1D, u32)> = factors.iter().map(|(mu, n)| (mu.marginal(j), *n)).collect();
        free_convolution_eta_series(&list, order)
    };
    let (eta1, eta2) = (marginal(1)?, marginal(2)?);
    let psi_of = |eta: &Series1| eta.div(&eta.scale(-ONE).add_constant(ONE));
    let (psi1, psi2) = (psi_of(&eta1)?, psi_of(&eta2)?);
    let e = sigma
        .compose(&eta1, &eta2)?
        .mul(&Series2::from_z(&eta1))
        .mul(&Series2::from_w(&eta2));
    let ratio = e.div(&e.scale(-ONE).add_constant(ONE))?;
    let psi = Series2::from_z(&psi1)
        .add(&Series2::from_w(&psi2))
        .add_constant(ONE)
        .mul(&ratio);
    Ok(Series2::from_fn(order, |p, q| match (p, q) {
        (0, 0) => ONE,
        (p, 0) => psi1.coeff(p),
        (0, q) => psi2.coeff(q),
        _ => psi.get(p, q),
    }))
}

/// Largest `|Σ_table − Π Σ_k|` over `points`, where `Σ_table` is rebuilt
/// from the `p, q ≥ 0` block of `table` as a series of the given order.
pub fn sigma_self_consistency(
    table: &MomentTable2D,
    factors: &[(AtomicMeasure2D, u32)],
    order: usize,
    points: &[(Complex64, Complex64)],
) -> Result<f64> {
    let rebuilt = sigma_series_from_table(table, order)?;
    let mut worst = 0.0f64;
    for &(z, w) in points {
        let mut product = ONE;
        for (mu, n) in factors {
            let v = crate::transforms::sigma_pointwise(mu, z, w, &crate::transforms::DomainWindow::default())?;
            product *= v.powu(*n);
        }
        worst = worst.max((rebuilt.eval(z, w) - product).norm());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::MeasureSampler;

    #[test]
    fn single_factor_gives_own_moments() {
        let mut s = MeasureSampler::new(70);
        let nu = s.px_measure_1d(4);
        let m = free_convolution_moments_series(&[(nu.clone(), 1)], 8).unwrap();
        for p in 1..=8 {
            assert!((m[p] - nu.moment(p as i32)).norm() < 1e-10);
        }
        let mu = s.px_measure_2d(4);
        let table = bifree_moments_series(&[(mu.clone(), 1)], 8).unwrap();
        for p in 0..=8 {
            for q in 0..=8 {
                assert!((table.get(p, q) - mu.moment(p as i32, q as i32)).norm() < 1e-9, "({p},{q})");
            }
        }
    }

    #[test]
    fn point_mass_rotates() {
        let mut s = MeasureSampler::new(71);
        let nu = s.px_measure_1d(3);
        let m = free_convolution_moments_series(&[(AtomicMeasure1D::point_mass(0.5), 1), (nu.clone(), 1)], 8).unwrap();
        for p in 1..=8 {
            let expected = Complex64::from_polar(1.0, 0.5 * p as f64) * nu.moment(p as i32);
            assert!((m[p] - expected).norm() < 1e-10);
        }
    }
}
