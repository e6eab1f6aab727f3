//! Taylor expansion of Σ at `(0,0)` from moment data.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::measure::{AtomicMeasure2D, MomentTable2D};
use crate::series::{Series1, Series2};

const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// `η = ψ/(1+ψ)` as a series, from `ψ`'s coefficients `m_1, m_2, ...`.
pub(crate) fn eta_series_from_moments<F: Fn(usize) -> Complex64>(moment: F, order: usize) -> Result<Series1> {
    let psi = Series1::from_fn(order, |k| if k == 0 { 0.0.into() } else { moment(k) });
    psi.div(&psi.add_constant(ONE))
}

/// `z/(1−z)` truncated at `order`.
pub(crate) fn geometric(order: usize) -> Series1 {
    Series1::from_fn(order, |k| if k == 0 { 0.0.into() } else { ONE })
}

/// The inverse η-series of both marginals of a table.
pub(crate) fn marginal_inverses(table: &MomentTable2D, order: usize) -> Result<[Series1; 2]> {
    let eta1 = eta_series_from_moments(|k| table.get(k as i32, 0), order)?;
    let eta2 = eta_series_from_moments(|k| table.get(0, k as i32), order)?;
    if eta1.coeff(1).norm() == 0.0 || eta2.coeff(1).norm() == 0.0 {
        return Err(Error::NotInPx("marginal mean is zero".into()));
    }
    Ok([eta1.revert()?, eta2.revert()?])
}

/// Σ-series of the law whose moments `m_{p,q}`, `0 ≤ p, q ≤ order + 1`, are
/// read from `table`:
/// `Σ = Q(u,v)·(u/z)·(v/w) / [1 + z/(1−z) + w/(1−w) + zw·Q(u,v)(u/z)(v/w)]`
/// with `Q(x,y) = ψ(x,y)/(xy)` and `u`, `v` the inverse η-series.
pub fn sigma_series_from_table(table: &MomentTable2D, order: usize) -> Result<Series2> {
    if table.order() < order + 1 {
        return Err(Error::InvalidArgument(format!(
            "table of order {} cannot give a Σ-series of order {order}",
            table.order()
        )));
    }
    let [u, v] = marginal_inverses(table, order)?;
    let q = Series2::from_fn(order, |i, j| table.get(i as i32 + 1, j as i32 + 1));
    let numerator = q
        .compose(&u, &v)?
        .mul(&Series2::from_z(&u.shift_down()))
        .mul(&Series2::from_w(&v.shift_down()));
    let zw = Series2::from_fn(order, |p, q| if p == 1 && q == 1 { ONE } else { 0.0.into() });
    let g = geometric(order);
    let denominator = numerator
        .mul(&zw)
        .add(&Series2::from_z(&g))
        .add(&Series2::from_w(&g))
        .add_constant(ONE);
    numerator.div(&denominator)
}

/// Taylor coefficients of `Σ_μ` at `(0,0)` through `order`.
pub fn sigma_series(mu: &AtomicMeasure2D, order: usize) -> Result<Series2> {
    super::require_px(mu)?;
    sigma_series_from_table(&MomentTable2D::from_measure(mu, order + 1), order)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::MeasureSampler;
    use crate::transforms::{sigma_pointwise, DomainWindow};

    #[test]
    fn point_mass_series_is_one() {
        let s = sigma_series(&AtomicMeasure2D::point_mass(0.3, 1.0), 8).unwrap();
        assert!(s.max_abs_diff(&Series2::constant(ONE, 8)) < 1e-13);
    }

    #[test]
    fn agrees_with_pointwise() {
        let mut sampler = MeasureSampler::new(21);
        for _ in 0..5 {
            let mu = sampler.px_measure_2d(4);
            let s = sigma_series(&mu, 12).unwrap();
            let c0 = mu.moment(1, 1) / (mu.moment(1, 0) * mu.moment(0, 1));
            assert!((s.get(0, 0) - c0).norm() < 1e-12);
            let z = sampler.circle_point(0.05);
            let w = sampler.circle_point(0.05);
            let p = sigma_pointwise(&mu, z, w, &DomainWindow::default()).unwrap();
            assert!((s.eval(z, w) - p).norm() < 1e-9);
        }
    }
}
