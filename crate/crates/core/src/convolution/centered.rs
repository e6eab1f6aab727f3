//! Centered pairs: the alternating-word moment formula and Haar absorption.
//!
//! For bi-free pairs `(u₁,v₁)`, `(u₂,v₂)` of centered unitaries,
//! `φ(a_m…a_1 b_n…b_1) = δ_{m,n} Π_k δ_{α(k),β(k)} φ(a_k b_k)` for
//! alternating words. Applied to `(u₁u₂)^p (v₁v₂)^q` this leaves only
//! `p = q`, where the moment is `(m₁,₁(μ₁) m₁,₁(μ₂))^p`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::measure::{AtomicMeasure2D, MomentTable2D, PX_THRESHOLD};

/// Moment of an alternating word. `left[k]` and `right[k]` are the labels
/// `α(k+1)`, `β(k+1)` counted from the inside; `covariance[k]` is
/// `φ(a_{k+1} b_{k+1})`, used only when the labels agree.
pub fn centered_alternating_moment(left: &[usize], right: &[usize], covariance: &[Complex64]) -> Result<Complex64> {
    for labels in [left, right] {
        if let Some(k) = labels.windows(2).position(|w| w[0] == w[1]) {
            return Err(Error::NonAlternating(k + 1));
        }
    }
    if left.len() != right.len() {
        return Ok(Complex64::new(0.0, 0.0));
    }
    if covariance.len() < left.len() {
        return Err(Error::InvalidArgument("one covariance per letter pair is required".into()));
    }
    let mut out = Complex64::new(1.0, 0.0);
    for (k, (a, b)) in left.iter().zip(right).enumerate() {
        if a != b {
            return Ok(Complex64::new(0.0, 0.0));
        }
        out *= covariance[k];
    }
    Ok(out)
}

/// Labels and exponent signs of `(x₁x₂)^p`, from the innermost letter.
fn word(p: i32) -> Vec<(usize, i32)> {
    let sign = p.signum();
    (0..2 * p.unsigned_abs() as usize)
        .map(|k| {
            // (x₁x₂)^p ends in x₂; (x₁x₂)^{-p} = (x₂* x₁*)^p ends in x₁*
            let inner = if sign > 0 { 2 } else { 1 };
            let label = if k % 2 == 0 { inner } else { 3 - inner };
            (label, sign)
        })
        .collect()
}

/// `m_{p,q}(μ₁ ⊠⊠ μ₂)` for centered factors, through the word formula.
pub fn word_moment(mu1: &AtomicMeasure2D, mu2: &AtomicMeasure2D, p: i32, q: i32) -> Result<Complex64> {
    if p == 0 && q == 0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let a = word(p);
    let b = word(q);
    let left: Vec<usize> = a.iter().map(|x| x.0).collect();
    let right: Vec<usize> = b.iter().map(|x| x.0).collect();
    let covariance: Vec<Complex64> = a
        .iter()
        .zip(&b)
        .map(|(&(label, sa), &(_, sb))| {
            let mu = if label == 1 { mu1 } else { mu2 };
            mu.moment(sa, sb)
        })
        .collect();
    centered_alternating_moment(&left, &right, &covariance)
}

/// Result of the Haar test.
#[derive(Debug, Clone, PartialEq)]
pub struct HaarReport {
    /// `μ₁ ⊠⊠ μ₂` is the Haar measure.
    pub is_haar: bool,
    pub m11: [Complex64; 2],
    /// Closed-form moments of `μ₁ ⊠⊠ μ₂`.
    pub table: MomentTable2D,
}

/// Table of the Haar measure: 1 at `(0,0)`, 0 elsewhere.
pub fn haar_table(order: usize) -> MomentTable2D {
    let mut t = MomentTable2D::zeros(order);
    t.set(0, 0, Complex64::new(1.0, 0.0));
    t
}

/// Decides whether `μ₁ ⊠⊠ μ₂` is Haar for measures with centered marginals.
pub fn haar_test(mu1: &AtomicMeasure2D, mu2: &AtomicMeasure2D, order: usize) -> Result<HaarReport> {
    for (k, mu) in [mu1, mu2].into_iter().enumerate() {
        for (p, q) in [(1, 0), (0, 1)] {
            let m = mu.moment(p, q);
            if m.norm() > PX_THRESHOLD {
                return Err(Error::NotCentered(format!(
                    "factor {} has marginal mean {m} in coordinate {}",
                    k + 1,
                    if p == 1 { 1 } else { 2 }
                )));
            }
        }
    }
    let m11 = [mu1.moment(1, 1), mu2.moment(1, 1)];
    let is_haar = m11.iter().any(|m| m.norm() <= PX_THRESHOLD);
    let base = m11[0] * m11[1];
    let mut table = haar_table(order);
    if !is_haar {
        for p in 1..=order as i32 {
            let v = base.powi(p);
            table.set(p, p, v);
            table.set(-p, -p, v.conj());
        }
    }
    Ok(HaarReport { is_haar, m11, table })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Weights 3/8 on (1,i), (−1,−i) and 1/8 on (1,−i), (−1,i): m₁,₁ = i/2.
    fn half_i() -> AtomicMeasure2D {
        use std::f64::consts::{FRAC_PI_2, PI};
        AtomicMeasure2D::probability([
            (0.0, FRAC_PI_2, 0.375),
            (PI, -FRAC_PI_2, 0.375),
            (0.0, -FRAC_PI_2, 0.125),
            (PI, FRAC_PI_2, 0.125),
        ])
        .unwrap()
    }

    fn half() -> AtomicMeasure2D {
        use std::f64::consts::PI;
        AtomicMeasure2D::probability([(0.0, 0.0, 0.375), (PI, PI, 0.375), (0.0, PI, 0.125), (PI, 0.0, 0.125)]).unwrap()
    }

    #[test]
    fn word_formula_cases() {
        let cov = [c(0.5, 0.0), c(0.0, 2.0)];
        assert_eq!(centered_alternating_moment(&[1, 2], &[1], &cov).unwrap(), c(0.0, 0.0));
        assert_eq!(centered_alternating_moment(&[1, 2], &[1, 2], &cov).unwrap(), c(0.0, 1.0));
        assert_eq!(centered_alternating_moment(&[1, 2], &[2, 1], &cov).unwrap(), c(0.0, 0.0));
        assert!(matches!(
            centered_alternating_moment(&[1, 1], &[1, 2], &cov),
            Err(Error::NonAlternating(1))
        ));
    }

    #[test]
    fn closed_form_example() {
        let r = haar_test(&half_i(), &half(), 4).unwrap();
        assert!(!r.is_haar);
        assert!((r.table.get(1, 1) - c(0.0, 0.25)).norm() < 1e-15);
        assert!((r.table.get(2, 2) - c(-1.0 / 16.0, 0.0)).norm() < 1e-15);
        for p in -4..=4 {
            for q in -4..=4 {
                let w = word_moment(&half_i(), &half(), p, q).unwrap();
                assert!((w - r.table.get(p, q)).norm() < 1e-15, "({p},{q})");
            }
        }
    }

    #[test]
    fn absorption_and_rejection() {
        use std::f64::consts::{FRAC_PI_2, PI};
        // m₁,₁ = 0: (1,1), (−1,−1), (1,−1), (−1,1) with equal weights
        let flat = AtomicMeasure2D::probability([(0.0, 0.0, 0.25), (PI, PI, 0.25), (0.0, PI, 0.25), (PI, 0.0, 0.25)]).unwrap();
        let r = haar_test(&flat, &half_i(), 3).unwrap();
        assert!(r.is_haar);
        assert_eq!(r.table, haar_table(3));
        let biased = AtomicMeasure2D::probability([(0.0, 0.0, 0.6), (PI, FRAC_PI_2, 0.4)]).unwrap();
        assert!(matches!(haar_test(&biased, &flat, 3), Err(Error::NotCentered(_))));
    }
}
