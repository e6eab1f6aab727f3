//! Truncated formal power series in one and two variables.
//!
//! Every operation keeps the truncation order of its inputs (which must
//! match) and discards higher coefficients. Sums run in ascending index
//! order so results are bitwise reproducible; no compensated summation is
//! used, which is adequate for the orders (≤ 16) used here.

use std::fmt::Write as _;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default truncation order for one-variable series.
pub const DEFAULT_ORDER_1D: usize = 16;
/// Default truncation order (per variable) for two-variable series.
pub const DEFAULT_ORDER_2D: usize = 12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// `c_0 + c_1 z + ... + c_N z^N`.
#[derive(Debug, Clone, PartialEq)]
pub struct Series1 {
    coeffs: Vec<Complex64>,
}

impl Series1 {
    /// Builds a series of the given order, padding or truncating `coeffs`.
    pub fn new(mut coeffs: Vec<Complex64>, order: usize) -> Self {
        coeffs.resize(order + 1, ZERO);
        Self { coeffs }
    }

    pub fn from_fn<F: FnMut(usize) -> Complex64>(order: usize, f: F) -> Self {
        Self {
            coeffs: (0..=order).map(f).collect(),
        }
    }

    pub fn zero(order: usize) -> Self {
        Self::new(Vec::new(), order)
    }

    pub fn constant(c: Complex64, order: usize) -> Self {
        Self::new(vec![c], order)
    }

    /// The series `z`.
    pub fn var(order: usize) -> Self {
        Self::new(vec![ZERO, ONE], order)
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Complex64 {
        self.coeffs.get(k).copied().unwrap_or(ZERO)
    }

    fn same_order(&self, other: &Self) {
        assert_eq!(self.order(), other.order(), "series orders differ");
    }

    pub fn add(&self, other: &Self) -> Self {
        self.same_order(other);
        Self {
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.same_order(other);
        Self {
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    pub fn add_constant(&self, c: Complex64) -> Self {
        let mut out = self.clone();
        out.coeffs[0] += c;
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.same_order(other);
        let n = self.order();
        let mut out = vec![ZERO; n + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if *a == ZERO {
                continue;
            }
            for (j, b) in other.coeffs[..=n - i].iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self { coeffs: out }
    }

    /// `self / other`; `other` must have a nonzero constant term.
    pub fn div(&self, other: &Self) -> Result<Self> {
        self.same_order(other);
        let b0 = other.coeffs[0];
        if b0 == ZERO {
            return Err(Error::NonUnitSeries);
        }
        let n = self.order();
        let mut out = vec![ZERO; n + 1];
        for k in 0..=n {
            let mut acc = self.coeffs[k];
            for j in 1..=k {
                acc -= other.coeffs[j] * out[k - j];
            }
            out[k] = acc / b0;
        }
        Ok(Self { coeffs: out })
    }

    pub fn recip(&self) -> Result<Self> {
        Self::constant(ONE, self.order()).div(self)
    }

    /// `z · self`, truncated.
    pub fn shift_up(&self) -> Self {
        let mut c = vec![ZERO];
        c.extend_from_slice(&self.coeffs[..self.order()]);
        Self { coeffs: c }
    }

    /// `(self - c_0) / z`, with a zero top coefficient.
    pub fn shift_down(&self) -> Self {
        let mut c = self.coeffs[1..].to_vec();
        c.push(ZERO);
        Self { coeffs: c }
    }

    pub fn derivative(&self) -> Self {
        let n = self.order();
        Self::from_fn(n, |k| {
            if k < n {
                self.coeffs[k + 1] * (k + 1) as f64
            } else {
                ZERO
            }
        })
    }

    pub fn exp(&self) -> Self {
        let n = self.order();
        let mut out = vec![ZERO; n + 1];
        out[0] = self.coeffs[0].exp();
        // k b_k = sum_{j=1}^k j a_j b_{k-j}
        for k in 1..=n {
            let mut acc = ZERO;
            for j in 1..=k {
                acc += self.coeffs[j] * out[k - j] * j as f64;
            }
            out[k] = acc / k as f64;
        }
        Self { coeffs: out }
    }

    /// Principal logarithm; the constant term must lie off `(-∞, 0]`.
    pub fn log(&self) -> Result<Self> {
        let a0 = self.coeffs[0];
        if a0.im == 0.0 && a0.re <= 0.0 {
            return Err(Error::BranchCut);
        }
        let n = self.order();
        let mut out = vec![ZERO; n + 1];
        out[0] = a0.ln();
        // k a_k = sum_{j=1}^k j b_j a_{k-j}
        for k in 1..=n {
            let mut acc = self.coeffs[k] * k as f64;
            for j in 1..k {
                acc -= out[j] * self.coeffs[k - j] * j as f64;
            }
            out[k] = acc / (a0 * k as f64);
        }
        Ok(Self { coeffs: out })
    }

    pub fn powi(&self, p: u32) -> Self {
        let mut out = Self::constant(ONE, self.order());
        for _ in 0..p {
            out = out.mul(self);
        }
        out
    }

    /// `outer(inner(z))`; `inner` must vanish at 0.
    pub fn compose(&self, inner: &Self) -> Result<Self> {
        self.same_order(inner);
        if inner.coeffs[0] != ZERO {
            return Err(Error::NonzeroInnerConstant);
        }
        let n = self.order();
        let mut out = Self::zero(n);
        for k in (0..=n).rev() {
            out = out.mul(inner).add_constant(self.coeffs[k]);
        }
        Ok(out)
    }

    fn check_revertible(&self) -> Result<()> {
        if self.coeffs[0] != ZERO || self.order() == 0 || self.coeffs[1] == ZERO {
            return Err(Error::NotRevertible);
        }
        Ok(())
    }

    /// Compositional inverse by Lagrange inversion:
    /// `[z^n] g = (1/n) [z^{n-1}] (z / f)^n`.
    pub fn revert(&self) -> Result<Self> {
        self.check_revertible()?;
        let n = self.order();
        let h = self.shift_down().recip()?;
        let mut out = vec![ZERO; n + 1];
        let mut power = Self::constant(ONE, n);
        for k in 1..=n {
            power = power.mul(&h);
            out[k] = power.coeffs[k - 1] / k as f64;
        }
        Ok(Self { coeffs: out })
    }

    /// Compositional inverse by Newton iteration on series,
    /// `g ← g − (f(g) − z) / f'(g)`; used as an independent check of
    /// [`Series1::revert`].
    pub fn revert_newton(&self) -> Result<Self> {
        self.check_revertible()?;
        let n = self.order();
        let z = Self::var(n);
        let df = self.derivative();
        let mut g = z.scale(ONE / self.coeffs[1]);
        let mut steps = 1usize;
        // Each step doubles the number of correct coefficients.
        while steps <= n + 1 {
            let residual = self.compose(&g)?.sub(&z);
            g = g.sub(&residual.div(&df.compose(&g)?)?);
            steps *= 2;
        }
        let residual = self.compose(&g)?.sub(&z);
        g = g.sub(&residual.div(&df.compose(&g)?)?);
        Ok(g)
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(ZERO, |acc, c| acc * z + c)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// CSV dump with header `p,re,im`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("p,re,im\n");
        for (p, c) in self.coeffs.iter().enumerate() {
            let _ = writeln!(s, "{p},{:.16e},{:.16e}", c.re, c.im);
        }
        s
    }
}

/// `Σ_{p,q ≤ N} c_{p,q} z^p w^q`, truncated rectangularly.
#[derive(Debug, Clone, PartialEq)]
pub struct Series2 {
    order: usize,
    coeffs: Vec<Complex64>,
}

impl Series2 {
    pub fn zero(order: usize) -> Self {
        let side = order + 1;
        Self {
            order,
            coeffs: vec![ZERO; side * side],
        }
    }

    pub fn constant(c: Complex64, order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = c;
        s
    }

    pub fn from_fn<F: FnMut(usize, usize) -> Complex64>(order: usize, mut f: F) -> Self {
        let mut s = Self::zero(order);
        for p in 0..=order {
            for q in 0..=order {
                s.set(p, q, f(p, q));
            }
        }
        s
    }

    /// A series in `z` alone.
    pub fn from_z(a: &Series1) -> Self {
        Self::from_fn(a.order(), |p, q| if q == 0 { a.coeff(p) } else { ZERO })
    }

    /// A series in `w` alone.
    pub fn from_w(a: &Series1) -> Self {
        Self::from_fn(a.order(), |p, q| if p == 0 { a.coeff(q) } else { ZERO })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn get(&self, p: usize, q: usize) -> Complex64 {
        self.coeffs[p * (self.order + 1) + q]
    }

    pub fn set(&mut self, p: usize, q: usize, c: Complex64) {
        self.coeffs[p * (self.order + 1) + q] = c;
    }

    /// Row `p` as a series in `w`.
    fn row(&self, p: usize) -> Series1 {
        Series1::from_fn(self.order, |q| self.get(p, q))
    }

    fn set_row(&mut self, p: usize, row: &Series1) {
        for q in 0..=self.order {
            self.set(p, q, row.coeff(q));
        }
    }

    fn same_order(&self, other: &Self) {
        assert_eq!(self.order, other.order, "series orders differ");
    }

    pub fn add(&self, other: &Self) -> Self {
        self.same_order(other);
        Self {
            order: self.order,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.same_order(other);
        Self {
            order: self.order,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            order: self.order,
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    pub fn add_constant(&self, c: Complex64) -> Self {
        let mut out = self.clone();
        out.coeffs[0] += c;
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.same_order(other);
        let n = self.order;
        let mut out = Self::zero(n);
        for i in 0..=n {
            for j in 0..=n {
                let a = self.get(i, j);
                if a == ZERO {
                    continue;
                }
                for k in 0..=n - i {
                    for l in 0..=n - j {
                        let idx = (i + k) * (n + 1) + (j + l);
                        out.coeffs[idx] += a * other.get(k, l);
                    }
                }
            }
        }
        out
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        self.same_order(other);
        let b00 = other.get(0, 0);
        if b00 == ZERO {
            return Err(Error::NonUnitSeries);
        }
        let n = self.order;
        let mut out = Self::zero(n);
        for p in 0..=n {
            for q in 0..=n {
                let mut acc = self.get(p, q);
                for i in 0..=p {
                    for j in 0..=q {
                        if i == 0 && j == 0 {
                            continue;
                        }
                        acc -= other.get(i, j) * out.get(p - i, q - j);
                    }
                }
                out.set(p, q, acc / b00);
            }
        }
        Ok(out)
    }

    /// `z ∂_z self`.
    fn euler_z(&self) -> Self {
        let mut out = self.clone();
        for p in 0..=self.order {
            for q in 0..=self.order {
                out.set(p, q, self.get(p, q) * p as f64);
            }
        }
        out
    }

    pub fn exp(&self) -> Self {
        let n = self.order;
        let mut out = Self::zero(n);
        out.set_row(0, &self.row(0).exp());
        // p b_p = sum_{k=1}^p k a_k b_{p-k}, rows as series in w
        for p in 1..=n {
            let mut acc = Series1::zero(n);
            for k in 1..=p {
                acc = acc.add(&self.row(k).mul(&out.row(p - k)).scale((k as f64).into()));
            }
            out.set_row(p, &acc.scale((1.0 / p as f64).into()));
        }
        out
    }

    /// Principal logarithm; the constant term must lie off `(-∞, 0]`.
    pub fn log(&self) -> Result<Self> {
        let n = self.order;
        let row0 = self.row(0).log()?;
        let dz = self.euler_z().div(self)?;
        let mut out = Self::zero(n);
        out.set_row(0, &row0);
        for p in 1..=n {
            for q in 0..=n {
                out.set(p, q, dz.get(p, q) / p as f64);
            }
        }
        Ok(out)
    }

    /// `self(u(z), v(w))` for one-variable series `u`, `v` vanishing at 0.
    pub fn compose(&self, u: &Series1, v: &Series1) -> Result<Self> {
        let n = self.order;
        assert!(u.order() == n && v.order() == n, "series orders differ");
        if u.coeff(0) != ZERO || v.coeff(0) != ZERO {
            return Err(Error::NonzeroInnerConstant);
        }
        let mut u_pow = vec![Series1::constant(ONE, n)];
        let mut v_pow = vec![Series1::constant(ONE, n)];
        for k in 1..=n {
            u_pow.push(u_pow[k - 1].mul(u));
            v_pow.push(v_pow[k - 1].mul(v));
        }
        // Accumulate in the w direction first: rows[p] = sum_q c_{p,q} v^q.
        let rows: Vec<Series1> = (0..=n)
            .map(|p| {
                (0..=n).fold(Series1::zero(n), |acc, q| {
                    acc.add(&v_pow[q].scale(self.get(p, q)))
                })
            })
            .collect();
        let mut out = Self::zero(n);
        for (p, row) in rows.iter().enumerate() {
            for i in p..=n {
                let up = u_pow[p].coeff(i);
                if up == ZERO {
                    continue;
                }
                for j in 0..=n {
                    let idx = i * (n + 1) + j;
                    out.coeffs[idx] += up * row.coeff(j);
                }
            }
        }
        Ok(out)
    }

    /// Divides by `z^a w^b`, dropping the terms that would become negative
    /// powers and zero-filling the top rows/columns.
    pub fn shift_down(&self, a: usize, b: usize) -> Self {
        let n = self.order;
        Self::from_fn(n, |p, q| {
            if p + a <= n && q + b <= n {
                self.get(p + a, q + b)
            } else {
                ZERO
            }
        })
    }

    pub fn eval(&self, z: Complex64, w: Complex64) -> Complex64 {
        (0..=self.order)
            .rev()
            .fold(ZERO, |acc, p| acc * z + self.row(p).eval(w))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// CSV dump with header `p,q,re,im`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("p,q,re,im\n");
        for p in 0..=self.order {
            for q in 0..=self.order {
                let c = self.get(p, q);
                let _ = writeln!(s, "{p},{q},{:.16e},{:.16e}", c.re, c.im);
            }
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn geometric(n: usize) -> Series1 {
        // z / (1 - z)
        Series1::from_fn(n, |k| if k == 0 { ZERO } else { ONE })
    }

    #[test]
    fn product_and_quotient() {
        let a = Series1::new(vec![c(1.0), c(1.0)], 4);
        let b = Series1::new(vec![c(1.0), c(-1.0)], 4);
        assert_eq!(a.mul(&b), Series1::new(vec![c(1.0), ZERO, c(-1.0)], 4));
        let z = Series1::var(5);
        assert_eq!(z.div(&b.clone_to(5)).unwrap(), geometric(5));
        assert!(z.div(&z).is_err());
    }

    impl Series1 {
        fn clone_to(&self, order: usize) -> Self {
            Self::new(self.coeffs.clone(), order)
        }
    }

    #[test]
    fn exp_coefficients() {
        assert_eq!(Series1::zero(6).exp(), Series1::constant(ONE, 6));
        let e = Series1::var(8).exp();
        let mut fact = 1.0;
        for k in 0..=8 {
            if k > 0 {
                fact *= k as f64;
            }
            assert!((e.coeff(k) - 1.0 / fact).norm() < 1e-15);
        }
    }

    #[test]
    fn log_rejects_branch_cut() {
        assert!(matches!(
            Series1::constant(c(-1.0), 3).log(),
            Err(Error::BranchCut)
        ));
    }

    #[test]
    fn compose_examples() {
        let a = Complex64::new(0.3, 0.4);
        let g = geometric(10).compose(&Series1::var(10).scale(a)).unwrap();
        for k in 1..=10 {
            assert!((g.coeff(k) - a.powu(k as u32)).norm() < 1e-15);
        }
        let f = Series1::from_fn(10, |k| Complex64::new(k as f64, 1.0 / (k + 1) as f64));
        assert_eq!(f.compose(&Series1::var(10)).unwrap(), f);
        assert!(matches!(
            f.compose(&f),
            Err(Error::NonzeroInnerConstant)
        ));
    }

    #[test]
    fn revert_examples() {
        let a = Complex64::new(0.5, -2.0);
        let r = Series1::var(8).scale(a).revert().unwrap();
        assert!(r.max_abs_diff(&Series1::var(8).scale(ONE / a)) < 1e-15);
        // z/(1-z) reverts to z/(1+z)
        let r = geometric(12).revert().unwrap();
        let expected = Series1::from_fn(12, |k| {
            if k == 0 {
                ZERO
            } else if k % 2 == 1 {
                ONE
            } else {
                -ONE
            }
        });
        assert!(r.max_abs_diff(&expected) < 1e-13);
        assert!(Series1::constant(ONE, 4).revert().is_err());
        assert!(Series1::new(vec![ZERO, ZERO, ONE], 4).revert().is_err());
    }

    #[test]
    fn revert_routes_agree_on_exponential_form() {
        let n = 12;
        let z = Series1::var(n);
        let one_plus = z.add_constant(ONE);
        let one_minus = z.scale(-ONE).add_constant(ONE);
        let kernel = one_plus.div(&one_minus).unwrap().scale(c(0.5));
        let f = z.mul(&kernel.exp());
        let lagrange = f.revert().unwrap();
        let newton = f.revert_newton().unwrap();
        assert!(lagrange.max_abs_diff(&newton) < 1e-10);
        let round = f.compose(&lagrange).unwrap();
        assert!(round.max_abs_diff(&z) < 1e-10);
    }

    #[test]
    fn two_variable_exp_log_and_compose() {
        let n = 6;
        let a = Series2::from_fn(n, |p, q| Complex64::new(0.1 * p as f64, 0.05 * q as f64) / ((p + q + 1) as f64));
        let back = a.exp().log().unwrap();
        assert!(back.max_abs_diff(&a) < 1e-12);
        // compose with identity inners
        let z = Series1::var(n);
        assert!(a.compose(&z, &z).unwrap().max_abs_diff(&a) < 1e-15);
        // product of one-variable series evaluates pointwise
        let x = Complex64::new(0.1, 0.02);
        let y = Complex64::new(-0.05, 0.1);
        let e = Series2::from_z(&geometric(n)).mul(&Series2::from_w(&geometric(n)));
        let exact = x / (1.0 - x) * y / (1.0 - y);
        assert!((e.eval(x, y) - exact).norm() < 1e-6);
    }

    fn arb_series(n: usize) -> impl Strategy<Value = Series1> {
        prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n + 1)
            .prop_map(move |v| Series1::new(v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect(), n))
    }

    proptest! {
        #[test]
        fn div_mul_round_trip(a in arb_series(10), mut b in arb_series(10)) {
            b.coeffs[0] = Complex64::new(1.5, 0.3);
            let back = a.mul(&b).div(&b).unwrap();
            prop_assert!(back.max_abs_diff(&a) < 1e-9);
        }

        #[test]
        fn log_exp_round_trip(a in arb_series(10)) {
            let mut a = a.scale(c(0.3));
            a.coeffs[0] = Complex64::new(0.1, 0.2);
            let back = a.exp().log().unwrap();
            prop_assert!(back.max_abs_diff(&a) < 1e-12);
        }

        #[test]
        fn revert_round_trips_both_ways(a in arb_series(10)) {
            let mut f = a.scale(c(0.5));
            f.coeffs[0] = ZERO;
            f.coeffs[1] = Complex64::new(1.0, 0.2);
            let g = f.revert().unwrap();
            let z = Series1::var(10);
            prop_assert!(f.compose(&g).unwrap().max_abs_diff(&z) < 1e-8);
            prop_assert!(g.compose(&f).unwrap().max_abs_diff(&z) < 1e-8);
            prop_assert!(g.max_abs_diff(&f.revert_newton().unwrap()) < 1e-8);
        }

        #[test]
        fn mul_commutes(a in arb_series(8), b in arb_series(8)) {
            prop_assert!(a.mul(&b).max_abs_diff(&b.mul(&a)) < 1e-14);
        }
    }
}
