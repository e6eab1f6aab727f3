//! Infinitesimal arrays: centering, accompanying rows, h-functions, the
//! finite-level Lévy sums and limit sweeps.

use num_complex::Complex64;

use super::levy::{id_law, LevyData};
use crate::convolution::{moment_table, DEFAULT_GRID, DEFAULT_RADIUS};
use crate::error::{Error, Result};
use crate::measure::{infinitesimality_norm, AtomicMeasure1D, AtomicMeasure2D};
use crate::transforms::TransformLaw;

/// Default centering cutoff `ε`.
pub const DEFAULT_CUTOFF: f64 = 1.0;

/// `b = exp(i ∫_{|arg x|<ε} arg x dν(x))`.
pub fn centering_constant(nu: &AtomicMeasure1D, eps: f64) -> Complex64 {
    let phase: f64 = nu
        .atoms()
        .iter()
        .filter(|(theta, _)| theta.abs() < eps)
        .map(|(theta, w)| theta * w)
        .sum();
    Complex64::from_polar(1.0, phase)
}

/// `h(z) = ∫ (1−z)(1−x)/(1−zx) dν(x)`.
pub fn h_function(nu: &AtomicMeasure1D, z: Complex64) -> Complex64 {
    nu.points()
        .iter()
        .map(|&(x, w)| w * (1.0 - z) * (1.0 - x) / (1.0 - z * x))
        .sum()
}

/// A bound `M(r, ε)` with `|Im h| ≤ M |Re h|` on `D_r ∪ Δ_r` for measures
/// centered with cutoff `ε`.
///
/// Writing `h = ∫ P(zx)(1−Re x) dν − i ∫ (1+zx)/(1−zx) Im x dν`
/// with the Poisson kernel `P ≥ (1−r)/(1+r)`, the tail `|arg x| ≥ ε` is
/// controlled by `(1−Re x) ≥ 1−cos ε` and the centered part by
/// `|(1+zx)/(1−zx) − (1+z)/(1−z)| ≤ C |1 − x|`.
pub fn p3_bound(r: f64, eps: f64) -> f64 {
    let k = (1.0 + r) / (1.0 - r);
    k * (k + 1.0 / (1.0 - eps.cos()) + 1.0)
}

/// One row `δ_λ, μ_{n1}, ..., μ_{nk_n}` of an array; identical measures
/// are stored once with their multiplicity.
#[derive(Debug, Clone, PartialEq)]
pub struct ArrayRow {
    pub level: usize,
    pub factors: Vec<(AtomicMeasure2D, u32)>,
    pub rotation: [Complex64; 2],
}

impl ArrayRow {
    pub fn new(level: usize, factors: Vec<(AtomicMeasure2D, u32)>) -> Self {
        Self {
            level,
            factors,
            rotation: [Complex64::new(1.0, 0.0); 2],
        }
    }

    /// `k_n`.
    pub fn len(&self) -> usize {
        self.factors.iter().map(|f| f.1 as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn infinitesimality(&self, eps: f64) -> f64 {
        let row: Vec<AtomicMeasure2D> = self.factors.iter().map(|f| f.0.clone()).collect();
        infinitesimality_norm(&row, eps)
    }

    /// `δ_λ ⊠⊠ μ_{n1} ⊠⊠ ...`, using `Σⁿ` for repeated measures.
    pub fn law(&self) -> Result<TransformLaw> {
        let mut law = TransformLaw::point_mass(self.rotation[0], self.rotation[1]);
        for (mu, n) in &self.factors {
            law = law.convolve(&TransformLaw::from_atomic(mu)?.power(*n));
        }
        law.revalidated()
    }

    /// The same product with every repeated measure entered separately.
    pub fn pairwise_law(&self) -> Result<TransformLaw> {
        let mut law = TransformLaw::point_mass(self.rotation[0], self.rotation[1]);
        for (mu, n) in &self.factors {
            let single = TransformLaw::from_atomic(mu)?;
            for _ in 0..*n {
                law = law.convolve(&single);
            }
        }
        law.revalidated()
    }
}

/// Rows of an infinitesimal array with the centering cutoff.
#[derive(Debug, Clone, PartialEq)]
pub struct InfinitesimalArray {
    pub rows: Vec<ArrayRow>,
    pub cutoff: f64,
    /// Levels where the infinitesimality norm increased.
    pub warnings: Vec<usize>,
}

impl InfinitesimalArray {
    pub fn new(rows: Vec<ArrayRow>, cutoff: f64) -> Result<Self> {
        if !(cutoff > 0.0 && cutoff <= 1.0) {
            return Err(Error::InvalidArgument(format!("cutoff {cutoff} not in (0,1]")));
        }
        let norms: Vec<f64> = rows.iter().map(|r| r.infinitesimality(cutoff)).collect();
        let warnings = norms
            .windows(2)
            .zip(&rows[1..])
            .filter(|(w, _)| w[1] > w[0] + 1e-15)
            .map(|(_, r)| r.level)
            .collect();
        Ok(Self {
            rows,
            cutoff,
            warnings,
        })
    }
}

fn b_constants(mu: &AtomicMeasure2D, eps: f64) -> [Complex64; 2] {
    [
        centering_constant(&mu.marginal(1), eps),
        centering_constant(&mu.marginal(2), eps),
    ]
}

/// The accompanying row `ν_{nk} = δ_(1/b⁽¹⁾, 1/b⁽²⁾) ⊠⊠ μ_{nk}`.
pub fn accompany(row: &ArrayRow, eps: f64) -> ArrayRow {
    let factors = row
        .factors
        .iter()
        .map(|(mu, n)| {
            let b = b_constants(mu, eps);
            (mu.rotate(-b[0].arg(), -b[1].arg()), *n)
        })
        .collect();
    ArrayRow {
        factors,
        ..row.clone()
    }
}

/// Finite-level sums of the limit system: `Σ(1−Re s)dν`, `Σ(1−Re t)dν`,
/// `Σ ∫ Im s Im t dν` and the rotation-corrected drifts.
pub fn limit_parameters(row: &ArrayRow, eps: f64) -> Result<LevyData> {
    let mut rho1 = AtomicMeasure2D::zero();
    let mut rho2 = AtomicMeasure2D::zero();
    let mut a = 0.0;
    let mut drift = [0.0f64; 2];
    for (mu, n) in &row.factors {
        let k = *n as f64;
        let b = b_constants(mu, eps);
        let nu = mu.rotate(-b[0].arg(), -b[1].arg());
        rho1 = rho1.add(&nu.with_density(|s, _| 1.0 - s.re).scaled(k));
        rho2 = rho2.add(&nu.with_density(|_, t| 1.0 - t.re).scaled(k));
        a += k * nu.points().iter().map(|&(s, t, w)| w * s.im * t.im).sum::<f64>();
        for j in 0..2 {
            let im: f64 = nu.marginal(j + 1).points().iter().map(|&(x, w)| w * x.im).sum();
            drift[j] += k * (im + b[j].arg());
        }
    }
    let gamma = |j: usize| row.rotation[j].conj() * Complex64::from_polar(1.0, -drift[j]);
    LevyData::new(rho1, rho2, a, gamma(0), gamma(1))
}

/// The wrapped-Gaussian row at level `n`: `(ξ,ξ)` or `(ξ̄,ξ̄)` with equal
/// probabilities, `ξ = √(1−r/n) + i√(r/n)`, repeated `n` times.
pub fn normal_row(r: f64, n: usize) -> Result<ArrayRow> {
    if !(n as f64 > r && r > 0.0) {
        return Err(Error::InvalidArgument(format!("level {n} must exceed the rate {r} > 0")));
    }
    let theta = (r / n as f64).sqrt().asin();
    let mu = AtomicMeasure2D::probability([(theta, theta, 0.5), (-theta, -theta, 0.5)])?;
    Ok(ArrayRow::new(n, vec![(mu, n as u32)]))
}

/// The compound Poisson row `(1−r/n)δ_(1,1) + (r/n)μ`, repeated `n` times.
pub fn poisson_row(r: f64, mu: &AtomicMeasure2D, n: usize) -> Result<ArrayRow> {
    if !(n as f64 > r && r > 0.0) {
        return Err(Error::InvalidArgument(format!("level {n} must exceed the rate {r} > 0")));
    }
    let p = r / n as f64;
    let row = AtomicMeasure2D::point_mass(0.0, 0.0).scaled(1.0 - p).add(&mu.scaled(p));
    Ok(ArrayRow::new(n, vec![(row, n as u32)]))
}

/// One level of a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepLevel {
    pub level: usize,
    /// `max |m_{p,q}(row law) − m_{p,q}(target)|` over `|p|, |q| ≤ order`.
    pub error: f64,
}

/// Convergence report of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    pub levels: Vec<SweepLevel>,
    /// Gap between the power shortcut and the pairwise product at the
    /// first level.
    pub pairwise_gap: f64,
    pub order: usize,
}

impl SweepReport {
    pub fn is_monotone(&self) -> bool {
        self.levels.windows(2).all(|w| w[1].error < w[0].error)
    }

    pub fn errors(&self) -> Vec<f64> {
        self.levels.iter().map(|l| l.error).collect()
    }
}

/// `e(n)/e(2n)` for consecutive entries.
pub fn richardson_ratio(errors: &[f64]) -> Vec<f64> {
    errors.windows(2).map(|w| w[0] / w[1]).collect()
}

/// Moment distance between each row's law and the law of `target`.
pub fn limit_sweep(array: &InfinitesimalArray, target: &LevyData, order: usize) -> Result<SweepReport> {
    let reference = moment_table(&id_law(target)?, order, DEFAULT_GRID, DEFAULT_RADIUS)?.table;
    let mut levels = Vec::with_capacity(array.rows.len());
    let mut pairwise_gap = 0.0;
    for (i, row) in array.rows.iter().enumerate() {
        let law = row.law().map_err(|e| match e {
            Error::NotInPx(msg) => Error::NotInPx(format!("level {}: {msg}", row.level)),
            other => other,
        })?;
        let table = moment_table(&law, order, DEFAULT_GRID, DEFAULT_RADIUS)?.table;
        if i == 0 {
            let pairwise = moment_table(&row.pairwise_law()?, order, DEFAULT_GRID, DEFAULT_RADIUS)?.table;
            pairwise_gap = table.max_abs_diff(&pairwise, order);
        }
        levels.push(SweepLevel {
            level: row.level,
            error: table.max_abs_diff(&reference, order),
        });
    }
    Ok(SweepReport {
        levels,
        pairwise_gap,
        order,
    })
}

/// One level of the Haar limit check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HaarLevel {
    pub k: u32,
    pub m11_power: f64,
    pub mean_powers: [f64; 2],
    /// Largest `|m_{p,q}|`, `(p,q) ≠ (0,0)`, of the pipeline table of
    /// `μ^{⊠⊠k}` when computed.
    pub max_moment: Option<f64>,
}

impl HaarLevel {
    pub fn envelope(&self) -> f64 {
        self.mean_powers[0].max(self.mean_powers[1])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HaarLimitReport {
    pub levels: Vec<HaarLevel>,
    /// All three power sequences decrease strictly with a per-step factor
    /// bounded away from 1.
    pub tends_to_zero: bool,
}

/// Evaluates `|m₁,₁(μ_n)|^{k_n}` and `|m(μ_n⁽ʲ⁾)|^{k_n}` along the
/// sequence, and the pipeline moments of `μ_n^{⊠⊠k_n}` for `k_n ≤ max_pipeline`.
pub fn haar_limit_check(
    sequence: &[(AtomicMeasure2D, u32)],
    order: usize,
    max_pipeline: u32,
) -> Result<HaarLimitReport> {
    let mut levels = Vec::with_capacity(sequence.len());
    let mut contracting = true;
    for (mu, k) in sequence {
        let base = [mu.moment(1, 1).norm(), mu.moment(1, 0).norm(), mu.moment(0, 1).norm()];
        contracting &= base.iter().all(|b| *b < 1.0 - 1e-9);
        let pow = |b: f64| b.powi(*k as i32);
        let max_moment = if *k <= max_pipeline {
            let law = TransformLaw::from_atomic(mu)?.power(*k);
            let table = moment_table(&law, order, DEFAULT_GRID, DEFAULT_RADIUS)?.table;
            Some(
                table
                    .iter()
                    .filter(|&(p, q, _)| p != 0 || q != 0)
                    .map(|(_, _, v)| v.norm())
                    .fold(0.0, f64::max),
            )
        } else {
            None
        };
        levels.push(HaarLevel {
            k: *k,
            m11_power: pow(base[0]),
            mean_powers: [pow(base[1]), pow(base[2])],
            max_moment,
        });
    }
    let decreasing = levels.windows(2).all(|w| {
        w[1].m11_power < w[0].m11_power
            && w[1].mean_powers[0] < w[0].mean_powers[0]
            && w[1].mean_powers[1] < w[0].mean_powers[1]
    });
    Ok(HaarLimitReport {
        tends_to_zero: contracting && decreasing,
        levels,
    })
}
