//! Free and bi-free multiplicative convolution, ψ reconstruction, moment
//! extraction, the opposite convolution and the centered (Haar) oracles.

mod centered;
mod extract;
mod free;
pub mod series_engine;

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::measure::AtomicMeasure2D;
use crate::transforms::{sigma_op_pointwise, CoordinatePoint, DomainWindow, TransformLaw};

pub use centered::{centered_alternating_moment, haar_table, haar_test, word_moment, HaarReport};
pub use extract::{
    extract_moments, moment_table, EvaluationGrid, Extraction, ExtractionDiagnostics, QuadrantBlock,
    DEFAULT_GRID, DEFAULT_RADIUS,
};
pub use free::{free_convolve, ForwardPoint, FreeFactor, FreeLaw1D, Provenance1D};

/// Anything that can enter the bi-free pipeline.
pub trait AsLaw {
    fn as_law(&self) -> Result<TransformLaw>;
}

impl AsLaw for AtomicMeasure2D {
    fn as_law(&self) -> Result<TransformLaw> {
        TransformLaw::from_atomic(self)
    }
}

impl AsLaw for TransformLaw {
    fn as_law(&self) -> Result<TransformLaw> {
        Ok(self.clone())
    }
}

/// `μ₁ ⊠⊠ μ₂`: Σ evaluators multiply and marginal inverses multiply, on the
/// intersected (and revalidated) window.
pub fn bifree_convolve<A, B>(mu1: &A, mu2: &B) -> Result<TransformLaw>
where
    A: AsLaw + ?Sized,
    B: AsLaw + ?Sized,
{
    mu1.as_law()?.convolve(&mu2.as_law()?).revalidated()
}

/// ψ, ψ⁽¹⁾, ψ⁽²⁾ from two subordinated coordinate points.
pub(crate) fn reconstruct_parts(
    law: &TransformLaw,
    first: &CoordinatePoint,
    second: &CoordinatePoint,
) -> Result<(Complex64, Complex64, Complex64)> {
    let (y1, y2) = (first.value, second.value);
    let sigma = law.sigma_at(first, second)?;
    let e = y1 * y2 * sigma;
    let psi1 = marginal_psi(y1);
    let psi2 = marginal_psi(y2);
    let d = 1.0 - e;
    if !(d.norm() > 1e-12 * (1.0 + e.norm())) || !e.is_finite() {
        return Err(Error::VanishingDenominator { z: y1, w: y2 });
    }
    Ok(((psi1 + psi2 + 1.0) * (e / d), psi1, psi2))
}

/// `ψ = η/(1−η)`, with the limit `−1` at infinity.
fn marginal_psi(y: Complex64) -> Complex64 {
    if y.is_infinite() {
        Complex64::new(-1.0, 0.0)
    } else {
        y / (1.0 - y)
    }
}

/// `ψ_μ(z,w)` of a law from its marginals and Σ:
/// `ψ = [ψ⁽¹⁾ + ψ⁽²⁾ + 1] · E/(1−E)` with `E = η⁽¹⁾(z) η⁽²⁾(w) Σ(η⁽¹⁾(z), η⁽²⁾(w))`.
pub fn psi_reconstruct(law: &TransformLaw, z: Complex64, w: Complex64) -> Result<Complex64> {
    let (_, p1) = law.subordinated_point(1, z)?;
    let (_, p2) = law.subordinated_point(2, w)?;
    reconstruct_parts(law, &p1, &p2).map(|v| v.0)
}

/// `min Re[(g(z,w) − g(z,1/w̄))/2]` with `g = 4ψ + 2(ψ⁽¹⁾+ψ⁽²⁾) + 1` over
/// the polar grid `|z| = |w| = radius` with `size` angles per coordinate.
/// The value is a product of Poisson integrals of a positive measure, so
/// it is nonnegative for genuine laws.
pub fn poisson_positivity_check(law: &TransformLaw, size: usize, radius: f64) -> Result<f64> {
    // the w-grid is offset so that symmetric laws do not put grid pairs on
    // the removable singularity η⁽¹⁾(z) η⁽²⁾(1/w̄) = 1 of the product-form ψ
    let angles = |k: usize, shift: f64| 2.0 * PI * (k as f64 + shift) / size as f64;
    let zs = (0..size)
        .map(|k| law.subordinated_point(1, Complex64::from_polar(radius, angles(k, 0.5))).map(|p| p.1))
        .collect::<Result<Vec<_>>>()?;
    let mut ws = Vec::with_capacity(size);
    for k in 0..size {
        let (_, inner) = law.subordinated_point(2, Complex64::from_polar(radius, angles(k, 0.25)))?;
        let outer = law.coordinate_point(2, false, inner.rep, inner.ratios.clone());
        ws.push((inner, outer));
    }
    let g = |a: &CoordinatePoint, b: &CoordinatePoint| -> Result<Complex64> {
        let (psi, p1, p2) = reconstruct_parts(law, a, b)?;
        Ok(4.0 * psi + 2.0 * (p1 + p2) + 1.0)
    };
    let mut min = f64::INFINITY;
    for a in &zs {
        for (inner, outer) in &ws {
            let value = ((g(a, inner)? - g(a, outer)?) / 2.0).re;
            min = min.min(value);
        }
    }
    Ok(min)
}

/// `μ₁ ⊠⊠ᵒᵖ μ₂ ⊠⊠ᵒᵖ ...` through its Σᵒᵖ evaluator on a bidisk.
#[derive(Debug, Clone, PartialEq)]
pub struct OppositeLaw {
    factors: Vec<AtomicMeasure2D>,
    window: DomainWindow,
}

impl OppositeLaw {
    pub fn window(&self) -> DomainWindow {
        self.window
    }

    pub fn factors(&self) -> &[AtomicMeasure2D] {
        &self.factors
    }

    /// `Π Σᵒᵖ_k(z,w)` on `D_r × D_r`.
    pub fn sigma_op(&self, z: Complex64, w: Complex64) -> Result<Complex64> {
        self.factors
            .iter()
            .try_fold(Complex64::new(1.0, 0.0), |acc, mu| {
                Ok(acc * sigma_op_pointwise(mu, z, w, &self.window)?)
            })
    }

    /// Marginal `j`: the free convolution of the factors' marginals.
    pub fn marginal(&self, j: usize) -> Result<FreeLaw1D> {
        let mut out: Option<FreeLaw1D> = None;
        for mu in &self.factors {
            let m = FreeLaw1D::from_atomic(&mu.marginal(j))?;
            out = Some(match out {
                Some(acc) => acc.convolve(&m),
                None => m,
            });
        }
        out.ok_or_else(|| Error::InvalidArgument("empty opposite convolution".into()))
    }
}

/// `μ₁ ⊠⊠ᵒᵖ μ₂`.
pub fn opposite_convolve(mu1: &AtomicMeasure2D, mu2: &AtomicMeasure2D) -> Result<OppositeLaw> {
    let w1 = TransformLaw::from_atomic(mu1)?.window();
    let w2 = TransformLaw::from_atomic(mu2)?.window();
    Ok(OppositeLaw {
        factors: vec![mu1.clone(), mu2.clone()],
        window: DomainWindow { r: w1.r.min(w2.r) },
    })
}
