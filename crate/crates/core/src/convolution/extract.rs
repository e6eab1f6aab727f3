//! Moment extraction from ψ on torus-shaped grids.
//!
//! On each component ψ has a Laurent expansion whose coefficients are
//! moments:
//!
//! ```text
//! DD  ψ = Σ_{p,q≥1} m_{p,q} z^p w^q
//! DU  ψ = −Σ_{p≥1} z^p [m_{p,0} + Σ_{q≥1} m_{p,−q} w^{−q}]
//! UD  symmetric to DU
//! UU  ψ = 1 + Σ_{p≥1} m_{−p,0} z^{−p} + Σ_{q≥1} m_{0,−q} w^{−q} + Σ m_{−p,−q} z^{−p} w^{−q}
//! ```
//!
//! A 2-D DFT of ψ on `|z| = r_z`, `|w| = r_w` reads them off. Every cell
//! except `(0,0)` is produced twice (once directly, once through its
//! Hermitian partner); the two estimates are averaged.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::Serialize;

use super::reconstruct_parts;
use crate::error::{Error, Result};
use crate::measure::MomentTable2D;
use crate::transforms::{CoordinatePoint, DomainComponent, TransformLaw};

/// Default number of grid points per coordinate.
pub const DEFAULT_GRID: usize = 256;
/// Default radius of the bounded grid circles.
pub const DEFAULT_RADIUS: f64 = 0.4;
/// Cells whose `r^{−p}` amplification exceeds this are refused.
pub const MAX_AMPLIFICATION: f64 = 1e6;
/// Largest tolerated gap between an estimate and its Hermitian partner.
pub const HERMITIAN_GAP: f64 = 1e-6;
const MIN_RADIUS: f64 = 0.05;
/// Grid angles are `2π(k + GRID_PHASE)/M`. A quarter step keeps the
/// mixed grids off `η⁽¹⁾(z) η⁽²⁾(w) = 1`, a removable 0/0 of the
/// reconstruction formula that symmetric laws would otherwise hit exactly.
const GRID_PHASE: f64 = 0.25;

/// Product grid `M × M` on `|z| = r_z`, `|w| = r_w`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EvaluationGrid {
    pub size: usize,
    pub r_z: f64,
    pub r_w: f64,
}

impl EvaluationGrid {
    pub fn new(size: usize, r_z: f64, r_w: f64) -> Result<Self> {
        if !size.is_power_of_two() || size < 4 {
            return Err(Error::InvalidArgument(format!("grid size {size} is not a power of two ≥ 4")));
        }
        for r in [r_z, r_w] {
            if !(r > 0.0 && r.is_finite()) || (r - 1.0).abs() < 1e-9 {
                return Err(Error::InvalidArgument(format!("grid radius {r} is not admissible")));
            }
        }
        Ok(Self { size, r_z, r_w })
    }

    /// The grid for one component, with bounded radius `radius`.
    pub fn for_component(size: usize, radius: f64, component: DomainComponent) -> Result<Self> {
        let out = 1.0 / radius;
        let (r_z, r_w) = match component {
            DomainComponent::DD => (radius, radius),
            DomainComponent::DU => (radius, out),
            DomainComponent::UD => (out, radius),
            DomainComponent::UU => (out, out),
        };
        Self::new(size, r_z, r_w)
    }

    pub fn component(&self) -> DomainComponent {
        match (self.r_z < 1.0, self.r_w < 1.0) {
            (true, true) => DomainComponent::DD,
            (true, false) => DomainComponent::DU,
            (false, true) => DomainComponent::UD,
            (false, false) => DomainComponent::UU,
        }
    }
}

/// Moments produced by one component's grid.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadrantBlock {
    pub component: DomainComponent,
    pub order: usize,
    pub cells: Vec<(i32, i32, Complex64)>,
}

impl QuadrantBlock {
    pub fn get(&self, p: i32, q: i32) -> Option<Complex64> {
        self.cells.iter().find(|c| c.0 == p && c.1 == q).map(|c| c.2)
    }
}

/// Diagnostics of a full extraction.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtractionDiagnostics {
    pub grid_radius: f64,
    pub grid_size: usize,
    pub window_radius: f64,
    /// Largest gap between an estimate and its conjugated partner.
    pub hermitian_gap: f64,
    /// Largest gap between the table's marginals and the 1-D engine.
    pub marginal_gap: f64,
    pub max_modulus: f64,
    pub min_eigenvalue: f64,
}

/// A moment table with its diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct Extraction {
    pub table: MomentTable2D,
    pub diagnostics: ExtractionDiagnostics,
}

/// Subordinated coordinate points on one circle, bounded and reflected.
struct CoordinateRing {
    bounded: Vec<CoordinatePoint>,
    unbounded: Vec<CoordinatePoint>,
}

impl CoordinateRing {
    fn new(law: &TransformLaw, j: usize, size: usize, radius: f64) -> Result<Self> {
        let mut bounded = Vec::with_capacity(size);
        let mut unbounded = Vec::with_capacity(size);
        for k in 0..size {
            let x = Complex64::from_polar(radius, 2.0 * PI * (k as f64 + GRID_PHASE) / size as f64);
            let (_, p) = law.subordinated_point(j, x)?;
            if p.value.norm() == 0.0 {
                return Err(Error::EtaPole(x));
            }
            unbounded.push(law.coordinate_point(j, false, p.rep, p.ratios.clone()));
            bounded.push(p);
        }
        Ok(Self { bounded, unbounded })
    }

    fn points(&self, bounded: bool) -> &[CoordinatePoint] {
        if bounded {
            &self.bounded
        } else {
            &self.unbounded
        }
    }
}

fn amplification(radius: f64, e: usize) -> f64 {
    radius.min(1.0 / radius).powi(-(e as i32))
}

/// ψ on the grid, transformed; returns the coefficient accessor.
fn coefficients(
    law: &TransformLaw,
    first: &[CoordinatePoint],
    second: &[CoordinatePoint],
) -> Result<Vec<Complex64>> {
    let m = first.len();
    let mut data = Vec::with_capacity(m * m);
    for a in first {
        for b in second {
            data.push(reconstruct_parts(law, a, b)?.0);
        }
    }
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(m);
    // rows (w direction), then columns (z direction)
    for row in data.chunks_mut(m) {
        fft.process(row);
    }
    let mut column = vec![Complex64::new(0.0, 0.0); m];
    for q in 0..m {
        for p in 0..m {
            column[p] = data[p * m + q];
        }
        fft.process(&mut column);
        for p in 0..m {
            data[p * m + q] = column[p] / (m * m) as f64;
        }
    }
    Ok(data)
}

fn block_from_rings(
    law: &TransformLaw,
    rings: [&CoordinateRing; 2],
    grid: &EvaluationGrid,
    order: usize,
) -> Result<QuadrantBlock> {
    let m = grid.size;
    if 4 * order > m {
        return Err(Error::InvalidArgument(format!("order {order} needs a grid of at least {}", 4 * order)));
    }
    let component = grid.component();
    let (bz, bw) = (grid.r_z < 1.0, grid.r_w < 1.0);
    for (radius, e) in [(grid.r_z, order), (grid.r_w, order)] {
        let amp = amplification(radius, e);
        if amp > MAX_AMPLIFICATION {
            return Err(Error::Conditioning {
                p: order as i32,
                q: order as i32,
                amplification: amp,
            });
        }
    }
    let data = coefficients(law, rings[0].points(bz), rings[1].points(bw))?;
    let shift = 2.0 * PI * GRID_PHASE / m as f64;
    let phase = |bounded: bool, e: usize| Complex64::from_polar(1.0, if bounded { -shift } else { shift } * e as f64);
    // coefficient of z^{±e1} w^{±e2}, signs fixed by the component
    let coeff = |e1: usize, e2: usize| -> Complex64 {
        let i1 = if bz { e1 } else { (m - e1) % m };
        let i2 = if bw { e2 } else { (m - e2) % m };
        let scale1 = if bz { grid.r_z.powi(-(e1 as i32)) } else { grid.r_z.powi(e1 as i32) };
        let scale2 = if bw { grid.r_w.powi(-(e2 as i32)) } else { grid.r_w.powi(e2 as i32) };
        data[i1 * m + i2] * scale1 * scale2 * phase(bz, e1) * phase(bw, e2)
    };
    let n = order;
    let mut cells = Vec::new();
    match component {
        DomainComponent::DD => {
            for p in 1..=n {
                for q in 1..=n {
                    cells.push((p as i32, q as i32, coeff(p, q)));
                }
            }
        }
        DomainComponent::DU => {
            for p in 1..=n {
                for q in 0..=n {
                    cells.push((p as i32, -(q as i32), -coeff(p, q)));
                }
            }
        }
        DomainComponent::UD => {
            for p in 0..=n {
                for q in 1..=n {
                    cells.push((-(p as i32), q as i32, -coeff(p, q)));
                }
            }
        }
        DomainComponent::UU => {
            for p in 0..=n {
                for q in 0..=n {
                    if p + q > 0 {
                        cells.push((-(p as i32), -(q as i32), coeff(p, q)));
                    }
                }
            }
        }
    }
    Ok(QuadrantBlock {
        component,
        order,
        cells,
    })
}

/// One component's block of the moment table of `law`.
pub fn extract_moments(law: &TransformLaw, grid: &EvaluationGrid, order: usize) -> Result<QuadrantBlock> {
    let first = CoordinateRing::new(law, 1, grid.size, grid.r_z.min(1.0 / grid.r_z))?;
    let second = CoordinateRing::new(law, 2, grid.size, grid.r_w.min(1.0 / grid.r_w))?;
    block_from_rings(law, [&first, &second], grid, order)
}

fn assemble(blocks: &[QuadrantBlock], order: usize) -> (MomentTable2D, f64) {
    let n = order as i32;
    let mut estimates: Vec<Vec<Complex64>> = vec![Vec::new(); ((2 * n + 1) * (2 * n + 1)) as usize];
    let idx = |p: i32, q: i32| ((p + n) * (2 * n + 1) + (q + n)) as usize;
    for b in blocks {
        for &(p, q, v) in &b.cells {
            estimates[idx(p, q)].push(v);
            estimates[idx(-p, -q)].push(v.conj());
        }
    }
    let mut table = MomentTable2D::zeros(order);
    let mut gap = 0.0f64;
    for p in -n..=n {
        for q in -n..=n {
            if p == 0 && q == 0 {
                table.set(0, 0, Complex64::new(1.0, 0.0));
                continue;
            }
            let e = &estimates[idx(p, q)];
            let mean = e.iter().sum::<Complex64>() / e.len() as f64;
            for v in e {
                gap = gap.max((v - mean).norm() * 2.0);
            }
            table.set(p, q, mean);
        }
    }
    (table, gap)
}

/// The full table `m_{p,q}`, `|p|, |q| ≤ order`, from all four components.
///
/// The grid radius starts at `radius`; it is halved when a forward solve
/// fails and shrunk by 3% when the reconstruction hits a pole, down to 0.05.
pub fn moment_table(law: &TransformLaw, order: usize, size: usize, radius: f64) -> Result<Extraction> {
    let mut r = radius;
    loop {
        if r < MIN_RADIUS {
            return Err(Error::WindowExhausted { radius: r });
        }
        match extraction_at(law, order, size, r) {
            Err(Error::NoConvergence { .. }) => r /= 2.0,
            Err(Error::VanishingDenominator { .. }) | Err(Error::EtaPole(_)) => r *= 0.97,
            other => return other,
        }
    }
}

fn extraction_at(law: &TransformLaw, order: usize, size: usize, radius: f64) -> Result<Extraction> {
    let first = CoordinateRing::new(law, 1, size, radius)?;
    let second = CoordinateRing::new(law, 2, size, radius)?;
    let mut blocks = Vec::with_capacity(4);
    for component in [
        DomainComponent::DD,
        DomainComponent::DU,
        DomainComponent::UD,
        DomainComponent::UU,
    ] {
        let grid = EvaluationGrid::for_component(size, radius, component)?;
        blocks.push(block_from_rings(law, [&first, &second], &grid, order)?);
    }
    let (table, hermitian_gap) = assemble(&blocks, order);
    if hermitian_gap > HERMITIAN_GAP {
        return Err(Error::Diagnostics(format!(
            "Hermitian partners differ by {hermitian_gap:.3e} at radius {radius}"
        )));
    }
    let mut marginal_gap = 0.0f64;
    for j in [1, 2] {
        let moments = law.marginal(j).moments(order, radius, size)?;
        for (p, m) in moments.iter().enumerate().skip(1) {
            let cell = if j == 1 { table.get(p as i32, 0) } else { table.get(0, p as i32) };
            marginal_gap = marginal_gap.max((cell - m).norm());
        }
    }
    let check = table.check();
    Ok(Extraction {
        diagnostics: ExtractionDiagnostics {
            grid_radius: radius,
            grid_size: size,
            window_radius: law.window().r,
            hermitian_gap,
            marginal_gap,
            max_modulus: check.max_modulus,
            min_eigenvalue: check.min_eigenvalue,
        },
        table,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::AtomicMeasure2D;
    use crate::sampling::MeasureSampler;

    #[test]
    fn point_mass_table() {
        let mu = AtomicMeasure2D::point_mass(0.7, -1.9);
        let law = TransformLaw::from_atomic(&mu).unwrap();
        let ex = moment_table(&law, 6, 64, DEFAULT_RADIUS).unwrap();
        let exact = MomentTable2D::from_measure(&mu, 6);
        assert!(ex.table.max_abs_diff(&exact, 6) < 1e-9);
    }

    #[test]
    fn atomic_round_trip_and_quadrants() {
        let mut s = MeasureSampler::new(60);
        let mu = s.px_measure_2d(5);
        let law = TransformLaw::from_atomic(&mu).unwrap();
        let ex = moment_table(&law, 6, 128, DEFAULT_RADIUS).unwrap();
        let exact = MomentTable2D::from_measure(&mu, 6);
        assert!(ex.table.max_abs_diff(&exact, 6) < 1e-8, "{}", ex.table.max_abs_diff(&exact, 6));
        assert!(ex.diagnostics.marginal_gap < 1e-9);
        let dd = extract_moments(&law, &EvaluationGrid::new(64, 0.4, 0.4).unwrap(), 6).unwrap();
        let uu = extract_moments(&law, &EvaluationGrid::new(64, 2.5, 2.5).unwrap(), 6).unwrap();
        for p in 1..=6 {
            for q in 1..=6 {
                let a = dd.get(p, q).unwrap();
                let b = uu.get(-p, -q).unwrap();
                assert!((a - b.conj()).norm() < 1e-8);
            }
        }
    }

    #[test]
    fn conditioning_guard() {
        let law = TransformLaw::from_atomic(&AtomicMeasure2D::point_mass(0.0, 0.0)).unwrap();
        let grid = EvaluationGrid::new(256, 0.1, 0.4).unwrap();
        assert!(matches!(extract_moments(&law, &grid, 8), Err(Error::Conditioning { .. })));
    }
}
