//! Finite atomic measures on the circle and the torus, moment tables and
//! the elementary operations on them (marginals, reflection, rotation,
//! products).
//!
//! Atoms are stored by angle in `(-π, π]`, so every support point has unit
//! modulus by construction. Atoms closer than [`ATOM_MERGE_TOL`] in angle are
//! merged and zero-weight atoms are dropped.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Angular distance below which two atoms are identified.
pub const ATOM_MERGE_TOL: f64 = 1e-12;
/// Tolerance on total mass for probability measures and on unit modulus.
pub const MASS_TOL: f64 = 1e-12;
/// Default threshold `τ` for membership in `P×`.
pub const PX_THRESHOLD: f64 = 1e-9;

/// Reduces an angle to `(-π, π]`.
pub fn wrap_angle(theta: f64) -> f64 {
    let mut t = theta.rem_euclid(2.0 * PI);
    if t > PI {
        t -= 2.0 * PI;
    }
    if t <= -PI + ATOM_MERGE_TOL {
        t = PI;
    }
    t
}

fn angle_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(2.0 * PI);
    d.min(2.0 * PI - d)
}

fn unit(theta: f64) -> Complex64 {
    Complex64::from_polar(1.0, theta)
}

fn angle_of(x: Complex64, index: usize) -> Result<f64> {
    if !x.re.is_finite() || !x.im.is_finite() || (x.norm() - 1.0).abs() > MASS_TOL {
        return Err(Error::InvalidAtom {
            index,
            reason: format!("support point {x} is not unit modulus"),
        });
    }
    Ok(x.arg())
}

fn check_weight(w: f64, index: usize) -> Result<()> {
    if !w.is_finite() || w < 0.0 {
        return Err(Error::InvalidAtom {
            index,
            reason: format!("weight {w} is negative or not finite"),
        });
    }
    Ok(())
}

fn check_angle(theta: f64, index: usize) -> Result<()> {
    if !theta.is_finite() {
        return Err(Error::InvalidAtom {
            index,
            reason: "angle is not finite".into(),
        });
    }
    Ok(())
}

/// A finite positive measure on the unit circle with finitely many atoms.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomicMeasure1D {
    /// `(angle, weight)`, sorted by angle.
    atoms: Vec<(f64, f64)>,
    points: Vec<(Complex64, f64)>,
}

impl AtomicMeasure1D {
    /// Builds a probability measure from `(angle, weight)` pairs; the total
    /// mass must be 1 within [`MASS_TOL`].
    pub fn probability<I>(atoms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (f64, f64)>,
    {
        let m = Self::finite(atoms)?;
        let mass = m.total_mass();
        if (mass - 1.0).abs() > MASS_TOL {
            return Err(Error::NotProbability { mass });
        }
        Ok(m)
    }

    /// Builds a finite (not necessarily normalized) measure.
    pub fn finite<I>(atoms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (f64, f64)>,
    {
        let mut raw = Vec::new();
        for (index, (theta, w)) in atoms.into_iter().enumerate() {
            check_angle(theta, index)?;
            check_weight(w, index)?;
            raw.push((wrap_angle(theta), w));
        }
        Ok(Self::from_normalized(raw))
    }

    /// Builds a probability measure from unit-modulus support points.
    pub fn from_points(points: &[(Complex64, f64)]) -> Result<Self> {
        let atoms = points
            .iter()
            .enumerate()
            .map(|(i, &(x, w))| angle_of(x, i).map(|a| (a, w)))
            .collect::<Result<Vec<_>>>()?;
        Self::probability(atoms)
    }

    pub fn point_mass(theta: f64) -> Self {
        Self::from_normalized(vec![(wrap_angle(theta), 1.0)])
    }

    /// The zero measure.
    pub fn zero() -> Self {
        Self::from_normalized(Vec::new())
    }

    fn from_normalized(mut raw: Vec<(f64, f64)>) -> Self {
        raw.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut atoms: Vec<(f64, f64)> = Vec::with_capacity(raw.len());
        for (theta, w) in raw {
            match atoms.last_mut() {
                Some(last) if angle_distance(last.0, theta) <= ATOM_MERGE_TOL => last.1 += w,
                _ => atoms.push((theta, w)),
            }
        }
        if atoms.len() > 1 {
            let n = atoms.len();
            if angle_distance(atoms[0].0, atoms[n - 1].0) <= ATOM_MERGE_TOL {
                let w = atoms[0].1;
                atoms[n - 1].1 += w;
                atoms.remove(0);
            }
        }
        atoms.retain(|&(_, w)| w > 0.0);
        let points = atoms.iter().map(|&(a, w)| (unit(a), w)).collect();
        Self { atoms, points }
    }

    /// `(angle, weight)` pairs sorted by angle.
    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    /// `(support point, weight)` pairs.
    pub fn points(&self) -> &[(Complex64, f64)] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.1).sum()
    }

    pub fn is_probability(&self) -> bool {
        (self.total_mass() - 1.0).abs() <= MASS_TOL
    }

    /// `∫ x^p dν(x)`.
    pub fn moment(&self, p: i32) -> Complex64 {
        self.atoms
            .iter()
            .map(|&(a, w)| w * unit(p as f64 * a))
            .sum()
    }

    pub fn mean(&self) -> Complex64 {
        self.moment(1)
    }

    /// Multiplies every weight by `factor >= 0`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self::from_normalized(self.atoms.iter().map(|&(a, w)| (a, w * factor)).collect())
    }

    /// Rotates the support by `e^{iφ}` (the free convolution with `δ_{e^{iφ}}`).
    pub fn rotated(&self, phi: f64) -> Self {
        Self::from_normalized(
            self.atoms
                .iter()
                .map(|&(a, w)| (wrap_angle(a + phi), w))
                .collect(),
        )
    }
}

/// One atom of a measure on the torus.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom2D {
    pub s_angle: f64,
    pub t_angle: f64,
    pub weight: f64,
}

/// A finite positive measure on `T²` with finitely many atoms.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomicMeasure2D {
    atoms: Vec<Atom2D>,
    points: Vec<(Complex64, Complex64, f64)>,
}

impl AtomicMeasure2D {
    /// Builds a probability measure from `(s_angle, t_angle, weight)` triples.
    pub fn probability<I>(atoms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (f64, f64, f64)>,
    {
        let m = Self::finite(atoms)?;
        let mass = m.total_mass();
        if (mass - 1.0).abs() > MASS_TOL {
            return Err(Error::NotProbability { mass });
        }
        Ok(m)
    }

    /// Builds a finite measure; used for Lévy measures, which carry
    /// arbitrary total mass.
    pub fn finite<I>(atoms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (f64, f64, f64)>,
    {
        let mut raw = Vec::new();
        for (index, (s, t, w)) in atoms.into_iter().enumerate() {
            check_angle(s, index)?;
            check_angle(t, index)?;
            check_weight(w, index)?;
            raw.push(Atom2D {
                s_angle: wrap_angle(s),
                t_angle: wrap_angle(t),
                weight: w,
            });
        }
        Ok(Self::from_normalized(raw))
    }

    /// Builds a probability measure from unit-modulus support points.
    pub fn from_points(points: &[(Complex64, Complex64, f64)]) -> Result<Self> {
        let atoms = points
            .iter()
            .enumerate()
            .map(|(i, &(s, t, w))| Ok((angle_of(s, i)?, angle_of(t, i)?, w)))
            .collect::<Result<Vec<_>>>()?;
        Self::probability(atoms)
    }

    pub fn point_mass(s_angle: f64, t_angle: f64) -> Self {
        Self::from_normalized(vec![Atom2D {
            s_angle: wrap_angle(s_angle),
            t_angle: wrap_angle(t_angle),
            weight: 1.0,
        }])
    }

    pub fn zero() -> Self {
        Self::from_normalized(Vec::new())
    }

    fn from_normalized(raw: Vec<Atom2D>) -> Self {
        let mut atoms: Vec<Atom2D> = Vec::with_capacity(raw.len());
        for a in raw {
            let hit = atoms.iter_mut().find(|b| {
                angle_distance(a.s_angle, b.s_angle) <= ATOM_MERGE_TOL
                    && angle_distance(a.t_angle, b.t_angle) <= ATOM_MERGE_TOL
            });
            match hit {
                Some(b) => b.weight += a.weight,
                None => atoms.push(a),
            }
        }
        atoms.retain(|a| a.weight > 0.0);
        atoms.sort_by(|a, b| {
            a.s_angle
                .total_cmp(&b.s_angle)
                .then(a.t_angle.total_cmp(&b.t_angle))
        });
        let points = atoms
            .iter()
            .map(|a| (unit(a.s_angle), unit(a.t_angle), a.weight))
            .collect();
        Self { atoms, points }
    }

    pub fn atoms(&self) -> &[Atom2D] {
        &self.atoms
    }

    /// `(s, t, weight)` with `s`, `t` on the unit circle.
    pub fn points(&self) -> &[(Complex64, Complex64, f64)] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.weight).sum()
    }

    pub fn is_probability(&self) -> bool {
        (self.total_mass() - 1.0).abs() <= MASS_TOL
    }

    /// `∫ s^p t^q dμ(s, t)`; `moment(0, 0)` is the total mass.
    pub fn moment(&self, p: i32, q: i32) -> Complex64 {
        self.atoms
            .iter()
            .map(|a| a.weight * unit(p as f64 * a.s_angle + q as f64 * a.t_angle))
            .sum()
    }

    /// Push-forward under the coordinate projection `j` (1 or 2).
    pub fn marginal(&self, j: usize) -> AtomicMeasure1D {
        let raw = self
            .atoms
            .iter()
            .map(|a| (if j == 1 { a.s_angle } else { a.t_angle }, a.weight))
            .collect();
        AtomicMeasure1D::from_normalized(raw)
    }

    /// Coordinate reflection `dμ*(s, t) = dμ(s, 1/t)`.
    pub fn reflect(&self) -> Self {
        self.map_atoms(|a| Atom2D {
            t_angle: wrap_angle(-a.t_angle),
            ..a
        })
    }

    /// `δ_λ ⊠⊠ μ` for `λ = (e^{iφ₁}, e^{iφ₂})`, given by angles.
    pub fn rotate(&self, phi1: f64, phi2: f64) -> Self {
        self.map_atoms(|a| Atom2D {
            s_angle: wrap_angle(a.s_angle + phi1),
            t_angle: wrap_angle(a.t_angle + phi2),
            weight: a.weight,
        })
    }

    /// Multiplies every weight by `factor >= 0`.
    pub fn scaled(&self, factor: f64) -> Self {
        self.map_atoms(|a| Atom2D {
            weight: a.weight * factor,
            ..a
        })
    }

    /// Multiplies each atom weight by `density(s, t) >= 0`.
    pub fn with_density<F>(&self, density: F) -> Self
    where
        F: Fn(Complex64, Complex64) -> f64,
    {
        let raw = self
            .atoms
            .iter()
            .zip(&self.points)
            .map(|(a, &(s, t, _))| Atom2D {
                weight: a.weight * density(s, t),
                ..*a
            })
            .collect();
        Self::from_normalized(raw)
    }

    /// Sum of two finite measures.
    pub fn add(&self, other: &Self) -> Self {
        let raw = self.atoms.iter().chain(other.atoms.iter()).copied().collect();
        Self::from_normalized(raw)
    }

    fn map_atoms<F: Fn(Atom2D) -> Atom2D>(&self, f: F) -> Self {
        Self::from_normalized(self.atoms.iter().map(|&a| f(a)).collect())
    }

    /// Membership in `P×` with the default threshold.
    pub fn in_class_px(&self) -> bool {
        self.in_class_px_with(PX_THRESHOLD)
    }

    /// `|m(μ⁽¹⁾)|, |m(μ⁽²⁾)|, |m₁,₁(μ)|` all exceed `tau`.
    pub fn in_class_px_with(&self, tau: f64) -> bool {
        self.moment(1, 0).norm() > tau
            && self.moment(0, 1).norm() > tau
            && self.moment(1, 1).norm() > tau
    }
}

/// `α ⊗ β`.
pub fn product_measure(alpha: &AtomicMeasure1D, beta: &AtomicMeasure1D) -> AtomicMeasure2D {
    let raw = alpha
        .atoms()
        .iter()
        .flat_map(|&(a, wa)| {
            beta.atoms().iter().map(move |&(b, wb)| Atom2D {
                s_angle: a,
                t_angle: b,
                weight: wa * wb,
            })
        })
        .collect();
    AtomicMeasure2D::from_normalized(raw)
}

/// Largest mass, over a row of an array, outside the `ε`-neighbourhood
/// `{|s - 1| + |t - 1| < ε}` of `(1, 1)`.
pub fn infinitesimality_norm(row: &[AtomicMeasure2D], eps: f64) -> f64 {
    let one = Complex64::new(1.0, 0.0);
    row.iter()
        .map(|mu| {
            mu.points()
                .iter()
                .filter(|&&(s, t, _)| (s - one).norm() + (t - one).norm() >= eps)
                .map(|p| p.2)
                .sum::<f64>()
        })
        .fold(0.0, f64::max)
}

/// Truncated table of moments `m_{p,q}` for `|p|, |q| <= order`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentTable2D {
    order: usize,
    entries: Vec<Complex64>,
}

/// Validity diagnostics of a moment table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TableCheck {
    pub hermitian_residual: f64,
    pub max_modulus: f64,
    pub min_eigenvalue: f64,
    pub mass_residual: f64,
}

impl TableCheck {
    pub fn passes(&self, tol_hermitian: f64, tol_modulus: f64, tol_eigen: f64) -> bool {
        self.hermitian_residual <= tol_hermitian
            && self.max_modulus <= 1.0 + tol_modulus
            && self.min_eigenvalue >= -tol_eigen
    }
}

impl MomentTable2D {
    /// A table of zeros.
    pub fn zeros(order: usize) -> Self {
        let side = 2 * order + 1;
        Self {
            order,
            entries: vec![Complex64::new(0.0, 0.0); side * side],
        }
    }

    pub fn from_measure(mu: &AtomicMeasure2D, order: usize) -> Self {
        let mut table = Self::zeros(order);
        let n = order as i32;
        for p in -n..=n {
            for q in -n..=n {
                table.set(p, q, mu.moment(p, q));
            }
        }
        table
    }

    pub fn order(&self) -> usize {
        self.order
    }

    fn index(&self, p: i32, q: i32) -> usize {
        let n = self.order as i32;
        assert!(p.abs() <= n && q.abs() <= n, "({p}, {q}) outside order {n}");
        let side = 2 * self.order + 1;
        (p + n) as usize * side + (q + n) as usize
    }

    pub fn get(&self, p: i32, q: i32) -> Complex64 {
        self.entries[self.index(p, q)]
    }

    pub fn set(&mut self, p: i32, q: i32, value: Complex64) {
        let i = self.index(p, q);
        self.entries[i] = value;
    }

    /// Entries in lexicographic `(p, q)` order.
    pub fn iter(&self) -> impl Iterator<Item = (i32, i32, Complex64)> + '_ {
        let n = self.order as i32;
        (-n..=n).flat_map(move |p| (-n..=n).map(move |q| (p, q, self.get(p, q))))
    }

    /// Restricts to a smaller order.
    pub fn truncated(&self, order: usize) -> Self {
        assert!(order <= self.order);
        let mut t = Self::zeros(order);
        for (p, q, v) in t.clone().iter() {
            let _ = v;
            t.set(p, q, self.get(p, q));
        }
        t
    }

    /// `max |m_{-p,-q} - conj(m_{p,q})|`.
    pub fn hermitian_residual(&self) -> f64 {
        self.iter()
            .map(|(p, q, v)| (self.get(-p, -q) - v.conj()).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_modulus(&self) -> f64 {
        self.iter().map(|(_, _, v)| v.norm()).fold(0.0, f64::max)
    }

    /// Smallest eigenvalue of the Hermitian matrix
    /// `M[(p,q),(p',q')] = m_{p-p', q-q'}` over `|p|, |q| <= order / 2`.
    pub fn min_moment_matrix_eigenvalue(&self) -> f64 {
        let h = (self.order / 2) as i32;
        let idx: Vec<(i32, i32)> = (-h..=h)
            .flat_map(|p| (-h..=h).map(move |q| (p, q)))
            .collect();
        let n = idx.len();
        let mut m = DMatrix::<Complex64>::zeros(n, n);
        for (i, &(p, q)) in idx.iter().enumerate() {
            for (j, &(pp, qq)) in idx.iter().enumerate() {
                m[(i, j)] = self.get(p - pp, q - qq);
            }
        }
        // Symmetrize before the Hermitian eigen-solve.
        let herm = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
        herm.symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    pub fn check(&self) -> TableCheck {
        TableCheck {
            hermitian_residual: self.hermitian_residual(),
            max_modulus: self.max_modulus(),
            min_eigenvalue: self.min_moment_matrix_eigenvalue(),
            mass_residual: (self.get(0, 0) - 1.0).norm(),
        }
    }

    /// `max |m_{p,q} - other_{p,q}|` over `|p|, |q| <= order`.
    pub fn max_abs_diff(&self, other: &Self, order: usize) -> f64 {
        let n = order as i32;
        let mut worst = 0.0f64;
        for p in -n..=n {
            for q in -n..=n {
                worst = worst.max((self.get(p, q) - other.get(p, q)).norm());
            }
        }
        worst
    }
}
