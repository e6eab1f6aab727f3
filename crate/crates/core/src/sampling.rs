//! Seeded random measures and evaluation points for property suites.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::measure::{AtomicMeasure1D, AtomicMeasure2D};
use crate::transforms::TORUS_BAND;

/// Deterministic generator of test measures and points.
pub struct MeasureSampler {
    rng: ChaCha8Rng,
}

impl MeasureSampler {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.rng.random_range(lo..hi)
    }

    fn weights(&mut self, n: usize) -> Vec<f64> {
        let raw: Vec<f64> = (0..n).map(|_| self.uniform(0.05, 1.0)).collect();
        let total: f64 = raw.iter().sum();
        raw.into_iter().map(|w| w / total).collect()
    }

    /// Atoms anywhere on `T²`.
    pub fn measure_2d(&mut self, n: usize) -> AtomicMeasure2D {
        self.measure_2d_in_arc(n, PI)
    }

    /// Atoms with both angles in `[-spread, spread]`.
    pub fn measure_2d_in_arc(&mut self, n: usize, spread: f64) -> AtomicMeasure2D {
        let w = self.weights(n);
        let atoms: Vec<(f64, f64, f64)> = w
            .into_iter()
            .map(|wt| {
                (
                    self.uniform(-spread, spread),
                    self.uniform(-spread, spread),
                    wt,
                )
            })
            .collect();
        normalized_2d(atoms)
    }

    /// A measure comfortably inside `P×`: atoms clustered in an arc around
    /// a random rotation, so means and `m_{1,1}` stay away from 0.
    pub fn px_measure_2d(&mut self, n: usize) -> AtomicMeasure2D {
        let spread = 0.9;
        let base = self.measure_2d_in_arc(n, spread);
        let (a, b) = (self.uniform(-PI, PI), self.uniform(-PI, PI));
        base.rotate(a, b)
    }

    pub fn measure_1d(&mut self, n: usize) -> AtomicMeasure1D {
        self.measure_1d_in_arc(n, PI)
    }

    pub fn measure_1d_in_arc(&mut self, n: usize, spread: f64) -> AtomicMeasure1D {
        let w = self.weights(n);
        let atoms: Vec<(f64, f64)> = w
            .into_iter()
            .map(|wt| (self.uniform(-spread, spread), wt))
            .collect();
        normalized_1d(atoms)
    }

    pub fn px_measure_1d(&mut self, n: usize) -> AtomicMeasure1D {
        let base = self.measure_1d_in_arc(n, 0.9);
        base.rotated(self.uniform(-PI, PI))
    }

    /// A point with `|z|` drawn from `(0.05, 0.95) ∪ (1.05, 20)`.
    pub fn off_torus_point(&mut self) -> Complex64 {
        let theta = self.uniform(-PI, PI);
        let r = if self.rng.random::<bool>() {
            self.uniform(0.05, 0.95)
        } else {
            1.0 / self.uniform(0.05, 0.95)
        };
        debug_assert!((r - 1.0).abs() > TORUS_BAND);
        Complex64::from_polar(r, theta)
    }

    /// A point in the disk of the given radius.
    pub fn disk_point(&mut self, radius: f64) -> Complex64 {
        let theta = self.uniform(-PI, PI);
        let r = radius * self.uniform(0.0, 1.0).sqrt();
        Complex64::from_polar(r, theta)
    }

    /// A point on the circle of the given radius.
    pub fn circle_point(&mut self, radius: f64) -> Complex64 {
        Complex64::from_polar(radius, self.uniform(-PI, PI))
    }
}

fn normalized_2d(atoms: Vec<(f64, f64, f64)>) -> AtomicMeasure2D {
    let m = AtomicMeasure2D::finite(atoms).expect("sampled atoms are valid");
    let total = m.total_mass();
    m.scaled(1.0 / total)
}

fn normalized_1d(atoms: Vec<(f64, f64)>) -> AtomicMeasure1D {
    let m = AtomicMeasure1D::finite(atoms).expect("sampled atoms are valid");
    let total = m.total_mass();
    m.scaled(1.0 / total)
}
