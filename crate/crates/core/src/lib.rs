//! Harmonic analysis for multiplicative bi-free convolution of probability
//! measures on the torus: integral transforms, the Σ-transform convolution
//! pipeline with moment extraction, infinitesimal-array limits and
//! infinitely divisible laws.

pub mod acceptance;
pub mod convolution;
pub mod error;
pub mod io;
pub mod limits;
pub mod measure;
pub mod sampling;
pub mod series;
pub mod transforms;

pub use num_complex::Complex64;

/// Shorthand used throughout the crate.
pub type C64 = Complex64;

pub use convolution::{
    bifree_convolve, extract_moments, free_convolve, opposite_convolve, psi_reconstruct,
    EvaluationGrid, FreeFactor, FreeLaw1D,
};
pub use error::{Error, Result};
pub use limits::{id_law, id_root, LevyData};
pub use measure::{AtomicMeasure1D, AtomicMeasure2D, MomentTable2D};
pub use series::{Series1, Series2};
pub use transforms::{DomainComponent, DomainWindow, LawFactor, TransformLaw};
