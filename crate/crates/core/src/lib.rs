//! Numerical harmonic analysis on the periodic torus: wavelet paraproducts,
//! Calderón–Zygmund operators, Hardy/BMO norm estimators and commutator
//! decompositions, together with seeded experiment suites.

pub mod commutator;
pub mod czo;
pub mod dyadic_wavelet;
pub mod error;
pub mod fft;
pub mod grid;
pub mod harness;
pub mod paraproduct;
pub mod sampling;
pub mod spaces;

pub use error::{Error, Result};
pub use grid::SampledFunction;
