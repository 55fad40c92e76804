//! Numerics for resonance decay: unitary S-matrix models with second-sheet
//! poles, Hardy-class wave functions, Gamow kets with forward-only evolution,
//! complex basis-vector expansions with their background integral, the exact
//! Golden Rule and its Born limit, survival amplitudes of semibounded
//! spectra, and a finite-dimensional toolkit for histories of measurements.

pub mod energy_surface;
pub mod error;
pub mod expansion;
pub mod gamow;
pub mod goldenrule;
pub mod hardy;
pub mod histories;
pub mod quadrature;
pub mod serde_complex;
pub mod survival;

pub use error::{Error, Result};
pub use num_complex::Complex64;
