//! Numerical integration used throughout the crate.
//!
//! All rules integrate complex-valued integrands of a real variable; real
//! integrals use the real part. Contour integrals in the complex plane are
//! built from these by parametrisation.

use std::ops::Add;

use num_complex::Complex64;

pub mod contour;
pub mod gauss_kronrod;
pub mod oscillatory;
pub mod tanh_sinh;

/// Integral value with an error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: Complex64,
    pub error: f64,
    pub evaluations: usize,
}

impl Estimate {
    pub fn zero() -> Self {
        Self {
            value: Complex64::new(0.0, 0.0),
            error: 0.0,
            evaluations: 0,
        }
    }

    pub fn relative_error(&self) -> f64 {
        let m = self.value.norm();
        if m == 0.0 {
            self.error
        } else {
            self.error / m
        }
    }

    pub fn scale(self, factor: Complex64) -> Self {
        Self {
            value: self.value * factor,
            error: self.error * factor.norm(),
            evaluations: self.evaluations,
        }
    }
}

impl Add for Estimate {
    type Output = Estimate;

    fn add(self, rhs: Estimate) -> Estimate {
        Estimate {
            value: self.value + rhs.value,
            error: self.error + rhs.error,
            evaluations: self.evaluations + rhs.evaluations,
        }
    }
}

/// Mixed absolute/relative stopping criterion: accept when
/// `error <= max(abs, rel * |value|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Tolerance {
    pub const fn new(abs: f64, rel: f64) -> Self {
        Self { abs, rel }
    }

    pub fn bound(&self, magnitude: f64) -> f64 {
        self.abs.max(self.rel * magnitude)
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self::new(1e-12, 1e-11)
    }
}
