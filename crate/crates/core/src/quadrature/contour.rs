//! Trapezoidal rule on circles. For functions analytic in an annulus around
//! the circle the rule converges geometrically in the node count.

use std::f64::consts::PI;

use num_complex::Complex64;

pub const DEFAULT_CIRCLE_NODES: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Circle {
    pub center: Complex64,
    pub radius: f64,
}

impl Circle {
    pub fn new(center: Complex64, radius: f64) -> Self {
        Self { center, radius }
    }

    /// Counter-clockwise nodes z_j and the unit phases e^{i theta_j}.
    pub fn nodes(&self, n: usize) -> impl Iterator<Item = (Complex64, Complex64)> + '_ {
        (0..n).map(move |j| {
            let phase = Complex64::from_polar(1.0, 2.0 * PI * j as f64 / n as f64);
            (self.center + phase * self.radius, phase)
        })
    }

    /// (1 / 2 pi i) times the counter-clockwise integral of `f` over the circle.
    pub fn residue_sum<F: Fn(Complex64) -> Complex64>(&self, f: F, n: usize) -> Complex64 {
        let sum: Complex64 = self.nodes(n).map(|(z, phase)| f(z) * phase).sum();
        sum * (self.radius / n as f64)
    }

    /// Counter-clockwise integral of `f` over the circle.
    pub fn integrate<F: Fn(Complex64) -> Complex64>(&self, f: F, n: usize) -> Complex64 {
        self.residue_sum(f, n) * Complex64::new(0.0, 2.0 * PI)
    }

    /// Net number of times `f` winds around the origin along the circle
    /// (zeros minus poles enclosed). Assumes enough nodes that the phase
    /// increment between neighbours stays below pi.
    pub fn winding_number<F: Fn(Complex64) -> Complex64>(&self, f: F, n: usize) -> i64 {
        let values: Vec<Complex64> = self.nodes(n).map(|(z, _)| f(z)).collect();
        let mut total = 0.0;
        for j in 0..n {
            let a = values[j];
            let b = values[(j + 1) % n];
            total += (b / a).arg();
        }
        (total / (2.0 * PI)).round() as i64
    }
}
