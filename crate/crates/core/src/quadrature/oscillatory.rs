//! Fourier-type tails: integral of f(x) e^{i omega x} over [a, inf) for smooth,
//! algebraically decaying f. The tail is cut into half-periods whose partial
//! sums alternate; Wynn's epsilon algorithm accelerates them.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::{gauss_kronrod, Estimate, Tolerance};
use crate::error::{Error, Result};

const MAX_CYCLES: usize = 400;
const MIN_CYCLES: usize = 8;

/// Wynn epsilon table over a growing sequence of partial sums.
#[derive(Debug, Default)]
pub struct EpsilonTable {
    sums: Vec<Complex64>,
}

impl EpsilonTable {
    pub fn push(&mut self, partial_sum: Complex64) {
        self.sums.push(partial_sum);
    }

    /// Best extrapolated limit and an error estimate from its last two
    /// even-column neighbours.
    pub fn extrapolate(&self) -> Option<(Complex64, f64)> {
        let n = self.sums.len();
        if n < 3 {
            return None;
        }
        // eps_{-1} = 0, eps_0 = partial sums; keep even columns only.
        let mut prev: Vec<Complex64> = vec![Complex64::new(0.0, 0.0); n + 1];
        let mut cur: Vec<Complex64> = self.sums.clone();
        let mut best = *cur.last().expect("non-empty");
        let mut best_err = (cur[n - 1] - cur[n - 2]).norm();
        let mut column = 0;
        while cur.len() >= 2 {
            let mut next = Vec::with_capacity(cur.len() - 1);
            for i in 0..cur.len() - 1 {
                let d = cur[i + 1] - cur[i];
                if d.norm() == 0.0 {
                    // Sequence has converged exactly; the table degenerates.
                    return Some((cur[i + 1], 0.0));
                }
                next.push(prev[i + 1] + 1.0 / d);
            }
            column += 1;
            prev = cur;
            cur = next;
            if column % 2 == 0 && cur.len() >= 2 {
                let m = cur.len();
                let err = (cur[m - 1] - cur[m - 2]).norm();
                if err.is_finite() && err < best_err {
                    best = cur[m - 1];
                    best_err = err;
                }
            }
        }
        Some((best, best_err))
    }
}

/// Integral of f(x) e^{i omega x} over [a, inf). With omega = 0 this falls
/// back to the mapped non-oscillatory rule.
pub fn fourier_tail<F: Fn(f64) -> Complex64>(
    f: F,
    a: f64,
    omega: f64,
    tol: Tolerance,
) -> Result<Estimate> {
    if omega == 0.0 {
        return gauss_kronrod::integrate_to_infinity(f, a, tol);
    }
    let half_period = PI / omega.abs();
    let g = |x: f64| f(x) * Complex64::new(0.0, omega * x).exp();

    let mut table = EpsilonTable::default();
    let mut partial = Complex64::new(0.0, 0.0);
    let mut evaluations = 0;
    let mut last: Option<Complex64> = None;
    let mut stable = 0;
    for n in 0..MAX_CYCLES {
        let lo = a + n as f64 * half_period;
        let cycle_tol = Tolerance {
            abs: 1e-2 * tol.bound(partial.norm()),
            rel: 1e-2 * tol.rel,
        };
        let piece = gauss_kronrod::integrate(&g, lo, lo + half_period, &[], cycle_tol)?;
        partial += piece.value;
        evaluations += piece.evaluations;
        table.push(partial);
        if n + 1 < MIN_CYCLES {
            continue;
        }
        if let Some((limit, err)) = table.extrapolate() {
            let bound = tol.bound(limit.norm());
            let drift = last.map_or(f64::INFINITY, |l| (limit - l).norm());
            if err <= bound && drift <= bound {
                stable += 1;
                if stable >= 2 {
                    return Ok(Estimate {
                        value: limit,
                        error: err.max(drift),
                        evaluations,
                    });
                }
            } else {
                stable = 0;
            }
            last = Some(limit);
        }
        // The epsilon table grows quadratically; restart it on a suffix.
        if table.sums.len() > 40 {
            let keep = table.sums.split_off(table.sums.len() - 20);
            table.sums = keep;
        }
    }
    Err(Error::Quadrature(format!(
        "oscillatory tail from {a} with omega {omega} not converged after {MAX_CYCLES} half-periods"
    )))
}
