//! Rational wave functions of declared Hardy class.
//!
//! A wave function is a finite pole sum `sum_j c_j / (E - p_j)^{n_j}`. Its
//! analytic continuation is the same expression evaluated off the real axis,
//! so continuation, residues and Fourier supports are all exact. The Fourier
//! convention is `f^(tau) = int f(E) e^{-i E tau} dE`: functions analytic in
//! the upper half-plane (poles below the axis) have support on `tau >= 0`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{gauss_kronrod, Estimate, Tolerance};

/// Default half-width of the Paley-Wiener sampling window.
pub const DEFAULT_PW_E_MAX: f64 = 2000.0;
/// Default number of Paley-Wiener samples.
pub const DEFAULT_PW_SAMPLES: usize = 1 << 18;
/// Leakage below which membership in the declared class is accepted.
pub const PW_PASS_THRESHOLD: f64 = 1e-5;
/// Leakage above which the declared class is considered wrong.
pub const PW_FAIL_THRESHOLD: f64 = 0.3;

// Edge samples must be this small relative to the peak.
const PW_DECAY_RATIO: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HardyClass {
    /// Analytic in the upper half-plane, Fourier support on `tau >= 0`.
    UpperHalfPlane,
    /// Analytic in the lower half-plane, Fourier support on `tau <= 0`.
    LowerHalfPlane,
}

impl HardyClass {
    pub fn flipped(self) -> Self {
        match self {
            HardyClass::UpperHalfPlane => HardyClass::LowerHalfPlane,
            HardyClass::LowerHalfPlane => HardyClass::UpperHalfPlane,
        }
    }

    /// Whether a pole at `p` is compatible with analyticity in this class.
    pub fn admits_pole(self, p: Complex64) -> bool {
        match self {
            HardyClass::UpperHalfPlane => p.im < 0.0,
            HardyClass::LowerHalfPlane => p.im > 0.0,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            HardyClass::UpperHalfPlane => "H2+",
            HardyClass::LowerHalfPlane => "H2-",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoleTerm {
    #[serde(with = "crate::serde_complex")]
    pub coefficient: Complex64,
    #[serde(with = "crate::serde_complex")]
    pub pole: Complex64,
    pub order: u32,
}

impl PoleTerm {
    pub fn new(coefficient: Complex64, pole: Complex64, order: u32) -> Self {
        Self {
            coefficient,
            pole,
            order,
        }
    }

    fn eval(&self, z: Complex64) -> Complex64 {
        self.coefficient / (z - self.pole).powu(self.order)
    }
}

#[derive(Debug, Deserialize)]
struct RawWaveFunction {
    terms: Vec<PoleTerm>,
    class: HardyClass,
}

impl TryFrom<RawWaveFunction> for WaveFunction {
    type Error = Error;

    fn try_from(raw: RawWaveFunction) -> Result<Self> {
        WaveFunction::new(raw.terms, raw.class)
    }
}

/// Finite pole sum with a declared Hardy class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawWaveFunction")]
pub struct WaveFunction {
    terms: Vec<PoleTerm>,
    class: HardyClass,
}

impl WaveFunction {
    pub fn new(terms: Vec<PoleTerm>, class: HardyClass) -> Result<Self> {
        for (j, term) in terms.iter().enumerate() {
            if term.order == 0 {
                return Err(Error::Input(format!("term {j} has order 0")));
            }
            let finite = |z: Complex64| z.re.is_finite() && z.im.is_finite();
            if !finite(term.coefficient) || !finite(term.pole) {
                return Err(Error::Input(format!("term {j} is not finite")));
            }
            if !class.admits_pole(term.pole) {
                return Err(Error::HardyClass(format!(
                    "pole {} of term {j} is incompatible with declared class {}",
                    term.pole,
                    class.symbol()
                )));
            }
        }
        Ok(Self { terms, class })
    }

    /// Accepts the declared class without checking pole placement. Meant for
    /// auditing declarations with [`paley_wiener_check`].
    pub fn declared_unchecked(terms: Vec<PoleTerm>, class: HardyClass) -> Self {
        Self { terms, class }
    }

    pub fn zero(class: HardyClass) -> Self {
        Self {
            terms: Vec::new(),
            class,
        }
    }

    /// `c / (E - p)^n`, with the class inferred from the side of the pole.
    pub fn single(coefficient: Complex64, pole: Complex64, order: u32) -> Result<Self> {
        let class = if pole.im < 0.0 {
            HardyClass::UpperHalfPlane
        } else if pole.im > 0.0 {
            HardyClass::LowerHalfPlane
        } else {
            return Err(Error::HardyClass(format!("pole {pole} lies on the real axis")));
        };
        Self::new(vec![PoleTerm::new(coefficient, pole, order)], class)
    }

    pub fn terms(&self) -> &[PoleTerm] {
        &self.terms
    }

    pub fn class(&self) -> HardyClass {
        self.class
    }

    pub fn poles(&self) -> Vec<Complex64> {
        self.terms.iter().map(|t| t.pole).collect()
    }

    /// Value at `z`, which may lie anywhere off the poles.
    pub fn evaluate(&self, z: Complex64) -> Result<Complex64> {
        for term in &self.terms {
            if z == term.pole {
                return Err(Error::Domain(format!("evaluation at pole {}", term.pole)));
            }
        }
        let v = self.eval_unchecked(z);
        if v.re.is_finite() && v.im.is_finite() {
            Ok(v)
        } else {
            Err(Error::Domain(format!("wave function overflows at {z}")))
        }
    }

    pub(crate) fn eval_unchecked(&self, z: Complex64) -> Complex64 {
        self.terms.iter().map(|t| t.eval(z)).sum()
    }

    /// Value on the real axis. Never hits a pole since all poles are off-axis.
    pub fn at(&self, energy: f64) -> Complex64 {
        self.eval_unchecked(Complex64::new(energy, 0.0))
    }

    /// `g(z) = conj(f(conj z))`: conjugated coefficients and poles, flipped class.
    pub fn conjugate_continuation(&self) -> WaveFunction {
        WaveFunction {
            terms: self
                .terms
                .iter()
                .map(|t| PoleTerm::new(t.coefficient.conj(), t.pole.conj(), t.order))
                .collect(),
            class: self.class.flipped(),
        }
    }

    /// Coefficient of `E^{-m}` in the large-|E| expansion.
    pub fn asymptotic_coefficient(&self, m: u32) -> Complex64 {
        self.terms
            .iter()
            .filter(|t| t.order <= m)
            .map(|t| t.coefficient * binomial(m - 1, t.order - 1) * t.pole.powu(m - t.order))
            .sum()
    }

    /// Smallest `m` with `f(E) ~ a_m E^{-m}` at large |E|; `None` for the zero
    /// function.
    pub fn decay_order(&self) -> Option<u32> {
        // A nonzero rational function with denominator degree D has some
        // nonvanishing a_m with m <= D.
        let degree: u32 = self.terms.iter().map(|t| t.order).sum();
        for m in 1..=degree {
            let scale: f64 = self
                .terms
                .iter()
                .filter(|t| t.order <= m)
                .map(|t| t.coefficient.norm() * binomial(m - 1, t.order - 1) * t.pole.norm().powi((m - t.order) as i32))
                .sum();
            if scale == 0.0 {
                continue;
            }
            if self.asymptotic_coefficient(m).norm() > 1e-12 * scale {
                return Some(m);
            }
        }
        None
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|t| t.coefficient == Complex64::new(0.0, 0.0)) || self.decay_order().is_none()
    }

    pub fn scale(&self, factor: Complex64) -> WaveFunction {
        WaveFunction {
            terms: self
                .terms
                .iter()
                .map(|t| PoleTerm::new(t.coefficient * factor, t.pole, t.order))
                .collect(),
            class: self.class,
        }
    }

    /// Sum of two functions of the same class.
    pub fn add(&self, other: &WaveFunction) -> Result<WaveFunction> {
        if self.class != other.class {
            return Err(Error::HardyClass(format!(
                "cannot add {} and {} functions",
                self.class.symbol(),
                other.class.symbol()
            )));
        }
        let mut terms = self.terms.clone();
        terms.extend_from_slice(&other.terms);
        Ok(WaveFunction {
            terms,
            class: self.class,
        })
    }

    /// Real abscissae around which the function varies: pole real parts and
    /// their half-widths.
    pub(crate) fn breakpoints(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(3 * self.terms.len());
        for t in &self.terms {
            out.push(t.pole.re);
            out.push(t.pole.re - t.pole.im.abs());
            out.push(t.pole.re + t.pole.im.abs());
        }
        out
    }

    /// Smallest distance of a pole from the real axis.
    pub(crate) fn min_pole_height(&self) -> Option<f64> {
        self.terms
            .iter()
            .map(|t| t.pole.im.abs())
            .min_by(f64::total_cmp)
    }
}

fn binomial(n: u32, k: u32) -> f64 {
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Sampling window for the Paley-Wiener check: `N` equispaced samples on
/// `[-E_max, E_max)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PaleyWienerGrid {
    pub e_max: f64,
    pub samples: usize,
}

impl Default for PaleyWienerGrid {
    fn default() -> Self {
        Self {
            e_max: DEFAULT_PW_E_MAX,
            samples: DEFAULT_PW_SAMPLES,
        }
    }
}

/// Fraction of the discrete Fourier mass on the half-line excluded by the
/// declared class. Near zero confirms membership; near one means the class is
/// mirrored.
pub fn paley_wiener_check(wf: &WaveFunction, grid: PaleyWienerGrid) -> Result<f64> {
    let n = grid.samples;
    if n < 4 || !n.is_power_of_two() {
        return Err(Error::Input(format!("sample count {n} must be a power of two >= 4")));
    }
    if !(grid.e_max > 0.0 && grid.e_max.is_finite()) {
        return Err(Error::Input(format!("window half-width {} must be positive", grid.e_max)));
    }
    if wf.is_zero() {
        return Err(Error::Input("zero wave function has no Fourier mass".into()));
    }
    let de = 2.0 * grid.e_max / n as f64;
    if let Some(h) = wf.min_pole_height() {
        if de > h {
            return Err(Error::Resolution(format!(
                "sample spacing {de:e} exceeds pole distance {h:e} from the axis"
            )));
        }
    }

    let mut buffer: Vec<Complex64> = (0..n).map(|j| wf.at(-grid.e_max + j as f64 * de)).collect();
    let peak = buffer.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let edge = wf.at(-grid.e_max).norm().max(wf.at(grid.e_max).norm());
    if edge >= PW_DECAY_RATIO * peak {
        return Err(Error::Resolution(format!(
            "|wf(+-{})| / max|wf| = {:e} is not below {PW_DECAY_RATIO:e}; widen the window",
            grid.e_max,
            edge / peak
        )));
    }

    FftPlanner::new().plan_fft_forward(n).process(&mut buffer);

    // Bin m < N/2 samples tau = 2 pi m / (N dE) >= 0, bins above N/2 negative tau.
    let half = n / 2;
    let mass = |m: usize| buffer[m].norm_sqr();
    let positive: f64 = (1..half).map(mass).sum::<f64>() + 0.5 * (mass(0) + mass(half));
    let negative: f64 = (half + 1..n).map(mass).sum::<f64>() + 0.5 * (mass(0) + mass(half));
    let total = positive + negative;
    let forbidden = match wf.class() {
        HardyClass::UpperHalfPlane => negative,
        HardyClass::LowerHalfPlane => positive,
    };
    Ok(forbidden / total)
}

/// `(1 / 2 pi i) int_R f(E) / (E - z) dE` for `z` off the real axis.
///
/// For `f` in the lower-half-plane class and `Im z < 0` this equals `-f(z)`;
/// for `Im z > 0` it vanishes. The upper-half-plane class mirrors both.
pub fn cauchy_transform(wf: &WaveFunction, z: Complex64, tol: Tolerance) -> Result<Estimate> {
    if z.im == 0.0 {
        return Err(Error::Domain(format!("Cauchy point {z} lies on the real axis")));
    }
    let mut cuts = wf.breakpoints();
    cuts.extend([z.re, z.re - z.im.abs(), z.re + z.im.abs()]);
    let est = gauss_kronrod::integrate_real_line(
        |e| wf.at(e) / (Complex64::new(e, 0.0) - z),
        &cuts,
        tol,
    )?;
    Ok(est.scale(Complex64::new(0.0, -1.0 / (2.0 * PI))))
}
