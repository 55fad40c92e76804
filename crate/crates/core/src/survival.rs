//! Survival amplitudes of states with a spectrum bounded below.
//!
//! For a density `rho` on `E >= 0` the amplitude `A(t) = int_0^inf rho(E)
//! e^{-iEt} dE` is evaluated by rotating the contour onto the negative
//! imaginary axis. The Breit-Wigner pole at `z_R` in the swept quadrant gives
//! the exponential term; the remaining integral along `E = -iu` is
//! non-oscillatory and decays only as a power of `t`.

use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::energy_surface::ResonancePole;
use crate::error::{Error, Result};
use crate::quadrature::{gauss_kronrod, oscillatory, tanh_sinh, Estimate, Tolerance};

/// Tolerance of the rotated-contour integral.
pub const ROTATION_TOLERANCE: Tolerance = Tolerance::new(1e-300, 1e-13);
/// Tolerance of the direct oscillatory quadrature.
pub const DIRECT_TOLERANCE: Tolerance = Tolerance::new(1e-15, 1e-12);
/// Maximum RMS residual (in log |A|^2) accepted by the power-law fit.
pub const FIT_RESIDUAL_LIMIT: f64 = 0.05;

/// `rho(E) = N (E / (E + E_c))^m BW(E)` on `E >= 0`. The power `m = 0` is
/// the truncated Breit-Wigner; `m >= 1` forces `rho(0) = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DensityParameters", into = "DensityParameters")]
pub struct SpectralDensity {
    resonance: ResonancePole,
    threshold_power: u32,
    cutoff: f64,
    normalization: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DensityParameters {
    #[serde(rename = "E_R")]
    energy: f64,
    #[serde(rename = "Gamma")]
    width: f64,
    #[serde(default)]
    threshold_power: u32,
    #[serde(default = "default_cutoff")]
    cutoff: f64,
}

fn default_cutoff() -> f64 {
    1.0
}

impl TryFrom<DensityParameters> for SpectralDensity {
    type Error = Error;

    fn try_from(p: DensityParameters) -> Result<Self> {
        SpectralDensity::threshold(ResonancePole::new(p.energy, p.width)?, p.threshold_power, p.cutoff)
    }
}

impl From<SpectralDensity> for DensityParameters {
    fn from(d: SpectralDensity) -> Self {
        DensityParameters {
            energy: d.resonance.energy,
            width: d.resonance.width,
            threshold_power: d.threshold_power,
            cutoff: d.cutoff,
        }
    }
}

impl SpectralDensity {
    /// Breit-Wigner restricted to `E >= 0` and renormalized.
    pub fn truncated_breit_wigner(resonance: ResonancePole) -> Result<Self> {
        Self::threshold(resonance, 0, default_cutoff())
    }

    /// Breit-Wigner suppressed near threshold by `(E / (E + E_c))^m`.
    pub fn threshold(resonance: ResonancePole, power: u32, cutoff: f64) -> Result<Self> {
        resonance.validate()?;
        if !(cutoff > 0.0 && cutoff.is_finite()) {
            return Err(Error::Configuration(format!("cutoff {cutoff} must be positive")));
        }
        let mut density = Self {
            resonance,
            threshold_power: power,
            cutoff,
            normalization: 1.0,
        };
        density.normalization = if power == 0 {
            let (e, g) = (resonance.energy, resonance.width);
            1.0 / (0.5 + (2.0 * e / g).atan() / PI)
        } else {
            1.0 / density.mass()?
        };
        Ok(density)
    }

    pub fn resonance(&self) -> ResonancePole {
        self.resonance
    }

    pub fn threshold_power(&self) -> u32 {
        self.threshold_power
    }

    pub fn normalization(&self) -> f64 {
        self.normalization
    }

    /// Analytic expression of the density at complex energy.
    fn shape(&self, e: Complex64) -> Complex64 {
        let z = self.resonance.complex_energy();
        let bw = self.resonance.width / (2.0 * PI) / ((e - z) * (e - z.conj()));
        let h = (e / (e + self.cutoff)).powu(self.threshold_power);
        bw * h * self.normalization
    }

    /// `rho(E)`, zero below threshold.
    pub fn density(&self, energy: f64) -> f64 {
        if energy < 0.0 {
            0.0
        } else {
            self.shape(Complex64::new(energy, 0.0)).re
        }
    }

    /// `int_0^inf rho dE` by quadrature.
    pub fn mass(&self) -> Result<f64> {
        let (e, g) = (self.resonance.energy, self.resonance.width);
        let cuts = [e - 4.0 * g, e - g, e, e + g, e + 4.0 * g, self.cutoff];
        let f = |x: f64| Complex64::new(self.density(x), 0.0);
        let cut = 2.0 * e + 10.0 * g + self.cutoff;
        let finite = gauss_kronrod::integrate(f, 0.0, cut, &cuts, DIRECT_TOLERANCE)?;
        let tail = gauss_kronrod::integrate_to_infinity(f, cut, DIRECT_TOLERANCE)?;
        Ok((finite + tail).value.re)
    }

    /// Coefficient `c` of the pole term `c e^{-i z_R t}`.
    pub fn pole_coefficient(&self) -> Complex64 {
        let z = self.resonance.complex_energy();
        // Res_{z_R} BW = i / (2 pi); the clockwise sweep contributes -2 pi i.
        self.normalization * (z / (z + self.cutoff)).powu(self.threshold_power)
    }

    /// Pole part `c e^{-i z_R t}`.
    pub fn pole_term(&self, t: f64) -> Complex64 {
        let z = self.resonance.complex_energy();
        self.pole_coefficient() * Complex64::from_polar((z.im * t).exp(), -z.re * t)
    }

    /// Threshold part `-i int_0^inf rho(-iu) e^{-ut} du`.
    pub fn threshold_term(&self, t: f64) -> Result<Estimate> {
        let scale = 1.0 / (t + 1.0 / self.resonance.energy);
        let est = tanh_sinh::integrate_half_line(
            |u| self.shape(Complex64::new(0.0, -u)) * (-u * t).exp(),
            0.0,
            scale,
            ROTATION_TOLERANCE,
        )?;
        Ok(est.scale(Complex64::new(0.0, -1.0)))
    }
}

fn require_time(t: f64) -> Result<()> {
    if t.is_nan() || t < 0.0 {
        Err(Error::Domain(format!("survival amplitude needs t >= 0, got {t}")))
    } else {
        Ok(())
    }
}

/// `A(t)` by contour rotation.
pub fn survival_amplitude(density: &SpectralDensity, t: f64) -> Result<Complex64> {
    require_time(t)?;
    Ok(density.pole_term(t) + density.threshold_term(t)?.value)
}

/// `A(t)` by direct oscillatory quadrature along `E >= 0`.
pub fn survival_amplitude_direct(density: &SpectralDensity, t: f64) -> Result<Estimate> {
    require_time(t)?;
    let (e, g) = (density.resonance.energy, density.resonance.width);
    let cuts = [e - 8.0 * g, e - 2.0 * g, e - 0.5 * g, e, e + 0.5 * g, e + 2.0 * g, e + 8.0 * g];
    let f = |x: f64| Complex64::new(density.density(x), 0.0);
    let cut = 2.0 * e + 10.0 * g + density.cutoff;
    let finite = gauss_kronrod::integrate(
        |x| f(x) * Complex64::from_polar(1.0, -x * t),
        0.0,
        cut,
        &cuts,
        DIRECT_TOLERANCE,
    )?;
    let tail = if t == 0.0 {
        gauss_kronrod::integrate_to_infinity(f, cut, DIRECT_TOLERANCE)?
    } else {
        oscillatory::fourier_tail(f, cut, -t, DIRECT_TOLERANCE)?
    };
    Ok(finite + tail)
}

pub fn survival_probability(density: &SpectralDensity, t: f64) -> Result<f64> {
    Ok(survival_amplitude(density, t)?.norm_sqr())
}

/// `| |A(t)|^2 e^{Gamma t} - 1 |`.
pub fn exponential_deviation(density: &SpectralDensity, t: f64) -> Result<f64> {
    let p = survival_probability(density, t)?;
    Ok((p * (density.resonance.width * t).exp() - 1.0).abs())
}

/// Sampling of `t_k = k * step` for `k = 1, 2, ...` up to `max_time`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OnsetWindow {
    pub step: f64,
    pub max_time: f64,
}

impl OnsetWindow {
    /// Steps of `0.1 / Gamma` up to `100 / Gamma`.
    pub fn for_width(width: f64) -> Self {
        Self {
            step: 0.1 / width,
            max_time: 100.0 / width,
        }
    }
}

/// First sampled time where the survival probability departs from the
/// exponential law by more than `threshold`.
pub fn deviation_onset(density: &SpectralDensity, threshold: f64) -> Result<f64> {
    deviation_onset_in(density, threshold, OnsetWindow::for_width(density.resonance.width))
}

pub fn deviation_onset_in(density: &SpectralDensity, threshold: f64, window: OnsetWindow) -> Result<f64> {
    if !(threshold >= 0.0 && threshold.is_finite()) {
        return Err(Error::Input(format!("threshold {threshold} must be finite and >= 0")));
    }
    if !(window.step > 0.0 && window.max_time >= window.step) {
        return Err(Error::Input(format!("invalid sampling window {window:?}")));
    }
    let steps = (window.max_time / window.step).floor() as usize;
    let mut max_deviation: f64 = 0.0;
    let mut last_t = 0.0;
    for k in 1..=steps {
        let t = k as f64 * window.step;
        let d = exponential_deviation(density, t)?;
        if d > threshold {
            return Ok(t);
        }
        max_deviation = max_deviation.max(d);
        last_t = t;
    }
    Err(Error::Window { last_t, max_deviation })
}

/// Least-squares power law `log y = a + p log t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerLawFit {
    pub exponent: f64,
    pub intercept: f64,
    /// RMS residual in `log y`.
    pub residual: f64,
}

/// Fits a power law to positive samples, rejecting data that is not one.
pub fn fit_power_law(times: &[f64], values: &[f64]) -> Result<PowerLawFit> {
    if times.len() != values.len() || times.len() < 3 {
        return Err(Error::Input("power-law fit needs at least three (t, y) samples".into()));
    }
    if times.iter().chain(values).any(|v| !(*v > 0.0 && v.is_finite())) {
        return Err(Error::Input("power-law fit needs positive finite samples".into()));
    }
    let xs: Vec<f64> = times.iter().map(|t| t.ln()).collect();
    let ys: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let exponent = sxy / sxx;
    let intercept = my - exponent * mx;
    let residual = (xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - exponent * x).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    let fit = PowerLawFit {
        exponent,
        intercept,
        residual,
    };
    if residual > FIT_RESIDUAL_LIMIT {
        return Err(Error::Regime(format!(
            "log-log residual {residual:.3e} exceeds {FIT_RESIDUAL_LIMIT:e}; data is not a power law"
        )));
    }
    Ok(fit)
}

/// Late-time exponent of `|A(t)|^2` from log-spaced samples in `[t_min, t_max]`.
pub fn tail_exponent(density: &SpectralDensity, t_min: f64, t_max: f64) -> Result<PowerLawFit> {
    if !(t_min > 0.0 && t_max > t_min) {
        return Err(Error::Input(format!("invalid fit range [{t_min}, {t_max}]")));
    }
    const SAMPLES: usize = 32;
    let ratio = (t_max / t_min).ln();
    let times: Vec<f64> = (0..SAMPLES)
        .map(|j| t_min * (ratio * j as f64 / (SAMPLES - 1) as f64).exp())
        .collect();
    let values = times
        .iter()
        .map(|&t| survival_probability(density, t))
        .collect::<Result<Vec<_>>>()?;
    fit_power_law(&times, &values)
}

/// CSV with columns `t, |A|^2, e^{-Gamma t}, ratio`.
pub fn survival_csv(density: &SpectralDensity, times: &[f64]) -> Result<String> {
    let mut out = String::from("t,abs_A_sq,exp_decay,ratio\n");
    for &t in times {
        let p = survival_probability(density, t)?;
        let e = (-density.resonance.width * t).exp();
        let _ = writeln!(out, "{t},{p},{e},{}", p / e);
    }
    Ok(out)
}
