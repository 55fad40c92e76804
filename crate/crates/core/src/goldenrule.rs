//! Exact Golden Rule for a Gamow state decaying into separable channels.
//!
//! The squared matrix element into channel `eta` is `v_eta^2 w_eta(E)`. With
//! the Breit-Wigner weight `BW(E) = (Gamma/2 pi) / ((E - E_R)^2 + Gamma^2/4)`
//! the normalization constraint reads
//! `(2 pi / Gamma) sum_eta v_eta^2 int_0^inf w_eta BW dE = 1`, and the
//! registered probability is `P(t) = F (1 - e^{-Gamma t})`, where `F` is the
//! same sum with the detector efficiency inserted.

use std::collections::HashSet;
use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::energy_surface::ResonancePole;
use crate::error::{require_forward_time, Error, Result};
use crate::quadrature::{gauss_kronrod, Tolerance};

/// Tolerance on the normalization constraint.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-8;
/// Quadrature tolerance for channel integrals.
pub const CHANNEL_TOLERANCE: Tolerance = Tolerance::new(1e-14, 1e-13);
/// Cutoff energy of the default threshold form factor.
pub const DEFAULT_CUTOFF: f64 = 10.0;

/// Energy dependence `w(E) >= 0` of a channel's squared matrix element.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum FormFactor {
    /// `E / (E / E_c + 1)^4`: linear at threshold, `E^{-3}` at large E.
    Threshold { cutoff: f64 },
    /// `(width/2)^2 / ((E - center)^2 + (width/2)^2)`, unit peak.
    Lorentzian { center: f64, width: f64 },
    /// `(E - node)^2 / (1 + E / E_c)^4`, vanishing at `node`.
    Node { node: f64, cutoff: f64 },
}

impl Default for FormFactor {
    fn default() -> Self {
        FormFactor::Threshold {
            cutoff: DEFAULT_CUTOFF,
        }
    }
}

impl FormFactor {
    pub fn eval(&self, energy: f64) -> f64 {
        if energy < 0.0 {
            return 0.0;
        }
        match *self {
            FormFactor::Threshold { cutoff } => energy / (energy / cutoff + 1.0).powi(4),
            FormFactor::Lorentzian { center, width } => {
                let h = 0.25 * width * width;
                h / ((energy - center).powi(2) + h)
            }
            FormFactor::Node { node, cutoff } => (energy - node).powi(2) / (1.0 + energy / cutoff).powi(4),
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            FormFactor::Threshold { cutoff } => cutoff > 0.0 && cutoff.is_finite(),
            FormFactor::Lorentzian { center, width } => center.is_finite() && width > 0.0 && width.is_finite(),
            FormFactor::Node { node, cutoff } => node.is_finite() && cutoff > 0.0 && cutoff.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Configuration(format!("invalid form factor {self:?}")))
        }
    }

    fn breakpoints(&self) -> Vec<f64> {
        match *self {
            FormFactor::Threshold { cutoff } => vec![cutoff / 3.0, cutoff],
            FormFactor::Lorentzian { center, width } => vec![center - width, center, center + width],
            FormFactor::Node { node, cutoff } => vec![node, cutoff],
        }
    }
}

/// Detector efficiency `lambda(E)` in `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum Efficiency {
    #[default]
    Ideal,
    Constant { value: f64 },
    /// Monotone cubic (PCHIP) interpolation, held constant beyond the table.
    Tabulated { energies: Vec<f64>, values: Vec<f64> },
}

impl Efficiency {
    pub fn eval(&self, energy: f64) -> f64 {
        match self {
            Efficiency::Ideal => 1.0,
            Efficiency::Constant { value } => *value,
            Efficiency::Tabulated { energies, values } => pchip(energies, values, energy),
        }
    }

    fn validate(&self) -> Result<()> {
        let in_range = |v: f64| (0.0..=1.0).contains(&v);
        match self {
            Efficiency::Ideal => Ok(()),
            Efficiency::Constant { value } if in_range(*value) => Ok(()),
            Efficiency::Constant { value } => Err(Error::Configuration(format!(
                "efficiency {value} outside [0, 1]"
            ))),
            Efficiency::Tabulated { energies, values } => {
                if energies.len() != values.len() || energies.len() < 2 {
                    return Err(Error::Configuration(
                        "efficiency table needs at least two (energy, value) pairs".into(),
                    ));
                }
                if energies.windows(2).any(|w| !(w[1] > w[0])) {
                    return Err(Error::Configuration("efficiency energies must increase".into()));
                }
                if let Some(v) = values.iter().find(|v| !in_range(**v)) {
                    return Err(Error::Configuration(format!("efficiency {v} outside [0, 1]")));
                }
                Ok(())
            }
        }
    }

    fn breakpoints(&self) -> Vec<f64> {
        match self {
            Efficiency::Tabulated { energies, .. } => energies.clone(),
            _ => Vec::new(),
        }
    }

    fn is_ideal(&self) -> bool {
        match self {
            Efficiency::Ideal => true,
            Efficiency::Constant { value } => *value == 1.0,
            Efficiency::Tabulated { values, .. } => values.iter().all(|v| *v == 1.0),
        }
    }
}

/// Fritsch-Carlson monotone cubic Hermite interpolation. Interpolated values
/// stay within the range of neighbouring table values.
fn pchip(x: &[f64], y: &[f64], at: f64) -> f64 {
    let n = x.len();
    if at <= x[0] {
        return y[0];
    }
    if at >= x[n - 1] {
        return y[n - 1];
    }
    let i = x.partition_point(|&xi| xi <= at) - 1;
    let slopes: Vec<f64> = (0..n - 1).map(|j| (y[j + 1] - y[j]) / (x[j + 1] - x[j])).collect();
    let tangent = |j: usize| -> f64 {
        if j == 0 {
            return end_tangent(x[1] - x[0], x.get(2).map_or(0.0, |x2| x2 - x[1]), slopes[0], slopes.get(1).copied());
        }
        if j == n - 1 {
            let h = x[n - 1] - x[n - 2];
            let h_prev = if n > 2 { x[n - 2] - x[n - 3] } else { 0.0 };
            let prev = if n > 2 { Some(slopes[n - 3]) } else { None };
            return end_tangent(h, h_prev, slopes[n - 2], prev);
        }
        let (d0, d1) = (slopes[j - 1], slopes[j]);
        if d0 * d1 <= 0.0 {
            return 0.0;
        }
        let (h0, h1) = (x[j] - x[j - 1], x[j + 1] - x[j]);
        let (w1, w2) = (2.0 * h1 + h0, h1 + 2.0 * h0);
        (w1 + w2) / (w1 / d0 + w2 / d1)
    };
    let h = x[i + 1] - x[i];
    let s = (at - x[i]) / h;
    let (m0, m1) = (tangent(i), tangent(i + 1));
    let h00 = (1.0 + 2.0 * s) * (1.0 - s).powi(2);
    let h10 = s * (1.0 - s).powi(2);
    let h01 = s * s * (3.0 - 2.0 * s);
    let h11 = s * s * (s - 1.0);
    h00 * y[i] + h10 * h * m0 + h01 * y[i + 1] + h11 * h * m1
}

/// One-sided three-point end tangent with the usual monotonicity limits.
fn end_tangent(h0: f64, h1: f64, d0: f64, d1: Option<f64>) -> f64 {
    let Some(d1) = d1 else { return d0 };
    let m = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if m * d0 <= 0.0 {
        0.0
    } else if d0 * d1 <= 0.0 && m.abs() > 3.0 * d0.abs() {
        3.0 * d0
    } else {
        m
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Channel {
    pub label: String,
    #[serde(default)]
    pub form_factor: FormFactor,
    /// `v^2 >= 0`.
    pub strength: f64,
}

/// Per-channel efficiencies; channels without an entry are ideal.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Detector {
    #[serde(default)]
    pub efficiencies: Vec<(String, Efficiency)>,
}

impl Detector {
    pub fn ideal() -> Self {
        Self::default()
    }

    /// The same efficiency for every listed channel.
    pub fn uniform(labels: &[&str], efficiency: Efficiency) -> Self {
        Self {
            efficiencies: labels.iter().map(|l| (l.to_string(), efficiency.clone())).collect(),
        }
    }

    pub fn efficiency(&self, label: &str) -> &Efficiency {
        const IDEAL: Efficiency = Efficiency::Ideal;
        self.efficiencies
            .iter()
            .find(|(l, _)| l == label)
            .map_or(&IDEAL, |(_, e)| e)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecayConfig {
    pub resonance: ResonancePole,
    pub channels: Vec<Channel>,
    #[serde(default)]
    pub detector: Detector,
    /// Accumulated common factor applied to the strengths by `normalize`.
    #[serde(default = "unit")]
    pub normalization_scale: f64,
}

fn unit() -> f64 {
    1.0
}

impl DecayConfig {
    pub fn new(resonance: ResonancePole, channels: Vec<Channel>, detector: Detector) -> Result<Self> {
        let config = Self {
            resonance,
            channels,
            detector,
            normalization_scale: 1.0,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        self.resonance.validate()?;
        if self.channels.is_empty() {
            return Err(Error::Configuration("no decay channels".into()));
        }
        let mut seen = HashSet::new();
        for ch in &self.channels {
            if !seen.insert(ch.label.as_str()) {
                return Err(Error::Configuration(format!("duplicate channel `{}`", ch.label)));
            }
            if !(ch.strength >= 0.0 && ch.strength.is_finite()) {
                return Err(Error::Configuration(format!(
                    "channel `{}` has strength {}",
                    ch.label, ch.strength
                )));
            }
            ch.form_factor.validate()?;
        }
        for (label, eff) in &self.detector.efficiencies {
            if !seen.contains(label.as_str()) {
                return Err(Error::UnknownChannel(label.clone()));
            }
            eff.validate()?;
        }
        if !(self.normalization_scale > 0.0 && self.normalization_scale.is_finite()) {
            return Err(Error::Configuration(format!(
                "normalization scale {} must be positive",
                self.normalization_scale
            )));
        }
        Ok(())
    }

    pub fn width(&self) -> f64 {
        self.resonance.width
    }

    /// `BW(E) = (Gamma / 2 pi) / ((E - E_R)^2 + Gamma^2 / 4)`.
    pub fn breit_wigner(&self, energy: f64) -> f64 {
        breit_wigner(self.resonance.energy, self.resonance.width, energy)
    }

    fn channel(&self, label: &str) -> Result<&Channel> {
        self.channels
            .iter()
            .find(|c| c.label == label)
            .ok_or_else(|| Error::UnknownChannel(label.to_string()))
    }

    /// `int_0^inf lambda(E) w(E) BW(E) dE`, with `lambda = 1` when `ideal`.
    fn channel_integral(&self, ch: &Channel, ideal: bool) -> Result<f64> {
        let eff = self.detector.efficiency(&ch.label);
        let use_eff = !ideal && !eff.is_ideal();
        let (e_r, g) = (self.resonance.energy, self.resonance.width);
        let f = |e: f64| {
            let lam = if use_eff { eff.eval(e) } else { 1.0 };
            Complex64::new(lam * ch.form_factor.eval(e) * breit_wigner(e_r, g, e), 0.0)
        };
        let mut cuts: Vec<f64> = [-8.0, -2.0, -0.5, 0.0, 0.5, 2.0, 8.0]
            .iter()
            .map(|s| e_r + s * g)
            .collect();
        cuts.extend(ch.form_factor.breakpoints());
        if use_eff {
            cuts.extend(eff.breakpoints());
        }
        let cut = cuts.iter().copied().fold(2.0 * e_r, f64::max) + 10.0 * g;
        let finite = gauss_kronrod::integrate(f, 0.0, cut, &cuts, CHANNEL_TOLERANCE)?;
        let tail = gauss_kronrod::integrate_to_infinity(f, cut, CHANNEL_TOLERANCE)?;
        Ok((finite + tail).value.re)
    }

    /// Left side of the normalization constraint (ideal detector).
    pub fn constraint(&self) -> Result<f64> {
        let mut sum = 0.0;
        for ch in &self.channels {
            sum += ch.strength * self.channel_integral(ch, true)?;
        }
        Ok(2.0 * PI / self.width() * sum)
    }

    /// Fraction of decays that the detector registers.
    pub fn registered_fraction(&self) -> Result<f64> {
        self.require_normalized()?;
        let mut sum = 0.0;
        for ch in &self.channels {
            sum += ch.strength * self.channel_integral(ch, false)?;
        }
        Ok(2.0 * PI / self.width() * sum)
    }

    fn require_normalized(&self) -> Result<()> {
        let c = self.constraint()?;
        if (c - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(Error::State(format!(
                "decay configuration is not normalized (constraint = {c})"
            )));
        }
        Ok(())
    }
}

pub fn breit_wigner(e_r: f64, gamma: f64, energy: f64) -> f64 {
    gamma / (2.0 * PI) / ((energy - e_r).powi(2) + 0.25 * gamma * gamma)
}

/// Rescales every strength by a common factor so the constraint holds.
pub fn normalize(config: &DecayConfig) -> Result<DecayConfig> {
    config.validate()?;
    if config.channels.iter().all(|c| c.strength == 0.0) {
        return Err(Error::Normalization("all channel strengths are zero".into()));
    }
    let c = config.constraint()?;
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::Normalization(format!("constraint sum {c} cannot be rescaled to 1")));
    }
    let mut out = config.clone();
    for ch in &mut out.channels {
        ch.strength /= c;
    }
    out.normalization_scale /= c;
    Ok(out)
}

/// `P(t) = F (1 - e^{-Gamma t})`.
pub fn decay_probability(config: &DecayConfig, t: f64) -> Result<f64> {
    require_forward_time(t)?;
    let f = config.registered_fraction()?;
    Ok(-f * (-config.width() * t).exp_m1())
}

/// `dP/dt = Gamma F e^{-Gamma t}`.
pub fn decay_rate(config: &DecayConfig, t: f64) -> Result<f64> {
    require_forward_time(t)?;
    let f = config.registered_fraction()?;
    Ok(config.width() * f * (-config.width() * t).exp())
}

/// Registered rate into one channel at time `t`.
pub fn partial_rate(config: &DecayConfig, label: &str, t: f64) -> Result<f64> {
    require_forward_time(t)?;
    let ch = config.channel(label)?;
    config.require_normalized()?;
    let j = config.channel_integral(ch, false)?;
    Ok(2.0 * PI * ch.strength * j * (-config.width() * t).exp())
}

/// `Gamma_eta = 2 pi v_eta^2 int_0^inf w_eta BW dE`; these sum to `Gamma`.
pub fn partial_width(config: &DecayConfig, label: &str) -> Result<f64> {
    let ch = config.channel(label)?;
    config.require_normalized()?;
    Ok(2.0 * PI * ch.strength * config.channel_integral(ch, true)?)
}

/// Born approximation `2 pi sum_eta v_eta^2 w_eta(E_R)`.
pub fn born_rate(config: &DecayConfig) -> Result<f64> {
    config.require_normalized()?;
    let e_r = config.resonance.energy;
    Ok(2.0 * PI
        * config
            .channels
            .iter()
            .map(|c| c.strength * c.form_factor.eval(e_r))
            .sum::<f64>())
}

/// `|int f BW dE - f(E_R)|` over the whole line, for each width.
pub fn bw_delta_limit_check<F: Fn(f64) -> f64>(e_r: f64, widths: &[f64], test_fn: F) -> Result<Vec<f64>> {
    if widths.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::Input("widths must be strictly decreasing".into()));
    }
    let target = test_fn(e_r);
    widths
        .iter()
        .map(|&g| {
            if !(g > 0.0 && g.is_finite()) {
                return Err(Error::Input(format!("width {g} must be positive")));
            }
            let cuts: Vec<f64> = [-4.0, -1.0, 0.0, 1.0, 4.0].iter().map(|s| e_r + s * g).collect();
            let est = gauss_kronrod::integrate_real_line(
                |e| Complex64::new(test_fn(e) * breit_wigner(e_r, g, e), 0.0),
                &cuts,
                CHANNEL_TOLERANCE,
            )?;
            Ok((est.value.re - target).abs())
        })
        .collect()
}

/// CSV with columns `t,P,Pdot` followed by one `rate_<label>` column per channel.
pub fn rate_table_csv(config: &DecayConfig, times: &[f64]) -> Result<String> {
    let mut out = String::from("t,P,Pdot");
    for ch in &config.channels {
        let _ = write!(out, ",rate_{}", ch.label);
    }
    out.push('\n');
    let f = config.registered_fraction()?;
    let mut per_channel = Vec::with_capacity(config.channels.len());
    for ch in &config.channels {
        per_channel.push(2.0 * PI * ch.strength * config.channel_integral(ch, false)?);
    }
    let g = config.width();
    for &t in times {
        require_forward_time(t)?;
        let decay = (-g * t).exp();
        let _ = write!(out, "{t},{},{}", -f * (-g * t).exp_m1(), g * f * decay);
        for r in &per_channel {
            let _ = write!(out, ",{}", r * decay);
        }
        out.push('\n');
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn channel(label: &str, strength: f64) -> Channel {
        Channel {
            label: label.into(),
            form_factor: FormFactor::default(),
            strength,
        }
    }

    fn config(channels: Vec<Channel>) -> DecayConfig {
        DecayConfig::new(ResonancePole::new(1.0, 0.1).unwrap(), channels, Detector::ideal()).unwrap()
    }

    #[test]
    fn normalization_closed_form_for_lorentzian_channel() {
        // w = (pi Gamma / 2) BW, so the constraint integrand is a squared
        // Lorentzian L of half-width c = Gamma/2 whose antiderivative is
        // (1/pi^2) [x / (2 (x^2 + c^2)) + atan(x / c) / (2 c)].
        let (e_r, g) = (1.0, 0.1);
        let ch = Channel {
            label: "a".into(),
            form_factor: FormFactor::Lorentzian { center: e_r, width: g },
            strength: 1.0,
        };
        let cfg = normalize(&config(vec![ch])).unwrap();
        assert!((cfg.constraint().unwrap() - 1.0).abs() < 1e-12);
        let c = g / 2.0;
        let anti = |x: f64| (x / (2.0 * (x * x + c * c)) + (x / c).atan() / (2.0 * c)) / (PI * PI);
        let half_line = 1.0 / (4.0 * PI * c) - anti(-e_r);
        let expected = 1.0 / (PI * PI * half_line);
        assert_relative_eq!(cfg.channels[0].strength, expected, max_relative = 1e-10);
    }

    #[test]
    fn normalization_is_scale_invariant_and_preserves_ratios() {
        let a = normalize(&config(vec![channel("a", 3.0), channel("b", 1.0)])).unwrap();
        let b = normalize(&config(vec![channel("a", 6.0), channel("b", 2.0)])).unwrap();
        assert_relative_eq!(a.channels[0].strength, b.channels[0].strength, max_relative = 1e-14);
        assert_relative_eq!(a.channels[0].strength / a.channels[1].strength, 3.0, max_relative = 1e-14);
        let zero = config(vec![channel("a", 0.0)]);
        assert!(matches!(normalize(&zero), Err(Error::Normalization(_))));
    }

    #[test]
    fn exact_exponential_with_ideal_detector() {
        let cfg = normalize(&config(vec![channel("a", 1.0)])).unwrap();
        let g = cfg.width();
        assert!(decay_probability(&cfg, 0.0).unwrap().abs() < 1e-8);
        assert_relative_eq!(decay_probability(&cfg, 1.0 / g).unwrap(), 0.632121, epsilon = 1e-6);
        assert_relative_eq!(decay_rate(&cfg, 0.0).unwrap(), g, max_relative = 1e-8);
        assert!(matches!(decay_probability(&cfg, -1.0), Err(Error::SemigroupDomain(_))));
        assert!(decay_rate(&cfg, 1e4).unwrap() < 1e-300);
    }

    #[test]
    fn unnormalized_config_is_rejected() {
        let cfg = config(vec![channel("a", 1.0)]);
        assert!(matches!(decay_probability(&cfg, 1.0), Err(Error::State(_))));
    }

    #[test]
    fn rate_matches_finite_difference() {
        let cfg = normalize(&config(vec![channel("a", 1.0)])).unwrap();
        let g = cfg.width();
        let h = 1e-4 / g;
        for t in [0.5 / g, 2.0 / g] {
            let fd = (decay_probability(&cfg, t + h).unwrap() - decay_probability(&cfg, t - h).unwrap()) / (2.0 * h);
            assert!((fd - decay_rate(&cfg, t).unwrap()).abs() < 1e-6);
        }
    }

    #[test]
    fn half_efficiency_halves_the_limit() {
        let mut cfg = normalize(&config(vec![channel("a", 1.0)])).unwrap();
        cfg.detector = Detector::uniform(&["a"], Efficiency::Constant { value: 0.5 });
        assert_relative_eq!(decay_probability(&cfg, 1e3).unwrap(), 0.5, max_relative = 1e-10);
        assert_eq!(decay_probability(&cfg, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn partial_widths_are_proportional_and_sum_to_total() {
        let cfg = normalize(&config(vec![channel("a", 3.0), channel("b", 1.0)])).unwrap();
        let g = cfg.width();
        assert_relative_eq!(partial_width(&cfg, "a").unwrap(), 0.75 * g, max_relative = 1e-12);
        assert_relative_eq!(partial_rate(&cfg, "b", 0.0).unwrap(), 0.25 * g, max_relative = 1e-12);
        assert!(matches!(partial_width(&cfg, "c"), Err(Error::UnknownChannel(_))));
        let single = normalize(&config(vec![channel("a", 2.0)])).unwrap();
        assert_relative_eq!(partial_width(&single, "a").unwrap(), g, max_relative = 1e-12);
    }

    #[test]
    fn node_at_resonance_has_zero_born_rate() {
        let ch = Channel {
            label: "n".into(),
            form_factor: FormFactor::Node { node: 1.0, cutoff: 10.0 },
            strength: 1.0,
        };
        let cfg = normalize(&config(vec![ch])).unwrap();
        assert_eq!(born_rate(&cfg).unwrap(), 0.0);
    }

    #[test]
    fn born_rate_approaches_width_for_narrow_resonance() {
        let cfg = DecayConfig::new(
            ResonancePole::new(1.0, 1e-3).unwrap(),
            vec![channel("a", 1.0)],
            Detector::ideal(),
        )
        .unwrap();
        let cfg = normalize(&cfg).unwrap();
        let born = born_rate(&cfg).unwrap();
        assert!((born - 1e-3).abs() < 1e-2 * 1e-3, "{born}");
    }

    #[test]
    fn delta_limit_oracles() {
        let constant = bw_delta_limit_check(1.0, &[0.4, 0.2, 0.1], |_| 2.5).unwrap();
        assert!(constant.iter().all(|e| *e < 1e-12));
        // f = 1/(1+E^2): int f BW = (1 + g/2) / (E_R^2 + (1 + g/2)^2).
        let f = |e: f64| 1.0 / (1.0 + e * e);
        let widths = [0.08, 0.04, 0.02, 0.01];
        let errs = bw_delta_limit_check(2.0, &widths, f).unwrap();
        for (g, err) in widths.iter().zip(&errs) {
            let a = 1.0 + g / 2.0;
            assert_relative_eq!(*err, (a / (4.0 + a * a) - 0.2).abs(), max_relative = 1e-9);
        }
        for w in errs.windows(2) {
            assert!((w[0] / w[1] - 2.0).abs() < 0.1);
        }
        // The first-order coefficient (E_R^2 - 1)/(E_R^2 + 1)^2 vanishes at E_R = 1.
        let second = bw_delta_limit_check(1.0, &widths, f).unwrap();
        for w in second.windows(2) {
            assert!((w[0] / w[1] - 4.0).abs() < 0.2, "{w:?}");
        }
    }

    #[test]
    fn pchip_is_monotone_and_interpolates() {
        let x = [0.0, 1.0, 2.0, 3.0, 5.0];
        let y = [0.0, 0.1, 0.8, 0.9, 1.0];
        for (xi, yi) in x.iter().zip(&y) {
            assert_relative_eq!(pchip(&x, &y, *xi), *yi, epsilon = 1e-15);
        }
        let mut prev = -1.0;
        for j in 0..=500 {
            let v = pchip(&x, &y, j as f64 * 0.01);
            assert!(v >= prev - 1e-15 && (0.0..=1.0).contains(&v));
            prev = v;
        }
        assert_eq!(pchip(&x, &y, -1.0), 0.0);
        assert_eq!(pchip(&x, &y, 9.0), 1.0);
    }

    #[test]
    fn config_json_round_trip_and_schema() {
        let mut cfg = config(vec![channel("a", 1.0)]);
        cfg.detector = Detector::uniform(
            &["a"],
            Efficiency::Tabulated {
                energies: vec![0.0, 1.0, 2.0],
                values: vec![0.2, 0.9, 1.0],
            },
        );
        let text = serde_json::to_string(&cfg).unwrap();
        let back: DecayConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(back, cfg);
        let bad = text.replace("\"strength\"", "\"strenght\"");
        assert!(serde_json::from_str::<DecayConfig>(&bad).is_err());
    }

    #[test]
    fn rate_table_has_channel_columns() {
        let cfg = normalize(&config(vec![channel("a", 3.0), channel("b", 1.0)])).unwrap();
        let csv = rate_table_csv(&cfg, &[0.0, 1.0]).unwrap();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "t,P,Pdot,rate_a,rate_b");
        assert_eq!(csv.lines().count(), 3);
    }
}
