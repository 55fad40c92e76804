//! Scenario configuration: one JSON document per run.

use serde::{Deserialize, Serialize};

use resonance_core::energy_surface::{Background, ResonancePole};
use resonance_core::goldenrule::FormFactor;
use resonance_core::hardy::WaveFunction;

/// Equispaced times `t_k = k t_max / (count - 1)`, `k = 0..count`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeGrid {
    pub t_max: f64,
    pub count: usize,
}

impl TimeGrid {
    pub fn validate(&self, what: &str) -> Result<(), String> {
        if !(self.t_max > 0.0 && self.t_max.is_finite()) {
            return Err(format!("{what}.t_max must be positive and finite"));
        }
        if self.count < 2 {
            return Err(format!("{what}.count must be at least 2"));
        }
        Ok(())
    }

    pub fn times(&self) -> Vec<f64> {
        let n = self.count - 1;
        (0..=n).map(|k| self.t_max * k as f64 / n as f64).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SingleResonance {
    pub pole: ResonancePole,
    pub times: TimeGrid,
}

/// `psi^-` is the upper-half-plane out-state, `phi^+` the prepared state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwoResonance {
    pub poles: Vec<ResonancePole>,
    #[serde(default)]
    pub background: Background,
    pub psi: WaveFunction,
    pub phi: WaveFunction,
    pub times: TimeGrid,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContourCheck {
    pub poles: Vec<ResonancePole>,
    #[serde(default)]
    pub background: Background,
    pub psi: WaveFunction,
    pub phi: WaveFunction,
    /// Times in units of `1 / Gamma` of the first pole.
    pub gamma_times: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepChannel {
    pub label: String,
    #[serde(default)]
    pub form_factor: FormFactor,
    /// Relative strength before normalization.
    pub strength: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GoldenRuleSweep {
    #[serde(rename = "E_R")]
    pub energy: f64,
    /// Values of `Gamma / E_R`, strictly decreasing.
    pub ratios: Vec<f64>,
    pub channels: Vec<SweepChannel>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Khalfin {
    pub pole: ResonancePole,
    #[serde(default)]
    pub threshold_power: u32,
    #[serde(default = "unit")]
    pub cutoff: f64,
    /// Sampling in units of `1 / Gamma`.
    pub gamma_times: TimeGrid,
    pub onset_threshold: f64,
    /// Tail fit range in units of `1 / Gamma`.
    pub tail_range: (f64, f64),
}

fn unit() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HistoriesDemo {
    pub dimension: usize,
    pub samples: usize,
    /// Registration times of the two-step history.
    pub times: (f64, f64),
}

pub const KINDS: [&str; 6] = [
    "single_resonance",
    "two_resonance",
    "golden_rule_sweep",
    "khalfin",
    "contour_check",
    "histories_demo",
];

/// Kind-specific parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum Experiment {
    SingleResonance(SingleResonance),
    TwoResonance(TwoResonance),
    GoldenRuleSweep(GoldenRuleSweep),
    Khalfin(Khalfin),
    ContourCheck(ContourCheck),
    HistoriesDemo(HistoriesDemo),
}

impl Experiment {
    /// Parses `parameters` against the schema of `kind`.
    pub fn from_parts(kind: &str, parameters: serde_json::Value) -> Result<Self, String> {
        fn typed<T: serde::de::DeserializeOwned>(v: serde_json::Value) -> Result<T, String> {
            serde_json::from_value(v).map_err(|e| format!("parameters: {e}"))
        }
        Ok(match kind {
            "single_resonance" => Experiment::SingleResonance(typed(parameters)?),
            "two_resonance" => Experiment::TwoResonance(typed(parameters)?),
            "golden_rule_sweep" => Experiment::GoldenRuleSweep(typed(parameters)?),
            "khalfin" => Experiment::Khalfin(typed(parameters)?),
            "contour_check" => Experiment::ContourCheck(typed(parameters)?),
            "histories_demo" => Experiment::HistoriesDemo(typed(parameters)?),
            other => return Err(format!("unknown kind `{other}`; expected one of {}", KINDS.join(", "))),
        })
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Experiment::SingleResonance(_) => "single_resonance",
            Experiment::TwoResonance(_) => "two_resonance",
            Experiment::GoldenRuleSweep(_) => "golden_rule_sweep",
            Experiment::Khalfin(_) => "khalfin",
            Experiment::ContourCheck(_) => "contour_check",
            Experiment::HistoriesDemo(_) => "histories_demo",
        }
    }

    /// Checks that serde cannot express.
    pub fn validate(&self) -> Result<(), String> {
        match self {
            Experiment::SingleResonance(p) => p.times.validate("times"),
            Experiment::TwoResonance(p) => {
                if p.poles.len() != 2 {
                    return Err(format!("two_resonance needs 2 poles, got {}", p.poles.len()));
                }
                p.times.validate("times")
            }
            Experiment::ContourCheck(p) => {
                if p.poles.is_empty() {
                    return Err("contour_check needs at least one pole".into());
                }
                if p.gamma_times.is_empty() || p.gamma_times.iter().any(|t| !(*t >= 0.0 && t.is_finite())) {
                    return Err("gamma_times must be a nonempty list of finite values >= 0".into());
                }
                Ok(())
            }
            Experiment::GoldenRuleSweep(p) => {
                if p.ratios.len() < 2 {
                    return Err("ratios needs at least two values".into());
                }
                if p.ratios.windows(2).any(|w| !(w[1] < w[0])) || p.ratios.iter().any(|r| !(*r > 0.0)) {
                    return Err("ratios must be positive and strictly decreasing".into());
                }
                if p.channels.is_empty() {
                    return Err("at least one channel is required".into());
                }
                Ok(())
            }
            Experiment::Khalfin(p) => {
                p.gamma_times.validate("gamma_times")?;
                let (a, b) = p.tail_range;
                if !(a > 0.0 && b > a && b.is_finite()) {
                    return Err("tail_range must satisfy 0 < start < end".into());
                }
                if !(p.onset_threshold >= 0.0 && p.onset_threshold.is_finite()) {
                    return Err("onset_threshold must be finite and >= 0".into());
                }
                Ok(())
            }
            Experiment::HistoriesDemo(p) => {
                if !(2..=16).contains(&p.dimension) {
                    return Err("dimension must lie in 2..=16".into());
                }
                if p.samples == 0 {
                    return Err("samples must be positive".into());
                }
                Ok(())
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    /// File stem for the data table; defaults to the scenario name.
    #[serde(default)]
    pub stem: Option<String>,
    #[serde(default)]
    pub format: Format,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    name: String,
    kind: String,
    parameters: serde_json::Value,
    #[serde(default)]
    output: OutputSpec,
    #[serde(default)]
    seed: u64,
    #[serde(default)]
    tolerance: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub experiment: Experiment,
    pub output: OutputSpec,
    /// Seed for randomized fixtures; the command-line flag takes precedence.
    pub seed: u64,
    /// Pass/fail tolerance of the scenario's check; kind default if absent.
    pub tolerance: Option<f64>,
}

impl Scenario {
    pub fn parse(text: &str) -> Result<Self, String> {
        let raw: RawScenario = serde_json::from_str(text).map_err(|e| e.to_string())?;
        let scenario = Scenario {
            experiment: Experiment::from_parts(&raw.kind, raw.parameters)?,
            name: raw.name,
            output: raw.output,
            seed: raw.seed,
            tolerance: raw.tolerance,
        };
        if scenario.name.is_empty()
            || !scenario
                .name
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
        {
            return Err(format!("name `{}` must be a nonempty identifier", scenario.name));
        }
        scenario.experiment.validate()?;
        if let Some(tol) = scenario.tolerance {
            if !(tol > 0.0 && tol.is_finite()) {
                return Err(format!("tolerance {tol} must be positive"));
            }
        }
        Ok(scenario)
    }

    pub fn stem(&self) -> &str {
        self.output.stem.as_deref().unwrap_or(&self.name)
    }
}
