//! Execution of each scenario kind into a data table and a check.

use std::collections::BTreeMap;

use serde::Serialize;

use resonance_core::energy_surface::{make_resonance_model, Background, ResonancePole};
use resonance_core::expansion::{expand, PreparedState};
use resonance_core::gamow::GamowKet;
use resonance_core::goldenrule::{born_rate, normalize, partial_width, Channel, DecayConfig, Detector};
use resonance_core::hardy::WaveFunction;
use resonance_core::histories::{
    collapse_nonselective, collapse_selective, entropy, history_probability, unitary_evolve, History,
};
use resonance_core::survival::{
    deviation_onset, fit_power_law, survival_amplitude, survival_amplitude_direct, survival_probability,
    tail_exponent, SpectralDensity,
};
use resonance_core::{Error, Result};

use crate::fixtures::FixtureRng;
use crate::scenario::{
    ContourCheck, Experiment, GoldenRuleSweep, HistoriesDemo, Khalfin, Scenario, SingleResonance, TwoResonance,
};

/// Rectangular numeric table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    fn new(columns: &[&'static str]) -> Self {
        Self {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    /// One object per row, keyed by column.
    pub fn to_json(&self) -> String {
        let rows: Vec<BTreeMap<&str, f64>> = self
            .rows
            .iter()
            .map(|r| self.columns.iter().copied().zip(r.iter().copied()).collect())
            .collect();
        let mut text = serde_json::to_string_pretty(&rows).expect("finite table serializes");
        text.push('\n');
        text
    }
}

/// Pass when `value < tolerance`.
#[derive(Debug, Clone, PartialEq, Serialize, serde::Deserialize)]
pub struct Check {
    pub quantity: String,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub table: Table,
    /// Achieved error estimates and derived figures.
    pub achieved: BTreeMap<String, f64>,
    pub check: Check,
}

struct Partial {
    table: Table,
    achieved: BTreeMap<String, f64>,
    quantity: &'static str,
    value: f64,
    default_tolerance: f64,
}

/// Runs a parsed scenario. `seed` and `tolerance` override the config values.
pub fn run(scenario: &Scenario, seed: Option<u64>, tolerance: Option<f64>) -> Result<Outcome> {
    let seed = seed.unwrap_or(scenario.seed);
    let p = match &scenario.experiment {
        Experiment::SingleResonance(p) => single_resonance(p)?,
        Experiment::TwoResonance(p) => two_resonance(p)?,
        Experiment::GoldenRuleSweep(p) => golden_rule_sweep(p)?,
        Experiment::Khalfin(p) => khalfin(p)?,
        Experiment::ContourCheck(p) => contour_check(p)?,
        Experiment::HistoriesDemo(p) => histories_demo(p, seed)?,
    };
    let tolerance = tolerance.or(scenario.tolerance).unwrap_or(p.default_tolerance);
    Ok(Outcome {
        table: p.table,
        achieved: p.achieved,
        check: Check {
            quantity: p.quantity.to_string(),
            value: p.value,
            tolerance,
            passed: p.value < tolerance,
        },
    })
}

fn single_resonance(p: &SingleResonance) -> Result<Partial> {
    let ket = GamowKet::new(p.pole)?;
    let mut table = Table::new(&["t", "re", "im", "abs_sq", "exp_decay", "deviation"]);
    let mut worst: f64 = 0.0;
    for t in p.times.times() {
        let a = ket.evolve(t)?;
        let e = (-p.pole.width * t).exp();
        let d = (a.norm_sqr() - e).abs();
        worst = worst.max(d);
        table.push(vec![t, a.re, a.im, a.norm_sqr(), e, d]);
    }
    let rejects = matches!(ket.evolve(-p.times.t_max), Err(Error::SemigroupDomain(_)));
    let mut achieved = BTreeMap::new();
    achieved.insert("max_deviation".into(), worst);
    achieved.insert("rejects_negative_time".into(), f64::from(u8::from(rejects)));
    Ok(Partial {
        table,
        achieved,
        quantity: "max_deviation",
        value: if rejects { worst } else { f64::INFINITY },
        default_tolerance: 1e-12,
    })
}

fn expansion_for(
    poles: &[ResonancePole],
    background: &Background,
    psi: &WaveFunction,
    phi: &WaveFunction,
) -> Result<resonance_core::expansion::ComplexExpansion> {
    let model = make_resonance_model(poles, background.clone())?;
    let state = PreparedState::new(phi.clone())?;
    expand(&state, &model, psi)
}

fn two_resonance(p: &TwoResonance) -> Result<Partial> {
    let exp = expansion_for(&p.poles, &p.background, &p.psi, &p.phi)?;
    let mut table = Table::new(&["t", "abs_full", "abs_truncated", "truncation_error", "abs_background"]);
    let mut max_trunc: f64 = 0.0;
    for t in p.times.times() {
        let truncated = exp.pole_sum(t)?;
        let bg = exp.background_integral(t)?.value;
        let full = truncated + bg;
        let err = exp.truncation_error(t)?.value;
        max_trunc = max_trunc.max(err);
        table.push(vec![t, full.norm(), truncated.norm(), err, bg.norm()]);
    }
    let direct = exp.direct(0.0)?.value;
    let deformation = (direct - exp.reconstruct(0.0)?).norm() / direct.norm();
    let mut achieved = BTreeMap::new();
    achieved.insert("deformation_error_t0".into(), deformation);
    achieved.insert("max_truncation_error".into(), max_trunc);
    for (i, term) in exp.pole_terms().iter().enumerate() {
        achieved.insert(format!("abs_b{i}"), term.b.norm());
    }
    Ok(Partial {
        table,
        achieved,
        quantity: "deformation_error_t0",
        value: deformation,
        default_tolerance: 1e-6,
    })
}

fn contour_check(p: &ContourCheck) -> Result<Partial> {
    let exp = expansion_for(&p.poles, &p.background, &p.psi, &p.phi)?;
    let gamma = p.poles[0].width;
    let mut table = Table::new(&[
        "t",
        "direct_re",
        "direct_im",
        "reconstructed_re",
        "reconstructed_im",
        "relative_error",
    ]);
    let mut worst: f64 = 0.0;
    for &gt in &p.gamma_times {
        let t = gt / gamma;
        let d = exp.direct(t)?.value;
        let r = exp.reconstruct(t)?;
        let rel = (d - r).norm() / d.norm();
        worst = worst.max(rel);
        table.push(vec![t, d.re, d.im, r.re, r.im, rel]);
    }
    let mut achieved = BTreeMap::new();
    achieved.insert("max_relative_error".into(), worst);
    Ok(Partial {
        table,
        achieved,
        quantity: "max_relative_error",
        value: worst,
        default_tolerance: 1e-6,
    })
}

fn golden_rule_sweep(p: &GoldenRuleSweep) -> Result<Partial> {
    let mut table = Table::new(&["ratio", "gamma", "exact", "born", "relative_gap"]);
    let mut gaps = Vec::with_capacity(p.ratios.len());
    for &ratio in &p.ratios {
        let gamma = ratio * p.energy;
        let channels = p
            .channels
            .iter()
            .map(|c| Channel {
                label: c.label.clone(),
                form_factor: c.form_factor.clone(),
                strength: c.strength,
            })
            .collect();
        let config = normalize(&DecayConfig::new(ResonancePole::new(p.energy, gamma)?, channels, Detector::ideal())?)?;
        let exact = config
            .channels
            .iter()
            .map(|c| partial_width(&config, &c.label))
            .sum::<Result<f64>>()?;
        let born = born_rate(&config)?;
        let gap = (born - exact).abs() / exact;
        gaps.push(gap);
        table.push(vec![ratio, gamma, exact, born, gap]);
    }
    let worst_step = gaps.windows(2).map(|w| w[1] / w[0]).fold(0.0, f64::max);
    let slope = fit_power_law(&p.ratios, &gaps).map(|f| f.exponent).unwrap_or(f64::NAN);
    let mut achieved = BTreeMap::new();
    achieved.insert("loglog_slope".into(), slope);
    achieved.insert("max_gap_ratio".into(), worst_step);
    Ok(Partial {
        table,
        achieved,
        quantity: "max_gap_ratio",
        value: worst_step,
        default_tolerance: 1.0,
    })
}

fn khalfin(p: &Khalfin) -> Result<Partial> {
    let density = SpectralDensity::threshold(p.pole, p.threshold_power, p.cutoff)?;
    let gamma = p.pole.width;
    let mut table = Table::new(&["t", "abs_A_sq", "exp_decay", "ratio"]);
    for gt in p.gamma_times.times() {
        let t = gt / gamma;
        let prob = survival_probability(&density, t)?;
        let e = (-gt).exp();
        table.push(vec![t, prob, e, prob / e]);
    }
    let mut cross: f64 = 0.0;
    for gt in [0.0, 0.5, 1.0, 1.5, 2.0] {
        let t = gt / gamma;
        let d = survival_amplitude_direct(&density, t)?.value;
        cross = cross.max((survival_amplitude(&density, t)? - d).norm());
    }
    let mut achieved = BTreeMap::new();
    achieved.insert("cross_method_max".into(), cross);
    match deviation_onset(&density, p.onset_threshold) {
        Ok(t) => {
            achieved.insert("onset_gamma_t".into(), t * gamma);
        }
        Err(Error::Window { max_deviation, .. }) => {
            achieved.insert("onset_window_max_deviation".into(), max_deviation);
        }
        Err(e) => return Err(e),
    }
    let fit = tail_exponent(&density, p.tail_range.0 / gamma, p.tail_range.1 / gamma)?;
    achieved.insert("tail_exponent".into(), fit.exponent);
    achieved.insert("tail_fit_residual".into(), fit.residual);
    Ok(Partial {
        table,
        achieved,
        quantity: "cross_method_max",
        value: cross,
        default_tolerance: 1e-9,
    })
}

fn histories_demo(p: &HistoriesDemo, seed: u64) -> Result<Partial> {
    let mut rng = FixtureRng::new(seed);
    let n = p.dimension;
    let (ta, tb) = p.times;
    let mut table = Table::new(&[
        "sample",
        "entropy_before",
        "entropy_after",
        "entropy_gain",
        "history_probability",
        "sequential_probability",
    ]);
    let mut min_gain = f64::INFINITY;
    let mut max_oracle: f64 = 0.0;
    for k in 0..p.samples {
        let rho = rng.density_matrix(n)?;
        let h = rng.hamiltonian(n)?;
        let family = rng.family(n)?;
        let second = rng.family(n)?;
        let before = entropy(&rho);
        let after = entropy(&collapse_nonselective(&rho, &family)?);
        let history = History::from_pairs([(family[0].clone(), ta), (second[0].clone(), tb)]);
        let prob = history_probability(&rho, &h, &history)?;
        let (rho_a, pa) = collapse_selective(&unitary_evolve(&rho, &h, ta)?, &family[0])?;
        let (_, pb) = collapse_selective(&unitary_evolve(&rho_a, &h, tb - ta)?, &second[0])?;
        let oracle = pa * pb;
        min_gain = min_gain.min(after - before);
        max_oracle = max_oracle.max((prob - oracle).abs());
        table.push(vec![k as f64, before, after, after - before, prob, oracle]);
    }
    let mut achieved = BTreeMap::new();
    achieved.insert("min_entropy_gain".into(), min_gain);
    achieved.insert("max_oracle_deviation".into(), max_oracle);
    Ok(Partial {
        table,
        achieved,
        quantity: "max_violation",
        value: max_oracle.max(-min_gain),
        default_tolerance: 1e-12,
    })
}
