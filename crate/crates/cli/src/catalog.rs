//! Built-in scenario fixtures.

use serde::Serialize;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Fixture {
    pub name: &'static str,
    pub kind: &'static str,
    pub description: &'static str,
    #[serde(skip)]
    pub config: &'static str,
}

pub const FIXTURES: [Fixture; 6] = [
    Fixture {
        name: "single_resonance",
        kind: "single_resonance",
        description: "Gamow ket evolution against exp(-Gamma t) on a 40-point grid",
        config: include_str!("../fixtures/single_resonance.json"),
    },
    Fixture {
        name: "two_resonance",
        kind: "two_resonance",
        description: "kaon-like long/short pole pair: full, truncated and background amplitudes",
        config: include_str!("../fixtures/two_resonance.json"),
    },
    Fixture {
        name: "golden_rule_sweep",
        kind: "golden_rule_sweep",
        description: "Born-vs-exact width gap for Gamma/E_R in {0.1, 0.01, 0.001}",
        config: include_str!("../fixtures/golden_rule_sweep.json"),
    },
    Fixture {
        name: "khalfin",
        kind: "khalfin",
        description: "truncated Breit-Wigner survival probability, onset and power-law tail",
        config: include_str!("../fixtures/khalfin.json"),
    },
    Fixture {
        name: "contour_check",
        kind: "contour_check",
        description: "one-pole contour deformation: direct vs pole sum plus background",
        config: include_str!("../fixtures/contour_check.json"),
    },
    Fixture {
        name: "histories_demo",
        kind: "histories_demo",
        description: "seeded 4-level states: entropy under collapse and two-step history oracle",
        config: include_str!("../fixtures/histories_demo.json"),
    },
];

pub fn find(name: &str) -> Option<&'static Fixture> {
    FIXTURES.iter().find(|f| f.name == name)
}

pub fn render_text() -> String {
    let width = FIXTURES.iter().map(|f| f.name.len()).max().unwrap_or(0);
    FIXTURES
        .iter()
        .map(|f| format!("{:width$}  {}\n", f.name, f.description))
        .collect()
}

pub fn render_json() -> String {
    let mut text = serde_json::to_string_pretty(&FIXTURES).expect("catalog serializes");
    text.push('\n');
    text
}
