//! Scenario runner for `resonance-core`: parses a JSON scenario, runs the
//! experiment, and writes a data table plus a manifest.

pub mod catalog;
pub mod fixtures;
pub mod runner;
pub mod scenario;

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::runner::{Check, Outcome};
use crate::scenario::{Format, Scenario};

pub const MANIFEST_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("schema: {0}")]
    Schema(String),
    #[error("io: {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Numerics(#[from] resonance_core::Error),
    #[error("check failed: {quantity} = {value:e} is not below {tolerance:e}")]
    Check { quantity: String, value: f64, tolerance: f64 },
    #[error("golden mismatch: {0}")]
    Golden(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Schema(_) => 2,
            CliError::Io { .. } => 2,
            CliError::Numerics(_) | CliError::Check { .. } => 1,
            CliError::Golden(_) => 3,
        }
    }

    pub fn category(&self) -> &'static str {
        match self {
            CliError::Schema(_) => "schema",
            CliError::Io { .. } => "io",
            CliError::Numerics(_) => "numerics",
            CliError::Check { .. } => "check",
            CliError::Golden(_) => "golden",
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub schema_version: u32,
    pub tool_version: String,
    pub name: String,
    pub kind: String,
    pub config_sha256: String,
    pub seed: u64,
    pub format: Format,
    pub outputs: Vec<String>,
    pub achieved: BTreeMap<String, f64>,
    pub check: Check,
    pub wall_time_seconds: f64,
}

/// The deterministic part of a manifest, stored next to golden tables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoldenRecord {
    pub achieved: BTreeMap<String, f64>,
    pub check: Check,
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub out_dir: PathBuf,
    pub format: Option<Format>,
    pub seed: Option<u64>,
    pub tolerance: Option<f64>,
    pub golden_dir: Option<PathBuf>,
    pub bless: bool,
}

/// Config text from a file path or a `builtin:<name>` reference.
pub fn load_config(reference: &str) -> Result<String, CliError> {
    if let Some(name) = reference.strip_prefix("builtin:") {
        return catalog::find(name)
            .map(|f| f.config.to_string())
            .ok_or_else(|| CliError::Schema(format!("no built-in scenario `{name}`")));
    }
    let path = Path::new(reference);
    fs::read_to_string(path).map_err(io_err(path))
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

fn render(outcome: &Outcome, format: Format) -> String {
    match format {
        Format::Csv => outcome.table.to_csv(),
        Format::Json => outcome.table.to_json(),
    }
}

fn pretty<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("manifest serializes");
    text.push('\n');
    text
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(io_err(path))
}

/// Parses, runs and writes one scenario. Returns the manifest on success,
/// including when the scenario's check fails (reported as an error after the
/// outputs are written).
pub fn run_config(config: &str, options: &RunOptions) -> Result<Manifest, CliError> {
    let started = Instant::now();
    let scenario = Scenario::parse(config).map_err(CliError::Schema)?;
    let outcome = runner::run(&scenario, options.seed, options.tolerance)?;
    let format = options.format.unwrap_or(scenario.output.format);
    let extension = match format {
        Format::Csv => "csv",
        Format::Json => "json",
    };
    let data_name = format!("{}.{extension}", scenario.stem());
    let data = render(&outcome, format);

    fs::create_dir_all(&options.out_dir).map_err(io_err(&options.out_dir))?;
    write(&options.out_dir.join(&data_name), &data)?;

    let golden = GoldenRecord {
        achieved: outcome.achieved.clone(),
        check: outcome.check.clone(),
    };
    if let Some(dir) = &options.golden_dir {
        let record_name = format!("{}.achieved.json", scenario.stem());
        if options.bless {
            fs::create_dir_all(dir).map_err(io_err(dir))?;
            write(&dir.join(&data_name), &data)?;
            write(&dir.join(&record_name), &pretty(&golden))?;
        } else {
            compare_golden(dir, &data_name, &data, &record_name, &golden)?;
        }
    }

    let manifest = Manifest {
        schema_version: MANIFEST_SCHEMA_VERSION,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        name: scenario.name.clone(),
        kind: scenario.experiment.kind().to_string(),
        config_sha256: sha256_hex(config.as_bytes()),
        seed: options.seed.unwrap_or(scenario.seed),
        format,
        outputs: vec![data_name],
        achieved: outcome.achieved,
        check: outcome.check.clone(),
        wall_time_seconds: started.elapsed().as_secs_f64(),
    };
    write(
        &options.out_dir.join(format!("{}.manifest.json", scenario.stem())),
        &pretty(&manifest),
    )?;
    if !outcome.check.passed {
        return Err(CliError::Check {
            quantity: outcome.check.quantity,
            value: outcome.check.value,
            tolerance: outcome.check.tolerance,
        });
    }
    Ok(manifest)
}

fn compare_golden(
    dir: &Path,
    data_name: &str,
    data: &str,
    record_name: &str,
    record: &GoldenRecord,
) -> Result<(), CliError> {
    let path = dir.join(data_name);
    let expected = fs::read_to_string(&path).map_err(io_err(&path))?;
    if expected != data {
        let line = expected
            .lines()
            .zip(data.lines())
            .position(|(a, b)| a != b)
            .map_or_else(|| "length differs".to_string(), |i| format!("first difference on line {}", i + 1));
        return Err(CliError::Golden(format!("{}: {line}", path.display())));
    }
    let path = dir.join(record_name);
    let text = fs::read_to_string(&path).map_err(io_err(&path))?;
    let expected: GoldenRecord =
        serde_json::from_str(&text).map_err(|e| CliError::Golden(format!("{}: {e}", path.display())))?;
    if &expected != record {
        return Err(CliError::Golden(format!("{}: achieved values differ", path.display())));
    }
    Ok(())
}
