use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use resonance_cli::catalog::FIXTURES;
use resonance_cli::Manifest;

fn resonance(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_resonance"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

fn run_into(reference: &str, dir: &Path, extra: &[&str]) -> Output {
    let mut args = vec!["run", reference, "--out-dir", dir.to_str().unwrap()];
    args.extend_from_slice(extra);
    resonance(&args)
}

#[test]
fn list_shows_every_kind() {
    let out = resonance(&["list"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().count() >= 6);
    assert!(text.contains("two_resonance") && text.contains("kaon-like"));

    let out = resonance(&["list", "--json"]);
    let catalog: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let kinds: Vec<&str> = catalog
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["kind"].as_str().unwrap())
        .collect();
    for kind in resonance_cli::scenario::KINDS {
        assert!(kinds.contains(&kind), "{kind} missing");
    }
}

#[test]
fn builtin_scenarios_match_golden_files() {
    let tmp = tempfile::tempdir().unwrap();
    let golden = golden_dir();
    for fixture in FIXTURES {
        let out = run_into(
            &format!("builtin:{}", fixture.name),
            tmp.path(),
            &["--golden-dir", golden.to_str().unwrap()],
        );
        assert!(
            out.status.success(),
            "{}: {}",
            fixture.name,
            String::from_utf8_lossy(&out.stderr)
        );
    }
}

#[test]
fn reruns_are_bit_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for fixture in FIXTURES {
        let reference = format!("builtin:{}", fixture.name);
        for dir in [a.path(), b.path()] {
            assert!(run_into(&reference, dir, &["--seed", "11"]).status.success());
        }
        let name = format!("{}.csv", fixture.name);
        let first = fs::read(a.path().join(&name)).unwrap();
        let second = fs::read(b.path().join(&name)).unwrap();
        assert_eq!(first, second, "{name}");
    }
}

#[test]
fn manifest_records_hash_and_checks() {
    let tmp = tempfile::tempdir().unwrap();
    let config = tmp.path().join("cfg.json");
    fs::copy(
        Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/contour_check.json"),
        &config,
    )
    .unwrap();
    let out = run_into(config.to_str().unwrap(), tmp.path(), &[]);
    assert!(out.status.success());
    let manifest: Manifest =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("contour_check.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest.schema_version, resonance_cli::MANIFEST_SCHEMA_VERSION);
    assert_eq!(
        manifest.config_sha256,
        resonance_cli::sha256_hex(&fs::read(&config).unwrap())
    );
    assert!(manifest.check.passed);
    assert!(manifest.achieved["max_relative_error"] < 1e-6);
}

#[test]
fn json_format_writes_row_objects() {
    let tmp = tempfile::tempdir().unwrap();
    assert!(run_into("builtin:golden_rule_sweep", tmp.path(), &["--format", "json"])
        .status
        .success());
    let rows: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("golden_rule_sweep.json")).unwrap()).unwrap();
    assert_eq!(rows.as_array().unwrap().len(), 3);
    assert!(rows[0]["relative_gap"].as_f64().unwrap() > rows[2]["relative_gap"].as_f64().unwrap());
}

#[test]
fn unknown_kind_is_a_schema_error() {
    let tmp = tempfile::tempdir().unwrap();
    let config = tmp.path().join("bad.json");
    fs::write(&config, r#"{"name": "x", "kind": "warp_drive", "parameters": {}}"#).unwrap();
    let out = run_into(config.to_str().unwrap(), tmp.path(), &[]);
    assert_eq!(out.status.code(), Some(2));
    let report: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(report["category"], "schema");
    assert!(report["message"].as_str().unwrap().contains("warp_drive"));
}

#[test]
fn unknown_parameter_is_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let config = tmp.path().join("bad.json");
    fs::write(
        &config,
        r#"{"name": "x", "kind": "single_resonance",
            "parameters": {"pole": {"E_R": 1.0, "Gamma": 0.2}, "times": {"t_max": 1.0, "count": 3}, "extra": 1}}"#,
    )
    .unwrap();
    assert_eq!(run_into(config.to_str().unwrap(), tmp.path(), &[]).status.code(), Some(2));
}

#[test]
fn tolerance_override_fails_the_check() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run_into("builtin:contour_check", tmp.path(), &["--tol-override", "1e-300"]);
    assert_eq!(out.status.code(), Some(1));
    let report: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(report["category"], "check");
    assert!(tmp.path().join("contour_check.manifest.json").exists());
}

#[test]
fn arrow_of_time_errors_surface_verbatim() {
    let tmp = tempfile::tempdir().unwrap();
    let config = tmp.path().join("reversed.json");
    fs::write(
        &config,
        r#"{"name": "reversed", "kind": "histories_demo",
            "parameters": {"dimension": 3, "samples": 2, "times": [1.9, 0.7]}}"#,
    )
    .unwrap();
    let out = run_into(config.to_str().unwrap(), tmp.path(), &[]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("arrow of time violated"));
}

#[test]
fn seed_changes_random_fixtures() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    run_into("builtin:histories_demo", a.path(), &["--seed", "1"]);
    run_into("builtin:histories_demo", b.path(), &["--seed", "2"]);
    let first = fs::read(a.path().join("histories_demo.csv")).unwrap();
    let second = fs::read(b.path().join("histories_demo.csv")).unwrap();
    assert_ne!(first, second);
}

#[test]
fn bless_requires_a_golden_directory() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run_into("builtin:khalfin", tmp.path(), &["--bless"]);
    assert!(!out.status.success());
}

#[test]
fn golden_mismatch_is_reported() {
    let tmp = tempfile::tempdir().unwrap();
    let golden = tmp.path().join("golden");
    let out_dir = tmp.path().join("out");
    let args = ["--golden-dir", golden.to_str().unwrap()];
    let mut bless = args.to_vec();
    bless.push("--bless");
    assert!(run_into("builtin:single_resonance", &out_dir, &bless).status.success());
    assert!(run_into("builtin:single_resonance", &out_dir, &args).status.success());
    let csv = golden.join("single_resonance.csv");
    let edited = fs::read_to_string(&csv).unwrap().replacen("0,1,", "0,2,", 1);
    fs::write(&csv, edited).unwrap();
    assert_eq!(run_into("builtin:single_resonance", &out_dir, &args).status.code(), Some(3));
}
