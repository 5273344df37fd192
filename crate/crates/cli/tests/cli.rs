//! Behavioural tests for the command-line interface: exit-code contract,
//! machine-readable error records on stderr, override handling, and the
//! shape of the files each subcommand writes.

use std::path::PathBuf;

use assert_cmd::Command;
use serde_json::Value;

fn bin() -> Command {
    Command::cargo_bin("orbitcensus").unwrap()
}

fn config(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "configs", name]
        .iter()
        .collect();
    p.display().to_string()
}

fn out_override(dir: &tempfile::TempDir) -> String {
    format!("output.directory={}", dir.path().join("out").display())
}

/// Every non-zero exit must leave exactly one parseable JSON error record
/// on stderr with matching `exit`.
fn error_record(stderr: &[u8], expected_exit: i64) -> Value {
    let text = String::from_utf8_lossy(stderr);
    let line = text
        .lines()
        .rev()
        .find(|l| !l.trim().is_empty())
        .unwrap_or_else(|| panic!("no error record on stderr: {text}"));
    let v: Value = serde_json::from_str(line)
        .unwrap_or_else(|e| panic!("stderr line is not JSON ({e}): {line}"));
    assert_eq!(v["error"]["exit"], Value::from(expected_exit), "{v}");
    assert!(v["error"]["kind"].is_string() && v["error"]["message"].is_string());
    v["error"].clone()
}

#[test]
fn selftest_passes_and_exits_zero() {
    let assert = bin().arg("selftest").assert().success();
    let stdout = String::from_utf8_lossy(&assert.get_output().stdout);
    assert!(stdout.contains("PASS"), "{stdout}");
    assert!(!stdout.contains("FAIL"), "{stdout}");
}

#[test]
fn missing_config_is_a_configuration_error() {
    let assert = bin().arg("count").assert().code(2);
    let err = error_record(&assert.get_output().stderr, 2);
    assert_eq!(err["kind"], "invalid_input");
    assert!(err["message"].as_str().unwrap().contains("--config"));
}

#[test]
fn unreadable_config_is_a_configuration_error() {
    let assert = bin()
        .args(["--config", "/nonexistent/experiment.toml", "count"])
        .assert()
        .code(2);
    error_record(&assert.get_output().stderr, 2);
}

#[test]
fn malformed_toml_is_a_configuration_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.toml");
    std::fs::write(&path, "n_max = [unbalanced").unwrap();
    let assert = bin()
        .args(["--config", path.to_str().unwrap(), "count"])
        .assert()
        .code(2);
    let err = error_record(&assert.get_output().stderr, 2);
    assert_eq!(err["kind"], "invalid_input");
}

#[test]
fn empty_map_list_is_a_configuration_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("empty.toml");
    std::fs::write(&path, "maps = []\n").unwrap();
    let assert = bin()
        .args(["--config", path.to_str().unwrap(), "count"])
        .assert()
        .code(2);
    let err = error_record(&assert.get_output().stderr, 2);
    assert_eq!(err["kind"], "invalid_input");
}

#[test]
fn unknown_override_key_is_rejected() {
    let assert = bin()
        .args([
            "--config",
            &config("reference.toml"),
            "--set",
            "no_such_key=3",
            "count",
        ])
        .assert()
        .code(2);
    let err = error_record(&assert.get_output().stderr, 2);
    assert_eq!(err["kind"], "invalid_input");
}

#[test]
fn override_without_equals_is_rejected() {
    let assert = bin()
        .args([
            "--config",
            &config("reference.toml"),
            "--set",
            "n_max",
            "count",
        ])
        .assert()
        .code(2);
    let err = error_record(&assert.get_output().stderr, 2);
    assert!(err["message"].as_str().unwrap().contains("KEY=VALUE"));
}

#[test]
fn determinism_cannot_be_disabled() {
    let assert = bin()
        .args([
            "--config",
            &config("reference.toml"),
            "--set",
            "determinism=false",
            "count",
        ])
        .assert()
        .code(2);
    error_record(&assert.get_output().stderr, 2);
}

#[test]
fn overtight_ceiling_reports_verification_failure() {
    let dir = tempfile::tempdir().unwrap();
    let assert = bin()
        .args([
            "--config",
            &config("reference.toml"),
            "--set",
            "band_ceiling=1.0",
            "--set",
            &out_override(&dir),
            "verify",
        ])
        .assert()
        .code(1);
    let err = error_record(&assert.get_output().stderr, 1);
    assert_eq!(err["kind"], "verification_failed");
    assert!(err["message"].as_str().unwrap().contains("thm1"));
    // The run still writes its reports: failure is a result, not a crash.
    let report: Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("out").join("verification.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(report["body"]["pass"], Value::Bool(false));
}

#[test]
fn uncertifiable_truncation_tail_is_a_numerical_failure() {
    // Pinning lambda in the config forces the exponent-grid sums onto the
    // finite census table, whose coarse tail envelope cannot certify the
    // default 1e-6 tolerance at k = 0.1 with only 25 rows.
    let dir = tempfile::tempdir().unwrap();
    let assert = bin()
        .args([
            "--config",
            &config("reference.toml"),
            "--set",
            "lambda=4.0",
            "--set",
            &out_override(&dir),
            "verify",
        ])
        .assert()
        .code(3);
    let err = error_record(&assert.get_output().stderr, 3);
    assert_eq!(err["kind"], "tail_not_certifiable");
}

#[test]
fn repelling_census_needs_a_single_generator() {
    let assert = bin()
        .args(["--config", &config("reference.toml"), "repelling"])
        .assert()
        .code(2);
    let err = error_record(&assert.get_output().stderr, 2);
    assert_eq!(err["kind"], "invalid_input");
}

#[test]
fn depth_override_changes_the_census_length() {
    let rows = |extra: &[&str]| -> usize {
        let dir = tempfile::tempdir().unwrap();
        let mut args = vec!["--config".into(), config("reference.toml")];
        for e in extra {
            args.push("--set".into());
            args.push((*e).into());
        }
        args.push("--set".into());
        args.push(out_override(&dir));
        args.push("count".into());
        bin().args(&args).assert().success();
        let csv = std::fs::read_to_string(dir.path().join("out").join("counts.csv")).unwrap();
        csv.lines()
            .filter(|l| !l.starts_with('#') && !l.starts_with("n,"))
            .count()
    };
    assert_eq!(rows(&[]), 25); // censuses through the verification window
    assert_eq!(rows(&["n_max=5", "N_max=5"]), 5);
}

#[test]
fn orbit_listing_shows_words_and_representatives() {
    let dir = tempfile::tempdir().unwrap();
    let assert = bin()
        .args([
            "--config",
            &config("single-quadratic.toml"),
            "--set",
            &out_override(&dir),
            "orbits",
            "--n",
            "2",
        ])
        .assert()
        .success();
    let stdout = String::from_utf8_lossy(&assert.get_output().stdout);
    // z^2 has D(2) = 4 + 1 - 3 = 2 prime points forming one 2-cycle.
    assert!(stdout.contains("closed orbits of length 2: 1"), "{stdout}");
    assert!(stdout.contains("word="), "{stdout}");
}

#[test]
fn reports_embed_schema_version_and_config_digest() {
    let dir = tempfile::tempdir().unwrap();
    bin()
        .args([
            "--config",
            &config("reference.toml"),
            "--set",
            &out_override(&dir),
            "series",
        ])
        .assert()
        .success();
    let doc: Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("out").join("series.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(doc["schema"], Value::from(1));
    let digest = doc["config_digest"].as_str().unwrap();
    assert_eq!(digest.len(), 64);
    assert!(digest.chars().all(|c| c.is_ascii_hexdigit()));
    assert!(!doc["tool_version"].as_str().unwrap().is_empty());
    assert!(doc["body"]["meissel"].is_array());
    assert!(doc["body"]["mertens"]["value"].is_number());
    assert!(doc["body"]["dirichlet"].is_array());
    assert!(doc["body"]["rho"]["points"].is_array());
}

#[test]
fn repelling_census_on_a_quadratic_map_passes() {
    let dir = tempfile::tempdir().unwrap();
    let assert = bin()
        .args([
            "--config",
            &config("single-quadratic.toml"),
            "--set",
            &out_override(&dir),
            "repelling",
        ])
        .assert()
        .success();
    let stdout = String::from_utf8_lossy(&assert.get_output().stdout);
    assert!(stdout.contains("PASS"), "{stdout}");
    let doc: Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("out").join("repelling.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(doc["body"]["pass"], Value::Bool(true));
    assert_eq!(doc["body"]["rows"].as_array().unwrap().len(), 6);
}

#[test]
fn verify_passes_on_the_reference_and_weighted_examples() {
    for name in ["reference.toml", "symbol-weight.toml"] {
        let dir = tempfile::tempdir().unwrap();
        bin()
            .args([
                "--config",
                &config(name),
                "--set",
                &out_override(&dir),
                "verify",
            ])
            .assert()
            .success();
        let doc: Value = serde_json::from_str(
            &std::fs::read_to_string(dir.path().join("out").join("verification.json")).unwrap(),
        )
        .unwrap();
        assert_eq!(doc["body"]["pass"], Value::Bool(true), "{name}");
    }
}

#[test]
fn bare_string_overrides_fall_back_to_strings() {
    // `--set mode=exact` parses "exact" as a bare string, not TOML.
    let dir = tempfile::tempdir().unwrap();
    bin()
        .args([
            "--config",
            &config("reference.toml"),
            "--set",
            "mode=exact",
            "--set",
            &out_override(&dir),
            "count",
        ])
        .assert()
        .success();
}
