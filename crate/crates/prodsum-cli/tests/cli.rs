//! End-to-end tests driving the compiled binary: deterministic JSON output,
//! round-tripping of every shipped spec file, schema conformance, and exit
//! codes.

use prodsum_cli::dsl;
use serde_json::Value;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn manifest_path(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join(rel)
}

fn run_prodsum(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_prodsum"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_of(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).expect("utf8 stdout")
}

#[test]
fn json_reports_are_byte_identical_across_runs() {
    let spec = manifest_path("examples/family.spec");
    let spec = spec.to_str().unwrap();
    for args in [
        vec!["check", "biproduct", "--seed", "7", "--report", "json"],
        vec!["chase", "prove", spec, "--report", "json"],
        vec!["demo", "lattice", "--report", "json"],
    ] {
        let first = run_prodsum(&args);
        let second = run_prodsum(&args);
        assert_eq!(first.status.code(), Some(0), "args {args:?}");
        assert_eq!(
            stdout_of(&first),
            stdout_of(&second),
            "two runs with the same seed diverged for {args:?}"
        );
    }
}

#[test]
fn shipped_spec_files_round_trip_through_the_printer() {
    let dir = manifest_path("examples");
    let mut seen = 0;
    for entry in std::fs::read_dir(dir).expect("examples directory") {
        let path = entry.expect("entry").path();
        if path.extension().and_then(|e| e.to_str()) != Some("spec") {
            continue;
        }
        seen += 1;
        let text = std::fs::read_to_string(&path).expect("readable spec");
        let parsed = dsl::parse_spec(&text).unwrap_or_else(|e| panic!("{path:?}: {e}"));
        let printed = dsl::print_spec(&parsed);
        let again = dsl::parse_spec(&printed).unwrap_or_else(|e| panic!("reprint {path:?}: {e}"));
        assert_eq!(parsed, again, "round trip changed {path:?}");
    }
    assert_eq!(seen, 4, "expected the four shipped spec files");
}

#[test]
fn out_flag_writes_the_report_to_a_file() {
    let dir = tempfile::tempdir().expect("tempdir");
    let out = dir.path().join("report.json");
    let output = run_prodsum(&[
        "verdict",
        "finiteness",
        "--model",
        "lattice",
        "--report",
        "json",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(0));
    assert!(stdout_of(&output).is_empty());
    let written: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(written["verdict"]["kind"], "iso-consistent");
}

#[test]
fn finiteness_symbolic_over_finab_refuses_the_isomorphism() {
    let output = run_prodsum(&[
        "verdict",
        "finiteness",
        "--model",
        "finab",
        "--truncate",
        "symbolic",
        "--report",
        "json",
    ]);
    assert_eq!(output.status.code(), Some(0));
    let report: Value = serde_json::from_str(&stdout_of(&output)).unwrap();
    assert_eq!(report["verdict"]["kind"], "not-iso");
}

#[test]
fn frobenius_fixture_search_prints_the_system() {
    let fixture = manifest_path("fixtures/r2_z2.json");
    let output = run_prodsum(&["coring", "frobenius", fixture.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(0));
    let text = stdout_of(&output);
    assert!(text.contains("e = [1, 1]"), "unit missing from:\n{text}");
    assert!(text.contains("pi = ["), "multiplication missing from:\n{text}");
}

#[test]
fn frobenius_fixture_without_a_system_exits_nonzero() {
    let fixture = manifest_path("fixtures/triangular_z2.json");
    let output = run_prodsum(&["coring", "frobenius", fixture.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(1));
    assert!(stdout_of(&output).contains("no frobenius system"));
}

#[test]
fn malformed_spec_files_exit_with_a_usage_error() {
    let dir = tempfile::tempdir().expect("tempdir");
    let bad = dir.path().join("bad.spec");
    std::fs::write(&bad, "mor f : A -> ;\n").unwrap();
    let output = run_prodsum(&["chase", "prove", bad.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(2));
    let err = String::from_utf8(output.stderr).unwrap();
    assert!(err.contains("line 1, column 14"), "position missing from: {err}");
}

// ---------------------------------------------------------------------------
// Schema conformance
// ---------------------------------------------------------------------------

/// Validate a value against the subset of JSON Schema the shipped schema
/// uses: type, enum, properties, required, additionalProperties, items,
/// oneOf, minimum, maximum.
fn validate(schema: &Value, value: &Value, path: &str) -> Result<(), String> {
    if let Some(variants) = schema.get("oneOf").and_then(Value::as_array) {
        let hits = variants
            .iter()
            .filter(|v| validate(v, value, path).is_ok())
            .count();
        if hits != 1 {
            return Err(format!("{path}: matched {hits} oneOf variants instead of 1"));
        }
        return Ok(());
    }
    if let Some(ty) = schema.get("type") {
        let allowed: Vec<&str> = match ty {
            Value::String(s) => vec![s.as_str()],
            Value::Array(a) => a.iter().filter_map(Value::as_str).collect(),
            _ => return Err(format!("{path}: malformed type keyword")),
        };
        let actual = match value {
            Value::Null => "null",
            Value::Bool(_) => "boolean",
            Value::Number(n) => {
                if n.is_u64() || n.is_i64() {
                    "integer"
                } else {
                    "number"
                }
            }
            Value::String(_) => "string",
            Value::Array(_) => "array",
            Value::Object(_) => "object",
        };
        let ok = allowed.iter().any(|a| *a == actual || (*a == "number" && actual == "integer"));
        if !ok {
            return Err(format!("{path}: type {actual} not in {allowed:?}"));
        }
    }
    if let Some(options) = schema.get("enum").and_then(Value::as_array) {
        if !options.contains(value) {
            return Err(format!("{path}: value {value} not in enum"));
        }
    }
    if let Some(min) = schema.get("minimum").and_then(Value::as_f64) {
        if let Some(x) = value.as_f64() {
            if x < min {
                return Err(format!("{path}: {x} below minimum {min}"));
            }
        }
    }
    if let Some(max) = schema.get("maximum").and_then(Value::as_f64) {
        if let Some(x) = value.as_f64() {
            if x > max {
                return Err(format!("{path}: {x} above maximum {max}"));
            }
        }
    }
    if let Value::Object(map) = value {
        if let Some(required) = schema.get("required").and_then(Value::as_array) {
            for key in required.iter().filter_map(Value::as_str) {
                if !map.contains_key(key) {
                    return Err(format!("{path}: missing required key {key}"));
                }
            }
        }
        let props = schema.get("properties").and_then(Value::as_object);
        if let Some(props) = props {
            for (key, sub) in props {
                if let Some(v) = map.get(key) {
                    validate(sub, v, &format!("{path}/{key}"))?;
                }
            }
        }
        if schema.get("additionalProperties") == Some(&Value::Bool(false)) {
            for key in map.keys() {
                if !props.is_some_and(|p| p.contains_key(key)) {
                    return Err(format!("{path}: unexpected key {key}"));
                }
            }
        }
    }
    if let (Value::Array(items), Some(sub)) = (value, schema.get("items")) {
        for (i, item) in items.iter().enumerate() {
            validate(sub, item, &format!("{path}[{i}]"))?;
        }
    }
    Ok(())
}

#[test]
fn json_reports_validate_against_the_shipped_schema() {
    let schema: Value = serde_json::from_str(
        &std::fs::read_to_string(manifest_path("docs/report-schema.json")).unwrap(),
    )
    .unwrap();
    let family = manifest_path("examples/family.spec");
    let triangular = manifest_path("fixtures/triangular_z2.json");
    let r2 = manifest_path("fixtures/r2_z2.json");
    let cases: Vec<Vec<&str>> = vec![
        vec!["verdict", "finiteness", "--model", "lattice", "--report", "json"],
        vec!["chase", "prove", family.to_str().unwrap(), "--report", "json"],
        vec!["coring", "frobenius", r2.to_str().unwrap(), "--report", "json"],
        vec!["coring", "frobenius", triangular.to_str().unwrap(), "--report", "json"],
        vec!["coring", "verdict", "--ring", "2", "--size", "symbolic", "--report", "json"],
        vec!["demo", "completed-family", "--report", "json"],
    ];
    for args in cases {
        let output = run_prodsum(&args);
        let report: Value = serde_json::from_str(&stdout_of(&output))
            .unwrap_or_else(|e| panic!("{args:?} produced invalid JSON: {e}"));
        validate(&schema, &report, "report").unwrap_or_else(|e| panic!("{args:?}: {e}"));
    }
}

#[test]
fn budget_env_variable_is_honored() {
    let spec = manifest_path("examples/coproduct.spec");
    let output = Command::new(env!("CARGO_BIN_EXE_prodsum"))
        .args(["chase", "prove", spec.to_str().unwrap(), "--report", "json"])
        .env("PRODSUM_BUDGET", "123")
        .output()
        .expect("binary runs");
    let report: Value = serde_json::from_str(&stdout_of(&output)).unwrap();
    assert_eq!(report["budget"], 123);
}
