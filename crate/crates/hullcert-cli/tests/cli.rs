//! End-to-end checks of the command-line surface: exit codes, file
//! emission, determinism, and JSON-schema conformance of the reports.

use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hullcert"))
}

fn tmpdir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("hullcert-cli-{tag}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

/// Minimal JSON-schema checker covering the subset used by the shipped
/// schemas: type, required, properties, enum.
fn validate(schema: &Value, value: &Value, path: &str) -> Result<(), String> {
    if let Some(types) = schema.get("type") {
        let allowed: Vec<&str> = match types {
            Value::String(s) => vec![s.as_str()],
            Value::Array(a) => a.iter().filter_map(|v| v.as_str()).collect(),
            _ => return Err(format!("{path}: malformed type clause")),
        };
        let actual = match value {
            Value::Null => "null",
            Value::Bool(_) => "boolean",
            Value::Number(n) => {
                if n.is_i64() || n.is_u64() {
                    "integer"
                } else {
                    "number"
                }
            }
            Value::String(_) => "string",
            Value::Array(_) => "array",
            Value::Object(_) => "object",
        };
        let ok = allowed.iter().any(|t| {
            *t == actual || (*t == "number" && actual == "integer")
        });
        if !ok {
            return Err(format!("{path}: expected {allowed:?}, got {actual}"));
        }
    }
    if let Some(en) = schema.get("enum").and_then(|e| e.as_array()) {
        if !en.contains(value) {
            return Err(format!("{path}: {value} not in enum"));
        }
    }
    if let Some(required) = schema.get("required").and_then(|r| r.as_array()) {
        for key in required.iter().filter_map(|k| k.as_str()) {
            if value.get(key).is_none() {
                return Err(format!("{path}: missing required key {key}"));
            }
        }
    }
    if let Some(props) = schema.get("properties").and_then(|p| p.as_object()) {
        for (key, sub) in props {
            if let Some(v) = value.get(key) {
                validate(sub, v, &format!("{path}.{key}"))?;
            }
        }
    }
    Ok(())
}

fn schema(name: &str) -> Value {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("schema").join(name);
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn assert_rectangular_csv(path: &Path) {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().expect("csv has a header");
    let cols = header.split(',').count();
    assert!(cols >= 1);
    for (i, line) in lines.enumerate() {
        assert_eq!(line.split(',').count(), cols, "{}: row {} not rectangular", path.display(), i);
    }
}

#[test]
fn missing_config_exits_2() {
    let status = bin()
        .args(["experiment", "sensitivity", "--config", "/nonexistent/conf.cfg"])
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(2));
}

#[test]
fn conflicting_cover_flags_exit_2() {
    let out = tmpdir("conflict");
    let status = bin()
        .args(["estimate-hull", "--delta", "0.1", "--n", "16"])
        .args(["--out", out.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(2));
}

#[test]
fn unknown_subcommand_exits_2() {
    let status = bin().arg("frobnicate").output().unwrap();
    assert_eq!(status.status.code(), Some(2));
}

#[test]
fn bound_subcommand_prints_expected_value() {
    let out = bin()
        .args(["bound", "--kind", "second", "--l-bar", "3", "--r", "1", "--delta", "0.01"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let eps = v["epsilon"].as_f64().unwrap();
    assert!((eps - 1.5e-4).abs() < 1e-12);
    validate(&schema("bound_report.schema.json"), &v, "$").unwrap();
}

#[test]
fn estimate_hull_writes_expected_files() {
    let out = tmpdir("estimate");
    let status = bin()
        .args(["estimate-hull", "--map", "scaling", "--l", "3", "--delta", "0.01"])
        .args(["--out", out.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(status.status.success(), "stderr: {}", String::from_utf8_lossy(&status.stderr));
    assert!(status.stdout.is_empty(), "stdout must stay silent in file mode");
    for f in ["hull.csv", "cover.csv", "bound.json", "hull.json", "hull.svg"] {
        assert!(out.join(f).exists(), "missing {f}");
    }
    assert_rectangular_csv(&out.join("hull.csv"));
    assert_rectangular_csv(&out.join("cover.csv"));
    let bound: Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("bound.json")).unwrap()).unwrap();
    validate(&schema("bound_report.schema.json"), &bound, "$").unwrap();
    assert!((bound["epsilon"].as_f64().unwrap() - 1.5e-4).abs() < 1e-12);
    let svg = std::fs::read_to_string(out.join("hull.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
}

#[test]
fn estimate_hull_identity_16_points() {
    // Certified delta of the 16-point cover is 2 sin(pi/16); the identity
    // bound is its square over 2.
    let out = tmpdir("estimate-id");
    let status = bin()
        .args(["estimate-hull", "--map", "identity", "--n", "16"])
        .args(["--out", out.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(status.status.success());
    let bound: Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("bound.json")).unwrap()).unwrap();
    let delta = 2.0 * (std::f64::consts::PI / 16.0).sin();
    let expected = delta * delta / 2.0;
    assert!((bound["epsilon"].as_f64().unwrap() - expected).abs() < 1e-12);
}

#[test]
fn sample_cover_circle_rectangular() {
    let out = tmpdir("cover");
    let status = bin()
        .args(["sample-cover", "--set", "circle", "--n", "8"])
        .args(["--out", out.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(status.status.success());
    let text = std::fs::read_to_string(out.join("cover.csv")).unwrap();
    assert_eq!(text.lines().count(), 9);
    assert!(text.lines().next().unwrap().starts_with("x1,x2,delta,certified,m,seed"));
    assert_rectangular_csv(&out.join("cover.csv"));
}

#[test]
fn reach_zero_system_files() {
    let out = tmpdir("reach");
    let status = bin()
        .args(["reach", "--system", "zero", "--n-cover", "12", "--t", "3", "--steps", "10"])
        .args(["--out", out.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(status.status.success(), "stderr: {}", String::from_utf8_lossy(&status.stderr));
    assert_rectangular_csv(&out.join("reach_hull.csv"));
    let bound: Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("reach_bound.json")).unwrap())
            .unwrap();
    validate(&schema("bound_report.schema.json"), &bound, "$").unwrap();
    // Identity flow over a 12-point circle cover: hull is the cover itself.
    let hull = std::fs::read_to_string(out.join("reach_hull.csv")).unwrap();
    assert_eq!(hull.lines().count(), 13);
}

#[test]
fn solve_ocp_reports_validate_and_runs_are_byte_identical() {
    let out1 = tmpdir("ocp1");
    let out2 = tmpdir("ocp2");
    for out in [&out1, &out2] {
        let status = bin()
            .args(["solve-ocp", "--m", "24", "--dense", "60", "--seed", "5"])
            .args(["--out", out.to_str().unwrap()])
            .output()
            .unwrap();
        assert!(status.status.success(), "stderr: {}", String::from_utf8_lossy(&status.stderr));
    }
    for name in ["ocp_report.json", "violations.json", "controls.csv", "trajectories.csv", "ocp.svg"]
    {
        let a = std::fs::read(out1.join(name)).unwrap();
        let b = std::fs::read(out2.join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between identical runs");
    }
    assert_rectangular_csv(&out1.join("controls.csv"));
    assert_rectangular_csv(&out1.join("trajectories.csv"));
    let report: Value =
        serde_json::from_str(&std::fs::read_to_string(out1.join("ocp_report.json")).unwrap())
            .unwrap();
    validate(&schema("ocp_report.schema.json"), &report, "$").unwrap();
    let viol: Value =
        serde_json::from_str(&std::fs::read_to_string(out1.join("violations.json")).unwrap())
            .unwrap();
    validate(&schema("violation_report.schema.json"), &viol, "$").unwrap();
    // The report must expose the padding bookkeeping.
    assert!(report["epsilon_recomputed"].is_number());
    assert!((report["epsilon_reference"].as_f64().unwrap() - 0.025).abs() < 1e-15);
    assert!(report["epsilon_discrepancy"].is_number());
}

#[test]
fn sensitivity_experiment_deterministic() {
    let cfg = tmpdir("senscfg").join("cfg");
    std::fs::write(&cfg, "l = 1\ntrials = 4\nm_list = 50,200\nproxy_points = 5000\n").unwrap();
    let out1 = tmpdir("sens1");
    let out2 = tmpdir("sens2");
    for out in [&out1, &out2] {
        let status = bin()
            .args(["experiment", "sensitivity", "--config", cfg.to_str().unwrap()])
            .args(["--seed", "3", "--out", out.to_str().unwrap()])
            .output()
            .unwrap();
        assert!(status.status.success(), "stderr: {}", String::from_utf8_lossy(&status.stderr));
    }
    let a = std::fs::read(out1.join("sensitivity_L1.csv")).unwrap();
    let b = std::fs::read(out2.join("sensitivity_L1.csv")).unwrap();
    assert_eq!(a, b);
    assert_rectangular_csv(&out1.join("sensitivity_L1.csv"));
    let text = String::from_utf8(a).unwrap();
    assert!(text.lines().next().unwrap() == "M,bound1,bound2,empirical,proxy_err");
}

#[test]
fn bad_config_value_exits_2() {
    let cfg = tmpdir("badcfg").join("cfg");
    std::fs::write(&cfg, "trials = many\n").unwrap();
    let status = bin()
        .args(["experiment", "sensitivity", "--config", cfg.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(2));
}
