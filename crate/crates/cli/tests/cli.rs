use std::path::Path;
use std::process::{Command, Output};

use lambshift_cli::columns::SCHEMA_VERSION;

const SMALL: &str = r#"
name = "small"
variants = ["full", "no_resonator"]

[device]
n_q = 4
n_r = 3

[drive]
frequencies = [4.3, 4.2]
amplitudes = { start = 0.0, stop = 0.1, points = 3 }
"#;

fn lambshift(args: &[&str], envs: &[(&str, &Path)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_lambshift"));
    cmd.args(args)
        .env_remove("LAMBSHIFT_WORKERS")
        .env_remove("LAMBSHIFT_OUT_DIR");
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().unwrap()
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("config.toml");
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn variants_lists_all_three() {
    let out = lambshift(&["variants"], &[]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for name in ["full", "no_resonator", "static_plus_dlc_only"] {
        assert!(text.lines().any(|l| l.starts_with(name)), "{text}");
    }
}

#[test]
fn schema_names_its_version_and_columns() {
    let out = lambshift(&["schema"], &[]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains(SCHEMA_VERSION));
    assert!(
        text.contains("lamb_ge_ghz") && text.contains("did_rate_mhz") && text.contains("eta_ef")
    );
}

#[test]
fn config_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let empty = write_config(
        dir.path(),
        "[drive]\nfrequencies = [4.2]\namplitudes = []\n",
    );
    let out = lambshift(&["run", &empty], &[("LAMBSHIFT_OUT_DIR", dir.path())]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("empty"));
    assert!(!dir.path().join("sweep.csv").exists());

    let unknown = write_config(dir.path(), &format!("{SMALL}\n[output]\nfile = \"x\"\n"));
    assert_eq!(lambshift(&["run", &unknown], &[]).status.code(), Some(1));
    assert_eq!(
        lambshift(&["run", "/nonexistent/config.toml"], &[])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn check_validates_without_computing() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), SMALL);
    let out = lambshift(
        &["run", "--check", &config],
        &[("LAMBSHIFT_OUT_DIR", dir.path())],
    );
    assert!(out.status.success());
    assert!(!dir.path().join("small.csv").exists());
}

#[test]
fn outputs_are_deterministic_and_sorted() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), SMALL);
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    let serial = lambshift(
        &["run", &config, "--workers", "1"],
        &[("LAMBSHIFT_OUT_DIR", &a)],
    );
    assert!(
        serial.status.success(),
        "{}",
        String::from_utf8_lossy(&serial.stderr)
    );
    let parallel = Command::new(env!("CARGO_BIN_EXE_lambshift"))
        .args(["run", &config])
        .env("LAMBSHIFT_WORKERS", "2")
        .env("LAMBSHIFT_OUT_DIR", &b)
        .output()
        .unwrap();
    assert!(parallel.status.success());
    for file in ["small.csv", "small.json"] {
        assert_eq!(
            std::fs::read(a.join(file)).unwrap(),
            std::fs::read(b.join(file)).unwrap(),
            "{file}"
        );
    }

    let csv = std::fs::read_to_string(a.join("small.csv")).unwrap();
    let mut lines = csv.lines();
    assert!(lines
        .next()
        .unwrap()
        .starts_with(&format!("# schema={SCHEMA_VERSION}")));
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(
        &header[..4],
        ["omega_d_ghz", "amplitude_ghz", "variant", "status"]
    );
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 12);
    let keys: Vec<(f64, f64, &str)> = rows
        .iter()
        .map(|r| (r[0].parse().unwrap(), r[1].parse().unwrap(), r[2]))
        .collect();
    assert_eq!(keys[0], (4.2, 0.0, "full"));
    assert_eq!(keys[1], (4.2, 0.0, "no_resonator"));
    assert_eq!(keys[11], (4.3, 0.1, "no_resonator"));
    assert!(rows.iter().all(|r| r[3] == "ok"));
    let lamb = header.iter().position(|&h| h == "lamb_ge_ghz").unwrap();
    assert!(rows
        .iter()
        .filter(|r| r[2] == "no_resonator")
        .all(|r| r[lamb].is_empty()));
    assert!(rows
        .iter()
        .filter(|r| r[2] == "full")
        .all(|r| r[lamb].parse::<f64>().is_ok()));

    let json: serde_json::Value =
        serde_json::from_slice(&std::fs::read(a.join("small.json")).unwrap()).unwrap();
    assert_eq!(json["schema_version"], SCHEMA_VERSION);
    assert_eq!(json["config"]["device"]["n_q"], 4);
    assert_eq!(json["rows"].as_array().unwrap().len(), 12);
    assert!(json["rows"][1]["lamb_ge_ghz"].is_null());
    assert_eq!(json["rows"][0]["n_r"], 3);
}

#[test]
fn solver_failures_exit_with_two_and_still_write() {
    let dir = tempfile::tempdir().unwrap();
    let text = format!(
        "{}\n[solver]\nnormalization_tol = 1e-300\nsamples = 32\nmax_samples = 32\n",
        SMALL.replace("[\"full\", \"no_resonator\"]", "[\"static_plus_dlc_only\"]")
    );
    let config = write_config(dir.path(), &text);
    let out = lambshift(
        &["run", &config, "--workers", "1"],
        &[("LAMBSHIFT_OUT_DIR", dir.path())],
    );
    assert_eq!(
        out.status.code(),
        Some(2),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = std::fs::read_to_string(dir.path().join("small.csv")).unwrap();
    // undriven points need no Fourier sampling
    assert_eq!(csv.lines().filter(|l| l.contains(",failed,")).count(), 4);
    assert_eq!(
        csv.lines()
            .filter(|l| l.contains(",0.0,static_plus_dlc_only,ok,"))
            .count(),
        2
    );
}

#[test]
fn loosened_validation_fails_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.json");
    let out = lambshift(
        &["validate", "--loosen", "--json", report.to_str().unwrap()],
        &[],
    );
    assert_eq!(out.status.code(), Some(3));
    let table = String::from_utf8(out.stdout).unwrap();
    assert!(table
        .lines()
        .any(|l| l.starts_with("FAIL") && l.contains("quasi_energy.sambe ")));
    assert!(table
        .lines()
        .any(|l| l.starts_with("FAIL") && l.contains("propagator.integrator")));
    let rows: serde_json::Value = serde_json::from_slice(&std::fs::read(report).unwrap()).unwrap();
    assert!(rows
        .as_array()
        .unwrap()
        .iter()
        .any(|r| r["quantity"] == "static.chi.published"));
}
