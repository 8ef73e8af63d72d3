//! Command-line behaviour through the built binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use relclock::cli::{config_digest, parse_config, CliError, CSV_COLUMNS};

const BIN: &str = env!("CARGO_BIN_EXE_relclock");

fn config_text(a: f64, repetitions: usize, sweep: &str) -> String {
    format!(
        r#"{{
  "schema": 1,
  "units": "SI",
  "scenario": {{
    "t_a": 1e-9, "t_i": 0.0, "L": 0.011, "a": {a:e}, "repetitions": {repetitions},
    "clock_mode": 1,
    "initial_state": {{ "kind": "squeezed_vacuum", "mean_n": 10.0, "phase": 0.0 }}
  }},
  "numerics": {{ "n_max": 12, "residual_gate": 1e-4 }}{sweep}
}}"#
    )
}

fn write_config(dir: &Path, name: &str, text: &str) -> std::path::PathBuf {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().unwrap()
}

#[test]
fn twin_writes_one_row_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.json", &config_text(1.7e15, 3, ""));
    let out = dir.path().join("out");
    let o = run(&[
        "twin",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(out.join("twin_results.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0], CSV_COLUMNS.join(","));
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    let digest = manifest["config_digest"].as_str().unwrap();
    assert_eq!(digest.len(), 64);
    assert!(lines[1].ends_with(digest));
    assert_eq!(manifest["n_max"], 12);
    assert_eq!(
        manifest["symplectic_residuals"].as_array().unwrap().len(),
        1
    );
}

#[test]
fn horizon_crossing_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    // h = aL/c² ≈ 2.4
    let cfg = write_config(dir.path(), "c.json", &config_text(2e19, 1, ""));
    let o = run(&[
        "twin",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(3));
    assert!(!dir.path().join("twin_results.csv").exists());
}

#[test]
fn exit_codes_for_io_parse_and_gate() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("none.json");
    assert_eq!(
        run(&["twin", "--config", missing.to_str().unwrap()])
            .status
            .code(),
        Some(1)
    );
    let bad = write_config(dir.path(), "bad.json", "{ not json");
    assert_eq!(
        run(&["twin", "--config", bad.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
    let unknown = config_text(1.7e15, 1, "").replace("\"clock_mode\"", "\"colck_mode\"");
    let unknown = write_config(dir.path(), "unknown.json", &unknown);
    assert_eq!(
        run(&["twin", "--config", unknown.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
    // h ≈ 1.5 at n_max = 12 cannot meet a 1e-12 gate
    let strict = config_text(1.2e19, 1, "").replace("1e-4", "1e-12");
    let strict = write_config(dir.path(), "strict.json", &strict);
    let o = run(&[
        "twin",
        "--config",
        strict.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(
        o.status.code(),
        Some(4),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
}

#[test]
fn sweep_over_ten_lengths_in_grid_order() {
    let dir = tempfile::tempdir().unwrap();
    let grid: Vec<String> = (1..=10).map(|i| format!("{}", 0.002 * i as f64)).collect();
    let sweep = format!(
        r#", "sweep": {{ "vary": "L", "grid": [{}] }}"#,
        grid.join(", ")
    );
    let cfg = write_config(dir.path(), "c.json", &config_text(1.7e15, 2, &sweep));
    let o = run(&[
        "sweep",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(dir.path().join("sweep_results.csv")).unwrap();
    let lengths: Vec<f64> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    let expected: Vec<f64> = grid.iter().map(|g| g.parse().unwrap()).collect();
    assert_eq!(lengths, expected);
}

#[test]
fn failing_sweep_points_go_to_the_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let sweep = r#", "sweep": { "vary": "h", "grid": [1e-4, 3.0, 2e-4] }"#;
    let cfg = write_config(dir.path(), "c.json", &config_text(1.7e15, 1, sweep));
    let o = run(&[
        "sweep",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let csv = fs::read_to_string(dir.path().join("sweep_results.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3);
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("manifest.json")).unwrap())
            .unwrap();
    let errors = manifest["point_errors"].as_array().unwrap();
    assert_eq!(errors.len(), 1);
    assert_eq!(errors[0]["index"], 1);
}

#[test]
fn qfi_subcommand_values() {
    let o = run(&["qfi", "--state", "squeezed-vacuum", "--mean-n", "1"]);
    let v: f64 = String::from_utf8(o.stdout).unwrap().trim().parse().unwrap();
    assert!((v - 16.0).abs() < 1e-12);
    let o = run(&[
        "qfi", "--state", "coherent", "--mean-n", "5", "--phase", "1.0",
    ]);
    let v: f64 = String::from_utf8(o.stdout).unwrap().trim().parse().unwrap();
    assert!((v - 20.0).abs() < 1e-12);
    assert_eq!(
        run(&["qfi", "--state", "coherent", "--mean-n=-1"])
            .status
            .code(),
        Some(3)
    );
}

#[test]
fn check_reports_zero_identity_residuals() {
    let o = run(&["check"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    for name in ["identity_eps1", "identity_eps2"] {
        let line = text.lines().find(|l| l.starts_with(name)).unwrap();
        assert_eq!(line, format!("{name} 0e0 ok"));
    }
}

#[test]
fn bogo_dumps_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.json", &config_text(1.7e15, 2, ""));
    let mut dumps = Vec::new();
    for (i, threads) in ["1", "3"].iter().enumerate() {
        let out = dir.path().join(format!("run{i}"));
        let o = run(&[
            "--threads",
            threads,
            "bogo",
            "--map",
            "block",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(o.status.success());
        dumps.push(fs::read(out.join("bogoliubov_map.txt")).unwrap());
    }
    assert_eq!(dumps[0], dumps[1]);
    let (header, map) = relclock::modes::read_dump(dumps[0].as_slice()).unwrap();
    assert_eq!(header.n_max, 12);
    assert!(map.beta_norm() > 0.0);
}

#[test]
fn digest_ignores_key_order() {
    let a = parse_config(&config_text(1.7e15, 2, "")).unwrap();
    let reordered = r#"{"units":"SI","numerics":{"residual_gate":1e-4,"n_max":12},
        "scenario":{"initial_state":{"phase":0.0,"mean_n":10.0,"kind":"squeezed_vacuum"},
        "clock_mode":1,"repetitions":2,"a":1.7e15,"L":0.011,"t_i":0.0,"t_a":1e-9},"schema":1}"#;
    let b = parse_config(reordered).unwrap();
    assert_eq!(a.digest, b.digest);
    assert_eq!(a.document, b.document);
    let changed = parse_config(&config_text(1.7e15, 3, "")).unwrap();
    assert_ne!(a.digest, changed.digest);
    assert_eq!(
        config_digest(&serde_json::json!({"b": 1, "a": 2})),
        config_digest(&serde_json::json!({"a": 2, "b": 1}))
    );
}

#[test]
fn wrong_schema_or_units_rejected() {
    let text = config_text(1.7e15, 1, "");
    let e = parse_config(&text.replace("\"schema\": 1", "\"schema\": 2")).unwrap_err();
    assert!(matches!(e, CliError::Validation(_)));
    let e = parse_config(&text.replace("\"SI\"", "\"cgs\"")).unwrap_err();
    assert_eq!(e.exit_code(), 3);
}
