use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const HYDROGEN: &str = r#"{"system": {"orbitals": 1, "potential": {"kind": "coulomb", "charges": [1.0], "centers": [[0, 0, 0]]}, "kinetic": 0.5, "dim": 3}}"#;

const HELIUM_TYPE: &str = r#"{"system": {"orbitals": 1,
  "coupling": [{"orbital": 0, "partner": 0, "a": 0, "b": 0, "value": 2.0}],
  "potential": {"kind": "coulomb", "charges": [2.0], "centers": [[0, 0, 0]]},
  "kinetic": 0.5, "dim": 3}}"#;

const SMALL_VERIFY: &str = r#"{"verify": {"interpolation": null, "elliptic": null, "imbedding": null, "sobolev": null,
  "sequence": {"k_max": 6, "c_phi": [1.0, 2.0], "a_phi": [1.0], "a_floor_multiples": [1.0], "rho_fractions": [0.5, 1.0]}}}"#;

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wanalytic"))
        .args(args)
        .output()
        .unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn solve_hydrogen_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "h.json", HYDROGEN);
    let out = dir.path().join("out");
    let o = run(&["solve", s(&cfg), "--out", s(&out)]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    let lambda = summary["lambdas"][0].as_f64().unwrap();
    assert!((lambda + 0.5).abs() < 1e-6, "{lambda}");
    assert!(out.join("orbitals.csv").exists());
    assert!(out.join("potentials.csv").exists());
    assert!(out.join("run.log").exists());
}

#[test]
fn config_flag_and_positional_agree() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "h.json", HYDROGEN);
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert_eq!(
        run(&["solve", s(&cfg), "--out", s(&a), "--quiet"])
            .status
            .code(),
        Some(0)
    );
    assert_eq!(
        run(&["--config", s(&cfg), "solve", "--out", s(&b), "--quiet"])
            .status
            .code(),
        Some(0)
    );
    let both = run(&["--config", s(&cfg), "solve", s(&cfg)]);
    assert_eq!(both.status.code(), Some(1));
}

#[test]
fn missing_key_is_a_usage_error_naming_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "bad.json",
        r#"{"system": {"orbitals": 1, "potential": {"charges": [1.0], "centers": [[0, 0, 0]]}, "kinetic": 0.5, "dim": 3}}"#,
    );
    let o = run(&["solve", s(&cfg), "--out", s(dir.path())]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("system.potential.kind"), "{err}");
}

#[test]
fn unknown_key_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "bad.json", r#"{"sytem": {}}"#);
    let o = run(&["solve", s(&cfg), "--out", s(dir.path())]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("sytem"));
}

#[test]
fn missing_config_is_a_usage_error() {
    let o = run(&["solve", "/nonexistent/config.json"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(run(&["solve"]).status.code(), Some(1));
}

#[test]
fn solve_without_system_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "empty.json", "{}");
    let o = run(&["solve", s(&cfg), "--out", s(dir.path())]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn reduced_verify_passes_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "v.json", SMALL_VERIFY);
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    let first = run(&["verify", s(&cfg), "--out", s(&a)]);
    assert_eq!(
        first.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&first.stdout)
    );
    assert_eq!(
        run(&["verify", s(&cfg), "--out", s(&b), "--jobs", "1"])
            .status
            .code(),
        Some(0)
    );
    for name in ["reports.json", "reports_summary.csv"] {
        let x = fs::read(a.join(name)).unwrap();
        assert!(!x.is_empty());
        assert_eq!(
            x,
            fs::read(b.join(name)).unwrap(),
            "{name} differs between runs"
        );
    }
    let reports: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(a.join("reports.json")).unwrap()).unwrap();
    assert!(reports.as_array().is_some_and(|r| !r.is_empty()));
}

#[test]
fn solve_outputs_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "h.json", HYDROGEN);
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    run(&["solve", s(&cfg), "--out", s(&a), "--quiet"]);
    run(&["solve", s(&cfg), "--out", s(&b), "--quiet"]);
    for name in ["orbitals.csv", "potentials.csv", "summary.json"] {
        assert_eq!(
            fs::read(a.join(name)).unwrap(),
            fs::read(b.join(name)).unwrap(),
            "{name}"
        );
    }
}

#[test]
fn quiet_prints_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "h.json", HYDROGEN);
    let o = run(&["solve", s(&cfg), "--out", s(dir.path()), "--quiet"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let loud = run(&["solve", s(&cfg), "--out", s(dir.path())]);
    assert!(!loud.stdout.is_empty());
}

#[test]
fn tolerance_flag_overrides_the_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "he.json", HELIUM_TYPE);
    let (tight, loose) = (dir.path().join("tight"), dir.path().join("loose"));
    assert_eq!(
        run(&["solve", s(&cfg), "--out", s(&tight), "--quiet"])
            .status
            .code(),
        Some(0)
    );
    assert_eq!(
        run(&[
            "solve",
            s(&cfg),
            "--out",
            s(&loose),
            "--quiet",
            "--tolerance",
            "1e-3"
        ])
        .status
        .code(),
        Some(0)
    );
    let iterations = |d: &Path| -> u64 {
        let v: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(d.join("summary.json")).unwrap()).unwrap();
        v["iterations"].as_u64().unwrap()
    };
    assert!(iterations(&loose) < iterations(&tight));
}

#[test]
fn unconverged_scf_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let text = HELIUM_TYPE.replacen('{', r#"{"scf": {"max_iterations": 1},"#, 1);
    let cfg = write_config(dir.path(), "he.json", &text);
    let o = run(&["solve", s(&cfg), "--out", s(dir.path()), "--quiet"]);
    assert_eq!(o.status.code(), Some(2));
    // partial results are still written
    assert!(dir.path().join("summary.json").exists());
}

#[test]
fn hp_model_target_passes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "hp.json",
        r#"{"hp": {"target": {"kind": "model", "power": 0.5, "decay": 1.0}, "params": {"layers": [2, 3, 4, 5, 6, 7, 8]}}}"#,
    );
    let o = run(&["hp", s(&cfg), "--out", s(dir.path())]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stdout)
    );
    for name in ["hp_geometric.csv", "hp_uniform.csv", "hp_summary.json"] {
        assert!(dir.path().join(name).exists(), "{name}");
    }
}

#[test]
fn run_log_carries_timestamps_and_appends() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "h.json", HYDROGEN);
    run(&["solve", s(&cfg), "--out", s(dir.path()), "--quiet"]);
    let once = fs::read_to_string(dir.path().join("run.log"))
        .unwrap()
        .lines()
        .count();
    run(&["solve", s(&cfg), "--out", s(dir.path()), "--quiet"]);
    let log = fs::read_to_string(dir.path().join("run.log")).unwrap();
    assert_eq!(log.lines().count(), 2 * once);
    assert!(log.lines().all(|l| l.starts_with("20")), "{log}");
}
