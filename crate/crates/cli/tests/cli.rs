use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_trotter-stats"))
}

#[test]
fn example_config_round_trips_through_a_run() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin().args(["example-config", "resource_growth"]).output().unwrap();
    assert!(out.status.success());
    let cfg = dir.path().join("cfg.toml");
    std::fs::write(&cfg, &out.stdout).unwrap();
    let results = dir.path().join("out");
    let status = bin()
        .args(["resource-growth", "--config"])
        .arg(&cfg)
        .arg("--out-dir")
        .arg(&results)
        .args(["--workers", "1", "--seed", "5"])
        .status()
        .unwrap();
    assert!(status.success());
    let csv = std::fs::read_to_string(results.join("resource_growth.csv")).unwrap();
    assert!(csv.starts_with("t,entropy,magic"));
    let json = std::fs::read_to_string(results.join("resource_growth.json")).unwrap();
    assert!(json.contains("\"seed\": 5"));
}

#[test]
fn config_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "experiment = \"long_time\"\nbogus = 1\n").unwrap();
    let status = bin().args(["long-time", "--config"]).arg(&cfg).status().unwrap();
    assert_eq!(status.code(), Some(2));
    let status = bin()
        .args(["variance-vs-time", "--samples-override", "3", "--out-dir"])
        .arg(dir.path())
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn mismatched_subcommand_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin().args(["example-config", "joint_lc"]).output().unwrap();
    let cfg = dir.path().join("cfg.toml");
    std::fs::write(&cfg, &out.stdout).unwrap();
    let status = bin().args(["long-time", "--config"]).arg(&cfg).status().unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn numeric_limits_exit_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin().args(["example-config", "long_time"]).output().unwrap();
    let text = String::from_utf8(out.stdout).unwrap().replace("n_qubits = 6", "n_qubits = 13");
    let cfg = dir.path().join("cfg.toml");
    std::fs::write(&cfg, text).unwrap();
    let status = bin()
        .args(["long-time", "--samples-override", "10", "--config"])
        .arg(&cfg)
        .arg("--out-dir")
        .arg(dir.path())
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(3));
}

#[test]
fn help_lists_csv_columns() {
    let out = bin().args(["long-time", "--help"]).output().unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("triangle_violations"));
}
