use std::process::Command;

use ladder_cli::exit;

fn ladder() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_ladder"));
    for (key, _) in std::env::vars() {
        if key.starts_with("LADDER_") {
            cmd.env_remove(key);
        }
    }
    cmd
}

fn csv_rows(text: &str) -> Vec<Vec<&str>> {
    text.lines().map(|l| l.split(',').collect()).collect()
}

#[test]
fn single_rung_stops_immediately() {
    let out = ladder().args(["run", "--length", "1"]).output().unwrap();
    assert_eq!(out.status.code(), Some(exit::OK));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(!text.contains('\r'));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0].len(), 21);
    assert_eq!(rows[1][1], "2");
    assert_eq!(rows[1][19], "initial");
    assert_eq!(rows[1][18], "");
    // two levels only: lambda3, lambda4 empty
    assert!(!rows[1][4].is_empty());
    assert_eq!(&rows[1][5..7], &["", ""]);
}

#[test]
fn preset_starts_from_full_dimension() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.csv");
    let status = ladder()
        .args([
            "run",
            "--preset",
            "paper-su2-strong",
            "--min-dim",
            "921",
            "--out",
        ])
        .arg(&path)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(exit::OK));
    let text = std::fs::read_to_string(path).unwrap();
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 5);
    assert_eq!(rows[1][1], "924");
    assert_eq!(rows[4][1], "921");
    assert_eq!(rows[1][2].parse::<f64>().unwrap(), 15.0);
}

#[test]
fn env_and_config_file_feed_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    std::fs::write(
        &cfg,
        "# small run\nlength = 2\nrepresentation = so4\nmin-dim = 4\n",
    )
    .unwrap();
    let out = ladder()
        .args(["run", "--config"])
        .arg(&cfg)
        .env("LADDER_MIN_DIM", "5")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(exit::OK));
    let text = String::from_utf8(out.stdout).unwrap();
    let dims: Vec<&str> = csv_rows(&text)[1..].iter().map(|r| r[1]).collect();
    assert_eq!(dims, ["6", "5"]);
}

#[test]
fn bad_value_is_a_usage_error_naming_the_field() {
    let out = ladder().args(["run", "--epsilon", "-1"]).output().unwrap();
    assert_eq!(out.status.code(), Some(exit::USAGE));
    assert!(String::from_utf8_lossy(&out.stderr).contains("epsilon"));
    let out = ladder().args(["run", "--jt", "0"]).output().unwrap();
    assert_eq!(out.status.code(), Some(exit::USAGE));
    assert!(String::from_utf8_lossy(&out.stderr).contains("jt"));
}

#[test]
fn unwritable_output_is_an_io_error() {
    let out = ladder()
        .args(["run", "--length", "1", "--out", "/nonexistent/dir/x.csv"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(exit::IO));
}

#[test]
fn compare_writes_side_by_side_rows() {
    let out = ladder()
        .args(["compare", "--length", "3", "--min-dim", "10"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(exit::OK));
    let text = String::from_utf8(out.stdout).unwrap();
    let rows = csv_rows(&text);
    assert_eq!(rows[0][0], "n");
    assert_eq!(rows[1][0], "20");
    assert_eq!(rows.len(), 1 + 11);
    // full space: both representations reproduce the full spectrum
    assert_eq!(rows[1][1].parse::<f64>().unwrap(), 0.0);
    assert_eq!(rows[1][2].parse::<f64>().unwrap(), 0.0);
    assert!(String::from_utf8_lossy(&out.stderr).contains("deepest n"));
}

#[test]
fn dump_matrix_is_symmetric() {
    let out = ladder()
        .args(["dump-matrix", "--length", "2", "--representation", "so4"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(exit::OK));
    let text = String::from_utf8(out.stdout).unwrap();
    let entries: Vec<(usize, usize, f64)> = text
        .lines()
        .map(|l| {
            let f: Vec<&str> = l.split_whitespace().collect();
            (
                f[0].parse().unwrap(),
                f[1].parse().unwrap(),
                f[2].parse().unwrap(),
            )
        })
        .collect();
    assert!(!entries.is_empty());
    for &(i, j, v) in &entries {
        assert!(entries.iter().any(|&(a, b, w)| a == j && b == i && w == v));
    }
}
