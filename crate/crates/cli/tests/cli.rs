use std::path::Path;
use std::process::{Command, Output};

use airybasis::grin::{airy_wavelet, WaveletParams};
use airybasis::Grid;
use serde_json::Value;

fn airybasis(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_airybasis"))
        .args(args)
        .output()
        .expect("run airybasis")
}

fn stdout(args: &[&str]) -> String {
    let out = airybasis(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn csv(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines
        .map(|l| l.split(',').map(String::from).collect())
        .collect();
    (header, rows)
}

fn numbers(rows: &[Vec<String>], col: usize) -> Vec<f64> {
    rows.iter().map(|r| r[col].parse().unwrap()).collect()
}

fn simpson(h: f64, v: &[f64]) -> f64 {
    let n = v.len() - 1;
    assert!(n.is_multiple_of(2));
    let mut s = v[0] + v[n];
    for (i, x) in v.iter().enumerate().take(n).skip(1) {
        s += if i % 2 == 1 { 4.0 * x } else { 2.0 * x };
    }
    s * h / 3.0
}

#[test]
fn eigs_default_first_row() {
    let (header, rows) = csv(&stdout(&["eigs"]));
    assert_eq!(header, ["n", "parity", "energy"]);
    assert_eq!(rows.len(), 6);
    assert_eq!(&rows[0][..2], ["0", "even"]);
    assert!((rows[0][2].parse::<f64>().unwrap() - 0.808616).abs() < 1e-6);
    assert_eq!(rows[1][1], "odd");
}

#[test]
fn eigs_scales_with_lambda() {
    let (_, rows) = csv(&stdout(&["eigs", "--lambda", "8"]));
    let e0: f64 = rows[0][2].parse().unwrap();
    // λ^{2/3} = 4
    assert!((e0 - 4.0 * 0.808_616_517_465_501_8).abs() < 1e-8);
    assert!((e0 - 3.234464).abs() < 5e-6);
}

#[test]
fn usage_errors_exit_with_one() {
    for args in [
        vec!["eigs", "--n", "0"],
        vec!["eigs", "--format", "xml"],
        vec!["eigs", "--bogus"],
        vec!["frobnicate"],
        vec!["eigenfunctions", "--points", "2"],
    ] {
        let out = airybasis(&args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
    assert_eq!(airybasis(&["--help"]).status.code(), Some(0));
}

#[test]
fn unknown_config_key_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.cfg");
    std::fs::write(&path, "lambda=1\ncolour=red\n").unwrap();
    let out = airybasis(&["eigs", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.cfg");
    std::fs::write(&path, "lambda = 8\nnstates = 2\n").unwrap();
    let p = path.to_str().unwrap();
    let (_, rows) = csv(&stdout(&["eigs", "--config", p]));
    assert_eq!(rows.len(), 2);
    assert!((rows[0][2].parse::<f64>().unwrap() - 3.23446607).abs() < 1e-8);
    let (_, rows) = csv(&stdout(&["eigs", "--config", p, "--lambda", "1"]));
    assert_eq!(rows.len(), 2);
    assert!((rows[0][2].parse::<f64>().unwrap() - 0.808616517).abs() < 1e-9);
}

#[test]
fn eigenfunction_columns() {
    let (header, rows) = csv(&stdout(&["eigenfunctions"]));
    assert_eq!(header.len(), 7);
    assert_eq!(header[0], "x");
    let x = numbers(&rows, 0);
    let h = x[1] - x[0];
    let zero = x.iter().position(|v| *v == 0.0).unwrap();
    assert_eq!(rows[zero][2].parse::<f64>().unwrap(), 0.0);
    for col in 1..header.len() {
        let v: Vec<f64> = numbers(&rows, col).iter().map(|p| p * p).collect();
        assert!((simpson(h, &v) - 1.0).abs() < 1e-6, "column {col}");
    }
}

#[test]
fn bounce_trajectory() {
    let (header, rows) = csv(&stdout(&["bounce", "--t-max", "60"]));
    assert_eq!(header, ["t", "t_units", "x_mean"]);
    assert_eq!(rows.len(), 1201);
    let t = numbers(&rows, 0);
    let x = numbers(&rows, 2);
    assert_eq!(t[0], 0.0);
    assert!((x[0] - 10.0).abs() < 1e-5);
    assert!(x.iter().all(|v| v.abs() <= 45.0));
    // the packet falls, so the first turning point is a minimum near the far wall
    let first = (1..x.len() - 1)
        .find(|&i| (x[i] - x[i - 1]) * (x[i + 1] - x[i]) < 0.0)
        .unwrap();
    assert!(x[first] < -5.0, "{}", x[first]);
    assert!(x[first] < x[first - 1] && x[first] < x[first + 1]);
}

#[test]
fn clipped_packet_is_a_precision_error() {
    let out = airybasis(&["bounce", "--x0", "43", "--t-max", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("clipped"));
}

const SMALL_GRIN: &[&str] = &[
    "grin",
    "--xmin",
    "-100",
    "--xmax",
    "100",
    "--points",
    "10001",
    "--nstates",
    "150",
    "--z-max",
    "20",
    "--n-z",
    "11",
];

#[test]
fn grin_rows() {
    let (header, rows) = csv(&stdout(SMALL_GRIN));
    assert_eq!(rows.len(), 11);
    let x: Vec<f64> = header[1..].iter().map(|s| s.parse().unwrap()).collect();
    assert_eq!((x[0], x[x.len() - 1]), (-30.0, 30.0));
    let g = Grid::new(-100.0, 100.0, 10001).unwrap();
    let field = airy_wavelet(&WaveletParams::new(-1.472910).unwrap(), &g).unwrap();
    let offset = g.nearest_index(-30.0).unwrap();
    let first: Vec<f64> = rows[0][1..].iter().map(|s| s.parse().unwrap()).collect();
    for (i, v) in first.iter().enumerate() {
        let expect = field.samples()[offset + i].norm_sqr();
        // truncated expansion; the error concentrates at the x = 0 kink
        assert!((v - expect).abs() < 5e-3, "x={}: {v} vs {expect}", x[i]);
    }
    for row in &rows {
        let v: Vec<f64> = row[1..].iter().map(|s| s.parse().unwrap()).collect();
        let asym = v
            .iter()
            .zip(v.iter().rev())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(asym <= 1e-8);
    }
}

#[test]
fn grin_defaults_follow_the_reference_parameters() {
    let args = [
        &SMALL_GRIN[..SMALL_GRIN.len() - 2],
        &["--n-z", "1", "--format", "json"],
    ]
    .concat();
    let out = stdout(&args);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["meta"]["lambda"].as_f64(), Some(0.1));
    assert_eq!(v["meta"]["kappa"].as_f64(), Some(1.0));
    assert_eq!(v["meta"]["q"].as_f64(), Some(-1.47291));
}

#[test]
fn verify_passes_and_names_its_checks() {
    let (header, rows) = csv(&stdout(&["verify"]));
    assert_eq!(header[..2], ["check", "status"]);
    assert!(rows.len() >= 10);
    assert!(rows.iter().all(|r| r[1] == "pass"), "{rows:?}");
}

#[test]
fn verify_detects_energy_fuzz() {
    let out = airybasis(&["verify", "--fuzz-energy", "1e-2"]);
    assert_eq!(out.status.code(), Some(3));
    let (_, rows) = csv(&String::from_utf8(out.stdout).unwrap());
    let status = |name: &str| rows.iter().find(|r| r[0] == name).unwrap()[1].clone();
    assert_eq!(status("energy_consistency"), "FAIL");
    assert_eq!(status("orthonormality"), "pass");
}

fn read(path: &Path) -> Vec<u8> {
    std::fs::read(path).unwrap()
}

#[test]
fn output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.json");
    let p = path.to_str().unwrap();
    let args = ["bounce", "--t-max", "20", "--format", "json", "--out", p];
    stdout(&args);
    let first = read(&path);
    stdout(&args);
    assert_eq!(first, read(&path));
    assert_eq!(
        stdout(&["eigs", "--n", "30"]),
        stdout(&["eigs", "--n", "30"])
    );
    assert_eq!(stdout(SMALL_GRIN), stdout(SMALL_GRIN));
}

#[test]
fn csv_and_json_agree() {
    for args in [
        vec!["eigs", "--n", "12"],
        vec!["eigenfunctions", "--n", "3"],
        vec!["bounce", "--t-max", "10"],
    ] {
        let (header, rows) = csv(&stdout(&args));
        let json: Value =
            serde_json::from_str(&stdout(&[args.as_slice(), &["--format", "json"]].concat()))
                .unwrap();
        let cols: Vec<String> = json["data"]["columns"]
            .as_array()
            .unwrap()
            .iter()
            .map(|c| c.as_str().unwrap().to_string())
            .collect();
        assert_eq!(cols, header);
        let jrows = json["data"]["rows"].as_array().unwrap();
        assert_eq!(jrows.len(), rows.len());
        for (r, j) in rows.iter().zip(jrows) {
            for (cell, value) in r.iter().zip(j.as_array().unwrap()) {
                match value {
                    Value::String(s) => assert_eq!(s, cell),
                    other => assert_eq!(other.as_f64().unwrap(), cell.parse::<f64>().unwrap()),
                }
            }
        }
    }
}
