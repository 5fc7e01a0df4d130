use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;
use wiener_density::io;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn wdensity(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wdensity"))
        .arg("--output")
        .arg(dir)
        .args(args)
        .output()
        .expect("run wdensity")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn read(path: &Path) -> Value {
    io::read_json(path).unwrap()
}

const REFERENCE_GAUSSIAN: [&str; 6] = ["--gaussian", "--mean", "0,0", "--cov", "0.25,0.2,0.75", "--m"];

#[test]
fn generate_writes_requested_rows() {
    let dir = TempDir::new().unwrap();
    let out = wdensity(
        dir.path(),
        &[&["generate"], &REFERENCE_GAUSSIAN[..], &["400", "--seed", "7"]].concat(),
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let data = io::read_dataset_csv(&dir.path().join("samples.csv")).unwrap();
    assert_eq!(data.len(), 400);
    assert_eq!(data.dim(), 2);
    let manifest = read(&dir.path().join("samples.csv.manifest.json"));
    assert_eq!(manifest["seed"], 7);
    assert_eq!(manifest["command"], "generate");
}

#[test]
fn generate_is_reproducible() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    for dir in [&a, &b] {
        let out = wdensity(
            dir.path(),
            &[&["generate"], &REFERENCE_GAUSSIAN[..], &["50", "--seed", "3"]].concat(),
        );
        assert_eq!(code(&out), 0);
    }
    let fa = std::fs::read(a.path().join("samples.csv")).unwrap();
    let fb = std::fs::read(b.path().join("samples.csv")).unwrap();
    assert_eq!(fa, fb);
}

#[test]
fn generate_rejects_bad_specs() {
    let dir = TempDir::new().unwrap();
    let zero = wdensity(dir.path(), &[&["generate"], &REFERENCE_GAUSSIAN[..], &["0"]].concat());
    assert_eq!(code(&zero), 2);
    let not_pd = wdensity(
        dir.path(),
        &["generate", "--gaussian", "--mean", "0,0", "--cov", "1,2,1", "--m", "10"],
    );
    assert_eq!(code(&not_pd), 2);
    let short = wdensity(
        dir.path(),
        &["generate", "--gaussian", "--mean", "0,0", "--cov", "1,0", "--m", "10"],
    );
    assert_eq!(code(&short), 2);
    let uniform = wdensity(dir.path(), &["generate", "--uniform", "--dim", "3", "--m", "10"]);
    assert_eq!(code(&uniform), 0);
}

#[test]
fn estimate_recovers_forward_fixture() {
    let dir = TempDir::new().unwrap();
    let config = fixture("forward_config.json");
    let moments = fixture("forward_moments.json");
    let out = wdensity(
        dir.path(),
        &[
            "estimate",
            "--config",
            config.to_str().unwrap(),
            "--moments",
            moments.to_str().unwrap(),
        ],
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let solved = io::field_from_json(&read(&dir.path().join("coefficients.json"))).unwrap();
    let truth = io::field_from_json(&read(&fixture("forward_truth.json"))).unwrap();
    assert!(solved.max_abs_diff(&truth) < 1e-8);

    let report = read(&dir.path().join("report.json"));
    assert_eq!(report["termination"], "converged");
    assert_eq!(report["manifest"]["config"]["n2"], 6);
    let coeffs = read(&dir.path().join("coefficients.json"));
    assert_eq!(coeffs["shift"], true);
    assert_eq!(coeffs["n1"], 2);
}

#[test]
fn estimate_reports_non_convergence_with_exit_3() {
    let dir = TempDir::new().unwrap();
    let config = dir.path().join("config.json");
    std::fs::write(&config, r#"{ "n1": 2, "n2": 6, "max_iter": 1 }"#).unwrap();
    let moments = fixture("forward_moments.json");
    let out = wdensity(
        dir.path(),
        &[
            "estimate",
            "--config",
            config.to_str().unwrap(),
            "--moments",
            moments.to_str().unwrap(),
        ],
    );
    assert_eq!(code(&out), 3);
    let report = read(&dir.path().join("report.json"));
    assert_eq!(report["termination"], "max_iter");
}

#[test]
fn estimate_input_errors_exit_2() {
    let dir = TempDir::new().unwrap();
    let empty = dir.path().join("empty.csv");
    std::fs::write(&empty, "").unwrap();
    assert_eq!(
        code(&wdensity(dir.path(), &["estimate", "--input", empty.to_str().unwrap()])),
        2
    );

    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "x1,x2\n0.1,0.2\n0.3,oops\n").unwrap();
    let out = wdensity(dir.path(), &["estimate", "--input", bad.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("row 3"));

    let config = dir.path().join("config.json");
    std::fs::write(&config, r#"{ "n1": 2, "n2": 3, "colour": "red" }"#).unwrap();
    let out = wdensity(
        dir.path(),
        &[
            "estimate",
            "--config",
            config.to_str().unwrap(),
            "--input",
            bad.to_str().unwrap(),
        ],
    );
    assert_eq!(code(&out), 2);
}

#[test]
fn reference_gaussian_pipeline() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    assert_eq!(
        code(&wdensity(
            d,
            &[&["generate"], &REFERENCE_GAUSSIAN[..], &["400", "--seed", "7"]].concat()
        )),
        0
    );
    let samples = d.join("samples.csv");
    let out = wdensity(d, &["estimate", "--input", samples.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let coeffs = d.join("coefficients.json");
    assert_eq!(read(&coeffs)["radius"], 5);

    let out = wdensity(d, &["--grid", "64", "evaluate", "--coeffs", coeffs.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let out = wdensity(d, &["--grid", "64", "moments", "--coeffs", coeffs.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let sidecar = read(&d.join("grid.json"));
    let moments = read(&d.join("moments.json"));
    for key in ["mass", "mean", "covariance", "grid"] {
        assert_eq!(sidecar[key], moments[key], "{key}");
    }
    let cov = &moments["covariance"];
    assert!((cov[0][0].as_f64().unwrap() - 0.25).abs() < 0.1);
    assert!((cov[1][1].as_f64().unwrap() - 0.75).abs() < 0.15);
}

fn write_uniform_coeffs(dir: &Path) -> PathBuf {
    let y0 = -(1.0 / (2.0 * std::f64::consts::PI).powi(2)).ln_1p();
    let path = dir.join("uniform.json");
    let text = format!(r#"{{ "dim": 2, "radius": 1, "entries": [[0, 0, {y0:e}, 0.0]], "shift": true }}"#);
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn evaluate_constant_solution() {
    let dir = TempDir::new().unwrap();
    let coeffs = write_uniform_coeffs(dir.path());
    for points in ["2", "16"] {
        let out = wdensity(
            dir.path(),
            &["--grid", points, "evaluate", "--coeffs", coeffs.to_str().unwrap()],
        );
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
        let text = std::fs::read_to_string(dir.path().join("grid.csv")).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("x1,x2,density"));
        let expect = (2.0 * std::f64::consts::PI).powi(-2);
        let n: usize = points.parse().unwrap();
        let mut rows = 0;
        for line in lines {
            let v: f64 = line.rsplit(',').next().unwrap().parse().unwrap();
            assert!((v - expect).abs() < 1e-12);
            rows += 1;
        }
        assert_eq!(rows, n * n);
    }
}

#[test]
fn moments_of_uniform() {
    let dir = TempDir::new().unwrap();
    let coeffs = write_uniform_coeffs(dir.path());
    let out = wdensity(dir.path(), &["moments", "--coeffs", coeffs.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let m = read(&dir.path().join("moments.json"));
    let var = std::f64::consts::PI.powi(2) / 3.0;
    for k in 0..2 {
        assert!(m["mean"][k].as_f64().unwrap().abs() < 1e-6);
        assert!((m["covariance"][k][k].as_f64().unwrap() - var).abs() < 1e-6);
    }
    assert!(m["covariance"][0][1].as_f64().unwrap().abs() < 1e-6);
}

#[test]
fn degenerate_and_malformed_coefficients() {
    let dir = TempDir::new().unwrap();
    let zero = dir.path().join("zero.json");
    std::fs::write(&zero, r#"{ "dim": 2, "radius": 1, "entries": [], "shift": true }"#).unwrap();
    assert_eq!(
        code(&wdensity(dir.path(), &["evaluate", "--coeffs", zero.to_str().unwrap()])),
        3
    );
    assert_eq!(
        code(&wdensity(dir.path(), &["moments", "--coeffs", zero.to_str().unwrap()])),
        3
    );

    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{ \"dim\": 2,").unwrap();
    assert_eq!(
        code(&wdensity(dir.path(), &["moments", "--coeffs", bad.to_str().unwrap()])),
        2
    );
    let missing = dir.path().join("missing.json");
    assert_eq!(
        code(&wdensity(
            dir.path(),
            &["moments", "--coeffs", missing.to_str().unwrap()]
        )),
        2
    );
}
