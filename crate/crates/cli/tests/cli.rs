use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn fracpow(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fracpow"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn compute_certified_json() {
    let o = fracpow(&["compute", "--matrix", "lap1d:100", "--alpha", "0.5", "--eps", "1e-6", "--family", "gj2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["certified"], true);
    assert_eq!(v["family"], "gj2");
    let m = v["m"].as_u64().unwrap() as usize;
    assert_eq!(v["per_node"].as_array().unwrap().len(), m);
    assert_eq!(v["y"].as_array().unwrap().len(), 100);
    assert!(v["error_bound_sum"].as_f64().unwrap() <= 0.5e-6);
    assert!(stderr(&o).contains("total matvecs"));
}

#[test]
fn tolerance_below_floor_is_input_error() {
    let o = fracpow(&["compute", "--matrix", "lap1d:100", "--alpha", "0.5", "--eps", "1e-40"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("tolerance below double-precision floor"), "{}", stderr(&o));
}

#[test]
fn bad_arguments_are_input_errors() {
    let o = fracpow(&["compute", "--matrix", "lap1d:10", "--alpha", "1.5", "--eps", "1e-6"]);
    assert_eq!(o.status.code(), Some(1));
    let o = fracpow(&["compute", "--matrix", "diag:1,-2,3", "--alpha", "0.5", "--eps", "1e-6"]);
    assert_eq!(o.status.code(), Some(1));
    let o = fracpow(&["compute", "--matrix", "mm:/nonexistent.mtx", "--alpha", "0.5", "--eps", "1e-6"]);
    assert_eq!(o.status.code(), Some(1));
    let o = fracpow(&["compute", "--matrix", "lap1d:10", "--alpha", "0.5", "--eps", "1e-6", "--quad-share", "0.7"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn iteration_cap_is_uncertified() {
    let o = fracpow(&[
        "compute", "--matrix", "lap1d:200", "--alpha", "0.5", "--eps", "1e-8", "--max-iter", "3",
    ]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["certified"], false);
}

#[test]
fn matrix_market_and_rhs_files() {
    let dir = tempfile::tempdir().unwrap();
    let mtx = dir.path().join("a.mtx");
    fs::write(
        &mtx,
        "%%MatrixMarket matrix coordinate real symmetric\n3 3 4\n1 1 2\n2 1 -1\n2 2 2\n3 3 4\n",
    )
    .unwrap();
    let rhs = dir.path().join("b.txt");
    fs::write(&rhs, "1\n0\n2\n").unwrap();
    let out = dir.path().join("y.json");
    let spec = format!("mm:{}", mtx.display());
    let o = fracpow(&[
        "compute", "--matrix", &spec, "--alpha", "0.5", "--eps", "1e-9", "--family", "gj2",
        "--rhs", rhs.to_str().unwrap(), "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(o.stdout.is_empty());
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    let y: Vec<f64> = v["y"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    // Third unknown decouples: 4^0.5 * 2.
    assert!((y[2] - 4.0).abs() < 1e-9);
    let meta = dir.path().join("y.json.meta.json");
    let meta: serde_json::Value = serde_json::from_str(&fs::read_to_string(meta).unwrap()).unwrap();
    assert_eq!(meta["command"], "compute");
    assert!(meta["elapsed_seconds"].as_f64().is_some());
}

#[test]
fn complex_matrix_market() {
    let dir = tempfile::tempdir().unwrap();
    let mtx = dir.path().join("h.mtx");
    fs::write(
        &mtx,
        "%%MatrixMarket matrix coordinate complex hermitian\n2 2 3\n1 1 2 0\n2 1 0 1\n2 2 2 0\n",
    )
    .unwrap();
    let spec = format!("mm:{}", mtx.display());
    let o = fracpow(&["compute", "--matrix", &spec, "--alpha", "0.5", "--eps", "1e-8"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["y"][0].as_array().unwrap().len(), 2);
}

fn run_to_file(dir: &Path, name: &str, args: &[&str]) -> Vec<u8> {
    let out = dir.join(name);
    let mut full: Vec<&str> = args.to_vec();
    let out_s = out.to_str().unwrap().to_owned();
    full.extend(["--out", &out_s]);
    let o = fracpow(&full);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    fs::read(out).unwrap()
}

#[test]
fn outputs_are_byte_stable() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["compute", "--matrix", "lap2d:10x10", "--alpha", "0.2", "--eps", "1e-6"];
    let a = run_to_file(dir.path(), "a.json", &args);
    let b = run_to_file(dir.path(), "b.json", &args);
    assert_eq!(a, b);
    let args = ["thresholds", "--matrix", "lap1d:300", "--alpha", "0.5", "--eps", "1e-6"];
    let a = run_to_file(dir.path(), "a.csv", &args);
    let b = run_to_file(dir.path(), "b.csv", &args);
    assert_eq!(a, b);
}

#[test]
fn csv_node_table() {
    let o = fracpow(&[
        "compute", "--matrix", "lap1d:50", "--alpha", "0.5", "--eps", "1e-6", "--format", "csv",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("k,sigma,omega,threshold,residual,iterations,converged"));
    assert!(lines.all(|l| l.split(',').count() == 7));
}

#[test]
fn thresholds_csv() {
    let o = fracpow(&["thresholds", "--matrix", "lap1d:100", "--alpha", "0.2", "--eps", "1e-9"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = String::from_utf8(o.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("k,sigma,omega,tau"));
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|t| t.parse().unwrap()).collect())
        .collect();
    assert!(!rows.is_empty());
    for (i, r) in rows.iter().enumerate() {
        assert_eq!(r[0] as usize, i + 1);
        assert!(r[2] > 0.0 && r[3] > 0.0);
    }
    assert!(rows.windows(2).all(|w| w[0][1] < w[1][1]));
}

#[test]
fn bound_trace_holds() {
    let o = fracpow(&["bound-trace", "--matrix", "lap2d:8x8", "--shifts", "0.1,10"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = String::from_utf8(o.stdout.clone()).unwrap();
    assert!(text.starts_with("iteration,shift,measured_error,prop1_bound,residual_norm\n"));
    assert!(text.lines().count() > 3);
    assert!(stderr(&o).contains("0 violations"));
}

#[test]
fn bound_trace_rejects_large_matrices() {
    let o = fracpow(&["bound-trace", "--matrix", "lap1d:5000"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn small_verify_grid() {
    let o = fracpow(&[
        "verify", "--matrix", "lap1d:60", "--alpha", "0.5", "--eps", "1e-4,1e-7", "--family", "gj2,de",
        "--format", "json",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let cells = v.as_array().unwrap();
    assert_eq!(cells.len(), 4);
    assert!(cells.iter().all(|c| c["pass"] == true));
    assert!(stderr(&o).contains("4 of 4 cells pass"));
}
