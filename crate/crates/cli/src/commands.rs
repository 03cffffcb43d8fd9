use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use fracpow_core::error_control::tolerance_floor;
use fracpow_core::experiment::{
    bound_trace as run_bound_trace, run_verify_grid, threshold_table, write_threshold_csv,
    write_trace_csv, write_verify_csv, MatrixSpec, TraceOptions, VerifyGrid,
};
use fracpow_core::mmio::AnyMatrix;
use fracpow_core::oracle::SpectralOracle;
use fracpow_core::quadrature::{select_node_count_with, DeParams, ProbeSpec};
use fracpow_core::scalar::norm2;
use fracpow_core::spectral::{estimate_spectral_bounds_with, SpectralOptions};
use fracpow_core::{
    fracpow_action_with, ActionOptions, ActionResult, Error, ErrorBudget, Family,
    HermitianSparseMatrix, Scalar,
};
use serde_json::{json, Value};

use crate::args::{ComputeArgs, Format, RunArgs, TraceArgs, VerifyArgs};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok = 0,
    InputError = 1,
    Uncertified = 2,
    VerificationFailed = 3,
}

type CmdResult = Result<Status, Error>;

/// Slack allowed when comparing a measured error against its bound.
const TRACE_SLACK: f64 = 1e-12;

fn output_format(format: Option<Format>, out: Option<&Path>, default: Format) -> Format {
    format.unwrap_or_else(|| match out.and_then(|p| p.extension()).and_then(|e| e.to_str()) {
        Some("json") => Format::Json,
        Some("csv") => Format::Csv,
        _ => default,
    })
}

fn emit(out: Option<&Path>, content: &str) -> Result<(), Error> {
    match out {
        Some(path) => fs::write(path, content)?,
        None => print!("{content}"),
    }
    Ok(())
}

/// Run metadata goes next to the data file so the data stays byte-stable.
fn write_sidecar(out: Option<&Path>, command: &str, params: Value, started: Instant) -> Result<(), Error> {
    let Some(path) = out else { return Ok(()) };
    let mut name = path.as_os_str().to_owned();
    name.push(".meta.json");
    let unix = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let meta = json!({
        "command": command,
        "version": env!("CARGO_PKG_VERSION"),
        "parameters": params,
        "elapsed_seconds": started.elapsed().as_secs_f64(),
        "finished_unix": unix,
    });
    fs::write(PathBuf::from(name), serde_json::to_string_pretty(&meta)? + "\n")?;
    Ok(())
}

fn read_rhs<T: Scalar>(path: &Path, n: usize) -> Result<Vec<T>, Error> {
    let text = fs::read_to_string(path)?;
    let bad = |line: usize, msg: String| Error::InvalidArgument(format!("{}:{line}: {msg}", path.display()));
    let mut values = Vec::with_capacity(n);
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('%') || line.starts_with('#') {
            continue;
        }
        let parts: Vec<f64> = line
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
            .map(|t| t.parse::<f64>().map_err(|_| bad(i + 1, format!("cannot parse '{t}'"))))
            .collect::<Result<_, _>>()?;
        let v = match parts.as_slice() {
            [re] => T::from_real(*re),
            [re, im] => T::from_parts(*re, *im)
                .ok_or_else(|| bad(i + 1, "complex value for a real matrix".into()))?,
            _ => return Err(bad(i + 1, "expected one value (or re im) per line".into())),
        };
        values.push(v);
    }
    if values.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: values.len(),
        });
    }
    Ok(values)
}

fn load_rhs<T: Scalar>(rhs: Option<&Path>, n: usize) -> Result<Vec<T>, Error> {
    match rhs {
        Some(p) => read_rhs(p, n),
        None => Ok(vec![T::from_real(1.0); n]),
    }
}

fn budget_of(run: &RunArgs) -> Result<ErrorBudget, Error> {
    ErrorBudget::with_shares(run.eps, run.quad_share, run.solve_share)
}

fn run_params(run: &RunArgs) -> Value {
    json!({
        "matrix": run.matrix.to_string(),
        "alpha": run.alpha,
        "eps": run.eps,
        "family": Family::from(run.family),
        "quad_share": run.quad_share,
        "solve_share": run.solve_share,
        "rhs": run.rhs.as_ref().map(|p| p.display().to_string()),
        "seed": run.seed,
    })
}

pub fn compute(args: &ComputeArgs) -> CmdResult {
    let started = Instant::now();
    let run = &args.run;
    let budget = budget_of(run)?;
    let opts = ActionOptions {
        spectral: SpectralOptions {
            seed: run.seed,
            ..Default::default()
        },
        max_iterations: args.max_iter,
        ..Default::default()
    };
    let (content, summary, certified) = match run.matrix.build()? {
        AnyMatrix::Real(a) => compute_typed(&a, run, budget, &opts)?,
        AnyMatrix::Complex(a) => compute_typed(&a, run, budget, &opts)?,
    };
    emit(run.out.as_deref(), &content)?;
    let mut params = run_params(run);
    params["max_iter"] = json!(args.max_iter);
    write_sidecar(run.out.as_deref(), "compute", params, started)?;
    eprintln!("{summary}");
    Ok(if certified { Status::Ok } else { Status::Uncertified })
}

fn compute_typed<T: Scalar>(
    a: &HermitianSparseMatrix<T>,
    run: &RunArgs,
    budget: ErrorBudget,
    opts: &ActionOptions,
) -> Result<(String, String, bool), Error> {
    let b: Vec<T> = load_rhs(run.rhs.as_deref(), a.n())?;
    let res = fracpow_action_with(a, &b, run.alpha, budget, run.family.into(), opts)?;
    let content = match output_format(run.format, run.out.as_deref(), Format::Json) {
        Format::Json => res.to_json()? + "\n",
        Format::Csv => node_csv(&res),
    };
    let failed = res.report.shifts.iter().filter(|s| !s.converged).count();
    let summary = format!(
        "m = {}, total matvecs = {}, error bound sum = {:e}, certified = {}{}",
        res.m(),
        res.report.total_matvecs,
        res.error_bound_sum,
        res.certified,
        if failed > 0 {
            format!(" ({failed} nodes missed their threshold)")
        } else {
            String::new()
        }
    );
    Ok((content, summary, res.certified))
}

fn node_csv<T: Scalar>(res: &ActionResult<T>) -> String {
    let mut s = String::from("k,sigma,omega,threshold,residual,iterations,converged\n");
    for (k, ((node, tau), o)) in res
        .rule
        .nodes()
        .iter()
        .zip(&res.thresholds)
        .zip(&res.report.shifts)
        .enumerate()
    {
        let _ = writeln!(
            s,
            "{},{:.16e},{:.16e},{:.16e},{:.16e},{},{}",
            k + 1,
            node.shift,
            node.weight,
            tau,
            o.final_residual_norm,
            o.iterations_used,
            o.converged
        );
    }
    s
}

pub fn thresholds(run: &RunArgs) -> CmdResult {
    let started = Instant::now();
    let budget = budget_of(run)?;
    let spectral = SpectralOptions {
        seed: run.seed,
        ..Default::default()
    };
    let (est, b_norm) = match run.matrix.build()? {
        AnyMatrix::Real(a) => {
            let b: Vec<f64> = load_rhs(run.rhs.as_deref(), a.n())?;
            (estimate_spectral_bounds_with(&a, &spectral)?, norm2(&b))
        }
        AnyMatrix::Complex(a) => {
            let b: Vec<num_complex::Complex64> = load_rhs(run.rhs.as_deref(), a.n())?;
            (estimate_spectral_bounds_with(&a, &spectral)?, norm2(&b))
        }
    };
    let bounds = est.bounds;
    let floor = tolerance_floor(b_norm, run.alpha, bounds.lambda_hi);
    if run.eps < floor {
        return Err(Error::ToleranceBelowFloor {
            epsilon: run.eps,
            floor,
        });
    }
    let scalar_budget = if b_norm > 0.0 { budget.quad() / b_norm } else { budget.quad() };
    let probe = ProbeSpec::from_bounds(bounds, scalar_budget)?;
    let de = DeParams {
        budget: scalar_budget,
        ..Default::default()
    };
    let rule = select_node_count_with(run.family.into(), run.alpha, bounds, &probe, Some(&de))?.rule;
    let rows = threshold_table(&rule, &budget, bounds.lambda_hi)?;
    let content = match output_format(run.format, run.out.as_deref(), Format::Csv) {
        Format::Csv => {
            let mut buf = Vec::new();
            write_threshold_csv(&rows, &mut buf)?;
            String::from_utf8(buf).expect("CSV is ASCII")
        }
        Format::Json => serde_json::to_string_pretty(&json!({
            "alpha": run.alpha,
            "epsilon": run.eps,
            "family": rule.family(),
            "m": rule.m(),
            "lambda_bounds": [bounds.lambda_lo, bounds.lambda_hi],
            "nodes": rows,
        }))? + "\n",
    };
    emit(run.out.as_deref(), &content)?;
    write_sidecar(run.out.as_deref(), "thresholds", run_params(run), started)?;
    eprintln!("m = {}, lambda bounds [{:e}, {:e}]", rule.m(), bounds.lambda_lo, bounds.lambda_hi);
    Ok(Status::Ok)
}

pub fn bound_trace(args: &TraceArgs) -> CmdResult {
    let started = Instant::now();
    let a = args.matrix.build_real()?;
    let b: Vec<f64> = load_rhs(args.rhs.as_deref(), a.n())?;
    let oracle = SpectralOracle::new(&a)?;
    let spectral = SpectralOptions {
        seed: args.seed,
        ..Default::default()
    };
    let lambda_hi = estimate_spectral_bounds_with(&a, &spectral)?.bounds.lambda_hi;
    let opts = TraceOptions {
        max_iterations: args.max_iter,
        ..Default::default()
    };
    let rows = run_bound_trace(&a, &b, &args.shifts, lambda_hi, &oracle, &opts)?;
    let violations = rows
        .iter()
        .filter(|r| !(r.measured_error <= r.prop1_bound + TRACE_SLACK))
        .count();
    let content = match output_format(args.format, args.out.as_deref(), Format::Csv) {
        Format::Csv => {
            let mut buf = Vec::new();
            write_trace_csv(&rows, &mut buf)?;
            String::from_utf8(buf).expect("CSV is ASCII")
        }
        Format::Json => serde_json::to_string_pretty(&rows)? + "\n",
    };
    emit(args.out.as_deref(), &content)?;
    let params = json!({
        "matrix": args.matrix.to_string(),
        "shifts": args.shifts,
        "lambda_hi": lambda_hi,
        "rhs": args.rhs.as_ref().map(|p| p.display().to_string()),
    });
    write_sidecar(args.out.as_deref(), "bound-trace", params, started)?;
    eprintln!("{} rows, {violations} violations", rows.len());
    Ok(if violations == 0 { Status::Ok } else { Status::VerificationFailed })
}

pub fn verify(args: &VerifyArgs) -> CmdResult {
    let started = Instant::now();
    let defaults = VerifyGrid::default();
    let grid = VerifyGrid {
        matrices: if args.matrices.is_empty() {
            defaults.matrices
        } else {
            args.matrices.clone()
        },
        alphas: args.alphas.clone(),
        epsilons: args.epsilons.clone(),
        families: args.families.iter().map(|&f| f.into()).collect(),
        quad_share: args.quad_share,
        solve_share: args.solve_share,
    };
    ErrorBudget::with_shares(1.0, grid.quad_share, grid.solve_share)?;
    let cells = run_verify_grid(&grid, args.jobs)?;
    let content = match output_format(args.format, args.out.as_deref(), Format::Csv) {
        Format::Csv => {
            let mut buf = Vec::new();
            write_verify_csv(&cells, &mut buf)?;
            String::from_utf8(buf).expect("CSV is ASCII")
        }
        Format::Json => serde_json::to_string_pretty(&cells)? + "\n",
    };
    emit(args.out.as_deref(), &content)?;
    let params = json!({
        "matrices": grid.matrices.iter().map(MatrixSpec::to_string).collect::<Vec<_>>(),
        "alphas": grid.alphas,
        "epsilons": grid.epsilons,
        "families": grid.families,
        "quad_share": grid.quad_share,
        "solve_share": grid.solve_share,
        "jobs": args.jobs,
    });
    write_sidecar(args.out.as_deref(), "verify", params, started)?;
    let failing: Vec<_> = cells.iter().filter(|c| !c.pass).collect();
    eprintln!("{} of {} cells pass", cells.len() - failing.len(), cells.len());
    for c in &failing {
        eprintln!(
            "FAIL {} alpha={} eps={:e} {}: error={:e}{}",
            c.matrix,
            c.alpha,
            c.epsilon,
            c.family,
            c.error,
            c.failure.as_deref().map(|f| format!(" ({f})")).unwrap_or_default()
        );
    }
    Ok(if failing.is_empty() { Status::Ok } else { Status::VerificationFailed })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn format_from_extension() {
        assert_eq!(output_format(None, Some(Path::new("a.csv")), Format::Json), Format::Csv);
        assert_eq!(output_format(None, Some(Path::new("a.json")), Format::Csv), Format::Json);
        assert_eq!(output_format(None, None, Format::Csv), Format::Csv);
        assert_eq!(output_format(Some(Format::Json), Some(Path::new("a.csv")), Format::Csv), Format::Json);
    }

    #[test]
    fn rhs_parsing() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("b.txt");
        fs::write(&p, "# comment\n1.5\n-2\n\n3e-1\n").unwrap();
        let b: Vec<f64> = read_rhs(&p, 3).unwrap();
        assert_eq!(b, vec![1.5, -2.0, 0.3]);
        assert!(read_rhs::<f64>(&p, 4).is_err());
        fs::write(&p, "1 2\n").unwrap();
        assert!(read_rhs::<f64>(&p, 1).is_err());
        let c: Vec<num_complex::Complex64> = read_rhs(&p, 1).unwrap();
        assert_eq!(c[0], num_complex::Complex64::new(1.0, 2.0));
    }
}
