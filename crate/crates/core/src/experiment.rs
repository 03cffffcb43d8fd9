//! Reproducible experiment drivers: matrix specs, the verification grid,
//! Krylov bound traces and threshold tables. The CLI and the acceptance
//! suite both go through these.

use std::collections::HashMap;
use std::fmt;
use std::fs::File;
use std::io::{BufReader, Write};
use std::path::PathBuf;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::error_control::{
    fracpow_action_with, prop1_coefficient, residual_thresholds, ActionOptions, ErrorBudget,
};
use crate::mmio::{read_matrix_market_any, AnyMatrix};
use crate::oracle::{absolute_error, SpectralOracle};
use crate::quadrature::{Family, ShiftedQuadratureRule};
use crate::scalar::norm2;
use crate::shifted_cg::PlainCg;
use crate::sparse::HermitianSparseMatrix;

/// Matrix source: `lap1d:<n>`, `lap2d:<nx>x<ny>`, `mm:<path>` or `diag:<v1,v2,...>`.
#[derive(Debug, Clone, PartialEq)]
pub enum MatrixSpec {
    Lap1d(usize),
    Lap2d(usize, usize),
    MatrixMarket(PathBuf),
    Diag(Vec<f64>),
}

impl FromStr for MatrixSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, arg) = s
            .split_once(':')
            .ok_or_else(|| invalid(format!("matrix spec '{s}' must look like kind:args")))?;
        let size = |t: &str| -> Result<usize> {
            let v: usize = t
                .trim()
                .parse()
                .map_err(|_| invalid(format!("bad size '{t}' in matrix spec '{s}'")))?;
            if v == 0 {
                return Err(invalid(format!("zero dimension in matrix spec '{s}'")));
            }
            Ok(v)
        };
        match kind.to_ascii_lowercase().as_str() {
            "lap1d" => Ok(MatrixSpec::Lap1d(size(arg)?)),
            "lap2d" => {
                let (nx, ny) = arg
                    .split_once(['x', 'X'])
                    .ok_or_else(|| invalid(format!("lap2d spec needs <nx>x<ny>, got '{arg}'")))?;
                Ok(MatrixSpec::Lap2d(size(nx)?, size(ny)?))
            }
            "mm" => {
                if arg.is_empty() {
                    return Err(invalid("mm spec needs a path"));
                }
                Ok(MatrixSpec::MatrixMarket(PathBuf::from(arg)))
            }
            "diag" => {
                let vals = arg
                    .split(',')
                    .map(|t| {
                        t.trim()
                            .parse::<f64>()
                            .map_err(|_| invalid(format!("bad diagonal entry '{t}'")))
                    })
                    .collect::<Result<Vec<f64>>>()?;
                Ok(MatrixSpec::Diag(vals))
            }
            other => Err(invalid(format!("unknown matrix kind '{other}'"))),
        }
    }
}

impl fmt::Display for MatrixSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MatrixSpec::Lap1d(n) => write!(f, "lap1d:{n}"),
            MatrixSpec::Lap2d(nx, ny) => write!(f, "lap2d:{nx}x{ny}"),
            MatrixSpec::MatrixMarket(p) => write!(f, "mm:{}", p.display()),
            MatrixSpec::Diag(v) => {
                let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
                write!(f, "diag:{}", parts.join(","))
            }
        }
    }
}

impl MatrixSpec {
    pub fn build(&self) -> Result<AnyMatrix> {
        Ok(match self {
            MatrixSpec::Lap1d(n) => AnyMatrix::Real(HermitianSparseMatrix::laplacian_1d(*n)?),
            MatrixSpec::Lap2d(nx, ny) => AnyMatrix::Real(HermitianSparseMatrix::laplacian_2d(*nx, *ny)?),
            MatrixSpec::Diag(v) => AnyMatrix::Real(HermitianSparseMatrix::diagonal(v)?),
            MatrixSpec::MatrixMarket(path) => {
                let file = File::open(path)?;
                read_matrix_market_any(BufReader::new(file))?
            }
        })
    }

    /// Builds the matrix, failing for complex Matrix Market input.
    pub fn build_real(&self) -> Result<HermitianSparseMatrix<f64>> {
        match self.build()? {
            AnyMatrix::Real(a) => Ok(a),
            AnyMatrix::Complex(_) => Err(invalid(format!("{self} is complex; a real matrix is required"))),
        }
    }
}

/// The all-ones right-hand side.
pub fn ones(n: usize) -> Vec<f64> {
    vec![1.0; n]
}

/// Grid of verification runs. The default is the full reference grid on
/// lap1d:1000 and lap2d:32x32.
#[derive(Debug, Clone)]
pub struct VerifyGrid {
    pub matrices: Vec<MatrixSpec>,
    pub alphas: Vec<f64>,
    pub epsilons: Vec<f64>,
    pub families: Vec<Family>,
    pub quad_share: f64,
    pub solve_share: f64,
}

impl Default for VerifyGrid {
    fn default() -> Self {
        Self {
            matrices: vec![MatrixSpec::Lap1d(1000), MatrixSpec::Lap2d(32, 32)],
            alphas: vec![0.2, 0.5],
            epsilons: vec![1e-3, 1e-6, 1e-9],
            families: Family::ALL.to_vec(),
            quad_share: 0.5,
            solve_share: 0.5,
        }
    }
}

impl VerifyGrid {
    pub fn len(&self) -> usize {
        self.matrices.len() * self.alphas.len() * self.epsilons.len() * self.families.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CellResult {
    pub matrix: String,
    pub alpha: f64,
    pub epsilon: f64,
    pub family: Family,
    pub m: usize,
    pub error: f64,
    pub error_bound_sum: f64,
    pub total_matvecs: usize,
    pub certified: bool,
    pub pass: bool,
    /// Set when the cell could not be computed at all.
    pub failure: Option<String>,
}

/// Runs every grid cell against a dense reference computed once per matrix
/// and exponent. Output order follows the grid nesting
/// `matrix > alpha > epsilon > family` regardless of `jobs`.
pub fn run_verify_grid(grid: &VerifyGrid, jobs: Option<usize>) -> Result<Vec<CellResult>> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(j) = jobs {
        builder = builder.num_threads(j.max(1));
    }
    let pool = builder
        .build()
        .map_err(|e| invalid(format!("cannot start worker pool: {e}")))?;
    pool.install(|| {
        let mut out = Vec::with_capacity(grid.len());
        for spec in &grid.matrices {
            let a = spec.build_real()?;
            let b = ones(a.n());
            let oracle = SpectralOracle::new(&a)?;
            let refs: HashMap<u64, Vec<f64>> = grid
                .alphas
                .iter()
                .map(|&al| Ok((al.to_bits(), oracle.fracpow(&b, al)?)))
                .collect::<Result<_>>()?;
            let cells: Vec<(f64, f64, Family)> = grid
                .alphas
                .iter()
                .flat_map(|&al| {
                    grid.epsilons
                        .iter()
                        .flat_map(move |&e| grid.families.iter().map(move |&f| (al, e, f)))
                })
                .collect();
            let name = spec.to_string();
            let results: Vec<CellResult> = cells
                .par_iter()
                .map(|&(alpha, epsilon, family)| {
                    let y_ref = &refs[&alpha.to_bits()];
                    run_cell(&a, &b, y_ref, &name, alpha, epsilon, family, grid)
                })
                .collect();
            out.extend(results);
        }
        Ok(out)
    })
}

#[allow(clippy::too_many_arguments)]
fn run_cell(
    a: &HermitianSparseMatrix<f64>,
    b: &[f64],
    y_ref: &[f64],
    name: &str,
    alpha: f64,
    epsilon: f64,
    family: Family,
    grid: &VerifyGrid,
) -> CellResult {
    let mut cell = CellResult {
        matrix: name.to_string(),
        alpha,
        epsilon,
        family,
        m: 0,
        error: f64::NAN,
        error_bound_sum: f64::NAN,
        total_matvecs: 0,
        certified: false,
        pass: false,
        failure: None,
    };
    let outcome = ErrorBudget::with_shares(epsilon, grid.quad_share, grid.solve_share)
        .and_then(|budget| fracpow_action_with(a, b, alpha, budget, family, &ActionOptions::default()));
    match outcome {
        Ok(res) => {
            cell.m = res.m();
            cell.error = absolute_error(&res.y, y_ref).unwrap_or(f64::NAN);
            cell.error_bound_sum = res.error_bound_sum;
            cell.total_matvecs = res.report.total_matvecs;
            cell.certified = res.certified;
            cell.pass = cell.error <= epsilon;
        }
        Err(e) => cell.failure = Some(e.to_string()),
    }
    log::info!(
        "{name} alpha={alpha} eps={epsilon:e} {family}: m={} error={:e} pass={}",
        cell.m,
        cell.error,
        cell.pass
    );
    cell
}

/// Writes the verification table as CSV.
pub fn write_verify_csv<W: Write>(cells: &[CellResult], mut w: W) -> Result<()> {
    writeln!(w, "matrix,alpha,epsilon,family,m,error,error_bound_sum,total_matvecs,certified,pass")?;
    for c in cells {
        writeln!(
            w,
            "{},{},{:e},{},{},{:.16e},{:.16e},{},{},{}",
            c.matrix, c.alpha, c.epsilon, c.family, c.m, c.error, c.error_bound_sum, c.total_matvecs, c.certified, c.pass
        )?;
    }
    Ok(())
}

/// One iteration of plain CG on `(sigma I + A) x = b`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct TraceRow {
    pub iteration: usize,
    pub shift: f64,
    /// `||A (sigma I + A)^{-1} b - A x_i||` against the dense reference.
    pub measured_error: f64,
    /// `prop1_coefficient(sigma, lambda_hi) * ||b - (sigma I + A) x_i||`.
    pub prop1_bound: f64,
    pub residual_norm: f64,
}

#[derive(Debug, Clone)]
pub struct TraceOptions {
    /// Stop a shift once its explicit residual drops below this.
    pub stop_residual: f64,
    /// Per-shift iteration cap; `None` means `2 n`.
    pub max_iterations: Option<usize>,
}

impl Default for TraceOptions {
    fn default() -> Self {
        Self {
            stop_residual: 1e-12,
            max_iterations: None,
        }
    }
}

/// CG trace comparing the measured contribution error with the
/// residual-based bound, for each shift independently.
pub fn bound_trace(
    a: &HermitianSparseMatrix<f64>,
    b: &[f64],
    shifts: &[f64],
    lambda_hi: f64,
    oracle: &SpectralOracle,
    opts: &TraceOptions,
) -> Result<Vec<TraceRow>> {
    let n = a.n();
    let cap = opts.max_iterations.unwrap_or(2 * n);
    let b_norm = norm2(b);
    let per_shift: Vec<Vec<TraceRow>> = shifts
        .par_iter()
        .map(|&sigma| -> Result<Vec<TraceRow>> {
            let coef = prop1_coefficient(sigma, lambda_hi)?;
            let exact = oracle.shifted_resolvent_action(b, sigma)?;
            let mut cg = PlainCg::new(a, b, sigma)?;
            let mut rows = Vec::new();
            let mut ax = vec![0.0; n];
            loop {
                let x = cg.solution();
                a.matvec_into(x, &mut ax)?;
                let err: Vec<f64> = exact.iter().zip(&ax).map(|(e, v)| e - v).collect();
                let res: Vec<f64> = b
                    .iter()
                    .zip(&ax)
                    .zip(x)
                    .map(|((bi, axi), xi)| bi - axi - sigma * xi)
                    .collect();
                let residual_norm = norm2(&res);
                rows.push(TraceRow {
                    iteration: cg.iteration(),
                    shift: sigma,
                    measured_error: norm2(&err),
                    prop1_bound: coef * residual_norm,
                    residual_norm,
                });
                // the recursive residual also ends the trace once it is far
                // below anything the explicit one can resolve
                if residual_norm < opts.stop_residual
                    || cg.iteration() >= cap
                    || cg.residual_norm() <= 1e-3 * f64::EPSILON * b_norm
                {
                    break;
                }
                cg.step()?;
            }
            Ok(rows)
        })
        .collect::<Result<_>>()?;
    Ok(per_shift.into_iter().flatten().collect())
}

pub fn write_trace_csv<W: Write>(rows: &[TraceRow], mut w: W) -> Result<()> {
    writeln!(w, "iteration,shift,measured_error,prop1_bound,residual_norm")?;
    for r in rows {
        writeln!(
            w,
            "{},{:e},{:.16e},{:.16e},{:.16e}",
            r.iteration, r.shift, r.measured_error, r.prop1_bound, r.residual_norm
        )?;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ThresholdRow {
    /// 1-based node index.
    pub k: usize,
    pub sigma: f64,
    pub omega: f64,
    pub tau: f64,
}

/// Residual threshold of every node of `rule`.
pub fn threshold_table(
    rule: &ShiftedQuadratureRule,
    budget: &ErrorBudget,
    lambda_hi: f64,
) -> Result<Vec<ThresholdRow>> {
    let taus = residual_thresholds(rule, budget, lambda_hi)?;
    Ok(rule
        .nodes()
        .iter()
        .zip(taus)
        .enumerate()
        .map(|(k, (node, tau))| ThresholdRow {
            k: k + 1,
            sigma: node.shift,
            omega: node.weight,
            tau,
        })
        .collect())
}

pub fn write_threshold_csv<W: Write>(rows: &[ThresholdRow], mut w: W) -> Result<()> {
    writeln!(w, "k,sigma,omega,tau")?;
    for r in rows {
        writeln!(w, "{},{:.16e},{:.16e},{:.16e}", r.k, r.sigma, r.omega, r.tau)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{select_node_count, ProbeSpec};
    use crate::spectral::estimate_spectral_bounds;

    #[test]
    fn parse_specs() {
        assert_eq!("lap1d:1000".parse::<MatrixSpec>().unwrap(), MatrixSpec::Lap1d(1000));
        assert_eq!("lap2d:32x16".parse::<MatrixSpec>().unwrap(), MatrixSpec::Lap2d(32, 16));
        assert_eq!(
            "diag:1,4.5".parse::<MatrixSpec>().unwrap(),
            MatrixSpec::Diag(vec![1.0, 4.5])
        );
        assert_eq!(
            "mm:./A.mtx".parse::<MatrixSpec>().unwrap(),
            MatrixSpec::MatrixMarket(PathBuf::from("./A.mtx"))
        );
        for bad in ["lap1d:0", "lap2d:3", "foo:1", "lap1d", "diag:1,x", "mm:"] {
            assert!(bad.parse::<MatrixSpec>().is_err(), "{bad}");
        }
        for s in ["lap1d:7", "lap2d:3x4", "diag:1,2"] {
            assert_eq!(s.parse::<MatrixSpec>().unwrap().to_string(), s);
        }
    }

    #[test]
    fn small_grid_passes() {
        let grid = VerifyGrid {
            matrices: vec![MatrixSpec::Lap1d(40), MatrixSpec::Lap2d(5, 6)],
            alphas: vec![0.5],
            epsilons: vec![1e-1, 1e-6],
            families: Family::ALL.to_vec(),
            ..Default::default()
        };
        let cells = run_verify_grid(&grid, Some(2)).unwrap();
        assert_eq!(cells.len(), 12);
        assert!(cells.iter().all(|c| c.pass), "{cells:?}");
        assert_eq!(cells[3].matrix, "lap1d:40");
        assert_eq!(cells[3].epsilon, 1e-6);
        assert_eq!(cells[6].matrix, "lap2d:5x6");
    }

    #[test]
    fn zero_shift_bound_is_residual() {
        let a = HermitianSparseMatrix::laplacian_2d(6, 6).unwrap();
        let b = ones(a.n());
        let oracle = SpectralOracle::new(&a).unwrap();
        let rows = bound_trace(&a, &b, &[0.0, 10.0], 8.0, &oracle, &TraceOptions::default()).unwrap();
        for r in &rows {
            if r.shift == 0.0 {
                assert_eq!(r.prop1_bound, r.residual_norm);
            }
            assert!(r.measured_error <= r.prop1_bound + 1e-12, "{r:?}");
        }
    }

    #[test]
    fn thresholds_scale_with_epsilon() {
        let a = HermitianSparseMatrix::laplacian_1d(50).unwrap();
        let bounds = estimate_spectral_bounds(&a, 50).unwrap();
        let probe = ProbeSpec::from_bounds(bounds, 1e-8).unwrap();
        let rule = select_node_count(Family::De, 0.2, bounds, &probe).unwrap();
        let t1 = threshold_table(&rule, &ErrorBudget::new(1e-9).unwrap(), bounds.lambda_hi).unwrap();
        let t2 = threshold_table(&rule, &ErrorBudget::new(2e-9).unwrap(), bounds.lambda_hi).unwrap();
        assert_eq!(t1[0].k, 1);
        for (x, y) in t1.iter().zip(&t2) {
            assert_eq!(2.0 * x.tau, y.tau);
        }
    }
}
