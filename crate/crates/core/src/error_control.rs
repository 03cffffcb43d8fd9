//! Error budget, per-node residual thresholds and the end-to-end driver.
//!
//! For a node with shift `sigma` and weight `omega`, an approximate solve
//! `x~` of `(sigma I + A) x = b` with residual `r` satisfies
//!
//! `||omega A (sigma I + A)^{-1} b - omega A x~|| <= omega ||r|| / (1 + sigma / lambda_max)`,
//!
//! so giving each of the `m` nodes an equal share of `solve_share * epsilon`
//! yields the threshold `tau_k = (solve_share eps / m) (1 + sigma_k / lambda_max) / omega_k`.

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{invalid, Error, Result};
use crate::quadrature::{
    build_rule, check_alpha, select_node_count_with, DeParams, Family, ProbeSpec,
    ShiftedQuadratureRule,
};
use crate::scalar::{axpy, norm2, Scalar};
use crate::shifted_cg::{shifted_cg_solve, ShiftedSolveReport, ShiftedSolveRequest};
use crate::sparse::HermitianSparseMatrix;
use crate::spectral::{estimate_spectral_bounds_with, SpectralBounds, SpectralEstimate, SpectralOptions};

/// Total tolerance `epsilon` split between quadrature and solve error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErrorBudget {
    pub epsilon: f64,
    pub quad_share: f64,
    pub solve_share: f64,
}

impl ErrorBudget {
    /// Even split.
    pub fn new(epsilon: f64) -> Result<Self> {
        Self::with_shares(epsilon, 0.5, 0.5)
    }

    pub fn with_shares(epsilon: f64, quad_share: f64, solve_share: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(invalid(format!("epsilon must be positive, got {epsilon}")));
        }
        let in_unit = |v: f64| v > 0.0 && v < 1.0;
        if !in_unit(quad_share) || !in_unit(solve_share) {
            return Err(invalid(format!(
                "budget shares must lie in (0, 1), got {quad_share} and {solve_share}"
            )));
        }
        if quad_share + solve_share > 1.0 + 1e-12 {
            return Err(invalid(format!(
                "budget shares sum to {} > 1",
                quad_share + solve_share
            )));
        }
        Ok(Self {
            epsilon,
            quad_share,
            solve_share,
        })
    }

    pub fn quad(&self) -> f64 {
        self.quad_share * self.epsilon
    }

    pub fn solve(&self) -> f64 {
        self.solve_share * self.epsilon
    }
}

/// `1 / (1 + sigma / lambda_max)`, the factor relating a node's residual to
/// its contribution error.
pub fn prop1_coefficient(sigma: f64, lambda_max: f64) -> Result<f64> {
    if !(sigma >= 0.0) {
        return Err(invalid(format!("shift must be >= 0, got {sigma}")));
    }
    if !(lambda_max > 0.0) {
        return Err(invalid(format!("lambda_max must be positive, got {lambda_max}")));
    }
    Ok(1.0 / (1.0 + sigma / lambda_max))
}

/// Residual target `tau_k` for node `k` (0-based) of `rule`.
pub fn residual_threshold(
    k: usize,
    rule: &ShiftedQuadratureRule,
    budget: &ErrorBudget,
    lambda_max: f64,
) -> Result<f64> {
    let node = rule
        .nodes()
        .get(k)
        .ok_or_else(|| invalid(format!("node index {k} out of range for m = {}", rule.m())))?;
    threshold_for(node.shift, node.weight, rule.m(), budget, lambda_max)
}

/// Thresholds for every node of `rule`.
pub fn residual_thresholds(
    rule: &ShiftedQuadratureRule,
    budget: &ErrorBudget,
    lambda_max: f64,
) -> Result<Vec<f64>> {
    (0..rule.m())
        .map(|k| residual_threshold(k, rule, budget, lambda_max))
        .collect()
}

fn threshold_for(sigma: f64, omega: f64, m: usize, budget: &ErrorBudget, lambda_max: f64) -> Result<f64> {
    if !(omega > 0.0) {
        return Err(invalid(format!("node weight must be positive, got {omega}")));
    }
    let c = prop1_coefficient(sigma, lambda_max)?;
    Ok(budget.solve() / m as f64 / (c * omega))
}

/// Certified bound `omega * ||r|| / (1 + sigma / lambda_max)` on one node's
/// contribution error.
pub fn node_error_bound(residual_norm: f64, sigma: f64, lambda_max: f64, omega: f64) -> f64 {
    omega * residual_norm / (1.0 + sigma / lambda_max)
}

/// How the number of quadrature nodes is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NodeCount {
    /// Smallest count passing the scalar probe.
    Select,
    /// Selected count multiplied by the factor, rounded up.
    Oversample(f64),
    Fixed(usize),
}

#[derive(Debug, Clone)]
pub struct ActionOptions {
    pub spectral: SpectralOptions,
    /// Cap on joint CG iterations; `None` means `10 n`.
    pub max_iterations: Option<usize>,
    pub node_count: NodeCount,
    /// Replaces every residual threshold by this value.
    pub threshold_override: Option<f64>,
    pub de_params: Option<DeParams>,
    pub record_history: bool,
}

impl Default for ActionOptions {
    fn default() -> Self {
        Self {
            spectral: SpectralOptions::default(),
            max_iterations: None,
            node_count: NodeCount::Select,
            threshold_override: None,
            de_params: None,
            record_history: false,
        }
    }
}

/// Output of [`fracpow_action`].
#[derive(Debug, Clone)]
pub struct ActionResult<T: Scalar = f64> {
    pub y: Vec<T>,
    pub alpha: f64,
    pub rule: ShiftedQuadratureRule,
    pub thresholds: Vec<f64>,
    pub report: ShiftedSolveReport,
    pub bounds: SpectralBounds,
    pub spectral: SpectralEstimate,
    pub budget: ErrorBudget,
    /// Scalar probe error of the rule; the probe target is `budget.quad() / ||b||`.
    pub probe_error: f64,
    /// `sum_k node_error_bound` over the explicit final residuals.
    pub error_bound_sum: f64,
    /// `probe_error * ||b|| + error_bound_sum`, an a posteriori estimate of
    /// the total error that holds as far as the probe covers the spectrum.
    pub total_error_bound: f64,
    /// Every node met its threshold and the summed bound fits the solve share.
    pub certified: bool,
}

impl<T: Scalar> ActionResult<T> {
    pub fn m(&self) -> usize {
        self.rule.m()
    }

    pub fn to_json_value(&self) -> Value {
        let per_node: Vec<Value> = self
            .rule
            .nodes()
            .iter()
            .zip(&self.thresholds)
            .zip(&self.report.shifts)
            .map(|((node, &tau), o)| {
                json!({
                    "sigma": node.shift,
                    "omega": node.weight,
                    "threshold": tau,
                    "residual": o.final_residual_norm,
                    "iterations": o.iterations_used,
                    "converged": o.converged,
                })
            })
            .collect();
        let y: Vec<Value> = self
            .y
            .iter()
            .map(|v| if T::IS_COMPLEX { json!([v.re(), v.im()]) } else { json!(v.re()) })
            .collect();
        json!({
            "alpha": self.alpha,
            "epsilon": self.budget.epsilon,
            "family": self.rule.family(),
            "m": self.m(),
            "lambda_bounds": [self.bounds.lambda_lo, self.bounds.lambda_hi],
            "per_node": per_node,
            "error_bound_sum": self.error_bound_sum,
            "total_error_bound": self.total_error_bound,
            "certified": self.certified,
            "quad_share": self.budget.quad_share,
            "solve_share": self.budget.solve_share,
            "probe_error": self.probe_error,
            "total_matvecs": self.report.total_matvecs,
            "verification_matvecs": self.report.verification_matvecs,
            "y": y,
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_json_value())?)
    }
}

/// Smallest accepted `epsilon` for a right-hand side of norm `b_norm`.
pub fn tolerance_floor(b_norm: f64, alpha: f64, lambda_hi: f64) -> f64 {
    1e3 * f64::EPSILON * b_norm * lambda_hi.powf(alpha)
}

/// `A^alpha b` with the default options.
pub fn fracpow_action<T: Scalar>(
    a: &HermitianSparseMatrix<T>,
    b: &[T],
    alpha: f64,
    budget: ErrorBudget,
    family: Family,
) -> Result<ActionResult<T>> {
    fracpow_action_with(a, b, alpha, budget, family, &ActionOptions::default())
}

pub fn fracpow_action_with<T: Scalar>(
    a: &HermitianSparseMatrix<T>,
    b: &[T],
    alpha: f64,
    budget: ErrorBudget,
    family: Family,
    opts: &ActionOptions,
) -> Result<ActionResult<T>> {
    check_alpha(alpha)?;
    if b.len() != a.n() {
        return Err(Error::DimensionMismatch {
            expected: a.n(),
            actual: b.len(),
        });
    }
    let spectral = estimate_spectral_bounds_with(a, &opts.spectral)?;
    let bounds = spectral.bounds;
    let b_norm = norm2(b);
    let floor = tolerance_floor(b_norm, alpha, bounds.lambda_hi);
    if budget.epsilon < floor {
        return Err(Error::ToleranceBelowFloor {
            epsilon: budget.epsilon,
            floor,
        });
    }

    let scalar_budget = if b_norm > 0.0 { budget.quad() / b_norm } else { budget.quad() };
    let probe = ProbeSpec::from_bounds(bounds, scalar_budget)?;
    let de = DeParams {
        budget: scalar_budget,
        ..opts.de_params.unwrap_or_default()
    };
    let rule = match opts.node_count {
        NodeCount::Select => select_node_count_with(family, alpha, bounds, &probe, Some(&de))?.rule,
        NodeCount::Oversample(f) => {
            if !(f >= 1.0 && f.is_finite()) {
                return Err(invalid(format!("oversampling factor must be >= 1, got {f}")));
            }
            let sel = select_node_count_with(family, alpha, bounds, &probe, Some(&de))?;
            let m = (sel.rule.m() as f64 * f).ceil() as usize;
            build_rule(family, alpha, m, bounds, Some(&de))?
        }
        NodeCount::Fixed(m) => build_rule(family, alpha, m, bounds, Some(&de))?,
    };
    let probe_error = probe.max_error(&rule);
    let lambda_max = bounds.lambda_hi;
    let thresholds = match opts.threshold_override {
        Some(t) => vec![t; rule.m()],
        None => residual_thresholds(&rule, &budget, lambda_max)?,
    };
    log::info!(
        "{family} alpha={alpha} eps={:e}: m={}, bounds [{:e}, {:e}], probe error {probe_error:e}",
        budget.epsilon,
        rule.m(),
        bounds.lambda_lo,
        bounds.lambda_hi
    );

    let request = ShiftedSolveRequest {
        shifts: rule.shifts(),
        thresholds: thresholds.clone(),
        max_iterations: opts.max_iterations,
        record_history: opts.record_history,
    };
    let (solutions, report) = shifted_cg_solve(a, b, &request)?;

    let mut s = vec![T::zero(); a.n()];
    for (node, x) in rule.nodes().iter().zip(&solutions) {
        axpy(node.weight, x, &mut s);
    }
    let y = a.matvec(&s)?;

    let error_bound_sum: f64 = rule
        .nodes()
        .iter()
        .zip(&report.shifts)
        .map(|(node, o)| node_error_bound(o.final_residual_norm, node.shift, lambda_max, node.weight))
        .sum();
    let certified = report.all_converged() && error_bound_sum <= budget.solve() * (1.0 + 1e-12);
    if !certified {
        let failed = report.shifts.iter().filter(|o| !o.converged).count();
        log::warn!(
            "result not certified: {failed} of {} nodes missed their threshold, bound sum {error_bound_sum:e}",
            rule.m()
        );
    }
    Ok(ActionResult {
        y,
        alpha,
        rule,
        thresholds,
        report,
        bounds,
        spectral,
        budget,
        probe_error,
        error_bound_sum,
        total_error_bound: probe_error * b_norm + error_bound_sum,
        certified,
    })
}
