use super::rule::{build_rule, check_alpha, DeParams, Family, ShiftedQuadratureRule};
use crate::error::{invalid, Error, Result};
use crate::spectral::SpectralBounds;

/// Largest node count the selector will try.
pub const MAX_NODES: usize = 1 << 14;

/// Number of log-spaced probe points strictly inside `(lambda_lo, lambda_hi)`.
pub const INTERIOR_PROBES: usize = 9;

/// Eigenvalue surrogates at which the scalar error `|lambda^alpha - Q_m(lambda)|`
/// must stay below `budget`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeSpec {
    probe_values: Vec<f64>,
    budget: f64,
}

impl ProbeSpec {
    pub fn new(probe_values: Vec<f64>, budget: f64) -> Result<Self> {
        if probe_values.is_empty() {
            return Err(invalid("probe set must not be empty"));
        }
        if probe_values.iter().any(|&v| !(v > 0.0 && v.is_finite())) {
            return Err(invalid("probe values must be positive and finite"));
        }
        if !(budget > 0.0) {
            return Err(invalid(format!("probe budget must be positive, got {budget}")));
        }
        Ok(Self {
            probe_values,
            budget,
        })
    }

    /// The two spectral extremes plus [`INTERIOR_PROBES`] log-spaced interior points.
    pub fn from_bounds(bounds: SpectralBounds, budget: f64) -> Result<Self> {
        let (lo, hi) = (bounds.lambda_lo, bounds.lambda_hi);
        let mut values = vec![lo];
        if hi > lo {
            let ratio = (hi / lo).ln();
            for j in 1..=INTERIOR_PROBES {
                let t = j as f64 / (INTERIOR_PROBES + 1) as f64;
                values.push(lo * (t * ratio).exp());
            }
            values.push(hi);
        }
        Self::new(values, budget)
    }

    pub fn probe_values(&self) -> &[f64] {
        &self.probe_values
    }

    pub fn budget(&self) -> f64 {
        self.budget
    }

    /// `max_lambda |lambda^alpha - Q_m(lambda)|` over the probe set.
    pub fn max_error(&self, rule: &ShiftedQuadratureRule) -> f64 {
        let alpha = rule.alpha();
        self.probe_values
            .iter()
            .map(|&l| (l.powf(alpha) - rule.scalar_apply(l)).abs())
            .fold(0.0, f64::max)
    }
}

/// Outcome of the node-count search.
#[derive(Debug, Clone)]
pub struct NodeSelection {
    pub rule: ShiftedQuadratureRule,
    /// Probe error attained by `rule`.
    pub probe_error: f64,
    /// Node counts evaluated during the search, in order.
    pub tried: Vec<usize>,
}

/// Smallest-`m` rule passing the probe, using default DE truncation tied to
/// the probe budget.
pub fn select_node_count(
    family: Family,
    alpha: f64,
    bounds: SpectralBounds,
    probe: &ProbeSpec,
) -> Result<ShiftedQuadratureRule> {
    Ok(select_node_count_with(family, alpha, bounds, probe, None)?.rule)
}

/// Doubles `m` from 4 until the probe passes, then bisects down to the
/// smallest passing count.
pub fn select_node_count_with(
    family: Family,
    alpha: f64,
    bounds: SpectralBounds,
    probe: &ProbeSpec,
    de_params: Option<&DeParams>,
) -> Result<NodeSelection> {
    check_alpha(alpha)?;
    let budget = probe.budget();
    // Evaluating lambda^alpha itself carries a few ulps of error.
    let scale = probe
        .probe_values()
        .iter()
        .map(|&l| l.powf(alpha))
        .fold(0.0, f64::max);
    let floor = 8.0 * f64::EPSILON * scale;
    if budget < floor {
        return Err(Error::BudgetUnreachable {
            budget,
            reason: format!("below double-precision floor {floor:e}"),
        });
    }
    let de = DeParams {
        budget,
        ..de_params.copied().unwrap_or_default()
    };
    let mut tried = Vec::new();
    let mut attempt = |m: usize| -> Result<Option<(ShiftedQuadratureRule, f64)>> {
        tried.push(m);
        let rule = build_rule(family, alpha, m, bounds, Some(&de))?;
        let err = probe.max_error(&rule);
        log::debug!("{family} alpha={alpha} m={m}: probe error {err:e}");
        Ok((err <= budget).then_some((rule, err)))
    };

    let mut m = 4;
    let mut best = loop {
        if let Some(found) = attempt(m)? {
            break found;
        }
        if m >= MAX_NODES {
            return Err(Error::BudgetUnreachable {
                budget,
                reason: format!("no rule with m <= {MAX_NODES} passes the probe"),
            });
        }
        m *= 2;
    };
    let mut hi = m;
    let mut lo = if m > 4 { m / 2 } else { 0 };
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        match attempt(mid)? {
            Some(found) => {
                hi = mid;
                best = found;
            }
            None => lo = mid,
        }
    }
    Ok(NodeSelection {
        rule: best.0,
        probe_error: best.1,
        tried,
    })
}
