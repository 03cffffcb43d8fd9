use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::gauss_jacobi::GaussJacobiRule;
use crate::error::{invalid, Error, Result};
use crate::spectral::SpectralBounds;

/// Quadrature family used to discretize the resolvent integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    /// Gauss-Jacobi after the Cayley map `tau = (1 - s) / (1 + s)`.
    Gj1,
    /// `Gj1` applied to `A / c` with `c = sqrt(lambda_lo * lambda_hi)`.
    Gj2,
    /// Double-exponential trapezoid after `t = exp(pi sinh u)`.
    De,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::Gj1, Family::Gj2, Family::De];

    pub fn as_str(self) -> &'static str {
        match self {
            Family::Gj1 => "gj1",
            Family::Gj2 => "gj2",
            Family::De => "de",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gj1" => Ok(Family::Gj1),
            "gj2" => Ok(Family::Gj2),
            "de" => Ok(Family::De),
            other => Err(invalid(format!("unknown quadrature family '{other}'"))),
        }
    }
}

/// One term `omega * A (sigma I + A)^{-1}` of the shifted quadrature sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureNode {
    pub shift: f64,
    pub weight: f64,
}

/// Canonical rule `A^alpha b ~ sum_k omega_k A (sigma_k I + A)^{-1} b`.
///
/// `weight` already contains the `sin(alpha pi) / (alpha pi)` prefactor and
/// `shift` is `t_k^(1/alpha)`. Shifts are strictly increasing, weights
/// positive.
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftedQuadratureRule {
    alpha: f64,
    family: Family,
    nodes: Vec<QuadratureNode>,
}

#[derive(Serialize, Deserialize)]
struct RuleJson {
    family: Family,
    alpha: f64,
    nodes: Vec<[f64; 2]>,
}

impl ShiftedQuadratureRule {
    /// Sorts by shift, merges coincident shifts, and validates the invariants.
    pub fn new(alpha: f64, family: Family, mut nodes: Vec<QuadratureNode>) -> Result<Self> {
        check_alpha(alpha)?;
        if nodes.is_empty() {
            return Err(Error::Quadrature("rule has no nodes".into()));
        }
        for node in &nodes {
            if !(node.shift >= 0.0 && node.shift.is_finite()) {
                return Err(Error::Quadrature(format!("invalid shift {}", node.shift)));
            }
            if !(node.weight > 0.0 && node.weight.is_finite()) {
                return Err(Error::Quadrature(format!("invalid weight {}", node.weight)));
            }
        }
        nodes.sort_by(|x, y| x.shift.total_cmp(&y.shift));
        let mut merged: Vec<QuadratureNode> = Vec::with_capacity(nodes.len());
        for node in nodes {
            match merged.last_mut() {
                Some(last) if last.shift == node.shift => last.weight += node.weight,
                _ => merged.push(node),
            }
        }
        Ok(Self {
            alpha,
            family,
            nodes: merged,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn nodes(&self) -> &[QuadratureNode] {
        &self.nodes
    }

    pub fn m(&self) -> usize {
        self.nodes.len()
    }

    pub fn shifts(&self) -> Vec<f64> {
        self.nodes.iter().map(|n| n.shift).collect()
    }

    /// Scalar transfer function `Q_m(lambda) = sum_k omega_k lambda / (sigma_k + lambda)`.
    pub fn scalar_apply(&self, lambda: f64) -> f64 {
        self.nodes
            .iter()
            .map(|n| n.weight * (lambda / (n.shift + lambda)))
            .sum()
    }

    pub fn to_json(&self) -> Result<String> {
        let dto = RuleJson {
            family: self.family,
            alpha: self.alpha,
            nodes: self.nodes.iter().map(|n| [n.shift, n.weight]).collect(),
        };
        Ok(serde_json::to_string_pretty(&dto)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let dto: RuleJson = serde_json::from_str(text)?;
        Self::new(
            dto.alpha,
            dto.family,
            dto.nodes
                .into_iter()
                .map(|[shift, weight]| QuadratureNode { shift, weight })
                .collect(),
        )
    }
}

impl Serialize for ShiftedQuadratureRule {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RuleJson {
            family: self.family,
            alpha: self.alpha,
            nodes: self.nodes.iter().map(|n| [n.shift, n.weight]).collect(),
        }
        .serialize(s)
    }
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(invalid(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    Ok(())
}

/// Truncation controls for the double-exponential rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeParams {
    /// Scalar error target; the tails are cut where the integrand drops below
    /// `budget / (100 m)`.
    pub budget: f64,
    /// Initial half-width of the `u` interval.
    pub start: f64,
    /// Outward step of the truncation search.
    pub step: f64,
    /// The search fails once `|u|` would exceed this.
    pub limit: f64,
}

impl Default for DeParams {
    fn default() -> Self {
        Self {
            budget: 1e-15,
            start: 3.0,
            step: 0.5,
            limit: 8.0,
        }
    }
}

/// Builds the `m`-node rule of `family` for `A^alpha`.
pub fn build_rule(
    family: Family,
    alpha: f64,
    m: usize,
    bounds: SpectralBounds,
    de_params: Option<&DeParams>,
) -> Result<ShiftedQuadratureRule> {
    check_alpha(alpha)?;
    if m == 0 {
        return Err(invalid("node count must be at least 1"));
    }
    match family {
        Family::Gj1 => cayley_rule(Family::Gj1, alpha, m, 1.0),
        Family::Gj2 => {
            let c = (bounds.lambda_lo * bounds.lambda_hi).sqrt();
            cayley_rule(Family::Gj2, alpha, m, c)
        }
        Family::De => de_rule(alpha, m, bounds, de_params.copied().unwrap_or_default()),
    }
}

/// Gauss-Jacobi rule for `(sin(alpha pi)/pi) A int_0^inf tau^(alpha-1) (tau I + A)^{-1} dtau`
/// under `tau = (1 - s)/(1 + s)`, applied to `A / c` and mapped back.
fn cayley_rule(family: Family, alpha: f64, m: usize, c: f64) -> Result<ShiftedQuadratureRule> {
    let gj = GaussJacobiRule::new(m, alpha - 1.0, -alpha)?;
    let pref = 2.0 * (alpha * PI).sin() / PI;
    let c_alpha = c.powf(alpha);
    let nodes = gj
        .nodes
        .iter()
        .zip(&gj.weights)
        .map(|(&s, &w)| QuadratureNode {
            shift: c * ((1.0 - s) / (1.0 + s)),
            weight: c_alpha * pref * w / (1.0 + s),
        })
        .collect();
    ShiftedQuadratureRule::new(alpha, family, nodes)
}

/// `ln` of the DE integrand `pref * pi cosh(u) e^{pi sinh u} * lambda / (sigma(u) + lambda)`.
fn de_log_integrand(alpha: f64, u: f64, lambda: f64) -> f64 {
    let pref = (alpha * PI).sin() / (alpha * PI);
    let ps = PI * u.sinh();
    let log_sigma = ps / alpha;
    let log_lambda = lambda.ln();
    let (hi, lo) = if log_sigma > log_lambda {
        (log_sigma, log_lambda)
    } else {
        (log_lambda, log_sigma)
    };
    let log_denominator = hi + (lo - hi).exp().ln_1p();
    (pref * PI).ln() + u.cosh().ln() + ps + log_lambda - log_denominator
}

fn de_rule(alpha: f64, m: usize, bounds: SpectralBounds, p: DeParams) -> Result<ShiftedQuadratureRule> {
    if !(p.budget > 0.0 && p.step > 0.0 && p.start > 0.0) {
        return Err(invalid("DE parameters must be positive"));
    }
    let cutoff = (p.budget / (100.0 * m as f64)).ln();
    let small = |u: f64| {
        de_log_integrand(alpha, u, bounds.lambda_lo) <= cutoff
            && de_log_integrand(alpha, u, bounds.lambda_hi) <= cutoff
    };
    // Shifts must stay finite in double precision.
    let sigma_finite = |u: f64| PI * u.sinh() / alpha < f64::MAX.ln() - 1.0;

    let mut l = -p.start;
    while !small(l) {
        l -= p.step;
        if l < -p.limit {
            return Err(Error::Quadrature(format!(
                "DE left truncation search exceeded u = -{}",
                p.limit
            )));
        }
    }
    // largest u whose shift is still finite
    let r_max = ((f64::MAX.ln() - 2.0) * alpha / PI).asinh();
    let mut r = p.start;
    while !small(r) {
        let next = r + p.step;
        r = if sigma_finite(next) || r >= r_max { next } else { r_max };
        if r > p.limit || !sigma_finite(r) {
            return Err(Error::Quadrature(format!(
                "DE right truncation search failed at u = {r}"
            )));
        }
    }
    while !sigma_finite(r) {
        let inner = r - p.step;
        if inner <= 0.0 || !small(inner) {
            return Err(Error::Quadrature(format!(
                "DE shifts overflow at the truncation point u = {r}"
            )));
        }
        r = inner;
    }

    let (h, grid): (f64, Vec<f64>) = if m == 1 {
        (r - l, vec![0.5 * (l + r)])
    } else {
        let h = (r - l) / (m - 1) as f64;
        (h, (0..m).map(|j| l + j as f64 * h).collect())
    };
    let log_pref = ((alpha * PI).sin() / (alpha * PI) * PI).ln();
    let nodes = grid
        .into_iter()
        .map(|u| {
            let ps = PI * u.sinh();
            QuadratureNode {
                shift: (ps / alpha).exp(),
                weight: (log_pref + u.cosh().ln() + ps).exp() * h,
            }
        })
        .collect();
    ShiftedQuadratureRule::new(alpha, Family::De, nodes)
}
