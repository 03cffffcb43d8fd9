//! Gauss-Jacobi rules for the weight `(1 - s)^a (1 + s)^b` on `[-1, 1]`.
//!
//! Nodes and weights come from the Golub-Welsch eigenproblem on the Jacobi
//! matrix of the orthonormal three-term recurrence. Eigenvector weights
//! `mu_0 z_j^2` are accurate to `O(eps * mu_0)` in absolute terms, so the few
//! tiny endpoint weights are recomputed from the Christoffel sum
//! `1 / sum_k p_k(s_j)^2`, which keeps their relative accuracy.

use std::f64::consts::PI;

use statrs::function::gamma::gamma;

use crate::error::{invalid, Result};
use crate::tridiag::tridiag_eig;

/// Total mass `mu_0 = 2^(a+b+1) B(a+1, b+1)` of the Jacobi weight.
pub fn jacobi_mass(a: f64, b: f64) -> f64 {
    if a + b + 1.0 == 0.0 {
        // B(a+1, -a) by reflection
        return PI / (PI * (a + 1.0)).sin();
    }
    (a + b + 1.0).exp2() * gamma(a + 1.0) * gamma(b + 1.0) / gamma(a + b + 2.0)
}

/// Orthonormal recurrence coefficients: `diag[k]` for `k < m` and
/// `off[k - 1]` coupling degrees `k - 1` and `k` for `1 <= k <= m`.
fn recurrence(m: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let diag = (0..m)
        .map(|k| {
            if k == 0 {
                (b - a) / (a + b + 2.0)
            } else {
                let c = 2.0 * k as f64 + a + b;
                (b * b - a * a) / (c * (c + 2.0))
            }
        })
        .collect();
    let off = (1..=m)
        .map(|k| {
            let kf = k as f64;
            let c = 2.0 * kf + a + b;
            let sq = if k == 1 {
                // (c - 1) = a + b + 1 cancels against the (k + a + b) factor
                4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + a + b).powi(2) * (3.0 + a + b))
            } else {
                4.0 * kf * (kf + a) * (kf + b) * (kf + a + b) / (c * c * (c + 1.0) * (c - 1.0))
            };
            sq.sqrt()
        })
        .collect();
    (diag, off)
}

/// Gauss-Jacobi rule with nodes in ascending order.
#[derive(Debug, Clone)]
pub struct GaussJacobiRule {
    pub a: f64,
    pub b: f64,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussJacobiRule {
    pub fn new(m: usize, a: f64, b: f64) -> Result<Self> {
        if m == 0 {
            return Err(invalid("Gauss-Jacobi rule needs m >= 1"));
        }
        if !(a > -1.0 && b > -1.0) {
            return Err(invalid(format!(
                "Jacobi exponents must exceed -1, got a = {a}, b = {b}"
            )));
        }
        let mu0 = jacobi_mass(a, b);
        let (diag, off) = recurrence(m, a, b);
        let eig = tridiag_eig(&diag, &off[..m - 1], &[0])?;
        let p0 = 1.0 / mu0.sqrt();
        let weights = eig.rows[0]
            .iter()
            .zip(&eig.values)
            .map(|(&z, &s)| {
                let w = mu0 * z * z;
                if w > SMALL_WEIGHT * mu0 {
                    w
                } else {
                    1.0 / christoffel_sum(s, &diag, &off, p0)
                }
            })
            .collect();
        let nodes = eig.values;
        Ok(Self {
            a,
            b,
            nodes,
            weights,
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `sum_j w_j f(s_j)`
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&s, &w)| w * f(s))
            .sum()
    }
}

/// Below this fraction of `mu_0` a weight is taken from the Christoffel sum.
const SMALL_WEIGHT: f64 = 1e-8;

/// `sum_{k<m} p_k(s)^2` for the orthonormal family.
fn christoffel_sum(s: f64, diag: &[f64], off: &[f64], p0: f64) -> f64 {
    let (mut p_prev, mut p) = (0.0, p0);
    let mut sum = 0.0;
    for k in 0..diag.len() {
        sum += p * p;
        let b_prev = if k == 0 { 0.0 } else { off[k - 1] };
        let p_next = ((s - diag[k]) * p - b_prev * p_prev) / off[k];
        p_prev = p;
        p = p_next;
    }
    sum
}

/// Abscissae and weights of the `m`-point Gauss-Jacobi rule, nodes ascending.
pub fn gauss_jacobi_nodes(m: usize, a: f64, b: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    let rule = GaussJacobiRule::new(m, a, b)?;
    Ok((rule.nodes, rule.weights))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_midpoint() {
        let (s, w) = gauss_jacobi_nodes(1, 0.0, 0.0).unwrap();
        assert!(s[0].abs() < 1e-16);
        assert!((w[0] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn legendre_two_point() {
        let (s, w) = gauss_jacobi_nodes(2, 0.0, 0.0).unwrap();
        let r = 1.0 / 3f64.sqrt();
        assert!((s[0] + r).abs() < 1e-15 && (s[1] - r).abs() < 1e-15);
        assert!((w[0] - 1.0).abs() < 1e-14 && (w[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn chebyshev_mass_is_pi() {
        for m in [1, 2, 7, 50, 301] {
            let (_, w) = gauss_jacobi_nodes(m, -0.5, -0.5).unwrap();
            let total: f64 = w.iter().sum();
            assert!((total - PI).abs() < 1e-13 * PI, "m={m}: {total}");
        }
    }

    #[test]
    fn chebyshev_nodes_closed_form() {
        // Gauss-Chebyshev (first kind): s_j = cos((2j-1) pi / (2m)), w_j = pi / m
        let m = 40;
        let (s, w) = gauss_jacobi_nodes(m, -0.5, -0.5).unwrap();
        for j in 0..m {
            let exact = ((2 * (m - j) - 1) as f64 * PI / (2 * m) as f64).cos();
            assert!((s[j] - exact).abs() < 1e-14, "{j}");
            assert!((w[j] - PI / m as f64).abs() < 1e-13);
        }
    }

    #[test]
    fn mass_matches_gamma_route() {
        // a + b = -1 takes the reflection branch; compare with the generic gamma form
        let (a, b) = (-0.8, -0.2);
        let generic = gamma(a + 1.0) * gamma(b + 1.0) / gamma(a + b + 2.0);
        assert!((jacobi_mass(a, b) - generic).abs() < 1e-13 * generic);
    }

    #[test]
    fn small_weights_stay_positive() {
        let rule = GaussJacobiRule::new(4000, 3.0, -0.9).unwrap();
        assert!(rule.weights.iter().all(|&w| w > 0.0 && w.is_finite()));
    }

    #[test]
    fn invalid_parameters() {
        assert!(gauss_jacobi_nodes(0, 0.0, 0.0).is_err());
        assert!(gauss_jacobi_nodes(3, -1.0, 0.0).is_err());
        assert!(gauss_jacobi_nodes(3, 0.0, -1.5).is_err());
    }

    #[test]
    fn large_rule_stays_in_interval() {
        let rule = GaussJacobiRule::new(2000, -0.8, -0.2).unwrap();
        assert!(rule.nodes.windows(2).all(|w| w[0] < w[1]));
        assert!(rule.nodes[0] > -1.0 && rule.nodes[rule.len() - 1] < 1.0);
        assert!(rule.weights.iter().all(|&w| w > 0.0));
        let total: f64 = rule.weights.iter().sum();
        let mu0 = jacobi_mass(-0.8, -0.2);
        assert!((total - mu0).abs() < 1e-12 * mu0);
    }
}
