//! Implicit QL iteration for symmetric tridiagonal matrices.
//!
//! Only selected rows of the eigenvector matrix are accumulated, which is
//! all that Golub-Welsch (first row) and Lanczos error estimates (last row)
//! need, keeping the cost at O(n^2) without O(n^2) memory.

use crate::error::{Error, Result};

pub struct TridiagEig {
    /// Eigenvalues in ascending order.
    pub values: Vec<f64>,
    /// `rows[t][j]` is entry `tracked[t]` of the `j`-th unit eigenvector.
    pub rows: Vec<Vec<f64>>,
}

/// Eigenvalues of the tridiagonal matrix with diagonal `diag` and
/// off-diagonal `off` (`off[i]` couples `i` and `i + 1`), together with the
/// eigenvector entries at each row index listed in `tracked`.
pub fn tridiag_eig(diag: &[f64], off: &[f64], tracked: &[usize]) -> Result<TridiagEig> {
    let n = diag.len();
    if n == 0 {
        return Ok(TridiagEig {
            values: vec![],
            rows: vec![vec![]; tracked.len()],
        });
    }
    if off.len() + 1 != n {
        return Err(Error::DimensionMismatch {
            expected: n - 1,
            actual: off.len(),
        });
    }
    let mut d = diag.to_vec();
    let mut e = vec![0.0; n];
    e[..n - 1].copy_from_slice(off);
    let mut z: Vec<Vec<f64>> = tracked
        .iter()
        .map(|&r| {
            let mut v = vec![0.0; n];
            v[r] = 1.0;
            v
        })
        .collect();

    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 100 {
                return Err(Error::Quadrature(
                    "tridiagonal QL iteration failed to converge".into(),
                ));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut underflow = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                for row in z.iter_mut() {
                    let f = row[i + 1];
                    row[i + 1] = s * row[i] + c * f;
                    row[i] = c * row[i] - s * f;
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
    Ok(TridiagEig {
        values: order.iter().map(|&j| d[j]).collect(),
        rows: z
            .iter()
            .map(|row| order.iter().map(|&j| row[j]).collect())
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_by_two() {
        let eig = tridiag_eig(&[2.0, 2.0], &[-1.0], &[0, 1]).unwrap();
        assert!((eig.values[0] - 1.0).abs() < 1e-15);
        assert!((eig.values[1] - 3.0).abs() < 1e-15);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((eig.rows[0][0].abs() - h).abs() < 1e-15);
        assert!((eig.rows[1][1].abs() - h).abs() < 1e-15);
    }

    #[test]
    fn laplacian_spectrum() {
        let n = 60;
        let eig = tridiag_eig(&vec![2.0; n], &vec![-1.0; n - 1], &[0]).unwrap();
        for (j, &v) in eig.values.iter().enumerate() {
            let x = ((j + 1) as f64 * std::f64::consts::PI / (2.0 * (n + 1) as f64)).sin();
            assert!((v - 4.0 * x * x).abs() < 1e-13);
        }
        // first components form a unit vector
        let s: f64 = eig.rows[0].iter().map(|v| v * v).sum();
        assert!((s - 1.0).abs() < 1e-13);
    }

    #[test]
    fn single_entry() {
        let eig = tridiag_eig(&[5.0], &[], &[0]).unwrap();
        assert_eq!(eig.values, vec![5.0]);
        assert_eq!(eig.rows, vec![vec![1.0]]);
    }
}
