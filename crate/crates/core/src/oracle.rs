//! Dense reference computations for verification.
//!
//! The eigensolver is cyclic Jacobi in round-robin (tournament) ordering:
//! each round applies `n / 2` disjoint rotations at once, so a round is two
//! streaming passes over the matrix instead of `n / 2` scattered column
//! updates.

use std::io::Write;

use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::sparse::HermitianSparseMatrix;

/// Largest dimension the dense oracle accepts.
pub const ORACLE_MAX_N: usize = 1100;

/// Relative symmetry tolerance of [`DenseSymmetricMatrix`].
pub const SYMMETRY_RTOL: f64 = 1e-13;

/// Dense real symmetric matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseSymmetricMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DenseSymmetricMatrix {
    pub fn new(n: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                actual: data.len(),
            });
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(invalid("matrix entries must be finite"));
        }
        let scale = data.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for i in 0..n {
            for j in i + 1..n {
                let (a, b) = (data[i * n + j], data[j * n + i]);
                if (a - b).abs() > SYMMETRY_RTOL * scale {
                    return Err(Error::NotHermitian(format!(
                        "entries ({i},{j}) = {a:e} and ({j},{i}) = {b:e} differ"
                    )));
                }
            }
        }
        Ok(Self { n, data })
    }

    pub fn from_sparse(a: &HermitianSparseMatrix<f64>) -> Self {
        let n = a.n();
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for (j, v) in a.row(i) {
                data[i * n + j] = v;
            }
        }
        Self { n, data }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                actual: x.len(),
            });
        }
        Ok(self
            .data
            .chunks(self.n.max(1))
            .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect())
    }
}

/// `M = Q diag(values) Q^T`; column `j` of the row-major `vectors` is the
/// eigenvector for `values[j]`, values ascending.
#[derive(Debug, Clone)]
pub struct DenseEigen {
    pub n: usize,
    pub values: Vec<f64>,
    pub vectors: Vec<f64>,
    pub sweeps: usize,
}

impl DenseEigen {
    pub fn vector(&self, j: usize) -> Vec<f64> {
        (0..self.n).map(|i| self.vectors[i * self.n + j]).collect()
    }

    /// `Q diag(f(lambda)) Q^T b`
    pub fn apply_fn(&self, b: &[f64], f: impl Fn(f64) -> f64) -> Result<Vec<f64>> {
        let n = self.n;
        if b.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: b.len(),
            });
        }
        // c = Q^T b, accumulated row by row to stay cache friendly
        let mut c = vec![0.0; n];
        for (row, &bi) in self.vectors.chunks(n).zip(b) {
            for (cj, &q) in c.iter_mut().zip(row) {
                *cj += q * bi;
            }
        }
        for (cj, &l) in c.iter_mut().zip(&self.values) {
            *cj *= f(l);
        }
        Ok(self
            .vectors
            .par_chunks(n)
            .map(|row| row.iter().zip(&c).map(|(q, v)| q * v).sum())
            .collect())
    }

    /// `||Q Lambda Q^T - M||_F / ||M||_F`
    pub fn reconstruction_residual(&self, m: &DenseSymmetricMatrix) -> f64 {
        let n = self.n;
        let q = &self.vectors;
        let num: f64 = (0..n)
            .into_par_iter()
            .map(|i| {
                let qi = &q[i * n..(i + 1) * n];
                (0..n)
                    .map(|j| {
                        let qj = &q[j * n..(j + 1) * n];
                        let v: f64 = qi
                            .iter()
                            .zip(qj)
                            .zip(&self.values)
                            .map(|((a, b), l)| a * l * b)
                            .sum();
                        (v - m.get(i, j)).powi(2)
                    })
                    .sum::<f64>()
            })
            .sum();
        num.sqrt() / m.frobenius_norm().max(f64::MIN_POSITIVE)
    }

    /// `||Q^T Q - I||_F`
    pub fn orthogonality_residual(&self) -> f64 {
        let n = self.n;
        let qt = transpose(&self.vectors, n);
        let sum: f64 = (0..n)
            .into_par_iter()
            .map(|i| {
                let a = &qt[i * n..(i + 1) * n];
                (0..n)
                    .map(|j| {
                        let b = &qt[j * n..(j + 1) * n];
                        let v: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
                        let e = if i == j { v - 1.0 } else { v };
                        e * e
                    })
                    .sum::<f64>()
            })
            .sum();
        sum.sqrt()
    }
}

fn transpose(a: &[f64], n: usize) -> Vec<f64> {
    let mut t = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            t[j * n + i] = a[i * n + j];
        }
    }
    t
}

#[derive(Debug, Clone, Copy)]
pub struct JacobiOptions {
    /// Stop once the off-diagonal Frobenius norm is at most `tol * ||M||_F`.
    pub tol: f64,
    pub max_sweeps: usize,
}

impl Default for JacobiOptions {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            max_sweeps: 30,
        }
    }
}

/// Symmetric eigendecomposition with default Jacobi options.
pub fn dense_eigh(m: &DenseSymmetricMatrix) -> Result<DenseEigen> {
    dense_eigh_with(m, JacobiOptions::default())
}

pub fn dense_eigh_with(m: &DenseSymmetricMatrix, opts: JacobiOptions) -> Result<DenseEigen> {
    let n = m.n;
    if n == 0 {
        return Ok(DenseEigen {
            n,
            values: vec![],
            vectors: vec![],
            sweeps: 0,
        });
    }
    let norm = m.frobenius_norm();
    let mut a = m.data.clone();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    // tournament positions, padded with a bye when n is odd
    let slots = n + n % 2;
    let mut pos: Vec<usize> = (0..slots).collect();
    let mut sweeps = 0;
    loop {
        let off = off_norm(&a, n);
        if off <= opts.tol * norm {
            break;
        }
        if sweeps == opts.max_sweeps {
            return Err(Error::Oracle(format!(
                "Jacobi did not converge in {} sweeps (off-diagonal norm {off:e})",
                opts.max_sweeps
            )));
        }
        for _ in 0..slots - 1 {
            let mut rots: Vec<(usize, usize, f64, f64)> = Vec::with_capacity(slots / 2);
            for j in 0..slots / 2 {
                let (p, q) = (pos[j], pos[slots - 1 - j]);
                if p >= n || q >= n {
                    continue;
                }
                let (p, q) = (p.min(q), p.max(q));
                let apq = a[p * n + q];
                let (app, aqq) = (a[p * n + p], a[q * n + q]);
                if apq == 0.0 {
                    continue;
                }
                if (app.abs() + 1e2 * apq.abs() == app.abs()) && (aqq.abs() + 1e2 * apq.abs() == aqq.abs()) {
                    a[p * n + q] = 0.0;
                    a[q * n + p] = 0.0;
                    continue;
                }
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + theta.hypot(1.0));
                let c = 1.0 / t.hypot(1.0);
                rots.push((p, q, c, t * c));
            }
            if !rots.is_empty() {
                apply_round(&mut a, &mut v, n, &rots);
            }
            // rotate every slot except the first
            let last = pos[slots - 1];
            for j in (2..slots).rev() {
                pos[j] = pos[j - 1];
            }
            if slots > 1 {
                pos[1] = last;
            }
        }
        sweeps += 1;
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i * n + i].total_cmp(&a[j * n + j]));
    let values = order.iter().map(|&j| a[j * n + j]).collect();
    let mut vectors = vec![0.0; n * n];
    for i in 0..n {
        for (col, &j) in order.iter().enumerate() {
            vectors[i * n + col] = v[i * n + j];
        }
    }
    Ok(DenseEigen {
        n,
        values,
        vectors,
        sweeps,
    })
}

fn off_norm(a: &[f64], n: usize) -> f64 {
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[i * n + j] * a[i * n + j];
            }
        }
    }
    s.sqrt()
}

/// `A <- J^T A J` and `V <- V J` for a set of disjoint plane rotations.
fn apply_round(a: &mut [f64], v: &mut [f64], n: usize, rots: &[(usize, usize, f64, f64)]) {
    let col_pass = |row: &mut [f64]| {
        for &(p, q, c, s) in rots {
            let (x, y) = (row[p], row[q]);
            row[p] = c * x - s * y;
            row[q] = s * x + c * y;
        }
    };
    a.par_chunks_mut(n).for_each(col_pass);
    v.par_chunks_mut(n).for_each(col_pass);
    for &(p, q, c, s) in rots {
        let (head, tail) = a.split_at_mut(q * n);
        let rp = &mut head[p * n..(p + 1) * n];
        let rq = &mut tail[..n];
        for (x, y) in rp.iter_mut().zip(rq.iter_mut()) {
            let (xp, xq) = (*x, *y);
            *x = c * xp - s * xq;
            *y = s * xp + c * xq;
        }
    }
    for &(p, q, _, _) in rots {
        a[p * n + q] = 0.0;
        a[q * n + p] = 0.0;
    }
}

/// Reference `A^alpha b` (or any spectral function) from one dense
/// eigendecomposition, reusable across right-hand sides and exponents.
#[derive(Debug, Clone)]
pub struct SpectralOracle {
    eig: DenseEigen,
}

impl SpectralOracle {
    /// Decomposes `a`; rejects `n > ORACLE_MAX_N` and non-positive spectra.
    pub fn new(a: &HermitianSparseMatrix<f64>) -> Result<Self> {
        let n = a.n();
        if n > ORACLE_MAX_N {
            return Err(Error::OracleTooLarge {
                n,
                limit: ORACLE_MAX_N,
            });
        }
        let dense = DenseSymmetricMatrix::from_sparse(a);
        // Tighter than the default so the tiny end of the spectrum is
        // resolved well below the tolerances being verified.
        let eig = dense_eigh_with(
            &dense,
            JacobiOptions {
                tol: 1e-15,
                max_sweeps: 30,
            },
        )?;
        if let Some(&l0) = eig.values.first() {
            if !(l0 > 0.0) {
                return Err(Error::NotPositiveDefinite(format!(
                    "smallest eigenvalue {l0:e}"
                )));
            }
        }
        Ok(Self { eig })
    }

    pub fn eigen(&self) -> &DenseEigen {
        &self.eig
    }

    pub fn lambda_min(&self) -> f64 {
        self.eig.values[0]
    }

    pub fn lambda_max(&self) -> f64 {
        self.eig.values[self.eig.n - 1]
    }

    pub fn fracpow(&self, b: &[f64], alpha: f64) -> Result<Vec<f64>> {
        if !alpha.is_finite() {
            return Err(invalid("exponent must be finite"));
        }
        self.eig.apply_fn(b, |l| l.powf(alpha))
    }

    /// `A (sigma I + A)^{-1} b`
    pub fn shifted_resolvent_action(&self, b: &[f64], sigma: f64) -> Result<Vec<f64>> {
        self.eig.apply_fn(b, |l| l / (sigma + l))
    }
}

/// `A^alpha b` through a dense eigendecomposition.
pub fn dense_fracpow_action(a: &HermitianSparseMatrix<f64>, b: &[f64], alpha: f64) -> Result<Vec<f64>> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(invalid(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    if b.len() != a.n() {
        return Err(Error::DimensionMismatch {
            expected: a.n(),
            actual: b.len(),
        });
    }
    SpectralOracle::new(a)?.fracpow(b, alpha)
}

/// `||y - y_ref||_2`
pub fn absolute_error(y: &[f64], y_ref: &[f64]) -> Result<f64> {
    if y.len() != y_ref.len() {
        return Err(Error::DimensionMismatch {
            expected: y_ref.len(),
            actual: y.len(),
        });
    }
    let d: Vec<f64> = y.iter().zip(y_ref).map(|(a, b)| a - b).collect();
    Ok(crate::scalar::norm2(&d))
}

/// Writes `index,value` rows with 17 significant digits.
pub fn write_reference_csv<W: Write>(y: &[f64], mut w: W) -> Result<()> {
    writeln!(w, "index,value")?;
    for (i, v) in y.iter().enumerate() {
        writeln!(w, "{i},{v:.16e}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_symmetric(n: usize, seed: u64) -> DenseSymmetricMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let v: f64 = rng.gen_range(-1.0..1.0);
                data[i * n + j] = v;
                data[j * n + i] = v;
            }
        }
        DenseSymmetricMatrix::new(n, data).unwrap()
    }

    #[test]
    fn diagonal_is_permutation() {
        let m = DenseSymmetricMatrix::new(3, vec![3.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 2.0]).unwrap();
        let e = dense_eigh(&m).unwrap();
        assert_eq!(e.values, vec![1.0, 2.0, 3.0]);
        assert_eq!(e.vector(0), vec![0.0, 1.0, 0.0]);
        assert_eq!(e.vector(2), vec![1.0, 0.0, 0.0]);
    }

    #[test]
    fn laplacian_three() {
        let a = HermitianSparseMatrix::laplacian_1d(3).unwrap();
        let e = dense_eigh(&DenseSymmetricMatrix::from_sparse(&a)).unwrap();
        let r = 2f64.sqrt();
        for (got, want) in e.values.iter().zip([2.0 - r, 2.0, 2.0 + r]) {
            assert!((got - want).abs() < 1e-14);
        }
    }

    #[test]
    fn random_backward_stable() {
        for (n, seed) in [(5, 1), (20, 2), (50, 3), (101, 4)] {
            let m = random_symmetric(n, seed);
            let e = dense_eigh(&m).unwrap();
            assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
            assert!(e.reconstruction_residual(&m) <= 1e-10, "n={n}");
            assert!(e.orthogonality_residual() <= 1e-10, "n={n}");
        }
    }

    #[test]
    fn rejects_asymmetric() {
        assert!(DenseSymmetricMatrix::new(2, vec![1.0, 2.0, 3.0, 1.0]).is_err());
        assert!(DenseSymmetricMatrix::new(2, vec![1.0; 3]).is_err());
    }

    #[test]
    fn fracpow_examples() {
        let i5 = HermitianSparseMatrix::identity(5).unwrap();
        let b = [1.0, -2.0, 3.0, 0.5, 0.0];
        let y = dense_fracpow_action(&i5, &b, 0.37).unwrap();
        assert!(absolute_error(&y, &b).unwrap() < 1e-15);
        let d = HermitianSparseMatrix::diagonal(&[4.0, 9.0]).unwrap();
        let y = dense_fracpow_action(&d, &[1.0, 1.0], 0.5).unwrap();
        assert!(absolute_error(&y, &[2.0, 3.0]).unwrap() < 1e-15);
    }

    #[test]
    fn matches_sine_basis() {
        // eigenpairs of tridiag(-1, 2, -1) are known in closed form
        let n = 8;
        let a = HermitianSparseMatrix::laplacian_1d(n).unwrap();
        let b = vec![1.0; n];
        let y = dense_fracpow_action(&a, &b, 0.2).unwrap();
        let h = std::f64::consts::PI / (n + 1) as f64;
        let norm = (2.0 / (n + 1) as f64).sqrt();
        let mut y2 = vec![0.0; n];
        for j in 1..=n {
            let q: Vec<f64> = (1..=n).map(|i| norm * (i as f64 * j as f64 * h).sin()).collect();
            let lam = 4.0 * (0.5 * j as f64 * h).sin().powi(2);
            let c: f64 = q.iter().sum::<f64>() * (0.2 * lam.ln()).exp();
            for (yi, qi) in y2.iter_mut().zip(&q) {
                *yi += c * qi;
            }
        }
        assert!(absolute_error(&y, &y2).unwrap() < 1e-12);
    }

    #[test]
    fn semigroup() {
        let a = HermitianSparseMatrix::laplacian_1d(100).unwrap();
        let b = vec![1.0; 100];
        let oracle = SpectralOracle::new(&a).unwrap();
        let half = oracle.fracpow(&b, 0.5).unwrap();
        let twice = oracle.fracpow(&half, 0.5).unwrap();
        let ab = a.matvec(&b).unwrap();
        assert!(absolute_error(&twice, &ab).unwrap() <= 1e-9 * crate::scalar::norm2(&ab));
    }

    #[test]
    fn oracle_limits() {
        let big = HermitianSparseMatrix::laplacian_1d(ORACLE_MAX_N + 1).unwrap();
        assert!(matches!(SpectralOracle::new(&big), Err(Error::OracleTooLarge { .. })));
        let sing = HermitianSparseMatrix::from_triplets(
            2,
            vec![(0, 0, 1.0), (0, 1, 1.0), (1, 0, 1.0), (1, 1, 1.0)],
        )
        .unwrap();
        assert!(dense_fracpow_action(&sing, &[1.0, 1.0], 0.5).is_err());
    }

    #[test]
    fn absolute_error_examples() {
        assert_eq!(absolute_error(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
        assert_eq!(absolute_error(&[1.0, 0.0], &[0.0, 0.0]).unwrap(), 1.0);
        assert_eq!(absolute_error(&[3.0, 4.0], &[0.0, 0.0]).unwrap(), 5.0);
        assert!(absolute_error(&[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn reference_csv() {
        let mut out = Vec::new();
        write_reference_csv(&[0.1, 2.0], &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert_eq!(text, "index,value\n0,1.0000000000000001e-1\n1,2.0000000000000000e0\n");
    }
}
