//! Compressed sparse row storage for Hermitian matrices, plus the
//! finite-difference Laplacian generators used throughout the test suite.

use crate::error::{invalid, Error, Result};
use crate::scalar::Scalar;

/// Relative tolerance for the `a_ij == conj(a_ji)` structural check.
pub const HERMITIAN_RTOL: f64 = 1e-13;

/// A Hermitian matrix in CSR form with both triangles stored.
///
/// Invariants, checked on construction:
/// * `(i, j)` is stored iff `(j, i)` is stored, with conjugate values;
/// * column indices strictly increase within each row (so no duplicates);
/// * diagonal entries are real.
///
/// The matrix is immutable once built and can be shared across threads.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianSparseMatrix<T = f64> {
    n: usize,
    row_offsets: Vec<usize>,
    col_indices: Vec<usize>,
    values: Vec<T>,
}

impl<T: Scalar> HermitianSparseMatrix<T> {
    /// Builds a matrix from raw CSR arrays, validating every invariant.
    pub fn try_from_csr(
        n: usize,
        row_offsets: Vec<usize>,
        col_indices: Vec<usize>,
        values: Vec<T>,
    ) -> Result<Self> {
        if n == 0 {
            return Err(invalid("matrix dimension must be positive"));
        }
        if row_offsets.len() != n + 1 {
            return Err(Error::DimensionMismatch {
                expected: n + 1,
                actual: row_offsets.len(),
            });
        }
        if row_offsets[0] != 0 || *row_offsets.last().unwrap() != col_indices.len() {
            return Err(invalid("row offsets do not span the column index array"));
        }
        if col_indices.len() != values.len() {
            return Err(Error::DimensionMismatch {
                expected: col_indices.len(),
                actual: values.len(),
            });
        }
        let m = Self {
            n,
            row_offsets,
            col_indices,
            values,
        };
        m.validate()?;
        Ok(m)
    }

    /// Builds a matrix from `(row, col, value)` triplets (0-based). Both
    /// triangles must be supplied; duplicates are rejected.
    pub fn from_triplets(n: usize, mut triplets: Vec<(usize, usize, T)>) -> Result<Self> {
        if n == 0 {
            return Err(invalid("matrix dimension must be positive"));
        }
        for &(i, j, _) in &triplets {
            if i >= n || j >= n {
                return Err(invalid(format!("entry ({i}, {j}) outside {n}x{n} matrix")));
            }
        }
        triplets.sort_by_key(|&(i, j, _)| (i, j));
        let mut row_offsets = vec![0usize; n + 1];
        let mut col_indices = Vec::with_capacity(triplets.len());
        let mut values = Vec::with_capacity(triplets.len());
        for (k, &(i, j, v)) in triplets.iter().enumerate() {
            if k > 0 && triplets[k - 1].0 == i && triplets[k - 1].1 == j {
                return Err(invalid(format!("duplicate entry ({i}, {j})")));
            }
            row_offsets[i + 1] += 1;
            col_indices.push(j);
            values.push(v);
        }
        for i in 0..n {
            row_offsets[i + 1] += row_offsets[i];
        }
        Self::try_from_csr(n, row_offsets, col_indices, values)
    }

    fn validate(&self) -> Result<()> {
        let n = self.n;
        for i in 0..n {
            let (lo, hi) = (self.row_offsets[i], self.row_offsets[i + 1]);
            if lo > hi {
                return Err(invalid(format!("row offsets decrease at row {i}")));
            }
            let cols = &self.col_indices[lo..hi];
            for w in cols.windows(2) {
                if w[0] >= w[1] {
                    return Err(invalid(format!(
                        "column indices not strictly increasing in row {i}"
                    )));
                }
            }
            for (&j, &v) in cols.iter().zip(&self.values[lo..hi]) {
                if j >= n {
                    return Err(invalid(format!("column index {j} out of range in row {i}")));
                }
                if !(v.re().is_finite() && v.im().is_finite()) {
                    return Err(invalid(format!("non-finite entry at ({i}, {j})")));
                }
                if i == j {
                    if v.im().abs() > HERMITIAN_RTOL * v.abs() {
                        return Err(Error::NotHermitian(format!(
                            "diagonal entry ({i}, {i}) is not real"
                        )));
                    }
                    continue;
                }
                match self.get(j, i) {
                    None => {
                        return Err(Error::NotHermitian(format!(
                            "entry ({i}, {j}) has no mirror ({j}, {i})"
                        )))
                    }
                    Some(w) => {
                        let diff = (v - w.conj()).abs();
                        if diff > HERMITIAN_RTOL * v.abs().max(w.abs()) {
                            return Err(Error::NotHermitian(format!(
                                "entries ({i}, {j}) and ({j}, {i}) are not conjugate"
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::from_triplets(n, (0..n).map(|i| (i, i, T::from_real(1.0))).collect())
    }

    pub fn diagonal(entries: &[f64]) -> Result<Self> {
        Self::from_triplets(
            entries.len(),
            entries
                .iter()
                .enumerate()
                .map(|(i, &v)| (i, i, T::from_real(v)))
                .collect(),
        )
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_offsets(&self) -> &[usize] {
        &self.row_offsets
    }

    pub fn col_indices(&self) -> &[usize] {
        &self.col_indices
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// Iterates the stored `(column, value)` pairs of row `i`.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, T)> + '_ {
        let (lo, hi) = (self.row_offsets[i], self.row_offsets[i + 1]);
        self.col_indices[lo..hi]
            .iter()
            .copied()
            .zip(self.values[lo..hi].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> Option<T> {
        let (lo, hi) = (self.row_offsets[i], self.row_offsets[i + 1]);
        self.col_indices[lo..hi]
            .binary_search(&j)
            .ok()
            .map(|p| self.values[lo + p])
    }

    pub fn diag(&self) -> Vec<f64> {
        (0..self.n)
            .map(|i| self.get(i, i).map_or(0.0, |v| v.re()))
            .collect()
    }

    /// Returns `A x`.
    pub fn matvec(&self, x: &[T]) -> Result<Vec<T>> {
        let mut y = vec![T::zero(); self.n];
        self.matvec_into(x, &mut y)?;
        Ok(y)
    }

    /// Writes `A x` into `y`.
    pub fn matvec_into(&self, x: &[T], y: &mut [T]) -> Result<()> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                actual: x.len(),
            });
        }
        if y.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                actual: y.len(),
            });
        }
        self.apply(x, y);
        Ok(())
    }

    /// Unchecked kernel; callers guarantee the lengths.
    pub(crate) fn apply(&self, x: &[T], y: &mut [T]) {
        for (i, yi) in y.iter_mut().enumerate() {
            let (lo, hi) = (self.row_offsets[i], self.row_offsets[i + 1]);
            let mut acc = T::zero();
            for (&j, &v) in self.col_indices[lo..hi].iter().zip(&self.values[lo..hi]) {
                acc += v * x[j];
            }
            *yi = acc;
        }
    }

    /// Gershgorin enclosure `(min_i (a_ii - R_i), max_i (a_ii + R_i))`.
    pub fn gershgorin(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..self.n {
            let mut center = 0.0;
            let mut radius = 0.0;
            for (j, v) in self.row(i) {
                if j == i {
                    center = v.re();
                } else {
                    radius += v.abs();
                }
            }
            lo = lo.min(center - radius);
            hi = hi.max(center + radius);
        }
        (lo, hi)
    }

    /// Largest `|i - j|` over stored entries.
    pub fn bandwidth(&self) -> usize {
        (0..self.n)
            .flat_map(|i| self.row(i).map(move |(j, _)| i.abs_diff(j)))
            .max()
            .unwrap_or(0)
    }

    /// Checks that every diagonal entry is present and positive, a necessary
    /// condition for positive definiteness.
    pub fn check_positive_diagonal(&self) -> Result<()> {
        for i in 0..self.n {
            match self.get(i, i) {
                Some(v) if v.re() > 0.0 => {}
                Some(_) => {
                    return Err(Error::NotPositiveDefinite(format!(
                        "diagonal entry ({}, {}) is not positive",
                        i + 1,
                        i + 1
                    )))
                }
                None => {
                    return Err(Error::NotPositiveDefinite(format!(
                        "diagonal entry ({}, {}) is missing",
                        i + 1,
                        i + 1
                    )))
                }
            }
        }
        Ok(())
    }
}

impl HermitianSparseMatrix<f64> {
    /// Unscaled three-point stencil `tridiag(-1, 2, -1)` (Dirichlet at both ends).
    pub fn laplacian_1d(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(invalid("laplacian_1d requires n >= 1"));
        }
        let mut t = Vec::with_capacity(3 * n);
        for i in 0..n {
            if i > 0 {
                t.push((i, i - 1, -1.0));
            }
            t.push((i, i, 2.0));
            if i + 1 < n {
                t.push((i, i + 1, -1.0));
            }
        }
        Self::from_triplets(n, t)
    }

    /// Unscaled five-point stencil on an `nx`-by-`ny` grid, i.e. the
    /// Kronecker sum of two 1-D stencils. Grid point `(i, j)` maps to row
    /// `i + nx * j`.
    pub fn laplacian_2d(nx: usize, ny: usize) -> Result<Self> {
        if nx == 0 || ny == 0 {
            return Err(invalid("laplacian_2d requires nx, ny >= 1"));
        }
        let n = nx * ny;
        let mut t = Vec::with_capacity(5 * n);
        for j in 0..ny {
            for i in 0..nx {
                let k = i + nx * j;
                if j > 0 {
                    t.push((k, k - nx, -1.0));
                }
                if i > 0 {
                    t.push((k, k - 1, -1.0));
                }
                t.push((k, k, 4.0));
                if i + 1 < nx {
                    t.push((k, k + 1, -1.0));
                }
                if j + 1 < ny {
                    t.push((k, k + nx, -1.0));
                }
            }
        }
        Self::from_triplets(n, t)
    }
}
