//! Certified enclosures of the spectrum of a Hermitian matrix.
//!
//! Three ingredients are combined:
//!
//! * Gershgorin discs give an unconditional enclosure.
//! * A short Lanczos run (full reorthogonalization) gives Ritz values with
//!   residual norms, a tight but heuristic enclosure.
//! * Sylvester inertia of an envelope `LDL^H` factorization of `A - mu I`
//!   decides rigorously (up to the factorization's backward error) on which
//!   side of the spectrum `mu` lies. It is used to certify the Lanczos upper
//!   estimate and to bisect for a lower bound on `lambda_min` when the
//!   Gershgorin disc touches zero, as it does for every Laplacian.
//!
//! The inertia step is skipped when the envelope is too large to factor.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::scalar::{dot, norm2, Scalar};
use crate::sparse::HermitianSparseMatrix;
use crate::tridiag::tridiag_eig;

/// Enclosure `[lambda_lo, lambda_hi]` of the spectrum, `0 < lambda_lo <= lambda_hi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectralBounds {
    pub lambda_lo: f64,
    pub lambda_hi: f64,
}

impl SpectralBounds {
    pub fn new(lambda_lo: f64, lambda_hi: f64) -> Result<Self> {
        if !(lambda_lo > 0.0 && lambda_lo <= lambda_hi && lambda_hi.is_finite()) {
            return Err(invalid(format!(
                "spectral bounds require 0 < lo <= hi, got [{lambda_lo:e}, {lambda_hi:e}]"
            )));
        }
        Ok(Self {
            lambda_lo,
            lambda_hi,
        })
    }

    pub fn contains(&self, lambda: f64) -> bool {
        self.lambda_lo <= lambda && lambda <= self.lambda_hi
    }
}

#[derive(Debug, Clone)]
pub struct SpectralOptions {
    /// Lanczos steps used to refine the Gershgorin enclosure.
    pub refine_steps: usize,
    /// `lambda_lo` is never reported below `lo_floor_rel * lambda_hi`.
    pub lo_floor_rel: f64,
    /// Use envelope factorizations to certify the bounds.
    pub inertia: bool,
    /// Largest envelope (stored lower-profile entries) the inertia test
    /// will factor.
    pub max_envelope: usize,
    /// Seed for the Lanczos starting vector.
    pub seed: u64,
}

impl Default for SpectralOptions {
    fn default() -> Self {
        Self {
            refine_steps: 50,
            lo_floor_rel: 1e-12,
            inertia: true,
            max_envelope: 50_000_000,
            seed: 0x5eed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundSource {
    Gershgorin,
    Lanczos,
    Inertia,
    Floor,
}

/// Bounds together with the evidence they were derived from.
#[derive(Debug, Clone, Serialize)]
pub struct SpectralEstimate {
    pub bounds: SpectralBounds,
    pub gershgorin: (f64, f64),
    pub lanczos_steps: usize,
    pub ritz_min: Option<(f64, f64)>,
    pub ritz_max: Option<(f64, f64)>,
    pub lo_source: BoundSource,
    pub hi_source: BoundSource,
}

/// Spectral enclosure with default options and the given Lanczos step count.
pub fn estimate_spectral_bounds<T: Scalar>(
    a: &HermitianSparseMatrix<T>,
    refine_steps: usize,
) -> Result<SpectralBounds> {
    let opts = SpectralOptions {
        refine_steps,
        ..SpectralOptions::default()
    };
    Ok(estimate_spectral_bounds_with(a, &opts)?.bounds)
}

pub fn estimate_spectral_bounds_with<T: Scalar>(
    a: &HermitianSparseMatrix<T>,
    opts: &SpectralOptions,
) -> Result<SpectralEstimate> {
    let (g_lo, g_hi) = a.gershgorin();
    let norm_bound = g_hi.abs().max(g_lo.abs());
    let ritz = if opts.refine_steps > 0 {
        Some(lanczos_extremes(a, opts.refine_steps, opts.seed)?)
    } else {
        None
    };
    let envelope = Envelope::profile_size(a);
    let use_inertia = opts.inertia && envelope <= opts.max_envelope;
    // Backward-error allowance of an envelope Cholesky factorization.
    let width = a.bandwidth() as f64;
    let slack = (width + 2.0) * a.n() as f64 * f64::EPSILON * norm_bound;

    // Upper bound.
    let mut lambda_hi = g_hi;
    let mut hi_source = BoundSource::Gershgorin;
    if let Some(r) = &ritz {
        let candidate = r.max + r.max_residual;
        if candidate < g_hi {
            if use_inertia {
                if Envelope::factor_shifted(a, -1.0, -candidate).is_some() {
                    lambda_hi = (candidate + slack).min(g_hi);
                    hi_source = BoundSource::Inertia;
                }
            } else {
                lambda_hi = (candidate + 8.0 * f64::EPSILON * norm_bound).min(g_hi);
                hi_source = BoundSource::Lanczos;
            }
        }
    }
    if !(lambda_hi > 0.0) {
        return Err(Error::SpectralBounds(format!(
            "upper bound {lambda_hi:e} is not positive"
        )));
    }

    // Lower bound.
    let floor = opts.lo_floor_rel * lambda_hi;
    let rayleigh_min = {
        let dmin = a.diag().into_iter().fold(f64::INFINITY, f64::min);
        ritz.as_ref().map_or(dmin, |r| r.min.min(dmin))
    };
    if !(rayleigh_min > 0.0) {
        return Err(Error::NotPositiveDefinite(format!(
            "Rayleigh quotient {rayleigh_min:e} is not positive"
        )));
    }
    let (mut lambda_lo, mut lo_source) = if g_lo > floor {
        (g_lo, BoundSource::Gershgorin)
    } else {
        (floor, BoundSource::Floor)
    };
    if use_inertia {
        if rayleigh_min / lambda_lo > 1.02 {
            let (bis, certified) = bisect_lower_bound(a, lambda_lo, rayleigh_min)?;
            if !certified {
                return Err(Error::SpectralBounds(format!(
                    "A - {lambda_lo:e} I is not positive definite; lambda_min is below the floor or A is indefinite"
                )));
            }
            let bis = (bis - slack).max(0.5 * bis);
            if bis > lambda_lo {
                lambda_lo = bis;
                lo_source = BoundSource::Inertia;
            }
        }
    } else if let Some(r) = &ritz {
        let candidate = r.min - r.min_residual;
        if candidate > lambda_lo {
            lambda_lo = candidate;
            lo_source = BoundSource::Lanczos;
        }
    }
    lambda_lo = lambda_lo.min(lambda_hi);

    if !(g_lo > 0.0) && !use_inertia && lo_source == BoundSource::Floor {
        log::warn!(
            "lower spectral bound could not be certified; using floor {floor:e}"
        );
    }

    Ok(SpectralEstimate {
        bounds: SpectralBounds::new(lambda_lo, lambda_hi)?,
        gershgorin: (g_lo, g_hi),
        lanczos_steps: ritz.as_ref().map_or(0, |r| r.steps),
        ritz_min: ritz.as_ref().map(|r| (r.min, r.min_residual)),
        ritz_max: ritz.as_ref().map(|r| (r.max, r.max_residual)),
        lo_source,
        hi_source,
    })
}

/// Geometric bisection for the largest `mu` in `[floor, upper]` with
/// `A - mu I` positive definite. Returns `(mu, floor_was_certified)`.
fn bisect_lower_bound<T: Scalar>(
    a: &HermitianSparseMatrix<T>,
    floor: f64,
    upper: f64,
) -> Result<(f64, bool)> {
    if Envelope::factor_shifted(a, 1.0, floor).is_none() {
        return Ok((floor, false));
    }
    let mut lo = floor;
    let mut hi = upper;
    if hi <= lo {
        return Ok((lo, true));
    }
    while hi / lo > 1.02 {
        let mid = (lo * hi).sqrt();
        if Envelope::factor_shifted(a, 1.0, mid).is_some() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo, true))
}

#[derive(Debug, Clone)]
pub(crate) struct RitzExtremes {
    pub steps: usize,
    pub min: f64,
    pub min_residual: f64,
    pub max: f64,
    pub max_residual: f64,
}

/// Lanczos with full reorthogonalization from a seeded random start.
pub(crate) fn lanczos_extremes<T: Scalar>(
    a: &HermitianSparseMatrix<T>,
    steps: usize,
    seed: u64,
) -> Result<RitzExtremes> {
    let n = a.n();
    let k_max = steps.min(n).max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut q: Vec<T> = (0..n).map(|_| T::from_real(rng.gen_range(-1.0..1.0))).collect();
    let qn = norm2(&q);
    q.iter_mut().for_each(|v| *v = v.scale(1.0 / qn));

    let (g_lo, g_hi) = a.gershgorin();
    let scale = g_lo.abs().max(g_hi.abs()).max(f64::MIN_POSITIVE);
    let mut basis: Vec<Vec<T>> = Vec::with_capacity(k_max);
    let mut alphas = Vec::with_capacity(k_max);
    let mut betas: Vec<f64> = Vec::with_capacity(k_max);
    let mut w = vec![T::zero(); n];
    let mut last_beta = 0.0;
    for j in 0..k_max {
        a.apply(&q, &mut w);
        let alpha = dot(&q, &w).re();
        for (wi, &qi) in w.iter_mut().zip(&q) {
            *wi -= qi.scale(alpha);
        }
        if let (Some(prev), Some(&b)) = (basis.last(), betas.last()) {
            for (wi, &pi) in w.iter_mut().zip(prev.iter()) {
                *wi -= pi.scale(b);
            }
        }
        basis.push(std::mem::take(&mut q));
        alphas.push(alpha);
        for _ in 0..2 {
            for v in &basis {
                let c = dot(v, &w);
                for (wi, &vi) in w.iter_mut().zip(v) {
                    *wi -= vi * c;
                }
            }
        }
        let beta = norm2(&w);
        last_beta = beta;
        if j + 1 == k_max || beta <= 1e-14 * scale {
            break;
        }
        betas.push(beta);
        q = w.iter().map(|v| v.scale(1.0 / beta)).collect();
    }
    let k = alphas.len();
    let eig = tridiag_eig(&alphas, &betas, &[k - 1])?;
    let last = &eig.rows[0];
    Ok(RitzExtremes {
        steps: k,
        min: eig.values[0],
        min_residual: (last_beta * last[0]).abs(),
        max: eig.values[k - 1],
        max_residual: (last_beta * last[k - 1]).abs(),
    })
}

/// Envelope (skyline) storage of the lower triangle, used for `LDL^H`.
struct Envelope;

impl Envelope {
    fn first_cols<T: Scalar>(a: &HermitianSparseMatrix<T>) -> Vec<usize> {
        (0..a.n())
            .map(|i| a.row(i).next().map_or(i, |(j, _)| j.min(i)))
            .collect()
    }

    fn profile_size<T: Scalar>(a: &HermitianSparseMatrix<T>) -> usize {
        Self::first_cols(a)
            .iter()
            .enumerate()
            .map(|(i, &f)| i - f + 1)
            .sum()
    }

    /// Attempts `LDL^H` of `sign * A - mu I`; returns the pivots if every
    /// pivot is positive (the shifted matrix is positive definite), `None`
    /// as soon as a non-positive pivot appears.
    fn factor_shifted<T: Scalar>(
        a: &HermitianSparseMatrix<T>,
        sign: f64,
        mu: f64,
    ) -> Option<Vec<f64>> {
        let n = a.n();
        let first = Self::first_cols(a);
        let mut start = vec![0usize; n + 1];
        for i in 0..n {
            start[i + 1] = start[i] + (i - first[i] + 1);
        }
        // l[start[i] + (j - first[i])] holds L_ij for first[i] <= j < i.
        let mut l = vec![T::zero(); start[n]];
        let mut d = vec![0.0f64; n];
        let mut wrow = vec![T::zero(); n];
        for i in 0..n {
            let fi = first[i];
            for j in fi..=i {
                wrow[j] = T::zero();
            }
            for (j, v) in a.row(i) {
                if j <= i {
                    wrow[j] = v.scale(sign);
                }
            }
            // w_j = a_ij - sum_k L_ik d_k conj(L_jk), then L_ij = w_j / d_j
            let mut diag = wrow[i].re() - mu;
            for j in fi..i {
                let fj = first[j];
                let lo = fi.max(fj);
                let mut acc = wrow[j];
                let li = &l[start[i] + (lo - fi)..start[i] + (j - fi)];
                let lj = &l[start[j] + (lo - fj)..start[j] + (j - fj)];
                for ((&x, &y), &dk) in li.iter().zip(lj).zip(&d[lo..j]) {
                    acc -= x * y.conj().scale(dk);
                }
                let lij = acc.scale(1.0 / d[j]);
                diag -= (lij * acc.conj()).re();
                l[start[i] + (j - fi)] = lij;
            }
            if !(diag > 0.0) {
                return None;
            }
            d[i] = diag;
        }
        Some(d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type M = HermitianSparseMatrix<f64>;

    fn lap_lambda(n: usize, j: usize) -> f64 {
        let s = (j as f64 * std::f64::consts::PI / (2.0 * (n + 1) as f64)).sin();
        4.0 * s * s
    }

    #[test]
    fn identity_bounds_are_points() {
        let b = estimate_spectral_bounds(&M::identity(5).unwrap(), 50).unwrap();
        assert_eq!(b.lambda_lo, 1.0);
        assert_eq!(b.lambda_hi, 1.0);
    }

    #[test]
    fn diagonal_enclosed() {
        let b = estimate_spectral_bounds(&M::diagonal(&[1.0, 4.0]).unwrap(), 50).unwrap();
        assert!(b.lambda_lo <= 1.0 && b.lambda_hi >= 4.0);
    }

    #[test]
    fn gershgorin_only_when_no_refinement() {
        let a = M::laplacian_1d(20).unwrap();
        let opts = SpectralOptions {
            refine_steps: 0,
            ..Default::default()
        };
        let est = estimate_spectral_bounds_with(&a, &opts).unwrap();
        assert_eq!(est.bounds.lambda_hi, 4.0);
        assert_eq!(est.hi_source, BoundSource::Gershgorin);
        assert!(est.bounds.lambda_lo <= lap_lambda(20, 1));
    }

    #[test]
    fn laplacian_enclosure_is_tight() {
        for &n in &[10usize, 57, 200, 1000] {
            let a = M::laplacian_1d(n).unwrap();
            let est = estimate_spectral_bounds_with(&a, &SpectralOptions::default()).unwrap();
            let (lmin, lmax) = (lap_lambda(n, 1), lap_lambda(n, n));
            assert!(est.bounds.lambda_hi >= lmax && est.bounds.lambda_hi <= 4.0);
            assert!(est.bounds.lambda_lo <= lmin, "n={n}: {:?}", est);
            assert!(est.bounds.lambda_lo >= 0.9 * lmin, "n={n}: {:?}", est);
        }
    }

    #[test]
    fn indefinite_rejected() {
        let a = M::from_triplets(2, vec![(0, 0, 1.0), (0, 1, 2.0), (1, 0, 2.0), (1, 1, 1.0)]).unwrap();
        assert!(estimate_spectral_bounds(&a, 50).is_err());
    }

    #[test]
    fn envelope_factor_matches_inertia() {
        let a = M::laplacian_2d(5, 4).unwrap();
        // lambda_min of the 5x4 grid Laplacian
        let lmin = lap_lambda(5, 1) + lap_lambda(4, 1);
        assert!(Envelope::factor_shifted(&a, 1.0, lmin * 0.999).is_some());
        assert!(Envelope::factor_shifted(&a, 1.0, lmin * 1.001).is_none());
        let lmax = lap_lambda(5, 5) + lap_lambda(4, 4);
        assert!(Envelope::factor_shifted(&a, -1.0, -lmax * 1.001).is_some());
        assert!(Envelope::factor_shifted(&a, -1.0, -lmax * 0.999).is_none());
    }

    #[test]
    fn rejects_bad_bounds() {
        assert!(SpectralBounds::new(0.0, 1.0).is_err());
        assert!(SpectralBounds::new(2.0, 1.0).is_err());
        assert!(SpectralBounds::new(1.0, 1.0).is_ok());
    }
}
