//! Multi-shift conjugate gradients for `(sigma_k I + A) x_k = b`.
//!
//! CG runs on the seed system with the smallest shift. Every other shift
//! `delta_k = sigma_k - sigma_seed` reuses the seed Krylov basis: its residual
//! is `zeta_k r_seed`, so one matvec per iteration serves all shifts.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::scalar::{axpy, dot_re, norm2, Scalar};
use crate::sparse::HermitianSparseMatrix;

/// Curvature or seed-residual magnitude treated as a breakdown.
pub const BREAKDOWN: f64 = 1e-300;

#[derive(Debug, Clone)]
pub struct ShiftedSolveRequest {
    pub shifts: Vec<f64>,
    pub thresholds: Vec<f64>,
    /// Defaults to `10 n`.
    pub max_iterations: Option<usize>,
    pub record_history: bool,
}

impl ShiftedSolveRequest {
    pub fn new(shifts: Vec<f64>, thresholds: Vec<f64>) -> Self {
        Self {
            shifts,
            thresholds,
            max_iterations: None,
            record_history: false,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.shifts.is_empty() {
            return Err(invalid("at least one shift is required"));
        }
        if self.shifts.len() != self.thresholds.len() {
            return Err(Error::DimensionMismatch {
                expected: self.shifts.len(),
                actual: self.thresholds.len(),
            });
        }
        if let Some(s) = self.shifts.iter().find(|s| !(**s >= 0.0 && s.is_finite())) {
            return Err(invalid(format!("shifts must be finite and >= 0, got {s}")));
        }
        if let Some(t) = self.thresholds.iter().find(|t| !(**t > 0.0)) {
            return Err(invalid(format!("thresholds must be positive, got {t}")));
        }
        if self.max_iterations == Some(0) {
            return Err(invalid("max_iterations must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ShiftOutcome {
    pub shift: f64,
    pub threshold: f64,
    pub iterations_used: usize,
    /// Explicitly recomputed `||b - (sigma I + A) x||`.
    pub final_residual_norm: f64,
    /// Recurrence estimate `|zeta| ||r_seed||` at the last iteration.
    pub tracked_residual_norm: f64,
    pub converged: bool,
    /// The true residual stopped decreasing above the threshold.
    pub stagnated: bool,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct HistoryRow {
    pub iteration: usize,
    pub shift_index: usize,
    pub tracked_residual_norm: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ShiftedSolveReport {
    pub shifts: Vec<ShiftOutcome>,
    /// Joint iterations, one matvec each.
    pub total_matvecs: usize,
    /// Extra matvecs spent on explicit residual checks.
    pub verification_matvecs: usize,
    pub residual_history: Option<Vec<HistoryRow>>,
}

impl ShiftedSolveReport {
    pub fn all_converged(&self) -> bool {
        self.shifts.iter().all(|s| s.converged)
    }

    /// CSV with header `iteration,shift_index,tracked_residual_norm`.
    pub fn write_history_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "iteration,shift_index,tracked_residual_norm")?;
        for row in self.residual_history.iter().flatten() {
            writeln!(
                w,
                "{},{},{:e}",
                row.iteration, row.shift_index, row.tracked_residual_norm
            )?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
struct ShiftState<T> {
    sigma: f64,
    delta: f64,
    x: Vec<T>,
    p: Vec<T>,
    zeta: f64,
    zeta_prev: f64,
    active: bool,
    frozen_at: Option<usize>,
}

/// Iteration state of multi-shift CG. Each call to [`ShiftedCg::step`]
/// performs one matvec and advances every active shift.
pub struct ShiftedCg<'a, T: Scalar> {
    a: &'a HermitianSparseMatrix<T>,
    seed_shift: f64,
    r: Vec<T>,
    p: Vec<T>,
    w: Vec<T>,
    rr: f64,
    alpha_prev: f64,
    beta_prev: f64,
    iteration: usize,
    states: Vec<ShiftState<T>>,
}

impl<'a, T: Scalar> ShiftedCg<'a, T> {
    pub fn new(a: &'a HermitianSparseMatrix<T>, b: &[T], shifts: &[f64]) -> Result<Self> {
        let n = a.n();
        if b.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: b.len(),
            });
        }
        if shifts.is_empty() {
            return Err(invalid("at least one shift is required"));
        }
        if let Some(s) = shifts.iter().find(|s| !(**s >= 0.0 && s.is_finite())) {
            return Err(invalid(format!("shifts must be finite and >= 0, got {s}")));
        }
        let seed_shift = shifts.iter().copied().fold(f64::INFINITY, f64::min);
        let states = shifts
            .iter()
            .map(|&s| ShiftState {
                sigma: s,
                delta: s - seed_shift,
                x: vec![T::zero(); n],
                p: b.to_vec(),
                zeta: 1.0,
                zeta_prev: 1.0,
                active: true,
                frozen_at: None,
            })
            .collect();
        Ok(Self {
            a,
            seed_shift,
            r: b.to_vec(),
            p: b.to_vec(),
            w: vec![T::zero(); n],
            rr: norm2(b).powi(2),
            alpha_prev: 1.0,
            beta_prev: 0.0,
            iteration: 0,
            states,
        })
    }

    pub fn iteration(&self) -> usize {
        self.iteration
    }

    pub fn seed_shift(&self) -> f64 {
        self.seed_shift
    }

    pub fn num_shifts(&self) -> usize {
        self.states.len()
    }

    pub fn seed_residual(&self) -> &[T] {
        &self.r
    }

    pub fn seed_residual_norm(&self) -> f64 {
        self.rr.sqrt()
    }

    pub fn solution(&self, k: usize) -> &[T] {
        &self.states[k].x
    }

    pub fn zeta(&self, k: usize) -> f64 {
        self.states[k].zeta
    }

    pub fn tracked_residual_norm(&self, k: usize) -> f64 {
        self.states[k].zeta.abs() * self.rr.sqrt()
    }

    pub fn is_active(&self, k: usize) -> bool {
        self.states[k].active
    }

    pub fn any_active(&self) -> bool {
        self.states.iter().any(|s| s.active)
    }

    /// Stops updating shift `k`.
    pub fn freeze(&mut self, k: usize) {
        let s = &mut self.states[k];
        if s.active {
            s.active = false;
            s.frozen_at = Some(self.iteration);
        }
    }

    /// Resumes shift `k`. Only possible before the next step, since a frozen
    /// shift's recurrences fall out of sync with the seed.
    pub fn thaw(&mut self, k: usize) -> Result<()> {
        let it = self.iteration;
        let s = &mut self.states[k];
        match s.frozen_at {
            Some(f) if f == it => {
                s.active = true;
                s.frozen_at = None;
                Ok(())
            }
            None if s.active => Ok(()),
            _ => Err(invalid(format!(
                "shift {k} was frozen at an earlier iteration and cannot be resumed"
            ))),
        }
    }

    /// `||b - (sigma_k I + A) x_k||` computed explicitly; one matvec.
    pub fn true_residual_norm(&self, b: &[T], k: usize) -> f64 {
        true_residual(self.a, b, self.states[k].sigma, &self.states[k].x)
    }

    /// One joint iteration.
    pub fn step(&mut self) -> Result<()> {
        let a = self.a;
        a.apply(&self.p, &mut self.w);
        if self.seed_shift != 0.0 {
            axpy(self.seed_shift, &self.p, &mut self.w);
        }
        let pap = dot_re(&self.p, &self.w);
        if !(pap.abs() > BREAKDOWN) || !(self.rr > BREAKDOWN) {
            return Err(Error::Breakdown {
                iteration: self.iteration,
                reason: format!("p^H A p = {pap:e}, ||r||^2 = {:e}", self.rr),
            });
        }
        if pap < 0.0 {
            return Err(Error::NotPositiveDefinite(format!(
                "negative curvature {pap:e} at iteration {}",
                self.iteration
            )));
        }
        let alpha = self.rr / pap;
        let (alpha_prev, beta_prev) = (self.alpha_prev, self.beta_prev);

        // zeta_{i+1} and the new iterate for every active shift
        let zeta_next: Vec<f64> = self
            .states
            .par_iter_mut()
            .with_min_len(4)
            .map(|s| {
                if !s.active {
                    return s.zeta;
                }
                let denom = alpha * beta_prev * (s.zeta_prev - s.zeta)
                    + s.zeta_prev * alpha_prev * (1.0 + s.delta * alpha);
                let zn = s.zeta * s.zeta_prev * alpha_prev / denom;
                let ak = if s.zeta != 0.0 { alpha * zn / s.zeta } else { 0.0 };
                axpy(ak, &s.p, &mut s.x);
                zn
            })
            .collect();

        axpy(-alpha, &self.w, &mut self.r);
        let rr_new = norm2(&self.r).powi(2);
        let beta = rr_new / self.rr;

        let r = &self.r;
        self.states
            .par_iter_mut()
            .with_min_len(4)
            .zip(zeta_next.par_iter())
            .for_each(|(s, &zn)| {
                if !s.active {
                    return;
                }
                let ratio = if s.zeta != 0.0 { zn / s.zeta } else { 0.0 };
                let bk = beta * ratio * ratio;
                for (pi, &ri) in s.p.iter_mut().zip(r) {
                    *pi = ri.scale(zn) + pi.scale(bk);
                }
                s.zeta_prev = s.zeta;
                s.zeta = zn;
            });

        for (pi, &ri) in self.p.iter_mut().zip(&self.r) {
            *pi = ri + pi.scale(beta);
        }
        self.alpha_prev = alpha;
        self.beta_prev = beta;
        self.rr = rr_new;
        self.iteration += 1;
        Ok(())
    }

    pub fn into_solutions(self) -> Vec<Vec<T>> {
        self.states.into_iter().map(|s| s.x).collect()
    }
}

fn true_residual<T: Scalar>(a: &HermitianSparseMatrix<T>, b: &[T], sigma: f64, x: &[T]) -> f64 {
    let mut ax = vec![T::zero(); x.len()];
    a.apply(x, &mut ax);
    let r: Vec<T> = b
        .iter()
        .zip(&ax)
        .zip(x)
        .map(|((&bi, &axi), &xi)| bi - axi - xi.scale(sigma))
        .collect();
    norm2(&r)
}

/// Per-shift bookkeeping for the stopping logic of [`shifted_cg_solve`].
struct Watch {
    target: f64,
    /// Extra check level near the attainable accuracy, so absurd thresholds
    /// end in a stagnation verdict instead of residual underflow.
    floor: f64,
    last_true: Option<f64>,
    done: bool,
}

/// Solves all shifted systems, stopping each shift once its explicitly
/// recomputed residual meets its threshold.
///
/// A shift is checked explicitly as soon as its tracked residual meets the
/// current target. If the true residual is still too large the shift keeps
/// iterating with a target tightened by the observed true/tracked ratio. A
/// shift whose true residual fails to halve between two checks has hit the
/// attainable-accuracy floor and is reported unconverged.
pub fn shifted_cg_solve<T: Scalar>(
    a: &HermitianSparseMatrix<T>,
    b: &[T],
    req: &ShiftedSolveRequest,
) -> Result<(Vec<Vec<T>>, ShiftedSolveReport)> {
    req.validate()?;
    let n = a.n();
    let max_iter = req.max_iterations.unwrap_or(10 * n).max(1);
    let mut cg = ShiftedCg::new(a, b, &req.shifts)?;
    let m = req.shifts.len();
    let floor = 1e-2 * f64::EPSILON * norm2(b);
    let mut watch: Vec<Watch> = req
        .thresholds
        .iter()
        .map(|&t| Watch {
            target: t,
            floor,
            last_true: None,
            done: false,
        })
        .collect();
    let mut outcomes: Vec<ShiftOutcome> = req
        .shifts
        .iter()
        .zip(&req.thresholds)
        .map(|(&shift, &threshold)| ShiftOutcome {
            shift,
            threshold,
            iterations_used: 0,
            final_residual_norm: f64::NAN,
            tracked_residual_norm: f64::NAN,
            converged: false,
            stagnated: false,
        })
        .collect();
    let mut history = req.record_history.then(Vec::new);
    let mut verification = 0usize;

    loop {
        let it = cg.iteration();
        let exact = cg.seed_residual_norm() == 0.0;
        if let Some(h) = history.as_mut() {
            for k in (0..m).filter(|&k| cg.is_active(k)) {
                h.push(HistoryRow {
                    iteration: it,
                    shift_index: k,
                    tracked_residual_norm: cg.tracked_residual_norm(k),
                });
            }
        }
        let candidates: Vec<usize> = (0..m)
            .filter(|&k| {
                cg.is_active(k)
                    && (exact || cg.tracked_residual_norm(k) <= watch[k].target.max(watch[k].floor))
            })
            .collect();
        let checks: Vec<f64> = candidates
            .par_iter()
            .map(|&k| cg.true_residual_norm(b, k))
            .collect();
        verification += candidates.len();
        for (&k, &true_res) in candidates.iter().zip(&checks) {
            let tracked = cg.tracked_residual_norm(k);
            let o = &mut outcomes[k];
            o.iterations_used = it;
            o.final_residual_norm = true_res;
            o.tracked_residual_norm = tracked;
            if exact || true_res <= req.thresholds[k] {
                o.converged = true_res <= req.thresholds[k];
                watch[k].done = true;
                cg.freeze(k);
                continue;
            }
            let stalled = watch[k].last_true.is_some_and(|prev| true_res > 0.5 * prev)
                || !(tracked > 0.0);
            if stalled {
                o.stagnated = true;
                watch[k].done = true;
                cg.freeze(k);
                log::debug!(
                    "shift {k} (sigma={:e}) stagnated at true residual {true_res:e} > {:e}",
                    req.shifts[k],
                    req.thresholds[k]
                );
            } else {
                watch[k].last_true = Some(true_res);
                watch[k].target = tracked * (req.thresholds[k] / true_res);
                watch[k].floor = watch[k].floor.min(tracked) * 1e-2;
            }
        }
        if !cg.any_active() || it >= max_iter {
            break;
        }
        cg.step()?;
    }

    // Shifts still running at the iteration cap get one honest final check.
    let it = cg.iteration();
    let pending: Vec<usize> = (0..m).filter(|&k| !watch[k].done).collect();
    let checks: Vec<f64> = pending
        .par_iter()
        .map(|&k| cg.true_residual_norm(b, k))
        .collect();
    verification += pending.len();
    for (&k, &true_res) in pending.iter().zip(&checks) {
        let o = &mut outcomes[k];
        o.iterations_used = it;
        o.final_residual_norm = true_res;
        o.tracked_residual_norm = cg.tracked_residual_norm(k);
        o.converged = true_res <= req.thresholds[k];
    }
    let total_matvecs = outcomes.iter().map(|o| o.iterations_used).max().unwrap_or(0);
    let report = ShiftedSolveReport {
        shifts: outcomes,
        total_matvecs,
        verification_matvecs: verification,
        residual_history: history,
    };
    Ok((cg.into_solutions(), report))
}

/// Plain CG on `(sigma I + A) x = b` from `x = 0`, exposed step by step for
/// comparisons against the multi-shift iterates.
pub struct PlainCg<'a, T: Scalar> {
    a: &'a HermitianSparseMatrix<T>,
    sigma: f64,
    x: Vec<T>,
    r: Vec<T>,
    p: Vec<T>,
    w: Vec<T>,
    rr: f64,
    iteration: usize,
}

impl<'a, T: Scalar> PlainCg<'a, T> {
    pub fn new(a: &'a HermitianSparseMatrix<T>, b: &[T], sigma: f64) -> Result<Self> {
        if b.len() != a.n() {
            return Err(Error::DimensionMismatch {
                expected: a.n(),
                actual: b.len(),
            });
        }
        Ok(Self {
            a,
            sigma,
            x: vec![T::zero(); b.len()],
            r: b.to_vec(),
            p: b.to_vec(),
            w: vec![T::zero(); b.len()],
            rr: norm2(b).powi(2),
            iteration: 0,
        })
    }

    pub fn iteration(&self) -> usize {
        self.iteration
    }

    pub fn solution(&self) -> &[T] {
        &self.x
    }

    /// Recursively updated residual.
    pub fn residual(&self) -> &[T] {
        &self.r
    }

    pub fn residual_norm(&self) -> f64 {
        self.rr.sqrt()
    }

    pub fn step(&mut self) -> Result<()> {
        self.a.apply(&self.p, &mut self.w);
        axpy(self.sigma, &self.p, &mut self.w);
        let pap = dot_re(&self.p, &self.w);
        if !(pap > BREAKDOWN) || !(self.rr > BREAKDOWN) {
            return Err(Error::Breakdown {
                iteration: self.iteration,
                reason: format!("p^H A p = {pap:e}, ||r||^2 = {:e}", self.rr),
            });
        }
        let alpha = self.rr / pap;
        axpy(alpha, &self.p, &mut self.x);
        axpy(-alpha, &self.w, &mut self.r);
        let rr_new = norm2(&self.r).powi(2);
        let beta = rr_new / self.rr;
        for (pi, &ri) in self.p.iter_mut().zip(&self.r) {
            *pi = ri + pi.scale(beta);
        }
        self.rr = rr_new;
        self.iteration += 1;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type M = HermitianSparseMatrix<f64>;

    fn rel_diff(x: &[f64], y: &[f64]) -> f64 {
        let d: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
        norm2(&d) / norm2(y).max(f64::MIN_POSITIVE)
    }

    #[test]
    fn identity_one_step() {
        let a = M::identity(4).unwrap();
        let b = vec![1.0; 4];
        let req = ShiftedSolveRequest::new(vec![0.0, 1.0], vec![1e-12; 2]);
        let (x, rep) = shifted_cg_solve(&a, &b, &req).unwrap();
        assert!(rel_diff(&x[0], &b) < 1e-15);
        assert!(rel_diff(&x[1], &[0.5; 4]) < 1e-15);
        assert!(rep.all_converged());
        assert_eq!(rep.total_matvecs, 1);
    }

    #[test]
    fn two_eigenvalues_two_steps() {
        let a = M::diagonal(&[1.0, 2.0]).unwrap();
        let req = ShiftedSolveRequest::new(vec![0.0], vec![1e-14]);
        let (x, rep) = shifted_cg_solve(&a, &[1.0, 1.0], &req).unwrap();
        assert!(rel_diff(&x[0], &[1.0, 0.5]) < 1e-14);
        assert!(rep.shifts[0].iterations_used <= 2);
        assert!(rep.shifts[0].converged);
    }

    #[test]
    fn matches_plain_cg_on_grid() {
        let a = M::laplacian_2d(32, 32).unwrap();
        let b = vec![1.0; a.n()];
        let shifts = vec![0.1, 1.0, 10.0, 100.0];
        let req = ShiftedSolveRequest::new(shifts.clone(), vec![1e-10; 4]);
        let (x, rep) = shifted_cg_solve(&a, &b, &req).unwrap();
        assert!(rep.all_converged());
        for (k, &s) in shifts.iter().enumerate() {
            let mut cg = PlainCg::new(&a, &b, s).unwrap();
            while cg.residual_norm() > 1e-12 {
                cg.step().unwrap();
            }
            assert!(rel_diff(&x[k], cg.solution()) < 1e-8, "sigma={s}");
            assert!(rep.shifts[k].final_residual_norm <= 1e-10);
        }
    }

    #[test]
    fn collinear_residuals() {
        let a = M::laplacian_1d(30).unwrap();
        let b: Vec<f64> = (0..30).map(|i| 1.0 + (i as f64).sin()).collect();
        let shifts = [0.3, 0.5, 2.0, 7.5];
        let mut cg = ShiftedCg::new(&a, &b, &shifts).unwrap();
        for _ in 0..15 {
            cg.step().unwrap();
            for (k, &s) in shifts.iter().enumerate() {
                let mut r = a.matvec(cg.solution(k)).unwrap();
                for ((ri, &bi), &xi) in r.iter_mut().zip(&b).zip(cg.solution(k)) {
                    *ri = bi - *ri - s * xi;
                }
                let predicted: Vec<f64> = cg.seed_residual().iter().map(|v| v * cg.zeta(k)).collect();
                // below this the explicit residual is dominated by rounding
                if norm2(&predicted) > 1e-6 * norm2(&b) {
                    assert!(rel_diff(&r, &predicted) < 1e-8, "k={k}");
                }
            }
        }
    }

    #[test]
    fn optimistic_tracking_gets_rechecked() {
        // an unattainable threshold must come back unconverged, not be trusted
        let a = M::laplacian_1d(200).unwrap();
        let b = vec![1.0; 200];
        let req = ShiftedSolveRequest::new(vec![0.0, 1.0], vec![1e-300, 1e-10]);
        let (_, rep) = shifted_cg_solve(&a, &b, &req).unwrap();
        assert!(!rep.shifts[0].converged);
        assert!(rep.shifts[1].converged);
        assert!(rep.shifts[1].final_residual_norm <= 1e-10);
    }

    #[test]
    fn iteration_cap_flags_unconverged() {
        let a = M::laplacian_1d(100).unwrap();
        let b = vec![1.0; 100];
        let mut req = ShiftedSolveRequest::new(vec![0.0], vec![1e-12]);
        req.max_iterations = Some(3);
        let (_, rep) = shifted_cg_solve(&a, &b, &req).unwrap();
        assert!(!rep.shifts[0].converged);
        assert_eq!(rep.shifts[0].iterations_used, 3);
        assert!(rep.shifts[0].final_residual_norm > 1e-12);
    }

    #[test]
    fn history_csv() {
        let a = M::laplacian_1d(10).unwrap();
        let mut req = ShiftedSolveRequest::new(vec![0.0, 5.0], vec![1e-8; 2]);
        req.record_history = true;
        let (_, rep) = shifted_cg_solve(&a, &[1.0; 10], &req).unwrap();
        let mut out = Vec::new();
        rep.write_history_csv(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert!(text.starts_with("iteration,shift_index,tracked_residual_norm\n0,0,"));
        assert!(text.lines().count() > 3);
    }

    #[test]
    fn zero_rhs_is_exact() {
        let a = M::laplacian_1d(5).unwrap();
        let req = ShiftedSolveRequest::new(vec![0.0, 2.0], vec![1e-12; 2]);
        let (x, rep) = shifted_cg_solve(&a, &[0.0; 5], &req).unwrap();
        assert!(rep.all_converged());
        assert_eq!(rep.total_matvecs, 0);
        assert!(x.iter().flatten().all(|&v| v == 0.0));
    }

    #[test]
    fn validates_request() {
        let a = M::identity(2).unwrap();
        let b = [1.0, 1.0];
        assert!(shifted_cg_solve(&a, &b, &ShiftedSolveRequest::new(vec![], vec![])).is_err());
        assert!(shifted_cg_solve(&a, &b, &ShiftedSolveRequest::new(vec![1.0], vec![1.0, 2.0])).is_err());
        assert!(shifted_cg_solve(&a, &b, &ShiftedSolveRequest::new(vec![-1.0], vec![1.0])).is_err());
        assert!(shifted_cg_solve(&a, &b, &ShiftedSolveRequest::new(vec![1.0], vec![0.0])).is_err());
        assert!(shifted_cg_solve(&a, &[1.0], &ShiftedSolveRequest::new(vec![1.0], vec![1.0])).is_err());
    }

    #[test]
    fn complex_hermitian() {
        use num_complex::Complex64 as C;
        let a = HermitianSparseMatrix::<C>::from_triplets(
            2,
            vec![
                (0, 0, C::new(2.0, 0.0)),
                (0, 1, C::new(0.0, 1.0)),
                (1, 0, C::new(0.0, -1.0)),
                (1, 1, C::new(2.0, 0.0)),
            ],
        )
        .unwrap();
        let b = [C::new(1.0, 0.0), C::new(0.0, 1.0)];
        let req = ShiftedSolveRequest::new(vec![0.0, 1.0], vec![1e-13; 2]);
        let (x, rep) = shifted_cg_solve(&a, &b, &req).unwrap();
        assert!(rep.all_converged());
        for (k, s) in [0.0, 1.0].into_iter().enumerate() {
            let ax = a.matvec(&x[k]).unwrap();
            for i in 0..2 {
                assert!((ax[i] + x[k][i] * s - b[i]).norm() < 1e-13);
            }
        }
    }
}
