//! Quadrature-based computation of `A^alpha b` for Hermitian positive
//! definite `A` and `0 < alpha < 1`, with a per-node stopping rule for the
//! shifted CG solves that certifies the total 2-norm error stays below a
//! prescribed tolerance.
//!
//! The pipeline is
//!
//! 1. enclose the spectrum ([`spectral`]),
//! 2. pick the smallest quadrature rule whose scalar error at probe
//!    eigenvalues fits the quadrature share of the budget ([`quadrature`]),
//! 3. derive one residual threshold per node ([`error_control`]),
//! 4. solve all shifted systems with a single Krylov sequence ([`shifted_cg`]),
//! 5. assemble `y = A sum_k omega_k x_k`.
//!
//! [`oracle`] holds dense reference computations used for verification.

pub mod error;
pub mod error_control;
pub mod experiment;
pub mod mmio;
pub mod oracle;
pub mod quadrature;
pub mod scalar;
pub mod shifted_cg;
pub mod sparse;
pub mod spectral;
mod tridiag;

pub use error::{Error, Result};
pub use error_control::{
    fracpow_action, fracpow_action_with, node_error_bound, prop1_coefficient, residual_threshold,
    ActionOptions, ActionResult, ErrorBudget, NodeCount,
};
pub use quadrature::{Family, ProbeSpec, ShiftedQuadratureRule};
pub use scalar::Scalar;
pub use shifted_cg::{shifted_cg_solve, ShiftedSolveReport, ShiftedSolveRequest};
pub use sparse::HermitianSparseMatrix;
pub use spectral::{estimate_spectral_bounds, SpectralBounds};
