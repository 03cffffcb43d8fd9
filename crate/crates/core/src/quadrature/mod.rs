//! Shifted quadrature rules for `A^alpha = (sin(alpha pi)/(alpha pi)) A int_0^inf (t^(1/alpha) I + A)^{-1} dt`.
//!
//! Every rule is reduced to the canonical form
//! `A^alpha b ~ sum_k omega_k A (sigma_k I + A)^{-1} b`, whose scalar shadow
//! `Q_m(lambda)` drives the choice of node count.

mod gauss_jacobi;
mod probe;
mod rule;

pub use gauss_jacobi::{gauss_jacobi_nodes, jacobi_mass, GaussJacobiRule};
pub use probe::{
    select_node_count, select_node_count_with, NodeSelection, ProbeSpec, INTERIOR_PROBES,
    MAX_NODES,
};
pub use rule::{build_rule, DeParams, Family, QuadratureNode, ShiftedQuadratureRule};
pub(crate) use rule::check_alpha;
