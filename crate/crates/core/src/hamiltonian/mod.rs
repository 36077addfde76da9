//! Dual many-body Hamiltonians as symbolic sums of tensor-product terms.
//!
//! Each gauge slot carries one [`LocalOp`] per term; matter models add a
//! [`FermionOp`] acting on occupation numbers in a fixed site order.

mod builders;
mod model;
mod terms;

pub use builders::{
    build_hamiltonian, build_minimal_torus, build_obc_pure_gauge, build_obc_qed_2x2,
    build_pbc_pure_gauge_nn, CONVENTION_FERMION_ORDER, CONVENTION_MAGNETIC_SIGN,
    CONVENTION_TORUS_CONSTANT,
};
pub use model::{
    beta_from_g, g_from_beta, Boundary, LatticeModel, Matter, OBC_MAX_SQUARE, OBC_MAX_STRIP,
};
pub use terms::{FermionOp, HamiltonianTermList, LocalOp, Term, TermSum};
