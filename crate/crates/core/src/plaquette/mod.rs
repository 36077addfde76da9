//! Single-plaquette problem: `H_SP(g) = 2g²R² + (2 − P − P†)/(2g²)`.
//!
//! The eigenproblem is solved in a parity-resolved Fourier basis, where
//! both sectors are symmetric tridiagonal. The lowest `l_max + 1` states
//! define the local basis used by every many-body Hamiltonian, and
//! [`OperatorTable`] carries the truncated `R`, `R²`, `cos θ`, `sin θ`, `P`
//! and `P†` in that basis.

mod asymptotic;
mod cache;
mod eigenbasis;
mod fourier;
mod table;
mod tridiag;

pub use asymptotic::{asymptotic_oracle, Regime};
pub use cache::{cache_key, BasisCache, CachedBasis};
pub use eigenbasis::{
    solve_single_plaquette, solve_single_plaquette_default, Parity, PlaquetteEigenbasis,
    CONVERGENCE_TOL, DEGENERACY_TOL,
};
pub use fourier::{
    build_fourier_hamiltonian, cos_even_element, cos_odd_element, sin_odd_even_element,
    FourierOperators, FourierTruncation, SectorHamiltonians, SymTridiagonal,
};
pub use table::{build_operator_table, OperatorTable};

use std::sync::Arc;

use crate::error::Result;

/// Basis choice for one plaquette slot.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BasisParameter {
    /// Single-plaquette eigenbasis at this `g_b`.
    Coupling(f64),
    /// The `g_b → ∞` limit (pure Fourier modes).
    Electric,
}

/// Operator table for one slot at the requested basis parameter.
pub fn table_for(param: BasisParameter, l_max: usize) -> Result<OperatorTable> {
    let basis = match param {
        BasisParameter::Coupling(g) => solve_single_plaquette_default(g, l_max)?,
        BasisParameter::Electric => PlaquetteEigenbasis::electric(l_max),
    };
    Ok(OperatorTable::new(Arc::new(basis)))
}
