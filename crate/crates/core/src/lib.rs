//! Renormalized dual basis for compact U(1) lattice gauge theory in 2+1
//! dimensions.
//!
//! The pipeline runs single-plaquette eigenbasis ([`plaquette`]), then the
//! symbolic lattice Hamiltonian ([`hamiltonian`]), then the truncated
//! many-body basis ([`state_space`]) and the ground state ([`solver`]). The
//! choice of basis coupling is in [`variational`], and plaquette scans and
//! fits are in [`observables`].

pub mod error;
pub mod hamiltonian;
pub mod linalg;
pub mod observables;
pub mod plaquette;
pub mod solver;
pub mod state_space;
pub mod variational;
pub use error::{Error, Result};

// The guide's snippets run as doctests of this crate.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/single-plaquette.md")]
    mod single_plaquette {}
    #[doc = include_str!("../../../book/src/hamiltonians.md")]
    mod hamiltonians {}
    #[doc = include_str!("../../../book/src/truncation.md")]
    mod truncation {}
    #[doc = include_str!("../../../book/src/variational.md")]
    mod variational {}
    #[doc = include_str!("../../../book/src/observables.md")]
    mod observables {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
