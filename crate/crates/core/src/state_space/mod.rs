//! Truncated many-body bases and operator projection.

mod basis;
pub mod fermion;
mod projection;
mod scheme;
mod tensor;

pub use basis::{enumerate_basis, ManyBodyBasis};
pub use projection::{assemble, project_term};
pub use scheme::{FermionSector, ParitySector, TruncationScheme};
pub use tensor::TensorOperator;
