//! Variational choice of the single-plaquette basis couplings.
//!
//! The truncated ground energy `E(g_b)` is a cost function; the renormalized
//! basis is its minimizer, searched in `ln g_b`.

mod evaluate;
mod optimize;

pub use evaluate::{evaluate_energy, Evaluation, Problem, G_BASIS_MAX, G_BASIS_MIN};
pub use optimize::{
    optimize, optimize_with, OptimizeMode, OptimizerOptions, TraceEntry, VariationalResult,
};
