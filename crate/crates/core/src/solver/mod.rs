//! Lowest eigenpair of a Hermitian operator.
//!
//! Small problems are materialized and diagonalized densely; larger ones use
//! restarted Lanczos with full reorthogonalization from a seeded start vector.

mod dense;
mod lanczos;

use std::collections::BTreeMap;

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{dot, norm, LinearOperator, SparseMatrix};

pub const DEFAULT_SEED: u64 = 0x5EED;
pub const DEFAULT_MAX_APPLICATIONS: usize = 5000;
pub const DEFAULT_DENSE_THRESHOLD: usize = 128;
pub const HERMITICITY_TOL: f64 = 1e-10;
pub const RESIDUAL_TOL: f64 = 1e-9;
pub const DEGENERACY_GAP: f64 = 1e-8;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Dense below `dense_threshold`, Lanczos otherwise.
    #[default]
    Auto,
    Dense,
    Lanczos,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    pub seed: u64,
    pub max_applications: usize,
    pub dense_threshold: usize,
    pub method: Method,
    /// Krylov vectors kept between restarts.
    pub krylov_dim: usize,
    /// Residual target relative to `max(1, |E|)`.
    pub tolerance: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            max_applications: DEFAULT_MAX_APPLICATIONS,
            dense_threshold: DEFAULT_DENSE_THRESHOLD,
            method: Method::Auto,
            krylov_dim: 80,
            tolerance: RESIDUAL_TOL,
        }
    }
}

impl SolverOptions {
    pub fn with_method(mut self, method: Method) -> Self {
        self.method = method;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroundStateResult {
    pub energy: f64,
    pub vector: Vec<C64>,
    /// `‖Hv − Ev‖`.
    pub residual: f64,
    /// Operator applications.
    pub iterations: usize,
    pub method: Method,
    /// Estimate of the first excitation gap, when available.
    pub gap: Option<f64>,
    pub degenerate: bool,
    pub seed: u64,
    pub hermiticity_defect: f64,
    pub metadata: BTreeMap<String, String>,
}

pub(crate) fn random_vector(rng: &mut ChaCha8Rng, n: usize) -> Vec<C64> {
    (0..n)
        .map(|_| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
        .collect()
}

/// Relative mismatch of `⟨x, Ay⟩` and `⟨Ax, y⟩` on seeded random vectors.
pub fn hermiticity_probe(op: &dyn LinearOperator, seed: u64) -> f64 {
    let n = op.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xA5A5_A5A5);
    let x = random_vector(&mut rng, n);
    let y = random_vector(&mut rng, n);
    let mut ax = vec![C64::new(0.0, 0.0); n];
    let mut ay = vec![C64::new(0.0, 0.0); n];
    op.apply(&x, &mut ax);
    op.apply(&y, &mut ay);
    let lhs = dot(&x, &ay);
    let rhs = dot(&ax, &y);
    let scale = norm(&x) * norm(&ay) + norm(&ax) * norm(&y);
    if scale == 0.0 {
        0.0
    } else {
        (lhs - rhs).norm() / scale
    }
}

pub(crate) fn residual(op: &dyn LinearOperator, v: &[C64], e: f64) -> f64 {
    let mut av = vec![C64::new(0.0, 0.0); v.len()];
    op.apply(v, &mut av);
    av.iter()
        .zip(v)
        .map(|(a, x)| (a - x * e).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// Fixes the global phase: the largest-magnitude component becomes real positive.
pub(crate) fn fix_phase(v: &mut [C64]) {
    let Some(pivot) = v
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()).then(b.0.cmp(&a.0)))
        .map(|(i, _)| i)
    else {
        return;
    };
    let p = v[pivot];
    if p.norm() > 0.0 {
        let phase = p.conj() / p.norm();
        v.iter_mut().for_each(|x| *x *= phase);
    }
}

/// Lowest eigenpair of `op`.
pub fn ground_state(op: &dyn LinearOperator, opts: &SolverOptions) -> Result<GroundStateResult> {
    let n = op.dim();
    if n == 0 {
        return Err(Error::EmptyBasis);
    }
    let defect = hermiticity_probe(op, opts.seed);
    if defect > HERMITICITY_TOL {
        return Err(Error::NonHermitian { defect });
    }
    let method = match opts.method {
        Method::Auto if n < opts.dense_threshold => Method::Dense,
        Method::Auto => Method::Lanczos,
        m => m,
    };
    let mut result = match method {
        Method::Dense => dense::solve(op)?,
        _ => lanczos::solve(op, opts)?,
    };
    result.seed = opts.seed;
    result.hermiticity_defect = defect;
    result.degenerate = result
        .gap
        .is_some_and(|gap| gap < DEGENERACY_GAP * result.energy.abs());
    if result.degenerate {
        log::warn!("near-degenerate ground state (gap {:?})", result.gap);
    }
    let target = opts.tolerance * result.energy.abs().max(1.0);
    if result.residual > target {
        return Err(Error::NoConvergence {
            applications: result.iterations,
            residual: result.residual,
        });
    }
    Ok(result)
}

/// Symmetrizes `h` before solving; the correction is logged.
pub fn ground_state_sparse(h: &SparseMatrix, opts: &SolverOptions) -> Result<GroundStateResult> {
    let (sym, correction) = h.hermitian_part();
    log::debug!("hermitian averaging correction {correction:.3e}");
    if correction > HERMITICITY_TOL {
        return Err(Error::NonHermitian { defect: correction });
    }
    let mut result = ground_state(&sym, opts)?;
    result.hermiticity_defect = result.hermiticity_defect.max(correction);
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{DenseOperator, TripletBuilder};
    use nalgebra::DMatrix;

    fn random_hermitian(n: usize, seed: u64) -> DMatrix<C64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = DMatrix::from_fn(n, n, |_, _| {
            C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        });
        (&a + a.adjoint()) * C64::new(0.5, 0.0)
    }

    fn lowest(m: &DMatrix<C64>) -> f64 {
        m.clone().symmetric_eigen().eigenvalues.min()
    }

    #[test]
    fn dense_and_lanczos_agree() {
        for (n, seed) in [(30, 1), (120, 2), (300, 3)] {
            let m = random_hermitian(n, seed);
            let op = DenseOperator(m.clone());
            let exact = lowest(&m);
            let d = ground_state(&op, &SolverOptions::default().with_method(Method::Dense)).unwrap();
            let l = ground_state(&op, &SolverOptions::default().with_method(Method::Lanczos)).unwrap();
            assert!((d.energy - exact).abs() <= 1e-10 * exact.abs().max(1.0));
            assert!((l.energy - d.energy).abs() <= 1e-9 * exact.abs().max(1.0));
            assert!((norm(&l.vector) - 1.0).abs() < 1e-12);
            assert!((norm(&d.vector) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let op = DenseOperator(random_hermitian(200, 7));
        let opts = SolverOptions::default().with_method(Method::Lanczos);
        let a = ground_state(&op, &opts).unwrap();
        let b = ground_state(&op, &opts).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_non_hermitian() {
        let mut b = TripletBuilder::new(2);
        b.push(0, 1, C64::new(1.0, 0.0));
        let m = b.build();
        assert!(matches!(
            ground_state(&m, &SolverOptions::default()),
            Err(Error::NonHermitian { .. })
        ));
    }

    #[test]
    fn degenerate_flag() {
        let m = SparseMatrix::identity(10, C64::new(-2.0, 0.0));
        let r = ground_state(&m, &SolverOptions::default()).unwrap();
        assert!(r.degenerate);
        assert_eq!(r.energy, -2.0);
    }

    #[test]
    fn one_dimensional() {
        let m = SparseMatrix::identity(1, C64::new(3.5, 0.0));
        for method in [Method::Dense, Method::Lanczos] {
            let r = ground_state(&m, &SolverOptions::default().with_method(method)).unwrap();
            assert_eq!(r.energy, 3.5);
            assert_eq!(r.gap, None);
        }
    }
}
