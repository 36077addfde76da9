use num_complex::Complex64 as C64;

use super::{fix_phase, residual, GroundStateResult, Method};
use crate::error::Result;
use crate::linalg::{to_dense, LinearOperator};

pub(super) fn solve(op: &dyn LinearOperator) -> Result<GroundStateResult> {
    let n = op.dim();
    let m = to_dense(op);
    let sym = (&m + m.adjoint()) * C64::new(0.5, 0.0);
    let eig = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let k = order[0];
    let energy = eig.eigenvalues[k];
    let mut vector: Vec<C64> = eig.eigenvectors.column(k).iter().copied().collect();
    let scale = vector.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    vector.iter_mut().for_each(|x| *x /= scale);
    fix_phase(&mut vector);
    let gap = order.get(1).map(|&j| eig.eigenvalues[j] - energy);
    Ok(GroundStateResult {
        energy,
        residual: residual(op, &vector, energy),
        vector,
        iterations: n + 1,
        method: Method::Dense,
        gap,
        degenerate: false,
        seed: 0,
        hermiticity_defect: 0.0,
        metadata: Default::default(),
    })
}
