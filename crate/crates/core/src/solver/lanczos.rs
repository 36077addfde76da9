use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64 as C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{fix_phase, random_vector, residual, GroundStateResult, Method, SolverOptions};
use crate::error::{Error, Result};
use crate::linalg::{dot, norm, LinearOperator};

fn axpy(y: &mut [C64], a: C64, x: &[C64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

/// Two passes of classical Gram–Schmidt against `basis`.
fn orthogonalize(w: &mut [C64], basis: &[Vec<C64>]) {
    for _ in 0..2 {
        for v in basis {
            let c = dot(v, w);
            axpy(w, -c, v);
        }
    }
}

struct Ritz {
    values: Vec<f64>,
    ground: Vec<f64>,
}

fn tridiagonal_ritz(alpha: &[f64], beta: &[f64]) -> Ritz {
    let k = alpha.len();
    let t = DMatrix::from_fn(k, k, |i, j| {
        if i == j {
            alpha[i]
        } else if i + 1 == j {
            beta[i]
        } else if j + 1 == i {
            beta[j]
        } else {
            0.0
        }
    });
    let eig = SymmetricEigen::new(t);
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    Ritz {
        values: order.iter().map(|&i| eig.eigenvalues[i]).collect(),
        ground: eig.eigenvectors.column(order[0]).iter().copied().collect(),
    }
}

pub(super) fn solve(op: &dyn LinearOperator, opts: &SolverOptions) -> Result<GroundStateResult> {
    let n = op.dim();
    let m = opts.krylov_dim.clamp(2, n.max(2)).min(n);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut start = random_vector(&mut rng, n);
    let s = norm(&start);
    start.iter_mut().for_each(|x| *x /= s);

    let mut applications = 0usize;
    let mut w = vec![C64::new(0.0, 0.0); n];
    let mut last = (f64::NAN, f64::INFINITY);
    loop {
        let mut basis: Vec<Vec<C64>> = vec![start.clone()];
        let mut alpha = Vec::with_capacity(m);
        let mut beta: Vec<f64> = Vec::with_capacity(m);
        let mut estimate_scale = 1.0f64;
        let mut invariant = false;
        for j in 0..m {
            op.apply(&basis[j], &mut w);
            applications += 1;
            let a = dot(&basis[j], &w).re;
            alpha.push(a);
            estimate_scale = estimate_scale.max(a.abs());
            orthogonalize(&mut w, &basis);
            let b = norm(&w);
            invariant = b <= 1e-13 * estimate_scale;
            let check = invariant || j + 1 == m || (j >= 4 && j % 5 == 4);
            if check {
                let ritz = tridiagonal_ritz(&alpha, &beta);
                let bound = b * ritz.ground[j].abs();
                let target = 0.1 * opts.tolerance * ritz.values[0].abs().max(1.0);
                if invariant || bound < target || j + 1 == m {
                    break;
                }
            }
            if applications >= opts.max_applications {
                break;
            }
            beta.push(b);
            basis.push(w.iter().map(|x| x / b).collect());
        }
        let k = alpha.len();
        let ritz = tridiagonal_ritz(&alpha, &beta[..k - 1]);
        let mut v = vec![C64::new(0.0, 0.0); n];
        for (c, q) in ritz.ground.iter().zip(&basis) {
            axpy(&mut v, C64::new(*c, 0.0), q);
        }
        let s = norm(&v);
        v.iter_mut().for_each(|x| *x /= s);
        let energy = ritz.values[0];
        let res = residual(op, &v, energy);
        applications += 1;
        let target = opts.tolerance * energy.abs().max(1.0);
        if res <= target || k == n || invariant {
            fix_phase(&mut v);
            return Ok(GroundStateResult {
                energy,
                residual: res,
                vector: v,
                iterations: applications,
                method: Method::Lanczos,
                gap: ritz.values.get(1).map(|e1| e1 - energy),
                degenerate: false,
                seed: opts.seed,
                hermiticity_defect: 0.0,
                metadata: Default::default(),
            });
        }
        if applications >= opts.max_applications {
            return Err(Error::NoConvergence {
                applications,
                residual: res,
            });
        }
        log::debug!("lanczos restart: E = {energy:.15e}, residual {res:.3e}");
        if last.0 == energy && res >= last.1 {
            return Err(Error::NoConvergence {
                applications,
                residual: res,
            });
        }
        last = (energy, res);
        start = v;
    }
}
