//! Lowest eigenpairs of a real symmetric tridiagonal matrix.
//!
//! Eigenvalues by Sturm-sequence bisection, eigenvectors by inverse
//! iteration with a partially pivoted tridiagonal solve, energies refined by
//! the Rayleigh quotient. Cost is O(n) per requested pair.

use super::fourier::SymTridiagonal;

/// Number of eigenvalues strictly below `x`.
fn sturm_count(t: &SymTridiagonal, x: f64) -> usize {
    let tiny = f64::MIN_POSITIVE.sqrt();
    let mut count = 0;
    let mut q = t.diag[0] - x;
    if q < 0.0 {
        count += 1;
    }
    for i in 1..t.dim() {
        let denom = if q.abs() < tiny { tiny.copysign(q) } else { q };
        q = (t.diag[i] - x) - t.off[i - 1] * t.off[i - 1] / denom;
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

fn gershgorin(t: &SymTridiagonal) -> (f64, f64) {
    let n = t.dim();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let r = if i > 0 { t.off[i - 1].abs() } else { 0.0 }
            + if i + 1 < n { t.off[i].abs() } else { 0.0 };
        lo = lo.min(t.diag[i] - r);
        hi = hi.max(t.diag[i] + r);
    }
    (lo, hi)
}

/// The `index`-th smallest eigenvalue (0-based) by bisection.
fn bisect(t: &SymTridiagonal, index: usize, lo: f64, hi: f64) -> f64 {
    let (mut a, mut b) = (lo, hi);
    for _ in 0..256 {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        if sturm_count(t, mid) > index {
            b = mid;
        } else {
            a = mid;
        }
    }
    0.5 * (a + b)
}

/// Solve `(T − shift) x = rhs` by Gaussian elimination with partial pivoting.
fn shifted_solve(t: &SymTridiagonal, shift: f64, rhs: &[f64]) -> Vec<f64> {
    let n = t.dim();
    let eps = f64::EPSILON * (1.0 + shift.abs());
    // Row i holds (a[i], b[i], c[i]) on columns i, i+1, i+2 after elimination.
    let mut sub: Vec<f64> = (0..n.saturating_sub(1)).map(|i| t.off[i]).collect();
    let mut diag: Vec<f64> = (0..n).map(|i| t.diag[i] - shift).collect();
    let mut sup: Vec<f64> = (0..n.saturating_sub(1)).map(|i| t.off[i]).collect();
    let mut sup2 = vec![0.0; n.saturating_sub(2)];
    let mut y = rhs.to_vec();

    for i in 0..n.saturating_sub(1) {
        if sub[i].abs() > diag[i].abs() {
            // swap rows i and i+1
            std::mem::swap(&mut diag[i], &mut sub[i]);
            std::mem::swap(&mut diag[i + 1], &mut sup[i]);
            if i + 1 < n - 1 {
                sup2[i] = sup[i + 1];
                sup[i + 1] = 0.0;
            }
            y.swap(i, i + 1);
        }
        if diag[i] == 0.0 {
            diag[i] = eps;
        }
        let m = sub[i] / diag[i];
        diag[i + 1] -= m * sup[i];
        if i + 1 < n - 1 {
            sup[i + 1] -= m * sup2[i];
        }
        y[i + 1] -= m * y[i];
    }
    if diag[n - 1] == 0.0 {
        diag[n - 1] = eps;
    }

    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut acc = y[i];
        if i + 1 < n {
            acc -= sup[i] * x[i + 1];
        }
        if i + 2 < n {
            acc -= sup2[i] * x[i + 2];
        }
        x[i] = acc / diag[i];
    }
    x
}

fn normalize(v: &mut [f64]) {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter_mut().for_each(|x| *x /= norm);
}

fn matvec(t: &SymTridiagonal, x: &[f64]) -> Vec<f64> {
    let n = t.dim();
    (0..n)
        .map(|i| {
            let mut acc = t.diag[i] * x[i];
            if i > 0 {
                acc += t.off[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                acc += t.off[i] * x[i + 1];
            }
            acc
        })
        .collect()
}

/// Lowest `count` eigenpairs in ascending order, vectors unit-normalized.
pub(crate) fn lowest_eigenpairs(t: &SymTridiagonal, count: usize) -> Vec<(f64, Vec<f64>)> {
    let n = t.dim();
    let count = count.min(n);
    let (lo, hi) = gershgorin(t);
    let pad = 1e-12 * (lo.abs() + hi.abs()) + f64::MIN_POSITIVE;
    let (lo, hi) = (lo - pad, hi + pad);

    let mut out: Vec<(f64, Vec<f64>)> = Vec::with_capacity(count);
    for index in 0..count {
        let lambda = bisect(t, index, lo, hi);
        // Deterministic start, made orthogonal to the lower pairs.
        let mut x: Vec<f64> = (0..n).map(|i| 1.0 + 0.1 * ((i % 7) as f64)).collect();
        let shift = lambda + 4.0 * f64::EPSILON * (lambda.abs() + 1.0);
        for _ in 0..4 {
            for (_, prev) in &out {
                let proj: f64 = x.iter().zip(prev).map(|(a, b)| a * b).sum();
                x.iter_mut().zip(prev).for_each(|(a, b)| *a -= proj * b);
            }
            normalize(&mut x);
            x = shifted_solve(t, shift, &x);
            normalize(&mut x);
        }
        for (_, prev) in &out {
            let proj: f64 = x.iter().zip(prev).map(|(a, b)| a * b).sum();
            x.iter_mut().zip(prev).for_each(|(a, b)| *a -= proj * b);
        }
        normalize(&mut x);
        let hx = matvec(t, &x);
        let rayleigh: f64 = x.iter().zip(&hx).map(|(a, b)| a * b).sum();
        out.push((rayleigh, x));
    }
    out
}
