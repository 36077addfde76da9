//! Sparse storage and the operator interface consumed by the solver.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Entries with magnitude below this are dropped during assembly.
pub const DROP_TOLERANCE: f64 = 1e-15;

/// Hermitian linear map on `C^dim`.
pub trait LinearOperator: Sync {
    fn dim(&self) -> usize;
    /// `y ← A x`.
    fn apply(&self, x: &[C64], y: &mut [C64]);
}

/// Coordinate triplets, compressed on [`TripletBuilder::build`].
#[derive(Clone, Debug, Default)]
pub struct TripletBuilder {
    dim: usize,
    entries: Vec<(usize, usize, C64)>,
}

impl TripletBuilder {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            entries: Vec::new(),
        }
    }

    pub fn push(&mut self, row: usize, col: usize, value: C64) {
        debug_assert!(row < self.dim && col < self.dim);
        self.entries.push((row, col, value));
    }

    pub fn extend(&mut self, other: TripletBuilder) {
        self.entries.extend(other.entries);
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Duplicates are summed in insertion order, so the result is deterministic.
    pub fn build(mut self) -> SparseMatrix {
        self.entries.sort_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0usize; self.dim + 1];
        let mut cols = Vec::with_capacity(self.entries.len());
        let mut vals: Vec<C64> = Vec::with_capacity(self.entries.len());
        let mut rows = Vec::with_capacity(self.entries.len());
        for (r, c, v) in self.entries {
            if rows.last() == Some(&r) && cols.last() == Some(&c) {
                *vals.last_mut().unwrap() += v;
            } else {
                rows.push(r);
                cols.push(c);
                vals.push(v);
            }
        }
        let mut out_cols = Vec::with_capacity(cols.len());
        let mut out_vals = Vec::with_capacity(vals.len());
        for ((r, c), v) in rows.into_iter().zip(cols).zip(vals) {
            if v.norm() >= DROP_TOLERANCE {
                row_ptr[r + 1] += 1;
                out_cols.push(c);
                out_vals.push(v);
            }
        }
        for i in 0..self.dim {
            row_ptr[i + 1] += row_ptr[i];
        }
        SparseMatrix {
            dim: self.dim,
            row_ptr,
            cols: out_cols,
            vals: out_vals,
        }
    }
}

/// Square compressed-row matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SparseMatrix {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<C64>,
}

impl SparseMatrix {
    pub fn zeros(dim: usize) -> Self {
        TripletBuilder::new(dim).build()
    }

    pub fn identity(dim: usize, scale: C64) -> Self {
        let mut b = TripletBuilder::new(dim);
        for i in 0..dim {
            b.push(i, i, scale);
        }
        b.build()
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        let range = self.row_ptr[row]..self.row_ptr[row + 1];
        match self.cols[range.clone()].binary_search(&col) {
            Ok(k) => self.vals[range.start + k],
            Err(_) => C64::new(0.0, 0.0),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        (0..self.dim).flat_map(move |r| {
            (self.row_ptr[r]..self.row_ptr[r + 1]).map(move |k| (r, self.cols[k], self.vals[k]))
        })
    }

    pub fn to_triplets(&self) -> TripletBuilder {
        let mut b = TripletBuilder::new(self.dim);
        for (r, c, v) in self.iter() {
            b.push(r, c, v);
        }
        b
    }

    pub fn add(&self, other: &SparseMatrix) -> Result<SparseMatrix> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(format!(
                "{} vs {}",
                self.dim, other.dim
            )));
        }
        let mut b = self.to_triplets();
        b.extend(other.to_triplets());
        Ok(b.build())
    }

    pub fn adjoint(&self) -> SparseMatrix {
        let mut b = TripletBuilder::new(self.dim);
        for (r, c, v) in self.iter() {
            b.push(c, r, v.conj());
        }
        b.build()
    }

    /// Largest entry of `|A − A†|`.
    pub fn hermiticity_defect(&self) -> f64 {
        self.iter()
            .map(|(r, c, v)| (v - self.get(c, r).conj()).norm())
            .chain(self.adjoint().iter().map(|(r, c, v)| (v - self.get(r, c)).norm()))
            .fold(0.0, f64::max)
    }

    /// `(A + A†)/2` and the largest entry of the correction `|A − A†|/2`.
    pub fn hermitian_part(&self) -> (SparseMatrix, f64) {
        let correction = 0.5 * self.hermiticity_defect();
        let mut b = TripletBuilder::new(self.dim);
        for (r, c, v) in self.iter() {
            b.push(r, c, v * 0.5);
            b.push(c, r, v.conj() * 0.5);
        }
        (b.build(), correction)
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for (r, c, v) in self.iter() {
            m[(r, c)] += v;
        }
        m
    }

    /// `P A Pᵀ` where `perm[i]` is the new position of state `i`.
    pub fn permuted(&self, perm: &[usize]) -> SparseMatrix {
        let mut b = TripletBuilder::new(self.dim);
        for (r, c, v) in self.iter() {
            b.push(perm[r], perm[c], v);
        }
        b.build()
    }
}

impl LinearOperator for SparseMatrix {
    fn dim(&self) -> usize {
        self.dim
    }

    fn apply(&self, x: &[C64], y: &mut [C64]) {
        for (r, out) in y.iter_mut().enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.vals[k] * x[self.cols[k]];
            }
            *out = acc;
        }
    }
}

/// Dense matrix wrapper for oracles and small problems.
pub struct DenseOperator(pub DMatrix<C64>);

impl LinearOperator for DenseOperator {
    fn dim(&self) -> usize {
        self.0.nrows()
    }

    fn apply(&self, x: &[C64], y: &mut [C64]) {
        let n = self.0.nrows();
        for (r, out) in y.iter_mut().enumerate().take(n) {
            *out = (0..n).map(|c| self.0[(r, c)] * x[c]).sum();
        }
    }
}

/// Materializes an operator column by column.
pub fn to_dense(op: &dyn LinearOperator) -> DMatrix<C64> {
    let n = op.dim();
    let mut m = DMatrix::zeros(n, n);
    let mut e = vec![C64::new(0.0, 0.0); n];
    let mut col = vec![C64::new(0.0, 0.0); n];
    for j in 0..n {
        e[j] = C64::new(1.0, 0.0);
        op.apply(&e, &mut col);
        e[j] = C64::new(0.0, 0.0);
        for (i, v) in col.iter().enumerate() {
            m[(i, j)] = *v;
        }
    }
    m
}

pub fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm(a: &[C64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// `⟨v|A|v⟩` for a Hermitian `A` (real part).
pub fn expectation(op: &dyn LinearOperator, v: &[C64]) -> f64 {
    let mut av = vec![C64::new(0.0, 0.0); v.len()];
    op.apply(v, &mut av);
    dot(v, &av).re
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn builder_sums_duplicates_and_drops_tiny() {
        let mut b = TripletBuilder::new(3);
        b.push(1, 2, c(1.0, 0.0));
        b.push(0, 0, c(2.0, 0.0));
        b.push(1, 2, c(0.5, 1.0));
        b.push(2, 2, c(1e-16, 0.0));
        b.push(2, 1, c(1.0, -1.0));
        b.push(2, 1, c(-1.0, 1.0));
        let m = b.build();
        assert_eq!(m.nnz(), 2);
        assert_eq!(m.get(1, 2), c(1.5, 1.0));
        assert_eq!(m.get(2, 2), c(0.0, 0.0));
    }

    #[test]
    fn hermitian_part_and_apply() {
        let mut b = TripletBuilder::new(2);
        b.push(0, 1, c(0.0, 1.0));
        b.push(1, 0, c(0.0, -0.8));
        b.push(1, 1, c(3.0, 0.0));
        let m = b.build();
        assert!((m.hermiticity_defect() - 0.2).abs() < 1e-15);
        let (h, corr) = m.hermitian_part();
        assert!((corr - 0.1).abs() < 1e-15);
        assert_eq!(h.hermiticity_defect(), 0.0);
        let mut y = vec![c(0.0, 0.0); 2];
        h.apply(&[c(1.0, 0.0), c(0.0, 0.0)], &mut y);
        assert!((y[1] - c(0.0, -0.9)).norm() < 1e-15);
        assert_eq!(to_dense(&h), h.to_dense());
    }
}
