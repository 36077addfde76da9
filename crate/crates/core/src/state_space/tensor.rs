use num_complex::Complex64 as C64;

use super::basis::ManyBodyBasis;
use super::fermion::apply_fermion;
use super::projection::{check_compatible, local_columns};
use crate::error::Result;
use crate::hamiltonian::{FermionOp, TermSum};
use crate::linalg::LinearOperator;
use crate::plaquette::OperatorTable;

/// Sparse single-mode matrix as `(row, col, value)` entries.
type Factor = (usize, Vec<(usize, usize, C64)>);

struct KronTerm {
    coeff: C64,
    factors: Vec<Factor>,
}

/// Matrix-free action of a term sum, applied factor by factor in the full
/// tensor-product space and restricted to the basis.
///
/// Equivalent to the assembled sparse matrix but never materializes
/// products such as `P ⊗ P ⊗ P`, which are dense.
pub struct TensorOperator {
    dims: Vec<usize>,
    strides: Vec<usize>,
    full_dim: usize,
    terms: Vec<KronTerm>,
    constant: f64,
    /// Full-space position of each basis state, absent when the basis is full.
    embedding: Option<Vec<usize>>,
    dim: usize,
}

impl TensorOperator {
    pub fn new(sum: &TermSum, tables: &[&OperatorTable], basis: &ManyBodyBasis) -> Result<Self> {
        let levels = basis.levels();
        let n_gauge = basis.n_gauge_slots();
        let n_sites = basis.n_fermion_sites();
        let mut dims = vec![levels; n_gauge];
        if n_sites > 0 {
            dims.push(basis.fermion_dim());
        }
        let mut strides = vec![1usize; dims.len()];
        for k in (0..dims.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * dims[k + 1];
        }
        let full_dim = dims.iter().product();

        let mut terms = Vec::with_capacity(sum.terms.len());
        for term in &sum.terms {
            check_compatible(term, tables, basis)?;
            let mut factors = Vec::new();
            for (&slot, &op) in &term.gauge {
                let cols = local_columns(tables[slot], op, levels);
                let entries = cols
                    .iter()
                    .enumerate()
                    .flat_map(|(c, col)| col.iter().map(move |&(r, v)| (r, c, v)))
                    .collect();
                factors.push((slot, entries));
            }
            if !matches!(term.fermion, FermionOp::Identity) {
                let entries = (0..basis.fermion_dim() as u32)
                    .filter_map(|c| {
                        apply_fermion(&term.fermion, c, n_sites)
                            .map(|(r, s)| (r as usize, c as usize, C64::new(s, 0.0)))
                    })
                    .collect();
                factors.push((n_gauge, entries));
            }
            terms.push(KronTerm {
                coeff: term.coeff,
                factors,
            });
        }
        let embedding =
            (!basis.is_full()).then(|| basis.keys().iter().map(|&k| k as usize).collect());
        Ok(Self {
            dims,
            strides,
            full_dim,
            terms,
            constant: sum.constant_offset,
            embedding,
            dim: basis.dim(),
        })
    }

    fn apply_factor(&self, factor: &Factor, x: &[C64], y: &mut [C64]) {
        let (mode, entries) = factor;
        let stride = self.strides[*mode];
        let block = stride * self.dims[*mode];
        y.iter_mut().for_each(|v| *v = C64::new(0.0, 0.0));
        for base in (0..self.full_dim).step_by(block) {
            for &(r, c, v) in entries {
                let src = &x[base + c * stride..base + (c + 1) * stride];
                let dst = &mut y[base + r * stride..base + (r + 1) * stride];
                for (d, s) in dst.iter_mut().zip(src) {
                    *d += v * s;
                }
            }
        }
    }

    fn apply_full(&self, x: &[C64], y: &mut [C64]) {
        for (yi, xi) in y.iter_mut().zip(x) {
            *yi = xi * self.constant;
        }
        let mut a = vec![C64::new(0.0, 0.0); self.full_dim];
        let mut b = vec![C64::new(0.0, 0.0); self.full_dim];
        for term in &self.terms {
            match term.factors.split_first() {
                None => {
                    for (yi, xi) in y.iter_mut().zip(x) {
                        *yi += term.coeff * xi;
                    }
                }
                Some((first, rest)) => {
                    self.apply_factor(first, x, &mut a);
                    for f in rest {
                        self.apply_factor(f, &a, &mut b);
                        std::mem::swap(&mut a, &mut b);
                    }
                    for (yi, ai) in y.iter_mut().zip(&a) {
                        *yi += term.coeff * ai;
                    }
                }
            }
        }
    }
}

impl LinearOperator for TensorOperator {
    fn dim(&self) -> usize {
        self.dim
    }

    fn apply(&self, x: &[C64], y: &mut [C64]) {
        match &self.embedding {
            None => self.apply_full(x, y),
            Some(pos) => {
                let mut xf = vec![C64::new(0.0, 0.0); self.full_dim];
                for (&p, &v) in pos.iter().zip(x) {
                    xf[p] = v;
                }
                let mut yf = vec![C64::new(0.0, 0.0); self.full_dim];
                self.apply_full(&xf, &mut yf);
                for (out, &p) in y.iter_mut().zip(pos) {
                    *out = yf[p];
                }
            }
        }
    }
}
