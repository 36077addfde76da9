use num_complex::Complex64 as C64;

use super::basis::ManyBodyBasis;
use super::fermion::apply_fermion;
use crate::error::{Error, Result};
use crate::hamiltonian::{LocalOp, Term, TermSum};
use crate::linalg::{SparseMatrix, TripletBuilder, DROP_TOLERANCE};
use crate::plaquette::OperatorTable;

/// Nonzero entries of one local operator, grouped by column.
pub(crate) type LocalColumns = Vec<Vec<(usize, C64)>>;

pub(crate) fn local_columns(table: &OperatorTable, op: LocalOp, levels: usize) -> LocalColumns {
    let entry = |r: usize, c: usize| -> C64 {
        match op {
            LocalOp::E => table.e[(r, c)],
            LocalOp::E2 => C64::new(table.e2[(r, c)], 0.0),
            LocalOp::Cos => C64::new(table.cos_m[(r, c)], 0.0),
            LocalOp::Sin => C64::new(table.sin_m[(r, c)], 0.0),
            LocalOp::P => table.p[(r, c)],
            LocalOp::PDag => table.p_dag[(r, c)],
        }
    };
    (0..levels)
        .map(|c| {
            (0..levels)
                .filter_map(|r| {
                    let v = entry(r, c);
                    (v != C64::new(0.0, 0.0)).then_some((r, v))
                })
                .collect()
        })
        .collect()
}

pub(crate) fn check_compatible(
    term: &Term,
    tables: &[&OperatorTable],
    basis: &ManyBodyBasis,
) -> Result<()> {
    if tables.len() != basis.n_gauge_slots() {
        return Err(Error::DimensionMismatch(format!(
            "{} operator tables for {} gauge slots",
            tables.len(),
            basis.n_gauge_slots()
        )));
    }
    if let Some(t) = tables.iter().find(|t| t.dim() < basis.levels()) {
        return Err(Error::DimensionMismatch(format!(
            "operator table with {} levels, basis needs {}",
            t.dim(),
            basis.levels()
        )));
    }
    if let Some((&s, _)) = term.gauge.iter().find(|(&s, _)| s >= basis.n_gauge_slots()) {
        return Err(Error::DimensionMismatch(format!("term acts on missing slot {s}")));
    }
    let max_site = match &term.fermion {
        crate::hamiltonian::FermionOp::Identity => None,
        crate::hamiltonian::FermionOp::Numbers(s) => s.iter().max().copied(),
        crate::hamiltonian::FermionOp::Hop { create, annihilate } => Some(*create.max(annihilate)),
    };
    if max_site.is_some_and(|s| s >= basis.n_fermion_sites()) {
        return Err(Error::DimensionMismatch("term acts on a missing fermion site".into()));
    }
    Ok(())
}

fn project_into(
    term: &Term,
    tables: &[&OperatorTable],
    basis: &ManyBodyBasis,
    out: &mut TripletBuilder,
) -> Result<()> {
    check_compatible(term, tables, basis)?;
    let levels = basis.levels();
    let factors: Vec<(usize, LocalColumns)> = term
        .gauge
        .iter()
        .map(|(&s, &op)| (s, local_columns(tables[s], op, levels)))
        .collect();
    let n_sites = basis.n_fermion_sites();
    let mut gauge = vec![0usize; basis.n_gauge_slots()];
    let mut images: Vec<(Vec<usize>, C64)> = Vec::new();
    let mut next: Vec<(Vec<usize>, C64)> = Vec::new();
    let mut column: Vec<(usize, C64)> = Vec::new();
    for j in 0..basis.dim() {
        let code = basis.decode(basis.key(j), &mut gauge);
        let Some((new_code, sign)) = apply_fermion(&term.fermion, code, n_sites) else {
            continue;
        };
        images.clear();
        images.push((gauge.clone(), term.coeff * sign));
        for (slot, cols) in &factors {
            next.clear();
            for (state, amp) in &images {
                for &(r, v) in &cols[state[*slot]] {
                    let mut s = state.clone();
                    s[*slot] = r;
                    next.push((s, amp * v));
                }
            }
            std::mem::swap(&mut images, &mut next);
        }
        column.clear();
        for (state, amp) in &images {
            if let Some(i) = basis.index_of(state, new_code) {
                column.push((i, *amp));
            }
        }
        column.sort_by_key(|&(i, _)| i);
        let mut k = 0;
        while k < column.len() {
            let (i, mut v) = column[k];
            k += 1;
            while k < column.len() && column[k].0 == i {
                v += column[k].1;
                k += 1;
            }
            if v.norm() >= DROP_TOLERANCE {
                out.push(i, j, v);
            }
        }
    }
    Ok(())
}

/// Matrix of one term on `basis`.
pub fn project_term(
    term: &Term,
    tables: &[&OperatorTable],
    basis: &ManyBodyBasis,
) -> Result<SparseMatrix> {
    let mut b = TripletBuilder::new(basis.dim());
    project_into(term, tables, basis, &mut b)?;
    Ok(b.build())
}

/// Matrix of a full term sum, constant included.
pub fn assemble(sum: &TermSum, tables: &[&OperatorTable], basis: &ManyBodyBasis) -> Result<SparseMatrix> {
    let mut b = TripletBuilder::new(basis.dim());
    for term in &sum.terms {
        project_into(term, tables, basis, &mut b)?;
    }
    if sum.constant_offset != 0.0 {
        for i in 0..basis.dim() {
            b.push(i, i, C64::new(sum.constant_offset, 0.0));
        }
    }
    Ok(b.build())
}
