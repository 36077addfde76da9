use std::collections::BTreeMap;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::model::LatticeModel;

/// Single-plaquette operator acting on one gauge slot.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum LocalOp {
    E,
    E2,
    Cos,
    Sin,
    P,
    PDag,
}

impl LocalOp {
    pub fn adjoint(self) -> Self {
        match self {
            LocalOp::P => LocalOp::PDag,
            LocalOp::PDag => LocalOp::P,
            other => other,
        }
    }
}

/// Fermionic factor of a term, in the fixed site order.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum FermionOp {
    Identity,
    /// Product of number operators on the listed (sorted, distinct) sites.
    Numbers(Vec<usize>),
    /// `ψ†_create ψ_annihilate` with ordered-fermion signs.
    Hop { create: usize, annihilate: usize },
}

impl FermionOp {
    pub fn adjoint(&self) -> Self {
        match self {
            FermionOp::Hop { create, annihilate } => FermionOp::Hop {
                create: *annihilate,
                annihilate: *create,
            },
            other => other.clone(),
        }
    }

    pub fn is_identity(&self) -> bool {
        matches!(self, FermionOp::Identity)
    }
}

/// `coeff · ⊗_slot op_slot ⊗ fermion`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub coeff: C64,
    pub gauge: BTreeMap<usize, LocalOp>,
    pub fermion: FermionOp,
}

impl Term {
    pub fn new(coeff: f64, gauge: &[(usize, LocalOp)]) -> Self {
        Self {
            coeff: C64::new(coeff, 0.0),
            gauge: gauge.iter().copied().collect(),
            fermion: FermionOp::Identity,
        }
    }

    pub fn with_fermion(mut self, fermion: FermionOp) -> Self {
        self.fermion = fermion;
        self
    }

    pub fn adjoint(&self) -> Self {
        Self {
            coeff: self.coeff.conj(),
            gauge: self.gauge.iter().map(|(&s, op)| (s, op.adjoint())).collect(),
            fermion: self.fermion.adjoint(),
        }
    }

    /// Operator part, used to merge like terms.
    pub fn key(&self) -> (Vec<(usize, LocalOp)>, FermionOp) {
        (
            self.gauge.iter().map(|(&s, &op)| (s, op)).collect(),
            self.fermion.clone(),
        )
    }

    pub fn is_scalar(&self) -> bool {
        self.gauge.is_empty() && self.fermion.is_identity()
    }
}

/// Sum of terms plus a real constant.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TermSum {
    pub terms: Vec<Term>,
    pub constant_offset: f64,
}

impl TermSum {
    pub fn push(&mut self, term: Term) {
        self.terms.push(term);
    }

    /// Like terms merged, scalar terms folded into the offset, zero
    /// coefficients removed, terms sorted by operator content.
    pub fn normal_ordered(&self) -> TermSum {
        let mut merged: BTreeMap<(Vec<(usize, LocalOp)>, FermionOp), C64> = BTreeMap::new();
        let mut constant = self.constant_offset;
        for term in &self.terms {
            if term.is_scalar() {
                constant += term.coeff.re;
                continue;
            }
            *merged.entry(term.key()).or_default() += term.coeff;
        }
        let terms = merged
            .into_iter()
            .filter(|(_, c)| *c != C64::new(0.0, 0.0))
            .map(|((gauge, fermion), coeff)| Term {
                coeff,
                gauge: gauge.into_iter().collect(),
                fermion,
            })
            .collect();
        TermSum {
            terms,
            constant_offset: constant,
        }
    }

    /// Largest coefficient mismatch between the normal-ordered sum and its adjoint.
    pub fn hermiticity_defect(&self) -> f64 {
        let this = self.normal_ordered();
        let adj = TermSum {
            terms: this.terms.iter().map(Term::adjoint).collect(),
            constant_offset: this.constant_offset,
        }
        .normal_ordered();
        let lookup: BTreeMap<_, _> = this.terms.iter().map(|t| (t.key(), t.coeff)).collect();
        let mut worst = 0.0_f64;
        for t in &adj.terms {
            let c = lookup.get(&t.key()).copied().unwrap_or_default();
            worst = worst.max((c - t.coeff).norm());
        }
        if adj.terms.len() != this.terms.len() {
            return f64::INFINITY;
        }
        worst
    }

    pub fn is_hermitian_closed(&self) -> bool {
        self.hermiticity_defect() == 0.0
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

/// A lattice model's dual Hamiltonian, plus its magnetic part for `⟨□⟩`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HamiltonianTermList {
    pub model: LatticeModel,
    /// Lattice coordinates of each gauge slot.
    pub slots: Vec<(usize, usize)>,
    /// Lattice coordinates of each fermion site, in sign-string order.
    pub fermion_sites: Vec<(usize, usize)>,
    pub hamiltonian: TermSum,
    /// `H_B`, the magnetic part including its constant.
    pub magnetic: TermSum,
    pub n_plaq: usize,
    /// Sign and normalization conventions in effect.
    pub conventions: Vec<String>,
}

impl HamiltonianTermList {
    pub fn n_gauge_slots(&self) -> usize {
        self.slots.len()
    }

    pub fn n_fermion_sites(&self) -> usize {
        self.fermion_sites.len()
    }

    pub fn to_json(&self) -> crate::Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}
