use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::{build_hamiltonian, HamiltonianTermList, LatticeModel};
use crate::linalg::expectation;
use crate::plaquette::{table_for, BasisParameter, OperatorTable, Parity};
use crate::solver::{ground_state, GroundStateResult, SolverOptions};
use crate::state_space::{enumerate_basis, FermionSector, ManyBodyBasis, TensorOperator, TruncationScheme};

/// Admissible range of basis couplings.
pub const G_BASIS_MIN: f64 = 1e-3;
pub const G_BASIS_MAX: f64 = 1e3;

/// Ground state of a model in one truncated basis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    /// Basis coupling per slot; `None` marks the electric basis.
    pub g_basis: Vec<Option<f64>>,
    pub energy: f64,
    /// `⟨ψ₀|H_B|ψ₀⟩`.
    pub magnetic_energy: Option<f64>,
    pub dim: usize,
    pub label: String,
    pub ground: GroundStateResult,
}

/// A model, its dual Hamiltonian and a truncation, ready to be evaluated
/// at arbitrary basis parameters.
#[derive(Clone, Debug)]
pub struct Problem {
    pub hamiltonian: HamiltonianTermList,
    pub scheme: TruncationScheme,
    pub sector: FermionSector,
    pub solver: SolverOptions,
}

fn param_key(p: &BasisParameter) -> Option<f64> {
    match p {
        BasisParameter::Coupling(g) => Some(*g),
        BasisParameter::Electric => None,
    }
}

impl Problem {
    pub fn new(model: &LatticeModel, scheme: TruncationScheme) -> Result<Self> {
        model.check_solvable()?;
        let hamiltonian = build_hamiltonian(model)?;
        scheme.validate(hamiltonian.n_gauge_slots())?;
        Ok(Self {
            hamiltonian,
            scheme,
            sector: FermionSector::default(),
            solver: SolverOptions::default(),
        })
    }

    pub fn with_sector(mut self, sector: FermionSector) -> Self {
        self.sector = sector;
        self
    }

    pub fn with_solver(mut self, solver: SolverOptions) -> Self {
        self.solver = solver;
        self
    }

    pub fn model(&self) -> &LatticeModel {
        &self.hamiltonian.model
    }

    pub fn n_slots(&self) -> usize {
        self.hamiltonian.n_gauge_slots()
    }

    /// Broadcasts a single parameter to every slot.
    pub fn expand(&self, params: &[BasisParameter]) -> Result<Vec<BasisParameter>> {
        let n = self.n_slots();
        match params.len() {
            1 => Ok(vec![params[0]; n]),
            len if len == n => Ok(params.to_vec()),
            len => Err(Error::DimensionMismatch(format!(
                "{len} basis parameters for {n} slots"
            ))),
        }
    }

    /// One operator table per slot, shared between equal parameters.
    pub fn tables(&self, params: &[BasisParameter]) -> Result<Vec<Arc<OperatorTable>>> {
        let params = self.expand(params)?;
        let mut solved: Vec<(BasisParameter, Arc<OperatorTable>)> = Vec::new();
        let mut out = Vec::with_capacity(params.len());
        for p in params {
            if let BasisParameter::Coupling(g) = p {
                if !(G_BASIS_MIN..=G_BASIS_MAX).contains(&g) {
                    return Err(Error::InvalidParameter(format!(
                        "basis coupling {g} outside [{G_BASIS_MIN}, {G_BASIS_MAX}]"
                    )));
                }
            }
            let table = match solved.iter().find(|(q, _)| *q == p) {
                Some((_, t)) => Arc::clone(t),
                None => {
                    let t = Arc::new(table_for(p, self.scheme.l_max)?);
                    solved.push((p, Arc::clone(&t)));
                    t
                }
            };
            out.push(table);
        }
        Ok(out)
    }

    pub fn basis(&self, tables: &[Arc<OperatorTable>]) -> Result<ManyBodyBasis> {
        let parities: Vec<Vec<Parity>> =
            tables.iter().map(|t| t.basis().parities().to_vec()).collect();
        enumerate_basis(
            self.n_slots(),
            self.hamiltonian.n_fermion_sites(),
            &self.scheme,
            &parities,
            self.sector,
        )
    }

    pub fn evaluate(&self, params: &[BasisParameter]) -> Result<Evaluation> {
        let tables = self.tables(params)?;
        let refs: Vec<&OperatorTable> = tables.iter().map(|t| &**t).collect();
        let basis = self.basis(&tables)?;
        let h = TensorOperator::new(&self.hamiltonian.hamiltonian, &refs, &basis)?;
        let mut ground = ground_state(&h, &self.solver)?;
        let hb = TensorOperator::new(&self.hamiltonian.magnetic, &refs, &basis)?;
        let magnetic_energy = expectation(&hb, &ground.vector);

        let g_basis: Vec<Option<f64>> = self.expand(params)?.iter().map(param_key).collect();
        ground.metadata = self.metadata(&g_basis, &basis);
        Ok(Evaluation {
            g_basis,
            energy: ground.energy,
            magnetic_energy: Some(magnetic_energy),
            dim: basis.dim(),
            label: basis.label(),
            ground,
        })
    }

    fn metadata(&self, g_basis: &[Option<f64>], basis: &ManyBodyBasis) -> BTreeMap<String, String> {
        let model = &self.hamiltonian.model;
        let mut m = BTreeMap::new();
        m.insert("model".into(), serde_json::to_string(model).unwrap_or_default());
        m.insert("scheme".into(), basis.label());
        m.insert(
            "g_basis".into(),
            g_basis
                .iter()
                .map(|g| g.map_or("electric".to_string(), |g| format!("{g:e}")))
                .collect::<Vec<_>>()
                .join(";"),
        );
        m.insert("n_plaq".into(), self.hamiltonian.n_plaq.to_string());
        m.insert("conventions".into(), self.hamiltonian.conventions.join(";"));
        m.insert("drop_tolerance".into(), format!("{:e}", crate::linalg::DROP_TOLERANCE));
        m.insert("seed".into(), format!("{:#x}", self.solver.seed));
        m
    }
}

/// Ground energy of `model` with per-slot basis couplings `g_vec`
/// (one entry broadcasts).
pub fn evaluate_energy(model: &LatticeModel, scheme: &TruncationScheme, g_vec: &[f64]) -> Result<f64> {
    let problem = Problem::new(model, *scheme)?;
    let params: Vec<_> = g_vec.iter().map(|&g| BasisParameter::Coupling(g)).collect();
    Ok(problem.evaluate(&params)?.energy)
}
