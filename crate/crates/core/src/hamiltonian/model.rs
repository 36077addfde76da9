use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Periodic,
    Open,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Matter {
    None,
    Staggered,
}

/// Geometry, couplings and matter content of a lattice.
///
/// For pure-gauge open lattices `nx × ny` counts plaquettes. For the
/// staggered-fermion model `nx × ny = 2 × 2` counts sites (one plaquette).
/// For periodic lattices `nx = ny = N` counts sites, which equals the
/// number of plaquettes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatticeModel {
    pub nx: usize,
    pub ny: usize,
    pub boundary: Boundary,
    /// Hamiltonian coupling; `β = 1/(2g²)`.
    pub g: f64,
    pub matter: Matter,
    /// Staggered mass (matter only).
    pub m: f64,
    /// Hopping amplitude (matter only).
    pub kappa: f64,
}

/// Largest square open lattice that is diagonalized exactly.
pub const OBC_MAX_SQUARE: usize = 3;
/// Longest `2 × N` open strip that is diagonalized exactly.
pub const OBC_MAX_STRIP: usize = 4;

pub fn g_from_beta(beta: f64) -> Result<f64> {
    if !(beta.is_finite() && beta > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "beta must be positive and finite, got {beta}"
        )));
    }
    Ok((2.0 * beta).sqrt().recip())
}

pub fn beta_from_g(g: f64) -> f64 {
    1.0 / (2.0 * g * g)
}

impl LatticeModel {
    /// The 2×2 periodic lattice.
    pub fn minimal_torus(beta: f64) -> Result<Self> {
        Self::periodic(2, beta)
    }

    /// `N × N` periodic pure-gauge lattice.
    pub fn periodic(n: usize, beta: f64) -> Result<Self> {
        let model = Self {
            nx: n,
            ny: n,
            boundary: Boundary::Periodic,
            g: g_from_beta(beta)?,
            matter: Matter::None,
            m: 0.0,
            kappa: 0.0,
        };
        model.validate()?;
        Ok(model)
    }

    /// Open pure-gauge lattice of `nx × ny` plaquettes.
    pub fn open(nx: usize, ny: usize, beta: f64) -> Result<Self> {
        let model = Self {
            nx,
            ny,
            boundary: Boundary::Open,
            g: g_from_beta(beta)?,
            matter: Matter::None,
            m: 0.0,
            kappa: 0.0,
        };
        model.validate()?;
        Ok(model)
    }

    /// Single plaquette (2×2 sites, open) with staggered fermions.
    pub fn qed_2x2(beta: f64, m: f64, kappa: f64) -> Result<Self> {
        let model = Self {
            nx: 2,
            ny: 2,
            boundary: Boundary::Open,
            g: g_from_beta(beta)?,
            matter: Matter::Staggered,
            m,
            kappa,
        };
        model.validate()?;
        Ok(model)
    }

    pub fn beta(&self) -> f64 {
        beta_from_g(self.g)
    }

    /// Same geometry and matter at a different coupling.
    pub fn with_beta(&self, beta: f64) -> Result<Self> {
        let mut next = *self;
        next.g = g_from_beta(beta)?;
        Ok(next)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.g.is_finite() && self.g > 0.0) {
            return Err(Error::InvalidParameter(format!("coupling g = {}", self.g)));
        }
        if self.nx == 0 || self.ny == 0 {
            return Err(Error::InvalidParameter("lattice sides must be positive".into()));
        }
        if !(self.m.is_finite() && self.kappa.is_finite()) {
            return Err(Error::InvalidParameter("m and kappa must be finite".into()));
        }
        match (self.boundary, self.matter) {
            (Boundary::Periodic, Matter::None) => {
                if self.nx != self.ny || self.nx < 2 {
                    return Err(Error::UnsupportedModel(format!(
                        "periodic lattices must be N × N with N ≥ 2, got {} × {}",
                        self.nx, self.ny
                    )));
                }
            }
            (Boundary::Periodic, Matter::Staggered) => {
                return Err(Error::UnsupportedModel(
                    "dynamical matter is only supported on the open 2 × 2 lattice".into(),
                ));
            }
            (Boundary::Open, Matter::None) => {
                let (short, long) = (self.nx.min(self.ny), self.nx.max(self.ny));
                let square_ok = long <= OBC_MAX_SQUARE;
                let strip_ok = short <= 2 && long <= OBC_MAX_STRIP;
                if !(square_ok || strip_ok) {
                    return Err(Error::UnsupportedModel(format!(
                        "open {}×{} exceeds the exact-diagonalization limit of {m}×{m} (or 2×{s} strips)",
                        self.nx,
                        self.ny,
                        m = OBC_MAX_SQUARE,
                        s = OBC_MAX_STRIP
                    )));
                }
            }
            (Boundary::Open, Matter::Staggered) => {
                if (self.nx, self.ny) != (2, 2) {
                    return Err(Error::UnsupportedModel(
                        "staggered fermions are only supported on the open 2 × 2 lattice".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Guard applied before solving: the periodic builder is solved only at N = 2.
    pub fn check_solvable(&self) -> Result<()> {
        self.validate()?;
        if self.boundary == Boundary::Periodic && self.nx != 2 {
            return Err(Error::UnsupportedModel(format!(
                "periodic {n}×{n} builds a term list but only N = 2 is solved",
                n = self.nx
            )));
        }
        Ok(())
    }

    /// Independent plaquette slots in the dual formulation.
    pub fn n_gauge_slots(&self) -> usize {
        match (self.boundary, self.matter) {
            (Boundary::Periodic, _) => self.nx * self.ny - 1,
            (Boundary::Open, Matter::None) => self.nx * self.ny,
            (Boundary::Open, Matter::Staggered) => 1,
        }
    }

    pub fn n_fermion_sites(&self) -> usize {
        match self.matter {
            Matter::None => 0,
            Matter::Staggered => self.nx * self.ny,
        }
    }

    /// `N_plaq` in the plaquette expectation value.
    pub fn n_plaq(&self) -> usize {
        match (self.boundary, self.matter) {
            (Boundary::Periodic, _) => self.nx * self.ny,
            (Boundary::Open, Matter::None) => self.nx * self.ny,
            (Boundary::Open, Matter::Staggered) => 1,
        }
    }

    pub fn has_matter(&self) -> bool {
        self.matter == Matter::Staggered
    }
}
