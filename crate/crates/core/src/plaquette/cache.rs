//! Optional read-through JSON cache of solved bases.
//!
//! Entries are keyed by `g_basis` rounded to 12 significant digits,
//! `n_trunc` and `l_max`. A malformed or mismatched entry is ignored and
//! recomputed.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::eigenbasis::{solve_single_plaquette, Parity, PlaquetteEigenbasis};
use super::fourier::FourierTruncation;
use crate::error::Result;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CachedBasis {
    pub energies: Vec<f64>,
    pub parities: Vec<Parity>,
    pub coefficients: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct BasisCache {
    entries: BTreeMap<String, CachedBasis>,
}

pub fn cache_key(g: f64, n_trunc: usize, l_max: usize) -> String {
    format!("g={g:.11e};n_trunc={n_trunc};l_max={l_max}")
}

impl BasisCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get_or_solve(
        &mut self,
        g: f64,
        trunc: FourierTruncation,
        l_max: usize,
    ) -> Result<PlaquetteEigenbasis> {
        let key = cache_key(g, trunc.n_trunc(), l_max);
        if let Some(hit) = self.entries.get(&key) {
            let restored = PlaquetteEigenbasis::from_parts(
                g,
                l_max,
                hit.energies.clone(),
                hit.parities.clone(),
                hit.coefficients.clone(),
                trunc,
            );
            if let Ok(basis) = restored {
                return Ok(basis);
            }
            log::warn!("discarding malformed cache entry {key}");
        }
        let basis = solve_single_plaquette(g, trunc, l_max)?;
        self.entries.insert(
            key,
            CachedBasis {
                energies: basis.energies().to_vec(),
                parities: basis.parities().to_vec(),
                coefficients: basis.coefficients().to_vec(),
            },
        );
        Ok(basis)
    }
}
