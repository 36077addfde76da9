use serde::{Deserialize, Serialize};

use super::fermion::occupation;
use super::scheme::{FermionSector, TruncationScheme};
use crate::error::{Error, Result};
use crate::plaquette::Parity;

/// Sorted list of many-body configurations that pass a truncation.
///
/// A state is one level index per gauge slot followed by a fermion
/// occupation code. Its key is the mixed-radix integer of that tuple, which
/// is also its position in the unfiltered tensor-product space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ManyBodyBasis {
    n_gauge: usize,
    n_fermion: usize,
    levels: usize,
    scheme: TruncationScheme,
    keys: Vec<u64>,
}

impl ManyBodyBasis {
    pub fn dim(&self) -> usize {
        self.keys.len()
    }

    pub fn n_gauge_slots(&self) -> usize {
        self.n_gauge
    }

    pub fn n_fermion_sites(&self) -> usize {
        self.n_fermion
    }

    /// Local levels per gauge slot, `l_max + 1`.
    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn scheme(&self) -> &TruncationScheme {
        &self.scheme
    }

    pub fn label(&self) -> String {
        self.scheme.label(self.dim())
    }

    pub fn fermion_dim(&self) -> usize {
        1 << self.n_fermion
    }

    /// Dimension of the unfiltered tensor-product space.
    pub fn full_dim(&self) -> usize {
        self.levels.pow(self.n_gauge as u32) * self.fermion_dim()
    }

    pub fn is_full(&self) -> bool {
        self.dim() == self.full_dim()
    }

    pub fn keys(&self) -> &[u64] {
        &self.keys
    }

    pub fn key(&self, i: usize) -> u64 {
        self.keys[i]
    }

    pub fn encode(&self, gauge: &[usize], fermion: u32) -> u64 {
        let mut key = 0u64;
        for &a in gauge {
            key = key * self.levels as u64 + a as u64;
        }
        (key << self.n_fermion) | fermion as u64
    }

    /// Splits a key into gauge levels (written into `gauge`) and the fermion code.
    pub fn decode(&self, key: u64, gauge: &mut [usize]) -> u32 {
        let fermion = (key & ((1u64 << self.n_fermion) - 1)) as u32;
        let mut rest = key >> self.n_fermion;
        for slot in (0..self.n_gauge).rev() {
            gauge[slot] = (rest % self.levels as u64) as usize;
            rest /= self.levels as u64;
        }
        fermion
    }

    pub fn state(&self, i: usize) -> (Vec<usize>, u32) {
        let mut gauge = vec![0; self.n_gauge];
        let f = self.decode(self.keys[i], &mut gauge);
        (gauge, f)
    }

    pub fn index_of_key(&self, key: u64) -> Option<usize> {
        self.keys.binary_search(&key).ok()
    }

    pub fn index_of(&self, gauge: &[usize], fermion: u32) -> Option<usize> {
        if gauge.len() != self.n_gauge || gauge.iter().any(|&a| a >= self.levels) {
            return None;
        }
        self.index_of_key(self.encode(gauge, fermion))
    }
}

/// Per-level parity labels for each gauge slot (one entry broadcasts).
fn slot_parities(parities: &[Vec<Parity>], slot: usize) -> Option<&[Parity]> {
    match parities.len() {
        0 => None,
        1 => Some(&parities[0]),
        _ => parities.get(slot).map(Vec::as_slice),
    }
}

/// Every configuration passing the local cut, the excitation cap, the joint
/// parity filter and the fermion sector.
pub fn enumerate_basis(
    n_gauge_slots: usize,
    n_fermion_sites: usize,
    scheme: &TruncationScheme,
    parities: &[Vec<Parity>],
    sector: FermionSector,
) -> Result<ManyBodyBasis> {
    scheme.validate(n_gauge_slots)?;
    let levels = scheme.levels();
    if n_fermion_sites > 16 {
        return Err(Error::InvalidParameter(format!(
            "{n_fermion_sites} fermion sites exceed the supported 16"
        )));
    }
    let bits = (levels as f64).log2() * n_gauge_slots as f64 + n_fermion_sites as f64;
    if bits >= 63.0 {
        return Err(Error::InvalidParameter(
            "tensor-product space too large to index".into(),
        ));
    }
    let filter_parity = scheme.parity != super::ParitySector::Both;
    if filter_parity {
        if parities.len() != 1 && parities.len() != n_gauge_slots {
            return Err(Error::InvalidParameter(
                "parity filtering needs per-level parity labels for every slot".into(),
            ));
        }
        for slot in 0..n_gauge_slots {
            if slot_parities(parities, slot).is_none_or(|p| p.len() < levels) {
                return Err(Error::InvalidParameter(format!(
                    "slot {slot} lacks parity labels for {levels} levels"
                )));
            }
        }
    }

    let fermion_codes: Vec<u32> = (0..1u32 << n_fermion_sites)
        .filter(|&c| match sector {
            FermionSector::All => true,
            FermionSector::Neutral => occupation(c) * 2 == n_fermion_sites,
        })
        .collect();

    let mut basis = ManyBodyBasis {
        n_gauge: n_gauge_slots,
        n_fermion: n_fermion_sites,
        levels,
        scheme: *scheme,
        keys: Vec::new(),
    };
    let cap = scheme.n_max.unwrap_or(usize::MAX);
    let mut alpha = vec![0usize; n_gauge_slots];
    loop {
        let excitations: usize = alpha.iter().sum();
        let parity_ok = !filter_parity || {
            let sign: i32 = alpha
                .iter()
                .enumerate()
                .map(|(s, &a)| slot_parities(parities, s).unwrap()[a].sign())
                .product();
            scheme.parity.admits(Parity::from_sign(sign))
        };
        if excitations <= cap && parity_ok {
            for &f in &fermion_codes {
                basis.keys.push(basis.encode(&alpha, f));
            }
        }
        // odometer, last slot fastest
        let mut slot = n_gauge_slots;
        loop {
            if slot == 0 {
                if basis.keys.is_empty() {
                    return Err(Error::EmptyBasis);
                }
                return Ok(basis);
            }
            slot -= 1;
            alpha[slot] += 1;
            if alpha[slot] < levels {
                break;
            }
            alpha[slot] = 0;
        }
    }
}
