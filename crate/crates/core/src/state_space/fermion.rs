//! Occupation-number kernel for ordered fermions.
//!
//! A configuration is stored as an integer whose most significant of the
//! `n_sites` bits is site 0, so ascending codes are lexicographic in
//! `(n_0, n_1, …)`. Operators pick up `(−1)` per occupied site that precedes
//! the site they act on.

use crate::hamiltonian::FermionOp;

pub fn occupied(code: u32, n_sites: usize, site: usize) -> bool {
    (code >> (n_sites - 1 - site)) & 1 == 1
}

fn bit(n_sites: usize, site: usize) -> u32 {
    1 << (n_sites - 1 - site)
}

fn sign_before(code: u32, n_sites: usize, site: usize) -> f64 {
    let preceding = (0..site).filter(|&j| occupied(code, n_sites, j)).count();
    if preceding % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

pub fn occupation(code: u32) -> usize {
    code.count_ones() as usize
}

/// Image of `|code⟩` under `op`, or `None` when it is annihilated.
pub fn apply_fermion(op: &FermionOp, code: u32, n_sites: usize) -> Option<(u32, f64)> {
    match op {
        FermionOp::Identity => Some((code, 1.0)),
        FermionOp::Numbers(sites) => sites
            .iter()
            .all(|&s| occupied(code, n_sites, s))
            .then_some((code, 1.0)),
        FermionOp::Hop { create, annihilate } => {
            let (c, a) = (*create, *annihilate);
            if !occupied(code, n_sites, a) {
                return None;
            }
            let s1 = sign_before(code, n_sites, a);
            let mid = code & !bit(n_sites, a);
            if occupied(mid, n_sites, c) {
                return None;
            }
            let s2 = sign_before(mid, n_sites, c);
            Some((mid | bit(n_sites, c), s1 * s2))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hop_signs() {
        // 4 sites, site 0 is the top bit. |1,1,0,0⟩ = 0b1100.
        let hop = FermionOp::Hop { create: 2, annihilate: 0 };
        // ψ_0 gives +, leaving |0,1,0,0⟩; ψ†_2 passes site 1 → −.
        assert_eq!(apply_fermion(&hop, 0b1100, 4), Some((0b0110, -1.0)));
        let back = FermionOp::Hop { create: 0, annihilate: 2 };
        assert_eq!(apply_fermion(&back, 0b0110, 4), Some((0b1100, -1.0)));
        assert_eq!(apply_fermion(&hop, 0b0100, 4), None);
        assert_eq!(apply_fermion(&hop, 0b1010, 4), None);
    }

    #[test]
    fn diagonal_hop_is_number() {
        let n1 = FermionOp::Hop { create: 1, annihilate: 1 };
        assert_eq!(apply_fermion(&n1, 0b1100, 4), Some((0b1100, 1.0)));
        assert_eq!(apply_fermion(&n1, 0b1000, 4), None);
    }
}
