use serde::{Deserialize, Serialize};

use super::fourier::{build_fourier_hamiltonian, check_coupling, FourierTruncation};
use super::tridiag::lowest_eigenpairs;
use crate::error::{Error, Result};

/// Behaviour of a single-plaquette state under θ → −θ.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn sign(self) -> i32 {
        match self {
            Parity::Even => 1,
            Parity::Odd => -1,
        }
    }

    pub fn from_sign(sign: i32) -> Self {
        if sign >= 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

/// Energies closer than this (relative) count as one degenerate pair.
pub const DEGENERACY_TOL: f64 = 1e-9;

/// Relative energy shift tolerated when `n_trunc` is enlarged by 50%.
pub const CONVERGENCE_TOL: f64 = 1e-10;

/// Coefficients below this magnitude are skipped when fixing signs.
const SIGN_THRESHOLD: f64 = 1e-10;

/// The lowest `l_max + 1` single-plaquette eigenstates at basis parameter `g_basis`.
///
/// Each state lives in exactly one parity sector; its coefficients are over
/// that sector's modes (`k = 0..=n` for even, `k = 1..=n` for odd).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlaquetteEigenbasis {
    g_basis: f64,
    l_max: usize,
    energies: Vec<f64>,
    parities: Vec<Parity>,
    coefficients: Vec<Vec<f64>>,
    fourier_truncation: FourierTruncation,
}

impl PlaquetteEigenbasis {
    pub(crate) fn from_parts(
        g_basis: f64,
        l_max: usize,
        energies: Vec<f64>,
        parities: Vec<Parity>,
        coefficients: Vec<Vec<f64>>,
        fourier_truncation: FourierTruncation,
    ) -> Result<Self> {
        let n = l_max + 1;
        if energies.len() != n || parities.len() != n || coefficients.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "basis with l_max = {l_max} needs {n} states"
            )));
        }
        for (c, p) in coefficients.iter().zip(&parities) {
            let want = match p {
                Parity::Even => fourier_truncation.even_dim(),
                Parity::Odd => fourier_truncation.odd_dim(),
            };
            if c.len() != want {
                return Err(Error::DimensionMismatch(format!(
                    "coefficient vector of length {} in a sector of dimension {want}",
                    c.len()
                )));
            }
        }
        Ok(Self {
            g_basis,
            l_max,
            energies,
            parities,
            coefficients,
            fourier_truncation,
        })
    }

    /// The electric basis: the `g_b → ∞` member of the family.
    ///
    /// Pure Fourier modes ordered by `|k|`, each `±k` pair split into
    /// `cos kθ` (listed first) and `sin kθ`. Energies are the `R²` eigenvalues `k²`.
    pub fn electric(l_max: usize) -> Self {
        let n = (l_max / 2 + 2).max(FourierTruncation::MIN);
        let trunc = FourierTruncation::new(n).expect("n >= MIN");
        let mut energies = Vec::with_capacity(l_max + 1);
        let mut parities = Vec::with_capacity(l_max + 1);
        let mut coefficients = Vec::with_capacity(l_max + 1);
        for level in 0..=l_max {
            let k = level.div_ceil(2);
            let parity = if level == 0 || level % 2 == 1 {
                Parity::Even
            } else {
                Parity::Odd
            };
            let mut c = match parity {
                Parity::Even => vec![0.0; trunc.even_dim()],
                Parity::Odd => vec![0.0; trunc.odd_dim()],
            };
            match parity {
                Parity::Even => c[k] = 1.0,
                Parity::Odd => c[k - 1] = 1.0,
            }
            energies.push((k * k) as f64);
            parities.push(parity);
            coefficients.push(c);
        }
        Self {
            g_basis: f64::INFINITY,
            l_max,
            energies,
            parities,
            coefficients,
            fourier_truncation: trunc,
        }
    }

    pub fn g_basis(&self) -> f64 {
        self.g_basis
    }

    pub fn is_electric(&self) -> bool {
        self.g_basis.is_infinite()
    }

    pub fn l_max(&self) -> usize {
        self.l_max
    }

    pub fn dim(&self) -> usize {
        self.l_max + 1
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn parities(&self) -> &[Parity] {
        &self.parities
    }

    pub fn coefficients(&self) -> &[Vec<f64>] {
        &self.coefficients
    }

    pub fn fourier_truncation(&self) -> FourierTruncation {
        self.fourier_truncation
    }

    /// State `level` embedded in the combined even ⊕ odd layout.
    pub fn combined_vector(&self, level: usize) -> Vec<f64> {
        let n = self.fourier_truncation.n_trunc();
        let mut v = vec![0.0; self.fourier_truncation.combined_dim()];
        let c = &self.coefficients[level];
        match self.parities[level] {
            Parity::Even => v[..=n].copy_from_slice(c),
            Parity::Odd => v[n + 1..].copy_from_slice(c),
        }
        v
    }

    /// The first `l_max + 1` states of this basis, as a smaller basis.
    pub fn truncated(&self, l_max: usize) -> Result<Self> {
        if l_max > self.l_max {
            return Err(Error::DimensionMismatch(format!(
                "cannot truncate a basis with l_max = {} to {l_max}",
                self.l_max
            )));
        }
        let n = l_max + 1;
        Ok(Self {
            g_basis: self.g_basis,
            l_max,
            energies: self.energies[..n].to_vec(),
            parities: self.parities[..n].to_vec(),
            coefficients: self.coefficients[..n].to_vec(),
            fourier_truncation: self.fourier_truncation,
        })
    }
}

struct SectorState {
    energy: f64,
    parity: Parity,
    coefficients: Vec<f64>,
}

fn fix_sign(c: &mut [f64]) {
    if let Some(first) = c.iter().find(|x| x.abs() > SIGN_THRESHOLD) {
        if *first < 0.0 {
            c.iter_mut().for_each(|x| *x = -*x);
        }
    }
}

fn degenerate(a: f64, b: f64) -> bool {
    (a - b).abs() <= DEGENERACY_TOL * a.abs().max(b.abs())
}

/// Merge two ascending sector spectra; within a degenerate pair the even state goes first.
fn merge_sectors(even: Vec<SectorState>, odd: Vec<SectorState>, count: usize) -> Vec<SectorState> {
    let mut out = Vec::with_capacity(count);
    let mut even = even.into_iter().peekable();
    let mut odd = odd.into_iter().peekable();
    while out.len() < count {
        let take_even = match (even.peek(), odd.peek()) {
            (Some(e), Some(o)) => e.energy <= o.energy || degenerate(e.energy, o.energy),
            (Some(_), None) => true,
            (None, Some(_)) => false,
            (None, None) => break,
        };
        let next = if take_even { even.next() } else { odd.next() };
        out.extend(next);
    }
    out
}

fn solve_sectors(g: f64, trunc: FourierTruncation, count: usize) -> Result<Vec<SectorState>> {
    let h = build_fourier_hamiltonian(g, trunc)?;
    let to_states = |pairs: Vec<(f64, Vec<f64>)>, parity| {
        pairs
            .into_iter()
            .map(|(energy, mut coefficients)| {
                fix_sign(&mut coefficients);
                SectorState {
                    energy,
                    parity,
                    coefficients,
                }
            })
            .collect::<Vec<_>>()
    };
    let even = to_states(lowest_eigenpairs(&h.even, count), Parity::Even);
    let odd = to_states(lowest_eigenpairs(&h.odd, count), Parity::Odd);
    Ok(merge_sectors(even, odd, count))
}

/// Lowest `l_max + 1` eigenstates of the single-plaquette Hamiltonian at coupling `g`.
///
/// The result is checked against a solve with `n_trunc` enlarged by 50%;
/// any retained energy moving by more than [`CONVERGENCE_TOL`] (relative) is an error.
pub fn solve_single_plaquette(
    g: f64,
    trunc: FourierTruncation,
    l_max: usize,
) -> Result<PlaquetteEigenbasis> {
    check_coupling(g)?;
    let count = l_max + 1;
    if trunc.n_trunc() < l_max + 2 {
        return Err(Error::InvalidParameter(format!(
            "n_trunc = {} is below the minimum l_max + 2 = {}",
            trunc.n_trunc(),
            l_max + 2
        )));
    }

    let states = solve_sectors(g, trunc, count)?;
    let check = solve_sectors(g, trunc.enlarged(), count)?;
    for (level, (a, b)) in states.iter().zip(&check).enumerate() {
        let shift = (a.energy - b.energy).abs() / a.energy.abs().max(f64::MIN_POSITIVE);
        if shift > CONVERGENCE_TOL || a.parity != b.parity {
            return Err(Error::ConvergenceMargin {
                g,
                n_trunc: trunc.n_trunc(),
                level,
                shift,
            });
        }
    }

    let mut energies = Vec::with_capacity(count);
    let mut parities = Vec::with_capacity(count);
    let mut coefficients = Vec::with_capacity(count);
    for s in states {
        energies.push(s.energy);
        parities.push(s.parity);
        coefficients.push(s.coefficients);
    }
    PlaquetteEigenbasis::from_parts(g, l_max, energies, parities, coefficients, trunc)
}

/// [`solve_single_plaquette`] with the default truncation margin rule.
pub fn solve_single_plaquette_default(g: f64, l_max: usize) -> Result<PlaquetteEigenbasis> {
    solve_single_plaquette(g, FourierTruncation::for_coupling(g, l_max)?, l_max)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Dense eigensolve of the full (even ⊕ odd) Fourier matrix.
    fn dense_oracle(g: f64, n: usize) -> Vec<f64> {
        let t = FourierTruncation::new(n).unwrap();
        let h = build_fourier_hamiltonian(g, t).unwrap();
        let mut e: Vec<f64> = h.even.to_dense().symmetric_eigenvalues().iter().copied().collect();
        e.extend(h.odd.to_dense().symmetric_eigenvalues().iter());
        e.sort_by(|a, b| a.partial_cmp(b).unwrap());
        e
    }

    #[test]
    fn ground_energy_matches_oversized_dense_oracle() {
        let oracle = dense_oracle(1.0, 200);
        let basis = solve_single_plaquette_default(1.0, 6).unwrap();
        for (e, o) in basis.energies().iter().zip(&oracle) {
            assert!((e - o).abs() / o < 1e-12, "{e} vs {o}");
        }
    }

    #[test]
    fn ground_state_is_even_with_positive_zero_mode() {
        for g in [0.02, 0.3, 1.0, 5.0, 80.0] {
            let b = solve_single_plaquette_default(g, 4).unwrap();
            assert_eq!(b.parities()[0], Parity::Even);
            assert!(b.coefficients()[0][0] > 0.0);
        }
    }

    #[test]
    fn states_are_normalized_and_sorted() {
        let b = solve_single_plaquette_default(0.4, 10).unwrap();
        for c in b.coefficients() {
            let norm: f64 = c.iter().map(|x| x * x).sum();
            assert!((norm - 1.0).abs() < 1e-12);
        }
        for w in b.energies().windows(2) {
            assert!(w[0] <= w[1]);
        }
    }

    #[test]
    fn electric_basis_layout() {
        let b = PlaquetteEigenbasis::electric(4);
        assert_eq!(b.energies(), &[0.0, 1.0, 1.0, 4.0, 4.0]);
        use Parity::*;
        assert_eq!(b.parities(), &[Even, Even, Odd, Even, Odd]);
    }

    #[test]
    fn degenerate_pairs_put_even_first() {
        let b = solve_single_plaquette_default(100.0, 4).unwrap();
        use Parity::*;
        assert_eq!(b.parities(), &[Even, Even, Odd, Even, Odd]);
    }

    #[test]
    fn underresolved_truncation_is_reported() {
        let t = FourierTruncation::new(12).unwrap();
        match solve_single_plaquette(0.05, t, 2) {
            Err(Error::ConvergenceMargin { .. }) => {}
            other => panic!("expected a convergence error, got {other:?}"),
        }
        assert!(solve_single_plaquette(1.0, FourierTruncation::new(5).unwrap(), 4).is_err());
    }

    #[test]
    fn truncated_basis_keeps_prefix() {
        let b = solve_single_plaquette_default(0.8, 6).unwrap();
        let t = b.truncated(2).unwrap();
        assert_eq!(t.energies(), &b.energies()[..3]);
        assert!(b.truncated(7).is_err());
    }
}
