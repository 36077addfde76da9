//! Parity-resolved Fourier representation of a single plaquette.
//!
//! Even states are expanded in `1, √2 cos(kθ)` for `k = 0..=n`, odd states
//! in `√2 sin(kθ)` for `k = 1..=n`. All operators below act on the
//! *combined* layout: index `k` holds the cosine mode `k`, index `n + k`
//! holds the sine mode `k`.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub(crate) const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Highest Fourier mode kept in the single-plaquette expansion.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FourierTruncation {
    n_trunc: usize,
}

impl FourierTruncation {
    pub const MIN: usize = 2;
    pub const CAP: usize = 4096;

    pub fn new(n_trunc: usize) -> Result<Self> {
        if n_trunc < Self::MIN {
            return Err(Error::InvalidParameter(format!(
                "n_trunc must be at least {}, got {n_trunc}",
                Self::MIN
            )));
        }
        Ok(Self { n_trunc })
    }

    /// Margin rule: `max(32, ceil(8/g) + 4 l_max)`, capped at 4096.
    ///
    /// A Gaussian of width ~g in θ needs ~1/g modes to be resolved.
    pub fn for_coupling(g: f64, l_max: usize) -> Result<Self> {
        check_coupling(g)?;
        let wanted = (8.0 / g).ceil();
        let wanted = if wanted.is_finite() && wanted < Self::CAP as f64 {
            wanted as usize
        } else {
            Self::CAP
        };
        let n = (wanted + 4 * l_max).clamp(32, Self::CAP);
        Ok(Self { n_trunc: n })
    }

    pub fn n_trunc(&self) -> usize {
        self.n_trunc
    }

    pub fn even_dim(&self) -> usize {
        self.n_trunc + 1
    }

    pub fn odd_dim(&self) -> usize {
        self.n_trunc
    }

    /// Length of a vector in the combined (even ⊕ odd) layout.
    pub fn combined_dim(&self) -> usize {
        2 * self.n_trunc + 1
    }

    /// Truncation enlarged by 50%, used for the convergence check.
    pub fn enlarged(&self) -> Self {
        Self {
            n_trunc: self.n_trunc + self.n_trunc.div_ceil(2),
        }
    }
}

pub(crate) fn check_coupling(g: f64) -> Result<()> {
    if !(g.is_finite() && g > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "coupling must be a positive finite number, got {g}"
        )));
    }
    Ok(())
}

/// Real symmetric tridiagonal matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct SymTridiagonal {
    pub diag: Vec<f64>,
    /// `off[i]` couples rows `i` and `i + 1`.
    pub off: Vec<f64>,
}

impl SymTridiagonal {
    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        match i.abs_diff(j) {
            0 => self.diag[i],
            1 => self.off[i.min(j)],
            _ => 0.0,
        }
    }

    pub fn to_dense(&self) -> nalgebra::DMatrix<f64> {
        let n = self.dim();
        nalgebra::DMatrix::from_fn(n, n, |i, j| self.get(i, j))
    }
}

/// Single-plaquette Hamiltonian split by parity sector.
#[derive(Clone, Debug, PartialEq)]
pub struct SectorHamiltonians {
    pub even: SymTridiagonal,
    pub odd: SymTridiagonal,
}

/// Matrix element `⟨k₁|cos θ|k₂⟩` between normalized even modes.
pub fn cos_even_element(k1: usize, k2: usize) -> f64 {
    if k1.abs_diff(k2) != 1 {
        return 0.0;
    }
    if k1 == 0 || k2 == 0 {
        FRAC_1_SQRT_2
    } else {
        0.5
    }
}

/// Matrix element `⟨k₁|cos θ|k₂⟩` between normalized odd modes (`k ≥ 1`).
pub fn cos_odd_element(k1: usize, k2: usize) -> f64 {
    if k1 == 0 || k2 == 0 || k1.abs_diff(k2) != 1 {
        0.0
    } else {
        0.5
    }
}

/// Matrix element `⟨sin k_o|sin θ|cos k_e⟩`, from
/// `sin θ cos kθ = ½[sin((k+1)θ) − sin((k−1)θ)]`.
pub fn sin_odd_even_element(k_odd: usize, k_even: usize) -> f64 {
    if k_odd == 0 {
        return 0.0;
    }
    if k_even == 0 {
        return if k_odd == 1 { FRAC_1_SQRT_2 } else { 0.0 };
    }
    if k_odd == k_even + 1 {
        0.5
    } else if k_odd + 1 == k_even {
        -0.5
    } else {
        0.0
    }
}

/// `H_SP(g) = −2g²∂²_θ + (1 − cos θ)/g²` in both parity sectors.
pub fn build_fourier_hamiltonian(g: f64, trunc: FourierTruncation) -> Result<SectorHamiltonians> {
    check_coupling(g)?;
    let n = trunc.n_trunc();
    let kinetic = 2.0 * g * g;
    let potential = 1.0 / (g * g);

    let even = SymTridiagonal {
        diag: (0..=n).map(|k| kinetic * (k * k) as f64 + potential).collect(),
        off: (0..n).map(|k| -potential * cos_even_element(k, k + 1)).collect(),
    };
    let odd = SymTridiagonal {
        diag: (1..=n).map(|k| kinetic * (k * k) as f64 + potential).collect(),
        off: (1..n).map(|k| -potential * cos_odd_element(k, k + 1)).collect(),
    };
    Ok(SectorHamiltonians { even, odd })
}

/// Fourier-space operator kernels on the combined layout.
///
/// Each `apply_*` maps a combined vector to a combined vector and is exact
/// for the truncated operator (the mode `n_trunc + 1` is simply dropped).
#[derive(Clone, Copy, Debug)]
pub struct FourierOperators {
    n: usize,
}

impl FourierOperators {
    pub fn new(trunc: FourierTruncation) -> Self {
        Self { n: trunc.n_trunc() }
    }

    pub fn dim(&self) -> usize {
        2 * self.n + 1
    }

    fn odd(&self, k: usize) -> usize {
        self.n + k
    }

    /// `R = −i∂_θ`: `cos kθ → i k sin kθ`, `sin kθ → −i k cos kθ`.
    pub fn apply_e(&self, x: &[C64]) -> Vec<C64> {
        let mut y = vec![C64::new(0.0, 0.0); self.dim()];
        for k in 1..=self.n {
            let kf = k as f64;
            y[self.odd(k)] = C64::i() * kf * x[k];
            y[k] = -C64::i() * kf * x[self.odd(k)];
        }
        y
    }

    pub fn apply_e2(&self, x: &[C64]) -> Vec<C64> {
        let mut y = vec![C64::new(0.0, 0.0); self.dim()];
        for k in 1..=self.n {
            let k2 = (k * k) as f64;
            y[k] = x[k] * k2;
            y[self.odd(k)] = x[self.odd(k)] * k2;
        }
        y
    }

    pub fn apply_cos(&self, x: &[C64]) -> Vec<C64> {
        let n = self.n;
        let mut y = vec![C64::new(0.0, 0.0); self.dim()];
        for k in 0..=n {
            let mut acc = C64::new(0.0, 0.0);
            if k > 0 {
                acc += x[k - 1] * cos_even_element(k, k - 1);
            }
            if k < n {
                acc += x[k + 1] * cos_even_element(k, k + 1);
            }
            y[k] = acc;
        }
        for k in 1..=n {
            let mut acc = C64::new(0.0, 0.0);
            if k > 1 {
                acc += x[self.odd(k - 1)] * 0.5;
            }
            if k < n {
                acc += x[self.odd(k + 1)] * 0.5;
            }
            y[self.odd(k)] = acc;
        }
        y
    }

    pub fn apply_sin(&self, x: &[C64]) -> Vec<C64> {
        let n = self.n;
        let mut y = vec![C64::new(0.0, 0.0); self.dim()];
        // odd ← even
        for ko in 1..=n {
            let mut acc = C64::new(0.0, 0.0);
            for ke in [ko.wrapping_sub(1), ko + 1] {
                if ke <= n {
                    acc += x[ke] * sin_odd_even_element(ko, ke);
                }
            }
            y[self.odd(ko)] = acc;
        }
        // even ← odd (transpose)
        for (ke, yk) in y.iter_mut().enumerate().take(n + 1) {
            let mut acc = C64::new(0.0, 0.0);
            for ko in [ke.wrapping_sub(1), ke + 1] {
                if (1..=n).contains(&ko) {
                    acc += x[self.odd(ko)] * sin_odd_even_element(ko, ke);
                }
            }
            *yk = acc;
        }
        y
    }

    /// `P = cos θ + i sin θ`.
    pub fn apply_p(&self, x: &[C64]) -> Vec<C64> {
        let c = self.apply_cos(x);
        let s = self.apply_sin(x);
        c.into_iter().zip(s).map(|(c, s)| c + C64::i() * s).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn even_diagonal_at_unit_coupling() {
        let h = build_fourier_hamiltonian(1.0, FourierTruncation::new(2).unwrap()).unwrap();
        assert_eq!(h.even.diag, vec![1.0, 3.0, 9.0]);
        assert_eq!(h.odd.diag, vec![3.0, 9.0]);
    }

    #[test]
    fn potential_couplings_follow_closed_forms() {
        let g = 0.7_f64;
        let h = build_fourier_hamiltonian(g, FourierTruncation::new(5).unwrap()).unwrap();
        let v = 1.0 / (g * g);
        assert_eq!(h.even.get(0, 1), -v * FRAC_1_SQRT_2);
        assert_eq!(h.even.get(1, 2), -v * 0.5);
        assert_eq!(h.even.get(0, 2), 0.0);
        assert_eq!(h.odd.get(0, 1), -v * 0.5);
    }

    #[test]
    fn rejects_nonpositive_coupling() {
        let t = FourierTruncation::new(4).unwrap();
        assert!(build_fourier_hamiltonian(0.0, t).is_err());
        assert!(build_fourier_hamiltonian(-1.0, t).is_err());
        assert!(build_fourier_hamiltonian(f64::NAN, t).is_err());
        assert!(FourierTruncation::new(1).is_err());
    }

    #[test]
    fn margin_rule() {
        assert_eq!(FourierTruncation::for_coupling(1.0, 10).unwrap().n_trunc(), 48);
        assert_eq!(FourierTruncation::for_coupling(100.0, 0).unwrap().n_trunc(), 32);
        assert_eq!(FourierTruncation::for_coupling(0.01, 2).unwrap().n_trunc(), 808);
        assert_eq!(FourierTruncation::for_coupling(1e-6, 2).unwrap().n_trunc(), 4096);
    }

    #[test]
    fn sin_kernel_is_symmetric() {
        let ops = FourierOperators::new(FourierTruncation::new(6).unwrap());
        let d = ops.dim();
        for i in 0..d {
            let mut ei = vec![C64::new(0.0, 0.0); d];
            ei[i] = C64::new(1.0, 0.0);
            let col_i = ops.apply_sin(&ei);
            for j in 0..d {
                let mut ej = vec![C64::new(0.0, 0.0); d];
                ej[j] = C64::new(1.0, 0.0);
                let col_j = ops.apply_sin(&ej);
                assert_eq!(col_i[j], col_j[i]);
            }
        }
    }
}
