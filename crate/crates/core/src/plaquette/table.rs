use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use super::eigenbasis::PlaquetteEigenbasis;
use super::fourier::FourierOperators;

/// Truncated single-plaquette operators in a [`PlaquetteEigenbasis`].
///
/// `e` is the rotator `R = −i∂_θ`, `p = cos θ + i sin θ`.
#[derive(Clone, Debug)]
pub struct OperatorTable {
    pub e: DMatrix<C64>,
    pub e2: DMatrix<f64>,
    pub cos_m: DMatrix<f64>,
    pub sin_m: DMatrix<f64>,
    pub p: DMatrix<C64>,
    pub p_dag: DMatrix<C64>,
    basis: Arc<PlaquetteEigenbasis>,
}

fn to_complex(v: &[f64]) -> Vec<C64> {
    v.iter().map(|&x| C64::new(x, 0.0)).collect()
}

fn inner(a: &[f64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| y * *x).sum()
}

impl OperatorTable {
    pub fn new(basis: Arc<PlaquetteEigenbasis>) -> Self {
        let ops = FourierOperators::new(basis.fourier_truncation());
        let d = basis.dim();
        let vecs: Vec<Vec<f64>> = (0..d).map(|a| basis.combined_vector(a)).collect();

        let mut e = DMatrix::<C64>::zeros(d, d);
        let mut e2 = DMatrix::<f64>::zeros(d, d);
        let mut cos_m = DMatrix::<f64>::zeros(d, d);
        let mut sin_m = DMatrix::<f64>::zeros(d, d);
        let parities = basis.parities();
        for b in 0..d {
            let vb = to_complex(&vecs[b]);
            let e_vb = ops.apply_e(&vb);
            let e2_vb = ops.apply_e2(&vb);
            let cos_vb = ops.apply_cos(&vb);
            let sin_vb = ops.apply_sin(&vb);
            for a in 0..d {
                // Selection rules are imposed exactly: the sectors never mix.
                if parities[a] == parities[b] {
                    e2[(a, b)] = inner(&vecs[a], &e2_vb).re;
                    cos_m[(a, b)] = inner(&vecs[a], &cos_vb).re;
                } else {
                    e[(a, b)] = C64::new(0.0, inner(&vecs[a], &e_vb).im);
                    sin_m[(a, b)] = inner(&vecs[a], &sin_vb).re;
                }
            }
        }
        symmetrize_real(&mut e2);
        symmetrize_real(&mut cos_m);
        symmetrize_real(&mut sin_m);
        for a in 0..d {
            for b in 0..a {
                let avg = 0.5 * (e[(a, b)].im - e[(b, a)].im);
                e[(a, b)] = C64::new(0.0, avg);
                e[(b, a)] = C64::new(0.0, -avg);
            }
        }

        let p = DMatrix::from_fn(d, d, |i, j| C64::new(cos_m[(i, j)], sin_m[(i, j)]));
        let p_dag = p.adjoint();
        Self {
            e,
            e2,
            cos_m,
            sin_m,
            p,
            p_dag,
            basis,
        }
    }

    pub fn basis(&self) -> &PlaquetteEigenbasis {
        &self.basis
    }

    pub fn shared_basis(&self) -> Arc<PlaquetteEigenbasis> {
        Arc::clone(&self.basis)
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    /// Max-magnitude entry of the `(l_max − 1)²` interior block of the
    /// projected `[R, P] − P`, computed with the Fourier-space operators.
    ///
    /// Only the edge mode of the Fourier truncation breaks `[R, P] = P`, so
    /// this shrinks as `n_trunc` grows.
    pub fn commutator_defect(&self) -> f64 {
        let basis = &*self.basis;
        let ops = FourierOperators::new(basis.fourier_truncation());
        let inner_dim = basis.dim().saturating_sub(2);
        let vecs: Vec<Vec<f64>> = (0..inner_dim).map(|a| basis.combined_vector(a)).collect();
        let mut worst = 0.0_f64;
        for b in 0..inner_dim {
            let vb = to_complex(&vecs[b]);
            let p_vb = ops.apply_p(&vb);
            let ep_vb = ops.apply_e(&p_vb);
            let pe_vb = ops.apply_p(&ops.apply_e(&vb));
            let defect: Vec<C64> = ep_vb
                .iter()
                .zip(&pe_vb)
                .zip(&p_vb)
                .map(|((ep, pe), p)| ep - pe - p)
                .collect();
            for va in &vecs {
                worst = worst.max(inner(va, &defect).norm());
            }
        }
        worst
    }

    /// Same block as [`Self::commutator_defect`] but formed from products of the
    /// truncated tables. Dominated by the level cut at intermediate coupling.
    pub fn table_product_commutator_defect(&self) -> f64 {
        let k = &self.e * &self.p - &self.p * &self.e - &self.p;
        let inner_dim = self.dim().saturating_sub(2);
        let mut worst = 0.0_f64;
        for a in 0..inner_dim {
            for b in 0..inner_dim {
                worst = worst.max(k[(a, b)].norm());
            }
        }
        worst
    }
}

fn symmetrize_real(m: &mut DMatrix<f64>) {
    let d = m.nrows();
    for a in 0..d {
        for b in 0..a {
            let avg = 0.5 * (m[(a, b)] + m[(b, a)]);
            m[(a, b)] = avg;
            m[(b, a)] = avg;
        }
    }
}

/// Operator table of `basis`.
pub fn build_operator_table(basis: &PlaquetteEigenbasis) -> OperatorTable {
    OperatorTable::new(Arc::new(basis.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plaquette::{solve_single_plaquette_default, Parity};

    fn table(g: f64, l_max: usize) -> OperatorTable {
        build_operator_table(&solve_single_plaquette_default(g, l_max).unwrap())
    }

    #[test]
    fn hermiticity_and_selection_rules() {
        for g in [0.05, 0.7, 3.0] {
            let t = table(g, 6);
            let par = t.basis().parities().to_vec();
            for a in 0..7 {
                for b in 0..7 {
                    assert_eq!(t.e2[(a, b)], t.e2[(b, a)]);
                    assert_eq!(t.cos_m[(a, b)], t.cos_m[(b, a)]);
                    assert_eq!(t.sin_m[(a, b)], t.sin_m[(b, a)]);
                    assert_eq!(t.e[(a, b)], t.e[(b, a)].conj());
                    assert_eq!(t.e[(a, b)].re, 0.0);
                    if par[a] == par[b] {
                        assert_eq!(t.sin_m[(a, b)], 0.0);
                        assert_eq!(t.e[(a, b)].im, 0.0);
                    } else {
                        assert_eq!(t.cos_m[(a, b)], 0.0);
                        assert_eq!(t.e2[(a, b)], 0.0);
                    }
                    assert_eq!(t.p[(a, b)], C64::new(t.cos_m[(a, b)], t.sin_m[(a, b)]));
                    assert_eq!(t.p_dag[(a, b)], t.p[(b, a)].conj());
                }
            }
        }
    }

    #[test]
    fn strong_coupling_vacuum_is_flat() {
        let t = table(1e4, 0);
        assert!(t.e2[(0, 0)].abs() < 1e-12);
        assert!(t.cos_m[(0, 0)].abs() < 1e-8);
    }

    #[test]
    fn electric_table_entries() {
        let t = build_operator_table(&PlaquetteEigenbasis::electric(4));
        // levels: 1, cos θ, sin θ, cos 2θ, sin 2θ
        assert_eq!(t.e2[(1, 1)], 1.0);
        assert_eq!(t.e2[(4, 4)], 4.0);
        assert_eq!(t.e[(2, 1)], C64::new(0.0, 1.0));
        assert!((t.cos_m[(0, 1)] - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert_eq!(t.sin_m[(4, 1)], 0.5);
        assert_eq!(t.basis().parities()[2], Parity::Odd);
    }

    #[test]
    fn commutator_defect_is_small_and_decreases_with_n_trunc() {
        use crate::plaquette::{solve_single_plaquette, FourierTruncation};
        for g in [0.05, 1.0, 20.0] {
            assert!(table(g, 5).commutator_defect() < 1e-8);
        }
        let coarse = solve_single_plaquette(0.1, FourierTruncation::new(40).unwrap(), 5);
        let fine = solve_single_plaquette(0.1, FourierTruncation::new(120).unwrap(), 5).unwrap();
        let fine = build_operator_table(&fine).commutator_defect();
        if let Ok(coarse) = coarse {
            assert!(build_operator_table(&coarse).commutator_defect() >= fine);
        }
    }
}
