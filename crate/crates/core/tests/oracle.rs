mod common;

use common::*;
use num_complex::Complex64 as C64;
use rdb_core::hamiltonian::{build_hamiltonian, FermionOp, LatticeModel, LocalOp, Term};
use rdb_core::linalg::{expectation, LinearOperator};
use rdb_core::plaquette::{table_for, BasisParameter, OperatorTable, Parity};
use rdb_core::solver::{ground_state, ground_state_sparse, Method, SolverOptions};
use rdb_core::state_space::{
    assemble, enumerate_basis, project_term, FermionSector, ParitySector, TensorOperator,
    TruncationScheme,
};

fn tables(g_b: &[f64], l_max: usize) -> Vec<OperatorTable> {
    g_b.iter()
        .map(|&g| table_for(BasisParameter::Coupling(g), l_max).unwrap())
        .collect()
}

fn lanczos() -> SolverOptions {
    SolverOptions::default().with_method(Method::Lanczos)
}

/// Term-list pipeline (CSR and matrix-free) against the dense oracle.
fn check_pure_gauge(model: &LatticeModel, g_b: &[f64], l_max: usize, oracle: (M, M)) {
    let list = build_hamiltonian(model).unwrap();
    let owned = tables(g_b, l_max);
    let refs: Vec<&OperatorTable> = owned.iter().collect();
    let basis = enumerate_basis(
        refs.len(),
        0,
        &TruncationScheme::new(l_max),
        &[],
        FermionSector::All,
    )
    .unwrap();
    let keep: Vec<usize> = (0..basis.dim()).collect();
    let exact = ground(&oracle.0, &oracle.1, &keep);

    let h = assemble(&list.hamiltonian, &refs, &basis).unwrap();
    let gs = ground_state_sparse(&h, &lanczos()).unwrap();
    let hb = assemble(&list.magnetic, &refs, &basis).unwrap();
    assert!(rel(gs.energy, exact.energy) < 1e-9, "{} vs {}", gs.energy, exact.energy);
    assert!(rel(expectation(&hb, &gs.vector), exact.magnetic) < 1e-8);

    let t = TensorOperator::new(&list.hamiltonian, &refs, &basis).unwrap();
    let gs2 = ground_state(&t, &lanczos()).unwrap();
    assert!(rel(gs2.energy, exact.energy) < 1e-9);
}

#[test]
fn torus_matches_dense_kronecker() {
    for beta in [0.1, 1.0, 10.0] {
        let model = LatticeModel::minimal_torus(beta).unwrap();
        for g_b in [[model.g; 3], [0.7, 0.4, 1.3]] {
            let owned = tables(&g_b, 2);
            let refs: Vec<&OperatorTable> = owned.iter().collect();
            check_pure_gauge(&model, &g_b, 2, torus(model.g, &refs));
        }
    }
}

#[test]
fn open_lattices_match_dense_kronecker() {
    for beta in [0.1, 1.0, 10.0] {
        let model = LatticeModel::open(2, 2, beta).unwrap();
        let g_b = [model.g, 0.5, 0.9, model.g];
        let owned = tables(&g_b, 2);
        let refs: Vec<&OperatorTable> = owned.iter().collect();
        check_pure_gauge(&model, &g_b, 2, open(2, 2, model.g, &refs));
    }
    let model = LatticeModel::open(3, 1, 1.0).unwrap();
    let g_b = [0.6; 3];
    let owned = tables(&g_b, 3);
    let refs: Vec<&OperatorTable> = owned.iter().collect();
    check_pure_gauge(&model, &g_b, 3, open(3, 1, model.g, &refs));
}

#[test]
fn single_open_plaquette_is_the_local_problem() {
    for g in [0.3, 1.0, 2.5] {
        let model = LatticeModel::open(1, 1, 1.0 / (2.0 * g * g)).unwrap();
        let list = build_hamiltonian(&model).unwrap();
        let table = table_for(BasisParameter::Coupling(g), 4).unwrap();
        let basis =
            enumerate_basis(1, 0, &TruncationScheme::new(4), &[], FermionSector::All).unwrap();
        let h = assemble(&list.hamiltonian, &[&table], &basis).unwrap();
        let gs = ground_state_sparse(&h, &SolverOptions::default()).unwrap();
        assert!(rel(gs.energy, table.basis().energies()[0]) < 1e-10);
    }
}

#[test]
fn qed_matches_dense_kronecker() {
    for beta in [0.1, 1.0, 10.0] {
        for (m, kappa) in [(0.1, 5.0), (1.0, 0.3), (2.0, 0.0)] {
            let model = LatticeModel::qed_2x2(beta, m, kappa).unwrap();
            let list = build_hamiltonian(&model).unwrap();
            let table = table_for(BasisParameter::Coupling(0.8 * model.g), 4).unwrap();
            let basis = enumerate_basis(
                1,
                4,
                &TruncationScheme::new(4),
                &[],
                FermionSector::Neutral,
            )
            .unwrap();
            let (h_dense, hb_dense) = qed(model.g, m, kappa, &table);
            let exact = ground(&h_dense, &hb_dense, &fixed_filling(5, 2));

            let h = assemble(&list.hamiltonian, &[&table], &basis).unwrap();
            let gs = ground_state_sparse(&h, &lanczos()).unwrap();
            let hb = assemble(&list.magnetic, &[&table], &basis).unwrap();
            assert!(rel(gs.energy, exact.energy) < 1e-9, "{beta} {m} {kappa}");
            assert!((expectation(&hb, &gs.vector) - exact.magnetic).abs() < 1e-8 * exact.magnetic.abs().max(1e-3));
        }
    }
}

#[test]
fn qed_full_fock_space_matches_entrywise() {
    let model = LatticeModel::qed_2x2(0.7, 0.4, 1.1).unwrap();
    let list = build_hamiltonian(&model).unwrap();
    let table = table_for(BasisParameter::Coupling(0.9), 2).unwrap();
    let basis =
        enumerate_basis(1, 4, &TruncationScheme::new(2), &[], FermionSector::All).unwrap();
    assert!(basis.is_full());
    let h = assemble(&list.hamiltonian, &[&table], &basis).unwrap().to_dense();
    let (oracle, _) = qed(model.g, model.m, model.kappa, &table);
    assert!((h - oracle).camax() < 1e-12);
}

#[test]
fn triple_product_term_matches_kronecker() {
    let owned = tables(&[0.5, 1.0, 2.0], 2);
    let refs: Vec<&OperatorTable> = owned.iter().collect();
    let basis =
        enumerate_basis(3, 0, &TruncationScheme::new(2), &[], FermionSector::All).unwrap();
    let term = Term::new(-0.25, &[(0, LocalOp::P), (1, LocalOp::P), (2, LocalOp::P)]);
    let got = project_term(&term, &refs, &basis).unwrap().to_dense();
    let want = refs[0].p.kronecker(&refs[1].p).kronecker(&refs[2].p) * c(-0.25);
    assert!((got - want).camax() < 1e-14);

    let mixed = Term::new(1.5, &[(0, LocalOp::E), (2, LocalOp::E2)]);
    let got = project_term(&mixed, &refs, &basis).unwrap().to_dense();
    let e2 = refs[2].e2.map(c);
    let want = refs[0].e.kronecker(&eye(3)).kronecker(&e2) * c(1.5);
    assert!((got - want).camax() < 1e-14);
}

#[test]
fn parity_sectors_split_the_spectrum() {
    let model = LatticeModel::minimal_torus(1.0).unwrap();
    let list = build_hamiltonian(&model).unwrap();
    let table = table_for(BasisParameter::Coupling(0.5), 3).unwrap();
    let refs = [&table, &table, &table];
    let labels: Vec<Vec<Parity>> = vec![table.basis().parities().to_vec()];
    let spectrum = |parity| {
        let scheme = TruncationScheme::new(3).with_parity(parity);
        let basis = enumerate_basis(3, 0, &scheme, &labels, FermionSector::All).unwrap();
        let h = assemble(&list.hamiltonian, &refs, &basis).unwrap().to_dense();
        let mut ev: Vec<f64> = h.symmetric_eigen().eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    };
    let mut split = spectrum(ParitySector::Even);
    split.extend(spectrum(ParitySector::Odd));
    split.sort_by(f64::total_cmp);
    let full = spectrum(ParitySector::Both);
    assert_eq!(split.len(), full.len());
    for (a, b) in split.iter().zip(&full) {
        assert!((a - b).abs() < 1e-10 * b.abs().max(1.0));
    }
}

#[test]
fn qed_terms_conserve_charge_and_pair_with_adjoints() {
    let model = LatticeModel::qed_2x2(1.0, 0.3, 2.0).unwrap();
    let list = build_hamiltonian(&model).unwrap();
    let table = table_for(BasisParameter::Coupling(0.7), 2).unwrap();
    let basis =
        enumerate_basis(1, 4, &TruncationScheme::new(2), &[], FermionSector::All).unwrap();
    let total_charge: Vec<f64> = (0..basis.dim())
        .map(|i| basis.state(i).1.count_ones() as f64 - 2.0)
        .collect();
    for term in &list.hamiltonian.terms {
        let m = project_term(term, &[&table], &basis).unwrap();
        for (r, col, _) in m.iter() {
            assert_eq!(total_charge[r], total_charge[col], "{term:?}");
        }
        let adj = project_term(&term.adjoint(), &[&table], &basis).unwrap();
        assert!((adj.to_dense() - m.to_dense().adjoint()).camax() < 1e-14);
    }
    let h = assemble(&list.hamiltonian, &[&table], &basis).unwrap();
    assert!(h.hermiticity_defect() < 1e-14);

    let hop = Term::new(1.0, &[]).with_fermion(FermionOp::Hop { create: 3, annihilate: 0 });
    let back = Term::new(1.0, &[]).with_fermion(FermionOp::Hop { create: 0, annihilate: 3 });
    let a = project_term(&hop, &[&table], &basis).unwrap().to_dense();
    let b = project_term(&back, &[&table], &basis).unwrap().to_dense();
    assert_eq!(a.adjoint(), b);
    let want = eye(3).kronecker(&(annihilator(3, 4).adjoint() * annihilator(0, 4)));
    assert!((a - want).camax() < 1e-15);
}

#[test]
fn matrix_free_and_csr_agree_on_filtered_bases() {
    let model = LatticeModel::minimal_torus(2.0).unwrap();
    let list = build_hamiltonian(&model).unwrap();
    let table = table_for(BasisParameter::Coupling(0.4), 6).unwrap();
    let labels = vec![table.basis().parities().to_vec()];
    let scheme = TruncationScheme::new(6).with_n_max(8).with_parity(ParitySector::Even);
    let basis = enumerate_basis(3, 0, &scheme, &labels, FermionSector::All).unwrap();
    assert_eq!(basis.dim(), 86);
    let refs = [&table, &table, &table];
    let csr = assemble(&list.hamiltonian, &refs, &basis).unwrap();
    let mf = TensorOperator::new(&list.hamiltonian, &refs, &basis).unwrap();
    let x: Vec<C64> = (0..86).map(|i| C64::new((i as f64).sin(), (i as f64 * 0.3).cos())).collect();
    let mut y1 = vec![C64::default(); 86];
    let mut y2 = vec![C64::default(); 86];
    csr.apply(&x, &mut y1);
    mf.apply(&x, &mut y2);
    let diff = y1.iter().zip(&y2).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    assert!(diff < 1e-12, "{diff}");
}
