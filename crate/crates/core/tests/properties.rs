use num_complex::Complex64 as C64;
use proptest::prelude::*;
use rdb_core::hamiltonian::{build_hamiltonian, FermionOp, LatticeModel, TermSum};
use rdb_core::plaquette::{table_for, BasisParameter};
use rdb_core::state_space::fermion::apply_fermion;
use rdb_core::state_space::{
    assemble, enumerate_basis, project_term, FermionSector, ParitySector, TruncationScheme,
};
use rdb_core::variational::evaluate_energy;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn parity_sectors_partition_the_basis(
        l_max in 1usize..7,
        cap in proptest::option::of(0usize..12),
        g_b in 0.05f64..5.0,
    ) {
        let table = table_for(BasisParameter::Coupling(g_b), l_max).unwrap();
        let labels = vec![table.basis().parities().to_vec()];
        let mut scheme = TruncationScheme::new(l_max);
        if let Some(n) = cap {
            scheme = scheme.with_n_max(n.min(3 * l_max));
        }
        let dim = |p| {
            enumerate_basis(3, 0, &scheme.with_parity(p), &labels, FermionSector::All)
                .map(|b| b.dim())
                .unwrap_or(0)
        };
        prop_assert_eq!(
            dim(ParitySector::Even) + dim(ParitySector::Odd),
            dim(ParitySector::Both)
        );
    }

    #[test]
    fn projection_is_linear_and_order_free(
        beta in 0.05f64..20.0,
        scale in -3.0f64..3.0,
        g_b in 0.1f64..3.0,
        seed in any::<u64>(),
    ) {
        let model = LatticeModel::minimal_torus(beta).unwrap();
        let list = build_hamiltonian(&model).unwrap();
        let table = table_for(BasisParameter::Coupling(g_b), 2).unwrap();
        let refs = [&table, &table, &table];
        let basis = enumerate_basis(3, 0, &TruncationScheme::new(2), &[], FermionSector::All).unwrap();

        for term in &list.hamiltonian.terms {
            let mut scaled = term.clone();
            scaled.coeff *= scale;
            let a = project_term(&scaled, &refs, &basis).unwrap().to_dense();
            let b = project_term(term, &refs, &basis).unwrap().to_dense() * C64::new(scale, 0.0);
            prop_assert!((a - b).camax() < 1e-12);
        }

        let mut shuffled = list.hamiltonian.clone();
        let n = shuffled.terms.len();
        for i in 0..n {
            let j = (seed.rotate_left(i as u32) as usize) % n;
            shuffled.terms.swap(i, j);
        }
        let a = assemble(&list.hamiltonian, &refs, &basis).unwrap().to_dense();
        let b = assemble(&shuffled, &refs, &basis).unwrap().to_dense();
        prop_assert!((&a - b).camax() < 1e-12);

        let (first, second) = list.hamiltonian.terms.split_at(n / 2);
        let part = |terms: &[rdb_core::hamiltonian::Term], constant| TermSum { terms: terms.to_vec(), constant_offset: constant };
        let sum = assemble(&part(first, list.hamiltonian.constant_offset), &refs, &basis)
            .unwrap()
            .add(&assemble(&part(second, 0.0), &refs, &basis).unwrap())
            .unwrap()
            .to_dense();
        prop_assert!((a - sum).camax() < 1e-12);
    }

    #[test]
    fn hops_are_adjoint_and_conserve_particles(
        code in 0u32..16,
        create in 0usize..4,
        annihilate in 0usize..4,
    ) {
        let hop = FermionOp::Hop { create, annihilate };
        if let Some((next, sign)) = apply_fermion(&hop, code, 4) {
            prop_assert_eq!(next.count_ones(), code.count_ones());
            let (back, sign_back) = apply_fermion(&hop.adjoint(), next, 4).unwrap();
            prop_assert_eq!(back, code);
            prop_assert_eq!(sign, sign_back);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn energy_does_not_increase_with_l_max(beta in 0.05f64..20.0, g_b in 0.1f64..2.0) {
        let model = LatticeModel::minimal_torus(beta).unwrap();
        let mut last = f64::INFINITY;
        for l in 1..=4 {
            let e = evaluate_energy(&model, &TruncationScheme::new(l), &[g_b]).unwrap();
            prop_assert!(e <= last + 1e-10 * e.abs().max(1.0), "l={} {} > {}", l, e, last);
            last = e;
        }
    }
}
