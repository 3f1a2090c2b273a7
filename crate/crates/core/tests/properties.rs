//! Property tests for the algebraic invariants and the lattice operators.

use kolocal_core::clifford::{Blade, Multivector, Signature};
use kolocal_core::group::{check_projection, check_spin_embedding, GroupParams, Variant};
use kolocal_core::ko::ko_class;
use kolocal_core::ledger::{catalog_structure, run_ledger, section_menu, CATALOG};
use kolocal_core::module::{direct_sum, graded_tensor, parity_shift, reduce_bb, retensor_vb, vn_module, GradedModule};
use kolocal_core::oracle::irreducibles;
use kolocal_core::rational::q;
use kolocal_core::witten::models::{default_circle_fiber, default_fiber};
use kolocal_core::witten::{circle_operator, fiber_operator, spectrum, CircleSpin, EigenOptions, Grid};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn signature() -> impl Strategy<Value = Signature> {
    (0usize..=5).prop_flat_map(|n| (0..=n).prop_map(move |l| Signature::new(l, n - l)))
}

fn multivector(sig: Signature) -> impl Strategy<Value = Multivector> {
    let dim = sig.dim() as u32;
    prop::collection::vec((0..dim, -4i64..=4), 0..6)
        .prop_map(move |terms| Multivector::from_terms(sig, terms.into_iter().map(|(b, c)| (Blade(b), q(c)))))
}

fn triple() -> impl Strategy<Value = (Multivector, Multivector, Multivector)> {
    signature().prop_flat_map(|s| (multivector(s), multivector(s), multivector(s)))
}

/// A graded Cl₍0,c₎ module built from irreducibles, some parity-shifted.
fn reduced_module(c: usize, picks: &[(usize, bool)]) -> GradedModule {
    let irr: Vec<GradedModule> = irreducibles(Signature::new(1, c)).unwrap().iter().map(|i| i.as_graded()).collect();
    let mut acc: Option<GradedModule> = None;
    for &(i, shift) in picks {
        let mut p = irr[i % irr.len()].clone();
        if shift {
            p = parity_shift(&p);
        }
        acc = Some(match acc {
            None => p,
            Some(a) => direct_sum(&a, &p),
        });
    }
    acc.unwrap()
}

fn picks() -> impl Strategy<Value = Vec<(usize, bool)>> {
    prop::collection::vec((0usize..4, any::<bool>()), 1..3)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn product_is_associative_and_distributive((x, y, z) in triple()) {
        prop_assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
        prop_assert_eq!(&x * &(&y + &z), &(&x * &y) + &(&x * &z));
    }

    #[test]
    fn grading_involution_is_multiplicative((x, y, _) in triple()) {
        prop_assert_eq!((&x * &y).grading_involution(), &x.grading_involution() * &y.grading_involution());
    }

    #[test]
    fn reverse_is_antimultiplicative((x, y, _) in triple()) {
        prop_assert_eq!((&x * &y).reverse(), &y.reverse() * &x.reverse());
    }

    #[test]
    fn text_and_json_forms_roundtrip((x, _, _) in triple()) {
        let sig = x.signature();
        prop_assert_eq!(&Multivector::parse_text(sig, &x.to_text()).unwrap(), &x);
        prop_assert_eq!(&Multivector::from_json(&x.to_json()).unwrap(), &x);
    }

    #[test]
    fn reduction_inverts_tensoring(b in 0usize..=2, c in 0usize..=2, p in picks()) {
        let h = reduced_module(c, &p);
        let m = graded_tensor(&vn_module(b), &h);
        prop_assert!(m.is_valid());
        let r = reduce_bb(&m, b).unwrap();
        prop_assert_eq!(r.dim() << b, m.dim());
        prop_assert!(r.same_character(&h));
        prop_assert_eq!(retensor_vb(&r, b).blade_traces(), m.blade_traces());
    }

    #[test]
    fn ko_class_is_additive(c in 0usize..=3, p in picks(), q_ in picks()) {
        let a = reduced_module(c, &p);
        let b = reduced_module(c, &q_);
        let sum = ko_class(&direct_sum(&a, &b)).unwrap();
        prop_assert_eq!(sum, ko_class(&a).unwrap().add(&ko_class(&b).unwrap()).unwrap());
        prop_assert_eq!(ko_class(&parity_shift(&a)).unwrap(), ko_class(&a).unwrap().neg());
    }

    #[test]
    fn ko_class_is_invariant_under_v_tensoring(b in 0usize..=2, c in 0usize..=2, p in picks()) {
        let h = reduced_module(c, &p);
        prop_assert_eq!(ko_class(&graded_tensor(&vn_module(b), &h)).unwrap(), ko_class(&h).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 12, ..ProptestConfig::default() })]

    #[test]
    fn projection_and_embedding_hold_for_any_seed(seed in any::<u64>(), n in 1usize..=3, sp in 0usize..=1, sm in 0usize..=2) {
        prop_assume!(n + sp + sm >= 2);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let params = GroupParams::new(n, sp, sm);
        for variant in [Variant::Plus, Variant::Minus] {
            let c = check_projection(&mut rng, variant, params, 5);
            prop_assert!(c.passed(), "{:?}", c.failures);
        }
        let c = check_spin_embedding(&mut rng, params, 5);
        prop_assert!(c.passed(), "{:?}", c.failures);
    }

    #[test]
    fn fiber_operator_is_antisymmetric_with_stable_kernel(m in 0.3f64..4.0, half in 20usize..60) {
        let points = 2 * half + 1;
        let r = Grid::default_radius(m).max(4.0);
        let op = fiber_operator(1, m, Grid::new(1, r, points).unwrap(), &default_fiber(1)).unwrap();
        prop_assert!(op.antisymmetry_defect() == 0.0);
        prop_assert!(op.grading_defect() == 0.0);
        let rep = spectrum(&op, 6, &EigenOptions::default()).unwrap();
        prop_assert_eq!(rep.kernel_dim, op.predicted_kernel);
        prop_assert!(rep.pairing_defect < 1e-9);
    }

    #[test]
    fn circle_spectra_are_symmetric(points in 8usize..80, length in 1.0f64..20.0, lie in any::<bool>()) {
        let spin = if lie { CircleSpin::Lie } else { CircleSpin::Bounding };
        let op = circle_operator(spin, points, length, &default_circle_fiber()).unwrap();
        let rep = spectrum(&op, 6, &EigenOptions::default()).unwrap();
        // the requested count may cut the outermost degenerate cluster
        let top = rep.eigenvalues.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let mut vals: Vec<f64> = rep.eigenvalues.iter().copied().filter(|v| v.abs() < top * (1.0 - 1e-9)).collect();
        vals.sort_by(f64::total_cmp);
        let mut neg: Vec<f64> = vals.iter().map(|v| -v).collect();
        neg.sort_by(f64::total_cmp);
        for (a, b) in vals.iter().zip(&neg) {
            prop_assert!((a - b).abs() < 1e-9 * (1.0 + a.abs()));
        }
        prop_assert_eq!(rep.kernel_dim, if lie { op.fiber_dim } else { 0 });
    }
}

#[test]
fn every_transverse_menu_entry_conserves_degree() {
    for key in CATALOG {
        let d = catalog_structure(key).unwrap();
        for s in section_menu(&d).into_iter().filter(|s| s.transverse) {
            let l = run_ledger(&d, &[s.menu.as_str()]).unwrap();
            assert!(l.degree_conserved(), "{key} / {}", s.menu);
            assert_eq!(l.terminal.degree, d.degree(), "{key} / {}", s.menu);
        }
    }
}
