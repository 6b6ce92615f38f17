//! Property tests for the structural invariants across modules.

use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;
use rqet_core::blockenc::{ancilla_rotation, dilate_hermitian, extract};
use rqet_core::linalg::{hermitian_eig, operator_norm, unitarity_check, ComplexMatrix};
use rqet_core::poly::pade;
use rqet_core::qsp::{canonicalize, pade2_phases, qsp_reflection_eval, reflection_response, ReflectionPhases};
use rqet_core::random::{random_gapped_hermitian, random_hermitian, seeded_rng};
use rqet_core::rqet::{
    compose_phases, flattened_phases, qet_assemble, qet_recursive_step, query_count, run_sign, scalar_sign_iterate,
    SignConfig, SignMode,
};

fn hermitian_with_norm(seed: u64, n: usize, norm: f64) -> ComplexMatrix {
    let h = random_hermitian(&mut seeded_rng(seed), n);
    h.scale_real(norm / operator_norm(&h))
}

fn phase_list(max_len: usize) -> impl Strategy<Value = ReflectionPhases> {
    prop::collection::vec(-PI..PI, 1..=max_len).prop_map(|v| ReflectionPhases::new(v).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn extract_inverts_dilation(seed in 0u64..10_000, k in 0usize..4, norm in 0.05f64..1.0) {
        let n = [2usize, 4, 8, 16][k];
        let a = hermitian_with_norm(seed, n, norm);
        let be = dilate_hermitian(&a).unwrap();
        prop_assert!(extract(&be).max_abs_diff(&a) <= 1e-12);
        prop_assert!(unitarity_check(&be.unitary, 1e-10));
    }

    #[test]
    fn ancilla_rotations_invert(seed in 0u64..1000, phi in -10.0f64..10.0) {
        let be = dilate_hermitian(&hermitian_with_norm(seed, 3, 0.5)).unwrap();
        let prod = &ancilla_rotation(&be, phi) * &ancilla_rotation(&be, -phi);
        prop_assert!(prod.max_abs_diff(&ComplexMatrix::identity(6)) <= 1e-12);
    }

    #[test]
    fn qsp_products_are_unitary(phases in phase_list(12), x in -1.0f64..=1.0) {
        let m = qsp_reflection_eval(&phases, x).unwrap();
        prop_assert!(m.is_unitary(1e-12));
        prop_assert!((m.upper_left() - reflection_response(phases.angles(), x).unwrap()).norm() <= 1e-12);
    }

    #[test]
    fn qet_extract_is_scalar_response_on_eigenvalues(seed in 0u64..1000, phases in phase_list(7)) {
        let a = hermitian_with_norm(seed, 4, 0.9);
        let spec = hermitian_eig(&a).unwrap();
        let want = spec.map_complex(|l| reflection_response(phases.angles(), l.clamp(-1.0, 1.0)).unwrap());
        let got = extract(&qet_assemble(&dilate_hermitian(&a).unwrap(), &phases));
        prop_assert!(operator_norm(&(&got - &want)) <= 1e-10);
    }

    #[test]
    fn composition_matches_nesting(seed in 0u64..1000, outer in phase_list(5), inner in phase_list(4)) {
        let be = dilate_hermitian(&hermitian_with_norm(seed, 4, 0.8)).unwrap();
        let nested = qet_assemble(&qet_assemble(&be, &inner), &outer);
        let composed = compose_phases(&outer, &inner).unwrap();
        prop_assert_eq!(composed.degree(), outer.degree() * inner.degree());
        let flat = qet_assemble(&be, &composed);
        prop_assert!(operator_norm(&(&nested.unitary - &flat.unitary)) <= 1e-9);
    }

    #[test]
    fn angles_canonical(a in -1e3f64..1e3) {
        let c = canonicalize(a);
        prop_assert!(c > -PI && c <= PI);
        prop_assert!(((a - c) / (2.0 * PI) - ((a - c) / (2.0 * PI)).round()).abs() < 1e-9);
    }

    #[test]
    fn pade_iterate_stays_in_interval(x in -1.0f64..=1.0, n in 0usize..6) {
        let y = scalar_sign_iterate(x, 2, n).unwrap();
        prop_assert!(y.abs() <= 1.0 + 1e-15);
        prop_assert!(y.abs() + 1e-15 >= x.abs());
    }
}

#[test]
fn flattened_matches_recursive_on_4_and_8_dims() {
    let base = pade2_phases();
    for (seed, n) in [(1u64, 4usize), (2, 8), (3, 4), (4, 8)] {
        let a = random_gapped_hermitian(&mut seeded_rng(seed), n, 0.2);
        let be0 = dilate_hermitian(&a).unwrap();
        let mut be = be0.clone();
        for level in 1..=3 {
            be = qet_recursive_step(&be, &base);
            let flat = qet_assemble(&be0, &flattened_phases(&base, level).unwrap());
            assert!(operator_norm(&(&flat.unitary - &be.unitary)) <= 1e-9, "dim {n}, level {level}");
        }
    }
}

#[test]
fn query_accounting_matches_oracle_slots() {
    for l in [2usize, 4] {
        let base = rqet_core::qsp::pade_phases(l).unwrap();
        for n in 0..=3 {
            let flat = flattened_phases(&base, n).unwrap();
            assert_eq!(query_count(n, l).unwrap(), flat.degree() as u128);
        }
    }
}

#[test]
fn modes_agree_on_error() {
    let a = random_gapped_hermitian(&mut seeded_rng(12), 6, 0.4);
    let cfg = SignConfig::new(0.4, 1e-6).with_iterations(3);
    let errors: Vec<f64> = [SignMode::Recursive, SignMode::Flattened, SignMode::Scalar]
        .into_iter()
        .map(|m| run_sign(&a, &cfg.with_mode(m)).unwrap().1.final_error())
        .collect();
    assert!((errors[0] - errors[1]).abs() <= 1e-10 && (errors[0] - errors[2]).abs() <= 1e-10, "{errors:?}");
}

#[test]
fn l4_sign_run_converges_faster() {
    let a = random_gapped_hermitian(&mut seeded_rng(13), 6, 0.3);
    let (_, r2) = run_sign(&a, &SignConfig::new(0.3, 1e-8)).unwrap();
    let (_, r4) = run_sign(&a, &SignConfig::new(0.3, 1e-8).with_l(4)).unwrap();
    assert!(r2.converged() && r4.converged());
    assert!(r4.rows.len() < r2.rows.len());
    assert!(r4.rows.iter().all(|r| r.within_bound()));
}

#[test]
fn p1_value_outside_interval() {
    assert!((pade(1).eval_real(1.2) - Complex64::new(0.936, 0.0)).norm() < 1e-12);
}

