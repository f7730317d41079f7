mod common;

use common::hermitian_eigs;
use qsv_core::entanglement::*;
use qsv_core::qmath::{kron, random, Operator};
use qsv_core::states::{mes_qudit, two_qubit_state};
use qsv_core::strategies::mes_strategy;
use qsv_core::QsvError;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn witness_examples() {
    let psi = mes_qudit(2).unwrap();
    let w = witness_operator(&psi).unwrap();
    let vals = hermitian_eigs(w.matrix());
    assert!((vals.last().unwrap() + 0.5).abs() < 1e-12);
    for d in 2..=4 {
        let psi = mes_qudit(d).unwrap();
        let w = witness_operator(&psi).unwrap();
        let df = d as f64;
        assert!((w.expectation(&psi).unwrap().re - (1.0 / df - 1.0)).abs() < 1e-12);
        let white = Operator::identity(&[d, d]).unwrap().scale(1.0 / (df * df));
        assert!((w.trace_product(&white).unwrap().re - (1.0 / df - 1.0 / (df * df))).abs() < 1e-12);
    }
    assert!(witness_operator(&two_qubit_state(0.3).unwrap()).is_err());
}

#[test]
fn separable_bound_examples() {
    assert!((separable_pass_bound(2).unwrap() - 2.0 / 3.0).abs() < 1e-15);
    assert!((separable_pass_bound(3).unwrap() - 0.5).abs() < 1e-15);
    assert!(separable_pass_bound(1).is_err());
}

#[test]
fn confidence_examples() {
    let b = entanglement_confidence(1.0, 2.0 / 3.0, 20).unwrap();
    assert!((b - (2.0f64 / 3.0).powi(20)).abs() < 1e-12);
    let near = entanglement_confidence(2.0 / 3.0 + 1e-9, 2.0 / 3.0, 100).unwrap();
    assert!((near - 1.0).abs() < 1e-9);
    let b40 = entanglement_confidence(1.0, 2.0 / 3.0, 40).unwrap();
    assert!((b40 - b * b).abs() < 1e-15);
    assert!(matches!(entanglement_confidence(0.5, 2.0 / 3.0, 20), Err(QsvError::CannotReject(_))));

    let r = witness_confidence(2, 20, 20).unwrap();
    assert!(r.entangled);
    assert!((r.confidence.unwrap() - (1.0 - b)).abs() < 1e-15);
    assert!(witness_confidence(2, 21, 20).is_err());
}

#[test]
fn random_product_states_respect_the_separable_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for d in [2usize, 3] {
        let omega = mes_strategy(d).unwrap().aggregate().unwrap();
        let psi = mes_qudit(d).unwrap();
        let bound = separable_pass_bound(d).unwrap();
        let mut worst = 0.0f64;
        for _ in 0..10_000 {
            let a = random::haar_state(&[d], &mut rng).unwrap().projector();
            let b = random::haar_state(&[d], &mut rng).unwrap().projector();
            let sigma = kron(&a, &b).unwrap();
            let pass = omega.trace_product(&sigma).unwrap().re;
            let fid = psi.projector().trace_product(&sigma).unwrap().re;
            assert!(pass <= bound + 1e-9);
            assert!(fid <= 1.0 / d as f64 + 1e-9);
            worst = worst.max(pass);
        }
        assert!(worst > bound - 0.1);
    }
}

#[test]
fn product_search_reaches_but_never_exceeds_the_bound() {
    for d in [2usize, 3] {
        let omega = mes_strategy(d).unwrap().aggregate().unwrap();
        let bound = separable_pass_bound(d).unwrap();
        let found = product_pass_search(&omega, 200, 10, 3).unwrap();
        assert!(found.max <= bound + 1e-9);
        assert!(found.max > bound - 1e-6, "d = {d}: {}", found.max);
        let sigma = kron(&found.alice.projector(), &found.bob.projector()).unwrap();
        assert!((omega.trace_product(&sigma).unwrap().re - found.max).abs() < 1e-9);
    }
    let omega = mes_strategy(2).unwrap().aggregate().unwrap();
    let a = product_pass_search(&omega, 20, 3, 9).unwrap();
    let b = product_pass_search(&omega, 20, 3, 9).unwrap();
    assert_eq!(a.max.to_bits(), b.max.to_bits());
}
