mod common;

use std::f64::consts::E;

use common::{bell_omega, max_diff};
use qsv_core::adversarial::*;
use qsv_core::states::{bell_state, ghz};
use qsv_core::stats::required_samples;
use qsv_core::strategies::bell_strategy;
use qsv_core::QsvError;

#[test]
fn homogeneous_examples() {
    let psi = bell_state();
    let s = homogeneous_strategy(&psi, 1.0 / 3.0).unwrap();
    assert!(max_diff(s.aggregate().unwrap().matrix(), &bell_omega()) < 1e-15);
    assert!((s.gap().unwrap() - 2.0 / 3.0).abs() < 1e-12);
    let global = homogeneous_strategy(&psi, 0.0).unwrap();
    assert_eq!(global.tests().len(), 1);
    assert!((global.gap().unwrap() - 1.0).abs() < 1e-12);
    let g = ghz(3).unwrap();
    for lambda in [0.1, 0.5, 0.9] {
        let s = homogeneous_strategy(&g, lambda).unwrap();
        assert!((s.gap().unwrap() - (1.0 - lambda)).abs() < 1e-12);
        assert!(s.validate().unwrap().valid);
    }
    assert!(homogeneous_strategy(&psi, 1.0).is_err());
}

#[test]
fn homogeneous_sample_examples() {
    let n = adversarial_samples_homogeneous(0.01, 0.01, 1.0 / E).unwrap();
    let by_hand = (E * 100.0 * 100f64.ln()).ceil() as u64;
    assert_eq!(by_hand, 1252);
    assert_eq!(n, 1252);
    assert!((prefactor(1.0 / E).unwrap() - E).abs() < 1e-14);
    assert!(matches!(adversarial_samples_homogeneous(0.01, 0.01, 1.0), Err(QsvError::DivergentOverhead(_))));
    assert!(adversarial_samples_homogeneous(0.0, 0.01, 0.5).is_err());
}

#[test]
fn prefactor_is_minimised_at_inverse_e() {
    let steps = 100_000;
    let (arg, _) = (1..steps)
        .map(|k| k as f64 / steps as f64)
        .map(|x| (x, prefactor(x).unwrap()))
        .fold((0.0, f64::INFINITY), |best, (x, v)| if v < best.1 { (x, v) } else { best });
    assert!((arg - 1.0 / E).abs() < 1e-3, "{arg}");
}

#[test]
fn overhead_examples() {
    assert!((adversarial_overhead(1.0 / E, 1.0 / E).unwrap() - E).abs() < 1e-14);
    let h = adversarial_overhead(0.5, 0.1).unwrap();
    let by_hand = 1.0 / (0.1 * 10f64.ln());
    assert!((h - by_hand).abs() < 1e-12);
    assert!((h - 4.343).abs() < 1e-3);
    assert!((prefactor(0.5).unwrap() - 2.885).abs() < 1e-3);
    let tiny = adversarial_overhead(0.5, 1e-9).unwrap();
    assert!((tiny / 4.83e7 - 1.0).abs() < 1e-3, "{tiny}");
}

#[test]
fn general_plan_examples() {
    let psi = bell_state();
    let homog = homogeneous_strategy(&psi, 1.0 / 3.0).unwrap();
    let plan = adversarial_samples_general(0.01, 0.01, &homog.aggregate().unwrap(), &psi).unwrap();
    assert!((plan.overhead - 1.0 / (3f64.ln() / 3.0)).abs() < 1e-9);
    assert!((plan.overhead - 2.731).abs() < 1e-3);
    assert!(plan.asymptotic);

    let bell = adversarial_samples_general(0.01, 0.01, &bell_strategy().aggregate().unwrap(), &psi).unwrap();
    assert!((bell.lambda - 1.0 / 3.0).abs() < 1e-12 && (bell.tau - 1.0 / 3.0).abs() < 1e-12);
    assert_eq!(bell.rounds, plan.rounds);

    let zero = psi.projector();
    assert!(matches!(adversarial_samples_general(0.01, 0.01, &zero, &psi), Err(QsvError::DivergentOverhead(_))));
}

#[test]
fn homogeneous_and_general_agree_exactly() {
    let psi = ghz(3).unwrap();
    for k in 1..20 {
        let lambda = k as f64 / 20.0;
        let omega = homogeneous_strategy(&psi, lambda).unwrap().aggregate().unwrap();
        for &(eps, delta) in &[(0.01, 0.01), (0.05, 0.001), (0.2, 0.1)] {
            let general = adversarial_samples_general(eps, delta, &omega, &psi).unwrap();
            let homog = adversarial_samples_homogeneous(eps, delta, lambda).unwrap();
            assert_eq!(general.rounds, homog, "λ = {lambda}");
        }
    }
}

#[test]
fn adversarial_rounds_exceed_independent_rounds() {
    for k in 1..50 {
        let lambda = k as f64 / 50.0;
        for &(eps, delta) in &[(0.01, 0.01), (0.001, 0.05), (0.1, 1e-4)] {
            let adv = adversarial_samples_homogeneous(eps, delta, lambda).unwrap();
            let iid = required_samples(eps, delta, 1.0 - lambda).unwrap();
            assert!(adv > iid, "λ = {lambda}: {adv} vs {iid}");
        }
    }
}

#[test]
fn trivial_mixing_helps_small_tau() {
    let plain = plan_from_spectrum(0.01, 0.01, 0.5, 0.01).unwrap();
    let mix = trivial_mix_plan(0.01, 0.01, 0.5, 0.01, 2000).unwrap();
    assert!(mix.plan.overhead < plain.overhead);
    assert!(mix.plan.rounds < plain.rounds);
    let q = mix.q;
    assert!((mix.plan.tau - ((1.0 - q) * 0.01 + q)).abs() < 1e-15);
    assert!(plan_from_spectrum(0.01, 0.01, 0.2, 0.5).is_err());
}
