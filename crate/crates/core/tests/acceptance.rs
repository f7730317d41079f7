//! One PASS/FAIL line per acceptance criterion, written straight to stderr
//! so it shows even under output capture. Every criterion is also a regular
//! assertion.

use std::f64::consts::{E, FRAC_PI_4};
use std::io::Write;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qsv_core::adversarial::{adversarial_overhead, adversarial_samples_general, adversarial_samples_homogeneous, homogeneous_strategy, prefactor};
use qsv_core::entanglement::{entanglement_confidence, separable_pass_bound};
use qsv_core::graphs::{greedy_coloring, Graph};
use qsv_core::protocol_sim::{run_protocol, run_protocol_with_threads, evaluate_transcript, Source};
use qsv_core::qmath::{kron, random, Operator};
use qsv_core::qpv::{convert_one_way_to_pm, entanglement_gate_fidelity, pm_pass_sides, ChannelChoi};
use qsv_core::states::{ghz, SchmidtVector};
use qsv_core::stats::{all_pass_pvalue, binomial_tail, chernoff_hoeffding_confidence, required_samples, Decision};
use qsv_core::strategies::*;

fn report(id: u32, name: &str, ok: bool, detail: String) {
    let line = format!("{} criterion {id}: {name} ({detail})\n", if ok { "PASS" } else { "FAIL" });
    // Bypasses the test harness capture, which only sees print! macros.
    let _ = std::io::stderr().write_all(line.as_bytes());
    assert!(ok, "criterion {id} failed: {detail}");
}

// Tolerances, as stated by the criteria.
const GAP_TOL: f64 = 1e-6;
const PROB_SUM_TOL: f64 = 1e-12;
const EFFECT_TOL: f64 = 1e-9;
const TARGET_TOL: f64 = 1e-9;
const GAP_RUNTIME_S: f64 = 60.0;
const SIM_RUNTIME_S: f64 = 30.0;
const MINIMISER_TOL: f64 = 1e-3;
const OVERHEAD_TOL: f64 = 1e-3;
const DUALITY_TOL: f64 = 1e-9;
const SEPARABLE_TOL: f64 = 1e-9;
const CONFIDENCE_TOL: f64 = 1e-12;

fn theta_grid() -> Vec<f64> {
    (1..=32).map(|k| FRAC_PI_4 * k as f64 / 33.0).collect()
}

fn graphs() -> Vec<Graph> {
    vec![
        Graph::path(3).unwrap(),
        Graph::cycle(5).unwrap(),
        Graph::star(6).unwrap(),
        Graph::complete(4).unwrap(),
        Graph::new(8, &[(0, 1), (1, 2), (2, 3), (3, 0), (4, 5), (5, 6), (6, 7), (7, 4), (0, 4), (2, 6)]).unwrap(),
    ]
}

fn random_schmidt(rng: &mut ChaCha8Rng) -> SchmidtVector {
    let d = rng.random_range(2..=5);
    let mut w: Vec<f64> = (0..d).map(|_| rng.random_range(0.05..1.0)).collect();
    w.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let total: f64 = w.iter().sum();
    let coeffs: Vec<f64> = w.iter().map(|x| (x / total).sqrt()).collect();
    SchmidtVector::new(&coeffs).unwrap()
}

#[test]
fn criterion_1_closed_form_gaps() {
    let start = Instant::now();
    let mut cases: Vec<(String, Strategy, f64)> = Vec::new();
    cases.push(("bell".into(), bell_strategy(), 2.0 / 3.0));
    for d in 2..=5 {
        cases.push((format!("mes d={d}"), mes_strategy(d).unwrap(), d as f64 / (d as f64 + 1.0)));
    }
    for n in 2..=6 {
        cases.push((format!("ghz two-setting n={n}"), ghz_two_setting(n).unwrap(), 0.5));
        cases.push((format!("ghz optimal n={n}"), ghz_optimal(n).unwrap(), 2.0 / 3.0));
    }
    for g in graphs() {
        let n = g.n() as i32;
        let want = 2f64.powi(n - 1) / (2f64.powi(n) - 1.0);
        cases.push((format!("stabilizer n={n}"), stabilizer_strategy(&g).unwrap(), want));
        let col = greedy_coloring(&g);
        let m = col.num_colors() as f64;
        cases.push((format!("coloring n={n} m={m}"), coloring_strategy(&g, &col).unwrap(), 1.0 / m));
    }
    for th in theta_grid() {
        let (s, c) = th.sin_cos();
        if th < FRAC_PI_4 {
            cases.push((format!("local θ={th:.4}"), two_qubit_local_optimal(th).unwrap(), 1.0 / (2.0 + s * c)));
        }
        cases.push((format!("one-way θ={th:.4}"), one_way_qubit(th).unwrap(), 1.0 / (1.0 + c * c)));
        cases.push((format!("two-way θ={th:.4}"), two_way_qubit(th).unwrap(), 2.0 / 3.0));
        cases.push((format!("many-round θ={th:.4}"), many_round_qubit(th).unwrap(), 1.0 / (1.0 + s * c)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for k in 0..10 {
        let l = random_schmidt(&mut rng);
        let top = l.coeffs()[0];
        cases.push((format!("one-way qudit #{k}"), one_way_qudit(&l).unwrap(), 1.0 / (1.0 + top * top)));
    }
    for n in 3..=8 {
        let locc = if n == 3 { 1.0 / 3.0 } else { 1.0 / (n as f64 - 1.0) };
        let local = if n == 3 { 0.25 } else { 1.0 / (2.0 * (n as f64 - 1.0)) };
        cases.push((format!("w locc n={n}"), w_locc(n).unwrap(), locc));
        cases.push((format!("w local n={n}"), w_local(n).unwrap(), local));
    }
    for (n, k) in [(4, 2), (5, 2), (6, 3)] {
        let w = w_locc(n).unwrap().gap().unwrap();
        cases.push((format!("dicke n={n} k={k}"), dicke_locc(n, k).unwrap(), w));
    }

    let mut worst = (0.0f64, String::new());
    for (name, s, want) in &cases {
        let dev = (s.gap().unwrap() - want).abs();
        if dev > worst.0 {
            worst = (dev, name.clone());
        }
    }
    let secs = start.elapsed().as_secs_f64();
    report(
        1,
        "closed-form gap suite",
        worst.0 <= GAP_TOL && secs < GAP_RUNTIME_S,
        format!(
            "{} cases, max deviation {:.2e} at '{}', tol {GAP_TOL:e}, {secs:.1} s of {GAP_RUNTIME_S} s",
            cases.len(),
            worst.0,
            worst.1
        ),
    );
}

#[test]
fn criterion_2_strategy_validity() {
    let mut all: Vec<Strategy> = vec![bell_strategy()];
    let mut one_way: Vec<Strategy> = Vec::new();
    for d in 2..=5 {
        all.push(mes_strategy(d).unwrap());
    }
    for n in 2..=6 {
        all.push(ghz_two_setting(n).unwrap());
        all.push(ghz_optimal(n).unwrap());
    }
    for g in graphs() {
        all.push(stabilizer_strategy(&g).unwrap());
        all.push(coloring_strategy(&g, &greedy_coloring(&g)).unwrap());
    }
    for th in [0.1, 0.4, 0.7] {
        all.push(two_qubit_local_optimal(th).unwrap());
        all.push(two_way_qubit(th).unwrap());
        all.push(many_round_qubit(th).unwrap());
        one_way.push(one_way_qubit(th).unwrap());
    }
    one_way.push(one_way_qubit(FRAC_PI_4).unwrap());
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..5 {
        let l = random_schmidt(&mut rng);
        one_way.push(one_way_qudit(&l).unwrap());
        all.push(two_way_qudit(&l).unwrap());
    }
    for n in 3..=6 {
        all.push(w_locc(n).unwrap());
        all.push(w_local(n).unwrap());
    }
    all.push(dicke_locc(5, 2).unwrap());
    all.extend(one_way.iter().cloned());

    let mut failures = Vec::new();
    let (mut sum_dev, mut eig_dev, mut res) = (0.0f64, 0.0f64, 0.0f64);
    for s in &all {
        let v = s.validate().unwrap();
        sum_dev = sum_dev.max((v.probability_sum - 1.0).abs());
        eig_dev = eig_dev.max((-v.effect_min_eigenvalue).max(v.effect_max_eigenvalue - 1.0));
        res = res.max(v.max_target_residual);
        if (v.probability_sum - 1.0).abs() > PROB_SUM_TOL
            || v.effect_min_eigenvalue < -EFFECT_TOL
            || v.effect_max_eigenvalue > 1.0 + EFFECT_TOL
            || v.max_target_residual > TARGET_TOL
        {
            failures.push(s.label().to_string());
        }
    }
    for s in &one_way {
        if !check_one_way_constraints(s).unwrap().all_pass() {
            failures.push(format!("{} constraints", s.label()));
        }
    }
    report(
        2,
        "strategy validity suite",
        failures.is_empty(),
        format!(
            "{} strategies, {} one-way; max |Σp−1| {sum_dev:.1e} (tol {PROB_SUM_TOL:e}), \
             spectrum excess {eig_dev:.1e} (tol {EFFECT_TOL:e}), target residual {res:.1e} (tol {TARGET_TOL:e}); failures {failures:?}",
            all.len(),
            one_way.len()
        ),
    );
}

#[test]
fn criterion_3_statistics() {
    let heads = binomial_tail(100, 0.5, 71).unwrap();
    let biased = binomial_tail(100, 0.75, 71).unwrap();
    let coin = (1.55e-5..=1.70e-5).contains(&heads) && (0.845..=0.855).contains(&biased);

    let mut grid_ok = 0;
    for &eps in &[0.001, 0.01, 0.05, 0.2, 0.6] {
        for &delta in &[1e-6, 1e-3, 0.01, 0.05, 0.3] {
            for &nu in &[0.1, 0.5, 2.0 / 3.0, 0.99] {
                let n = required_samples(eps, delta, nu).unwrap();
                let base = 1.0 - eps * nu;
                if base.powf(n as f64) <= delta && (n == 1 || delta < base.powf((n - 1) as f64)) {
                    grid_ok += 1;
                }
            }
        }
    }

    let mut exact = true;
    for &(eps, nu, n) in &[(0.01, 2.0 / 3.0, 1000u64), (0.1, 2.0 / 3.0, 44), (0.05, 0.5, 300), (0.3, 1.0, 7)] {
        let t = 1.0 - eps * nu;
        let c = chernoff_hoeffding_confidence(1.0, t, n).unwrap();
        exact &= c == t.powf(n as f64) && c == all_pass_pvalue(n, t).unwrap();
    }
    report(
        3,
        "statistics suite",
        coin && grid_ok == 100 && exact,
        format!(
            "P(T≥71|1/2) = {heads:.4e} in [1.55e-5, 1.70e-5], P(T≥71|3/4) = {biased:.4} in [0.845, 0.855]; \
             {grid_ok}/100 grid points tight; f=1 bound bit-exact: {exact}"
        ),
    );
}

#[test]
fn criterion_4_simulation() {
    let start = Instant::now();
    let s = bell_strategy();
    let n = 100_000u64;
    let tr = run_protocol(&s, &Source::WorstCase(0.3), n, 4).unwrap();
    let band = 4.0 * (0.16 / n as f64).sqrt();
    let within = (tr.frequency - 0.8).abs() < band;

    let mut exact_all = true;
    for (k, st) in [bell_strategy(), ghz_optimal(4).unwrap(), one_way_qubit(0.3).unwrap(), w_locc(4).unwrap()]
        .iter()
        .enumerate()
    {
        exact_all &= run_protocol(st, &Source::ExactTarget, 10_000, k as u64).unwrap().frequency == 1.0;
    }

    let src = Source::Depolarized(0.1);
    let one = run_protocol_with_threads(&s, &src, n, 5, 1).unwrap();
    let many = run_protocol_with_threads(&s, &src, n, 5, 8).unwrap();
    let identical = one == many;
    let secs = start.elapsed().as_secs_f64();
    report(
        4,
        "simulation suite",
        within && exact_all && identical && secs < SIM_RUNTIME_S,
        format!(
            "f = {:.5}, |f−0.8| = {:.2e} < {band:.2e}: {within}; exact source f = 1: {exact_all}; \
             1 vs 8 threads identical: {identical}; {secs:.1} s of {SIM_RUNTIME_S} s",
            tr.frequency,
            (tr.frequency - 0.8).abs()
        ),
    );
}

#[test]
fn criterion_5_fidelity_estimation_demo() {
    // Fidelity 1 − p + p/4 = 0.995.
    let p = 0.005 / 0.75;
    let s = bell_strategy();
    let nu = s.gap().unwrap();
    let src = Source::Depolarized(p);
    let trials = 100u64;
    let mut confident = 0;
    for k in 0..trials {
        let tr = run_protocol(&s, &src, 1000, 10_000 + k).unwrap();
        let r = evaluate_transcript(&tr, 0.01, nu).unwrap();
        if r.decision == Decision::Reject && r.confidence.unwrap() >= 0.95 {
            confident += 1;
        }
    }
    report(
        5,
        "fidelity-estimation demonstration",
        confident >= 80,
        format!("{confident}/{trials} trials reject ε = 0.01 with confidence ≥ 0.95; need ≥ 80"),
    );
}

#[test]
fn criterion_6_adversarial() {
    let steps = 100_000;
    let (arg, _) = (1..steps)
        .map(|k| k as f64 / steps as f64)
        .map(|x| (x, prefactor(x).unwrap()))
        .fold((0.0, f64::INFINITY), |b, (x, v)| if v < b.1 { (x, v) } else { b });
    let h = adversarial_overhead(0.5, 0.1).unwrap();

    let psi = ghz(3).unwrap();
    let mut agree = true;
    for k in 1..20 {
        let lambda = k as f64 / 20.0;
        let omega = homogeneous_strategy(&psi, lambda).unwrap().aggregate().unwrap();
        for &(eps, delta) in &[(0.01, 0.01), (0.05, 0.001), (0.2, 0.1)] {
            agree &= adversarial_samples_general(eps, delta, &omega, &psi).unwrap().rounds
                == adversarial_samples_homogeneous(eps, delta, lambda).unwrap();
        }
    }
    report(
        6,
        "adversarial suite",
        (arg - 1.0 / E).abs() < MINIMISER_TOL && (h - 4.343).abs() < OVERHEAD_TOL && agree,
        format!(
            "grid minimiser {arg:.5} vs 1/e (tol {MINIMISER_TOL:e}); h(0.5, 0.1) = {h:.5} (tol {OVERHEAD_TOL:e}); \
             homogeneous/general agree: {agree}"
        ),
    );
}

#[test]
fn criterion_7_qpv() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let qubit_s = one_way_qubit(FRAC_PI_4).unwrap();
    let qutrit_s = one_way_qudit(&SchmidtVector::uniform(3).unwrap()).unwrap();
    let pm2 = convert_one_way_to_pm(&qubit_s, &random::haar_unitary(2, &mut rng).unwrap()).unwrap();
    let pm3 = convert_one_way_to_pm(&qutrit_s, &random::haar_unitary(3, &mut rng).unwrap()).unwrap();
    let mut duality = 0.0f64;
    for k in 0..50 {
        let (pm, d) = if k % 2 == 0 { (&pm2, 2) } else { (&pm3, 3) };
        let e = ChannelChoi::random(d, 1 + k % 3, &mut rng).unwrap();
        let sides = pm_pass_sides(pm, &e).unwrap();
        duality = duality.max((sides.operational - sides.choi).abs());
    }

    let mut target = 0.0f64;
    let mut fe = 0.0f64;
    for _ in 0..10 {
        let u = random::haar_unitary(2, &mut rng).unwrap();
        let pm = convert_one_way_to_pm(&qubit_s, &u).unwrap();
        for pass in pm.target_pass(&u).unwrap() {
            target = target.max((pass - 1.0).abs());
        }
        let f = entanglement_gate_fidelity(&ChannelChoi::unitary(&u).unwrap(), &u).unwrap();
        fe = fe.max((f - 1.0).abs());
    }
    report(
        7,
        "QPV suite",
        duality <= DUALITY_TOL && target <= DUALITY_TOL && fe <= DUALITY_TOL,
        format!(
            "50 channels: max |left − right| {duality:.1e}; 10 gates: max |Tr(UρU†N) − 1| {target:.1e}, \
             max |F_e − 1| {fe:.1e}; tol {DUALITY_TOL:e}"
        ),
    );
}

#[test]
fn criterion_8_entanglement() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut excess = f64::NEG_INFINITY;
    for d in [2usize, 3] {
        let omega = mes_strategy(d).unwrap().aggregate().unwrap();
        let bound = separable_pass_bound(d).unwrap();
        for _ in 0..10_000 {
            let a = random::haar_state(&[d], &mut rng).unwrap().projector();
            let b = random::haar_state(&[d], &mut rng).unwrap().projector();
            let sigma: Operator = kron(&a, &b).unwrap();
            excess = excess.max(omega.trace_product(&sigma).unwrap().re - bound);
        }
    }
    let c = entanglement_confidence(1.0, 2.0 / 3.0, 20).unwrap();
    let dev = (c - (2.0f64 / 3.0).powi(20)).abs();
    report(
        8,
        "entanglement suite",
        excess <= SEPARABLE_TOL && dev <= CONFIDENCE_TOL,
        format!(
            "max Tr(Ωσ) − 2/(d+1) over 2×10⁴ product states = {excess:.2e} (tol {SEPARABLE_TOL:e}); \
             |δ − (2/3)²⁰| = {dev:.1e} (tol {CONFIDENCE_TOL:e})"
        ),
    );
}
