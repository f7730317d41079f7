mod common;

use common::{kron, max_diff, pauli, pauli_word};
use nalgebra::DMatrix;
use qsv_core::graphs::{
    generators, graph_state, greedy_coloring, pauli_projector, stabilizer_group, Coloring, Graph, PauliString,
};
use qsv_core::qmath::{kron_all, partial_trace, random, Operator, PureState};
use qsv_core::states::{
    bell_state, dicke, from_spec, ghz, mes_qudit, schmidt_state, two_qubit_state, w_state, SchmidtVector,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const S2: f64 = std::f64::consts::FRAC_1_SQRT_2;

fn fixes(m: &DMatrix<num_complex::Complex64>, psi: &PureState) -> f64 {
    (m * psi.amplitudes() - psi.amplitudes()).norm()
}

#[test]
fn bell_eigen_relations() {
    let psi = bell_state();
    assert!(fixes(&pauli_word(1.0, "XX"), &psi) < 1e-15);
    assert!(fixes(&pauli_word(-1.0, "YY"), &psi) < 1e-15);
    assert!(fixes(&pauli_word(1.0, "ZZ"), &psi) < 1e-15);
    assert_eq!(psi, mes_qudit(2).unwrap());
}

#[test]
fn mes_is_invariant_under_u_ustar() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for d in 2..=4 {
        let psi = mes_qudit(d).unwrap();
        for _ in 0..5 {
            let u = random::haar_unitary(d, &mut rng).unwrap();
            let uu = qsv_core::qmath::kron(&u, &u.conj()).unwrap();
            let out = PureState::new(vec![d, d], uu.apply_state(&psi).unwrap()).unwrap();
            assert!((out.fidelity(&psi) - 1.0).abs() < 1e-9);
        }
        let reduced = partial_trace(&psi.projector(), &[0]).unwrap();
        assert!(reduced.max_abs_diff(&Operator::identity(&[d]).unwrap().scale(1.0 / d as f64)) < 1e-15);
    }
    let psi = mes_qudit(3).unwrap();
    for r in 0..9 {
        let want = if r % 4 == 0 { 1.0 / 3f64.sqrt() } else { 0.0 };
        assert!((psi.amplitude(r).re - want).abs() < 1e-15);
    }
    assert!(mes_qudit(1).is_err());
}

#[test]
fn ghz_stabilizers() {
    assert_eq!(ghz(2).unwrap(), bell_state());
    for n in 3..=6 {
        let psi = ghz(n).unwrap();
        assert!(fixes(&pauli_word(1.0, &"X".repeat(n)), &psi) < 1e-14);
        let zz = format!("ZZ{}", "I".repeat(n - 2));
        assert!(fixes(&pauli_word(1.0, &zz), &psi) < 1e-14);
    }
    assert!(ghz(1).is_err());
    assert!(ghz(13).is_err());
}

#[test]
fn schmidt_examples() {
    let theta = std::f64::consts::PI / 6.0;
    let psi = schmidt_state(&SchmidtVector::two_qubit(theta).unwrap()).unwrap();
    assert!((psi.fidelity(&two_qubit_state(theta).unwrap()) - 1.0).abs() < 1e-15);
    let product = schmidt_state(&SchmidtVector::new(&[1.0, 0.0, 0.0]).unwrap()).unwrap();
    assert_eq!(product, PureState::basis(&[3, 3], 0).unwrap());
    let uniform = schmidt_state(&SchmidtVector::uniform(4).unwrap()).unwrap();
    assert!((uniform.fidelity(&mes_qudit(4).unwrap()) - 1.0).abs() < 1e-15);
    assert!(SchmidtVector::new(&[0.9, 0.1]).is_err());
}

#[test]
fn w_and_dicke_examples() {
    let w2 = w_state(2).unwrap();
    assert!((w2.amplitude(1).re - S2).abs() < 1e-15 && (w2.amplitude(2).re - S2).abs() < 1e-15);
    for n in 3..=6 {
        let w = w_state(n).unwrap();
        assert_eq!(w, dicke(n, 1).unwrap());
        let perm: Vec<usize> = (0..n).rev().collect();
        assert!((w.permute_factors(&perm).unwrap().fidelity(&w) - 1.0).abs() < 1e-12);
    }
    let d42 = dicke(4, 2).unwrap();
    let nonzero: Vec<_> = (0..16).filter(|&r| d42.amplitude(r).norm() > 0.0).collect();
    assert_eq!(nonzero.len(), 6);
    assert!(nonzero.iter().all(|&r| (d42.amplitude(r).re - 1.0 / 6f64.sqrt()).abs() < 1e-15));
    assert_eq!(dicke(5, 0).unwrap(), PureState::basis(&[2; 5], 0).unwrap());
    assert!(dicke(3, 4).is_err());
}

#[test]
fn state_grammar() {
    assert_eq!(from_spec("ghz:3").unwrap(), ghz(3).unwrap());
    assert_eq!(from_spec("dicke:4:2").unwrap(), dicke(4, 2).unwrap());
    assert!(from_spec("ghz").is_err());
    assert!(from_spec("nope:1").is_err());
}

#[test]
fn generator_examples() {
    let names = |g: &Graph| generators(g).iter().map(|p| p.to_string()).collect::<Vec<_>>();
    assert_eq!(names(&Graph::path(2).unwrap()), ["+XZ", "+ZX"]);
    assert_eq!(names(&Graph::complete(3).unwrap())[0], "+XZZ");
    assert_eq!(names(&Graph::cycle(4).unwrap())[0], "+XZIZ");
}

#[test]
fn graph_state_examples() {
    let plus = graph_state(&Graph::empty(1).unwrap()).unwrap();
    assert!((plus.amplitude(0).re - S2).abs() < 1e-15 && (plus.amplitude(1).re - S2).abs() < 1e-15);

    // A single edge is CZ|++⟩; a Hadamard on qubit 2 maps it to the Bell state.
    let edge = graph_state(&Graph::path(2).unwrap()).unwrap();
    let h = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, -1.0]).map(|x| common::c(x * S2, 0.0));
    let ih = kron(&pauli('I'), &h);
    let bell = ih * edge.amplitudes();
    assert!((bell - bell_state().amplitudes()).norm() < 1e-15);

    let star = Graph::star(4).unwrap();
    let psi = graph_state(&star).unwrap();
    for word in ["XZZZ", "ZXII", "ZIXI", "ZIIX"] {
        assert!(fixes(&pauli_word(1.0, word), &psi) < 1e-14, "{word}");
    }
}

#[test]
fn stabilizer_group_examples() {
    let x: PauliString = "+X".parse().unwrap();
    let names = |gs: Vec<PauliString>| {
        let mut v: Vec<String> = gs.iter().map(|g| g.to_string()).collect();
        v.sort();
        v
    };
    assert_eq!(names(stabilizer_group(&[x]).unwrap()), ["+I", "+X"]);
    let bell = stabilizer_group(&["+XX".parse().unwrap(), "+ZZ".parse().unwrap()]).unwrap();
    assert_eq!(names(bell), ["+II", "+XX", "+ZZ", "-YY"]);

    let ghz3 = stabilizer_group(&generators(&Graph::star(3).unwrap())).unwrap();
    assert_eq!(ghz3.len(), 8);

    // GHZ₃ in its native basis: Z-type elements are I and the three ZZ pairs.
    let native = stabilizer_group(&[
        "+XXX".parse().unwrap(),
        "+ZZI".parse().unwrap(),
        "+IZZ".parse().unwrap(),
    ])
    .unwrap();
    let z_type = native
        .iter()
        .filter(|g| g.to_string().chars().skip(1).all(|ch| ch == 'I' || ch == 'Z'))
        .count();
    assert_eq!(z_type, 4);
}

#[test]
fn group_elements_fix_graph_states_and_square_to_identity() {
    for g in [Graph::cycle(5).unwrap(), Graph::star(4).unwrap(), Graph::complete(4).unwrap()] {
        let psi = graph_state(&g).unwrap();
        for el in stabilizer_group(&generators(&g)).unwrap() {
            let m = el.to_operator().unwrap();
            assert!((m.expectation(&psi).unwrap().re - 1.0).abs() < 1e-9);
            let sq = el.mul(&el).unwrap();
            assert_eq!(sq, PauliString::identity(g.n()));
        }
    }
}

#[test]
fn pauli_products_are_associative() {
    let words = ["+XYZ", "-iZZI", "+YIX", "+iXXY"];
    let ps: Vec<PauliString> = words.iter().map(|w| w.parse().unwrap()).collect();
    for a in &ps {
        for b in &ps {
            for c in &ps {
                let l = a.mul(b).unwrap().mul(c).unwrap();
                let r = a.mul(&b.mul(c).unwrap()).unwrap();
                assert_eq!(l, r);
            }
        }
    }
}

#[test]
fn projector_examples() {
    let pz = pauli_projector(&"+Z".parse().unwrap(), 1).unwrap();
    assert_eq!(pz, PureState::basis(&[2], 0).unwrap().projector());

    let pxx = pauli_projector(&"+XX".parse().unwrap(), 1).unwrap();
    let plus = PureState::from_real(vec![2], &[S2, S2]).unwrap();
    let minus = PureState::from_real(vec![2], &[S2, -S2]).unwrap();
    let pp = kron_all(&[plus.projector(), plus.projector()]).unwrap();
    let mm = kron_all(&[minus.projector(), minus.projector()]).unwrap();
    assert!(pxx.max_abs_diff(&pp.add(&mm).unwrap()) < 1e-15);

    let pyy = pauli_projector(&"-YY".parse().unwrap(), 1).unwrap();
    assert!((pyy.expectation(&bell_state()).unwrap().re - 1.0).abs() < 1e-15);
    assert!(max_diff(pyy.matmul(&pyy).unwrap().matrix(), pyy.matrix()) < 1e-15);
    assert!((pyy.trace().re - 2.0).abs() < 1e-15);

    assert!(pauli_projector(&"+iXX".parse().unwrap(), 1).is_err());
}

#[test]
fn greedy_coloring_examples() {
    assert_eq!(greedy_coloring(&Graph::cycle(6).unwrap()).num_colors(), 2);
    assert_eq!(greedy_coloring(&Graph::complete(3).unwrap()).num_colors(), 3);
    let c4 = greedy_coloring(&Graph::cycle(4).unwrap());
    assert_eq!(c4.colors(), [1, 2, 1, 2]);
    for g in [Graph::cycle(7).unwrap(), Graph::star(6).unwrap(), Graph::complete(5).unwrap()] {
        let col = greedy_coloring(&g);
        assert!(col.is_proper(&g));
        assert!(col.num_colors() <= g.max_degree() + 1);
        for class in col.classes() {
            for &a in &class {
                for &b in &class {
                    assert!(!g.has_edge(a, b));
                }
            }
        }
    }
    let bad = Coloring::new(vec![1, 1, 2, 2]).unwrap();
    assert!(!bad.is_proper(&Graph::cycle(4).unwrap()));
}
