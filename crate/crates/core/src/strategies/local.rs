use nalgebra::DVector;

use super::gaps;
use super::strategy::{Effect, LocalTerm, Strategy, Test};
use crate::error::{QsvError, Result};
use crate::graphs::{generators, graph_state, stabilizer_group, Coloring, Graph, Pauli, PauliString};
use crate::qmath::{hermitian_eigenvalues, kron, Operator, PureState, SparseOperator, C64};
use crate::states::{bell_state, ghz, two_qubit_state};

pub(crate) fn ket(amps: &[C64]) -> DVector<C64> {
    DVector::from_column_slice(amps)
}

pub(crate) fn ket_projector(amps: &[C64]) -> Operator {
    let v = ket(amps);
    let n = v.norm_squared();
    Operator::outer(&[amps.len()], &v, &v)
        .expect("single factor")
        .scale(1.0 / n)
}

fn r(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Eigenbasis projectors of a single-qubit Pauli, `+1` outcome first.
pub fn pauli_basis(p: Pauli) -> Vec<Operator> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let i = C64::new(0.0, h);
    match p {
        Pauli::X => vec![ket_projector(&[r(h), r(h)]), ket_projector(&[r(h), r(-h)])],
        Pauli::Y => vec![ket_projector(&[r(h), i]), ket_projector(&[r(h), -i])],
        Pauli::Z | Pauli::I => vec![ket_projector(&[r(1.0), r(0.0)]), ket_projector(&[r(0.0), r(1.0)])],
    }
}

/// Checks a POVM: Hermitian, positive and summing to the identity, all to
/// `1e-9`.
pub fn check_povm(povm: &[Operator]) -> Result<()> {
    let first = povm
        .first()
        .ok_or_else(|| QsvError::InvalidPovm("no elements".into()))?;
    let mut sum = Operator::zeros(first.dims())?;
    for (k, m) in povm.iter().enumerate() {
        if m.dims() != first.dims() {
            return Err(QsvError::InvalidPovm(format!("element {k} has dims {:?}", m.dims())));
        }
        if !m.is_hermitian(1e-9) {
            return Err(QsvError::InvalidPovm(format!("element {k} is not Hermitian")));
        }
        let lo = *hermitian_eigenvalues(&m.hermitian_part())?.last().expect("nonempty");
        if lo < -1e-9 {
            return Err(QsvError::InvalidPovm(format!(
                "element {k} has negative eigenvalue {lo}"
            )));
        }
        sum.add_scaled(m, 1.0)?;
    }
    let err = sum.max_abs_diff(&Operator::identity(first.dims())?);
    if err > 1e-9 {
        return Err(QsvError::InvalidPovm(format!(
            "elements sum to the identity only within {err:.3e}"
        )));
    }
    Ok(())
}

/// Local pass terms `(M_a, Σ_{b:(a,b)∈Y} N_b)`, where `(a, b)` is accepted
/// iff `‖M_a ⊗ N_b |ψ⟩‖ > 1e-9`.
fn accepted_terms(alice: &[Operator], bob: &[Operator], target: &PureState) -> Result<Vec<LocalTerm>> {
    check_povm(alice)?;
    check_povm(bob)?;
    let mut terms = Vec::with_capacity(alice.len());
    for m in alice {
        let mut acc = Operator::zeros(bob[0].dims())?;
        for n in bob {
            let mn = kron(m, n)?;
            if mn.dims() != target.dims() {
                return Err(QsvError::DimensionMismatch(format!(
                    "measurement on {:?}, target on {:?}",
                    mn.dims(),
                    target.dims()
                )));
            }
            if mn.apply_state(target)?.norm() > 1e-9 {
                acc.add_scaled(n, 1.0)?;
            }
        }
        terms.push(LocalTerm {
            alice: m.clone(),
            bob: acc,
        })
    }
    Ok(terms)
}

/// `Ω_ℓ = Σ_{(a,b)∈Y_ℓ} M_a ⊗ N_b`: every outcome pair that can occur on
/// the target passes.
pub fn build_local_test(alice: &[Operator], bob: &[Operator], target: &PureState) -> Result<Operator> {
    let terms = accepted_terms(alice, bob, target)?;
    Ok(Test::from_local(1.0, terms)?.effect.to_dense()?)
}

/// [`build_local_test`] packaged as a [`Test`] with its local terms.
pub fn local_test(probability: f64, alice: &[Operator], bob: &[Operator], target: &PureState) -> Result<Test> {
    Test::from_local(probability, accepted_terms(alice, bob, target)?)
}

/// `(P_XX^+ + P_YY^− + P_ZZ^+)/3`.
pub fn bell_strategy() -> Strategy {
    let psi = bell_state();
    let third = 1.0 / 3.0;
    let tests = [Pauli::X, Pauli::Y, Pauli::Z]
        .iter()
        .map(|&p| {
            let b = pauli_basis(p);
            let name = format!("{}{}", p.letter(), p.letter());
            local_test(third, &b, &b, &psi).map(|t| t.with_setting(name))
        })
        .collect::<Result<Vec<_>>>()
        .expect("fixed qubit measurements");
    Strategy::new("bell", psi, tests, Some(gaps::mes(2))).expect("valid by construction")
}

/// `|0…0⟩⟨0…0| + |1…1⟩⟨1…1|`.
fn all_z_test(n: usize) -> Result<Effect> {
    let d = 1usize << n;
    let rows = (0..d)
        .map(|i| {
            if i == 0 || i == d - 1 {
                vec![(i, r(1.0))]
            } else {
                Vec::new()
            }
        })
        .collect();
    Ok(Effect::Sparse(SparseOperator::from_rows(vec![2; n], rows)?))
}

/// `(P_{Z^{⊗n}} + P_{X^{⊗n}}^+)/2`.
pub fn ghz_two_setting(n: usize) -> Result<Strategy> {
    let psi = ghz(n)?;
    let x_all = PauliString::new(0, vec![Pauli::X; n]);
    let tests = vec![
        Test::new(0.5, all_z_test(n)?).with_setting("Z".repeat(n)),
        Test::new(0.5, Effect::stabilizer(vec![x_all])?).with_setting("X".repeat(n)),
    ];
    Strategy::new("ghz-two-setting", psi, tests, Some(0.5))
}

/// The `2^{n−1}` stabilizers `(−1)^k Y^{⊗2k} X^{⊗(n−2k)}` over all placements
/// of the `Y`s, ordered by the bit mask of `Y` positions.
pub fn ghz_xy_stabilizers(n: usize) -> Vec<PauliString> {
    (0..1usize << n)
        .filter(|m| m.count_ones() % 2 == 0)
        .map(|m| {
            let letters: Vec<Pauli> = (0..n)
                .map(|k| if m >> (n - 1 - k) & 1 == 1 { Pauli::Y } else { Pauli::X })
                .collect();
            let k = m.count_ones() / 2;
            PauliString::new(if k % 2 == 0 { 0 } else { 2 }, letters)
        })
        .collect()
}

/// `(1/3)(P_{Z^{⊗n}} + 2^{−(n−2)} Σ_{g∈S_XY} P_g^+)`.
pub fn ghz_optimal(n: usize) -> Result<Strategy> {
    let psi = ghz(n)?;
    let stabs = ghz_xy_stabilizers(n);
    let w = (2.0 / 3.0) / stabs.len() as f64;
    let mut tests = vec![Test::new(1.0 / 3.0, all_z_test(n)?).with_setting("Z".repeat(n))];
    for g in stabs {
        let setting: String = g.letters().iter().map(|p| p.letter()).collect();
        tests.push(Test::new(w, Effect::stabilizer(vec![g])?).with_setting(setting));
    }
    Strategy::new("ghz-optimal", psi, tests, Some(2.0 / 3.0))
}

/// Uniform mixture of `P_g^+` over the `2^n − 1` non-identity stabilizers.
pub fn stabilizer_strategy(g: &Graph) -> Result<Strategy> {
    let psi = graph_state(g)?;
    let group = stabilizer_group(&generators(g))?;
    let w = 1.0 / (group.len() - 1) as f64;
    let tests = group
        .into_iter()
        .skip(1)
        .map(|s| {
            let setting: String = s.letters().iter().map(|p| p.letter()).collect();
            Ok(Test::new(w, Effect::stabilizer(vec![s])?).with_setting(setting))
        })
        .collect::<Result<Vec<_>>>()?;
    Strategy::new("stabilizer", psi, tests, Some(gaps::stabilizer(g.n())))
}

/// One test per color class `ℓ`: measure `X` on the class and `Z` elsewhere,
/// pass iff every generator of the class reads `+1`.
pub fn coloring_strategy(g: &Graph, c: &Coloring) -> Result<Strategy> {
    if !c.is_proper(g) {
        return Err(QsvError::invalid("coloring is not proper for this graph"));
    }
    let psi = graph_state(g)?;
    let gens = generators(g);
    let classes: Vec<Vec<usize>> = c.classes().into_iter().filter(|k| !k.is_empty()).collect();
    let m = classes.len();
    let tests = classes
        .iter()
        .map(|class| {
            let setting: String = (0..g.n())
                .map(|v| if class.contains(&v) { 'X' } else { 'Z' })
                .collect();
            let effect = Effect::stabilizer(class.iter().map(|&v| gens[v].clone()).collect())?;
            Ok(Test::new(1.0 / m as f64, effect).with_setting(setting))
        })
        .collect::<Result<Vec<_>>>()?;
    Strategy::new("coloring", psi, tests, Some(gaps::coloring(m)))
}

/// Trine `u_k = (a0, ω^k a1)` and the partner `v_k` with `⟨u_k v_k|ψ⟩ = 0`.
fn trine_pairs(theta: f64, a0: f64) -> Vec<([C64; 2], [C64; 2])> {
    let (c, s) = (theta.cos(), theta.sin());
    let a1 = (1.0 - a0 * a0).max(0.0).sqrt();
    (0..3)
        .map(|k| {
            let w = C64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / 3.0);
            let u = [r(a0), w * a1];
            let wv = [u[0].conj() * c, u[1].conj() * s];
            let norm = (wv[0].norm_sqr() + wv[1].norm_sqr()).sqrt();
            let v = [wv[1].conj() / norm, -wv[0].conj() / norm];
            (u, v)
        })
        .collect()
}

fn local_optimal_tests(theta: f64, a0: f64) -> Result<Vec<Test>> {
    let psi = two_qubit_state(theta)?;
    let alpha = gaps::local_optimal_alpha(theta);
    let z = pauli_basis(Pauli::Z);
    let mut tests = vec![local_test(alpha, &z, &z, &psi)?.with_setting("ZZ")];
    let id = Operator::identity(&[2])?;
    for (k, (u, v)) in trine_pairs(theta, a0).into_iter().enumerate() {
        let pu = ket_projector(&u);
        let pv = ket_projector(&v);
        // Fail only on the (u, v) outcome pair.
        let terms = vec![
            LocalTerm {
                alice: pu.clone(),
                bob: id.sub(&pv)?,
            },
            LocalTerm {
                alice: id.sub(&pu)?,
                bob: id.clone(),
            },
        ];
        tests.push(Test::from_local((1.0 - alpha) / 3.0, terms)?.with_setting(format!("trine{k}")));
    }
    Ok(tests)
}

fn local_optimal_gap_at(theta: f64, a0: f64) -> Result<f64> {
    let tests = local_optimal_tests(theta, a0)?;
    let s = Strategy::new("local-optimal", two_qubit_state(theta)?, tests, None)?;
    let ev = hermitian_eigenvalues(&s.aggregate()?)?;
    Ok(1.0 - ev[1])
}

/// Nonadaptive local strategy for `cos θ|00⟩ + sin θ|11⟩`, `0 < θ < π/4`.
///
/// The three product tests are found by a deterministic search over the
/// polar parameter `a0` of a phase-covariant trine; the result must match
/// the closed-form gap to `1e-6`.
pub fn two_qubit_local_optimal(theta: f64) -> Result<Strategy> {
    let quarter = std::f64::consts::FRAC_PI_4;
    if !(theta > 0.0 && theta < quarter) {
        return Err(QsvError::invalid(format!(
            "local optimal strategy needs 0 < θ < π/4, got {theta}"
        )));
    }
    const GRID: usize = 100;
    let mut best = (0.0, f64::NEG_INFINITY);
    for i in 0..=GRID {
        let a0 = i as f64 / GRID as f64;
        let g = local_optimal_gap_at(theta, a0)?;
        if g > best.1 {
            best = (a0, g);
        }
    }
    let step = 1.0 / GRID as f64;
    let (mut lo, mut hi) = ((best.0 - step).max(0.0), (best.0 + step).min(1.0));
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - phi * (hi - lo);
    let mut x2 = lo + phi * (hi - lo);
    let mut f1 = local_optimal_gap_at(theta, x1)?;
    let mut f2 = local_optimal_gap_at(theta, x2)?;
    while hi - lo > 1e-10 {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = local_optimal_gap_at(theta, x2)?;
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = local_optimal_gap_at(theta, x1)?;
        }
    }
    let a0 = if f1 > f2 { x1 } else { x2 };
    let achieved = local_optimal_gap_at(theta, a0)?;
    let predicted = gaps::local_optimal(theta);
    if (achieved - predicted).abs() > 1e-6 {
        return Err(QsvError::NumericalIntegrity(format!(
            "trine search reached gap {achieved}, closed form is {predicted}"
        )));
    }
    Strategy::new(
        "local-optimal",
        two_qubit_state(theta)?,
        local_optimal_tests(theta, a0)?,
        Some(predicted),
    )
}
