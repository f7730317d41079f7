use serde::Serialize;

use super::gaps;
use super::local::{bell_strategy, ket_projector, pauli_basis};
use super::strategy::{LocalTerm, Strategy, Test};
use crate::error::{QsvError, Result};
use crate::graphs::Pauli;
use crate::qmath::{
    hermitian_eigenvalues, kron, partial_trace, partial_transpose, swap_operator, Operator,
    PureState, C64, DERIVED_TOL,
};
use crate::states::{schmidt_state, two_qubit_state, SchmidtVector};

const QUARTER_PI: f64 = std::f64::consts::FRAC_PI_4;

/// Largest local dimension for the phase-twirled qudit strategies. The twirl
/// has `4^{d−1}` elements, each contributing one test.
pub const MAX_TWIRL_DIM: usize = 6;

fn bipartite_dims(target: &PureState) -> Result<(usize, usize)> {
    match target.dims() {
        [a, b] => Ok((*a, *b)),
        other => Err(QsvError::invalid(format!(
            "expected a bipartite target, got dims {other:?}"
        ))),
    }
}

/// Normalized state of one party after the other's outcome `effect`.
/// `effect_on_alice` selects which side measured.
fn collapse(effect: &Operator, target: &PureState, effect_on_alice: bool) -> Result<Operator> {
    let (da, db) = bipartite_dims(target)?;
    let (full, keep) = if effect_on_alice {
        (kron(effect, &Operator::identity(&[db])?)?, 1)
    } else {
        (kron(&Operator::identity(&[da])?, effect)?, 0)
    };
    let joint = full.matmul(&target.projector())?;
    let reduced = partial_trace(&joint, &[keep])?.hermitian_part();
    let weight = reduced.trace().re;
    if weight <= 1e-12 {
        return Err(QsvError::StateNeverOccurs(format!(
            "outcome has probability {weight:.3e} on the target"
        )));
    }
    Ok(reduced.scale(1.0 / weight))
}

/// Bob's semi-optimal pass projector after Alice observes `alice_effect`:
/// the normalized collapsed state `Tr_A[(M ⊗ 𝟙)|ψ⟩⟨ψ|]`.
///
/// The collapse must be pure (to `1e-9`), which holds for rank-one `M`.
pub fn bob_semi_optimal(alice_effect: &Operator, target: &PureState) -> Result<Operator> {
    let (da, _) = bipartite_dims(target)?;
    if alice_effect.dims() != [da] {
        return Err(QsvError::DimensionMismatch(format!(
            "Alice's effect acts on {:?}, her system is {da}-dimensional",
            alice_effect.dims()
        )));
    }
    if !alice_effect.is_hermitian(1e-9)
        || *hermitian_eigenvalues(&alice_effect.hermitian_part())?
            .last()
            .expect("nonempty")
            < -1e-9
    {
        return Err(QsvError::InvalidPovm("Alice's effect is not positive".into()));
    }
    let rho = collapse(alice_effect, target, true)?;
    let purity = rho.trace_product(&rho)?.re;
    if (purity - 1.0).abs() > 1e-9 {
        return Err(QsvError::invalid(format!(
            "collapsed state is mixed (purity {purity}); use a rank-one effect"
        )));
    }
    Ok(rho)
}

/// `Σ_α |α⟩⟨α| ⊗ |α⟩⟨α|` as a one-way test.
fn zz_test(d: usize, probability: f64) -> Result<Test> {
    let terms = (0..d)
        .map(|a| {
            let mut diag = vec![0.0; d];
            diag[a] = 1.0;
            let p = Operator::from_real_diagonal(&[d], &diag)?;
            Ok(LocalTerm {
                alice: p.clone(),
                bob: p,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Test::from_local(probability, terms)?.with_setting("ZZ"))
}

/// Alice measures `basis`, Bob projects onto his collapsed state.
fn semi_optimal_test(probability: f64, basis: &[Operator], target: &PureState) -> Result<Test> {
    let terms = basis
        .iter()
        .map(|m| {
            Ok(LocalTerm {
                alice: m.clone(),
                bob: bob_semi_optimal(m, target)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Test::from_local(probability, terms)
}

fn check_qubit_theta(theta: f64, what: &str) -> Result<()> {
    if !(0.0..=QUARTER_PI).contains(&theta) {
        return Err(QsvError::invalid(format!("{what} needs 0 <= θ <= π/4, got {theta}")));
    }
    Ok(())
}

/// One-way strategy `[cos²θ P_ZZ^+ + X→/2 + Y→/2]/(1 + cos²θ)` for
/// `cos θ|00⟩ + sin θ|11⟩`.
pub fn one_way_qubit(theta: f64) -> Result<Strategy> {
    check_qubit_theta(theta, "one-way qubit strategy")?;
    let psi = two_qubit_state(theta)?;
    let c2 = theta.cos().powi(2);
    let norm = 1.0 + c2;
    let tests = vec![
        zz_test(2, c2 / norm)?,
        semi_optimal_test(0.5 / norm, &pauli_basis(Pauli::X), &psi)?.with_setting("X->"),
        semi_optimal_test(0.5 / norm, &pauli_basis(Pauli::Y), &psi)?.with_setting("Y->"),
    ];
    Strategy::new("oneway-qubit", psi, tests, Some(gaps::one_way_qubit(theta)))
}

/// Swap-symmetric one-round strategy
/// `P_ZZ^+/3 + (X→ + X← + Y→ + Y←)/6`.
pub fn two_way_qubit(theta: f64) -> Result<Strategy> {
    check_qubit_theta(theta, "two-way qubit strategy")?;
    let psi = two_qubit_state(theta)?;
    let v = swap_operator(2)?;
    let x = semi_optimal_test(1.0 / 6.0, &pauli_basis(Pauli::X), &psi)?.with_setting("X->");
    let y = semi_optimal_test(1.0 / 6.0, &pauli_basis(Pauli::Y), &psi)?.with_setting("Y->");
    let tests = vec![zz_test(2, 1.0 / 3.0)?, x.swapped(&v)?, y.swapped(&v)?, x, y];
    Strategy::new("twoway-qubit", psi, tests, Some(2.0 / 3.0))
}

/// Many-round building block: Alice applies `{M₀ = η|0⟩⟨0|, M₁}` and on
/// `M₁` Bob measures `bob_basis`, after which Alice verifies her collapse.
fn many_round_block(probability: f64, eta: f64, bob_basis: &[Operator], psi: &PureState) -> Result<Test> {
    let m0 = Operator::from_real_diagonal(&[2], &[eta, 0.0])?;
    let sqrt_m1 = Operator::from_real_diagonal(&[2], &[(1.0 - eta).sqrt(), 1.0])?;
    let mut terms = vec![LocalTerm {
        alice: m0,
        bob: Operator::from_real_diagonal(&[2], &[1.0, 0.0])?,
    }];
    let kraus = kron(&sqrt_m1, &Operator::identity(&[2])?)?;
    let after = PureState::normalized(psi.dims().to_vec(), kraus.apply_state(psi)?)?;
    for b in bob_basis {
        let rho_a = collapse(b, &after, false)?;
        terms.push(LocalTerm {
            alice: sqrt_m1.matmul(&rho_a)?.matmul(&sqrt_m1)?,
            bob: b.clone(),
        });
    }
    Test::from_local(probability, terms)
}

/// Infinite-round LOCC strategy with gap `1/(1 + sin θ cos θ)`.
///
/// At `θ = π/4` the construction degenerates (`η = 0`) and the Bell strategy
/// is returned instead.
pub fn many_round_qubit(theta: f64) -> Result<Strategy> {
    if (theta - QUARTER_PI).abs() <= 1e-12 {
        return Ok(bell_strategy());
    }
    if !(theta > 0.0 && theta < QUARTER_PI) {
        return Err(QsvError::invalid(format!(
            "many-round strategy needs 0 < θ <= π/4, got {theta}"
        )));
    }
    let psi = two_qubit_state(theta)?;
    let (s, c) = theta.sin_cos();
    let eta = 1.0 - theta.tan();
    let p = s * s / (1.0 + s * c);
    let q = (1.0 - p) / 4.0;
    let v = swap_operator(2)?;
    let x = many_round_block(q, eta, &pauli_basis(Pauli::X), &psi)?.with_setting("X<=>");
    let y = many_round_block(q, eta, &pauli_basis(Pauli::Y), &psi)?.with_setting("Y<=>");
    let tests = vec![zz_test(2, p)?, x.swapped(&v)?, y.swapped(&v)?, x, y];
    Strategy::new("manyround-qubit", psi, tests, Some(gaps::many_round_qubit(theta)))
}

/// Phase patterns `diag(1, i^{k₁}, …, i^{k_{d−1}})` of the twirl, in
/// lexicographic order of `k`.
fn twirl_phases(d: usize) -> Vec<Vec<C64>> {
    let units = [
        C64::new(1.0, 0.0),
        C64::new(0.0, 1.0),
        C64::new(-1.0, 0.0),
        C64::new(0.0, -1.0),
    ];
    let count = 4usize.pow(d as u32 - 1);
    (0..count)
        .map(|mut code| {
            let mut ks = vec![0usize; d];
            for slot in ks[1..].iter_mut().rev() {
                *slot = code % 4;
                code /= 4;
            }
            ks.iter().map(|&k| units[k]).collect()
        })
        .collect()
}

fn phase_conj(op: &Operator, phases: &[C64], conjugate: bool) -> Operator {
    let m = op.matrix();
    let ph = |i: usize| if conjugate { phases[i].conj() } else { phases[i] };
    let d = op.dim();
    let out = nalgebra::DMatrix::from_fn(d, d, |i, j| ph(i) * m[(i, j)] * ph(j).conj());
    Operator::new(op.dims().to_vec(), out).expect("same shape")
}

/// `ω P_ZZ + (1−ω)/|G| Σ_g g X→ g†` with Alice measuring the Fourier basis.
fn one_way_qudit_weighted(lambda: &SchmidtVector, omega: f64, label: &str, predicted: f64) -> Result<Strategy> {
    let d = lambda.dim();
    if d < 2 {
        return Err(QsvError::invalid("qudit strategies need d >= 2"));
    }
    if d > MAX_TWIRL_DIM {
        return Err(QsvError::SizeLimit(format!(
            "phase twirl for d = {d} has 4^{} elements; the limit is d <= {MAX_TWIRL_DIM}",
            d - 1
        )));
    }
    let psi = schmidt_state(lambda)?;
    let zeta = |k: usize| C64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / d as f64);
    let sd = 1.0 / (d as f64).sqrt();
    let fourier: Vec<Operator> = (0..d)
        .map(|a| {
            let f: Vec<C64> = (0..d).map(|b| zeta(a * b % d) * sd).collect();
            ket_projector(&f)
        })
        .collect();
    let bobs = fourier
        .iter()
        .map(|m| bob_semi_optimal(m, &psi))
        .collect::<Result<Vec<_>>>()?;

    let phases = twirl_phases(d);
    let w = (1.0 - omega) / phases.len() as f64;
    let mut tests = vec![zz_test(d, omega)?];
    for (k, ph) in phases.iter().enumerate() {
        let terms = fourier
            .iter()
            .zip(&bobs)
            .map(|(m, n)| LocalTerm {
                alice: phase_conj(m, ph, false),
                bob: phase_conj(n, ph, true),
            })
            .collect();
        tests.push(Test::from_local(w, terms)?.with_setting(format!("F->#{k}")));
    }
    Strategy::new(label, psi, tests, Some(predicted))
}

/// One-way qudit strategy with gap `1/(1 + λ₁²)`.
pub fn one_way_qudit(lambda: &SchmidtVector) -> Result<Strategy> {
    let l1 = lambda.largest();
    one_way_qudit_weighted(lambda, l1 * l1 / (1.0 + l1 * l1), "oneway-qudit", gaps::one_way_qudit(l1))
}

/// `(𝟙⊗𝟙 + d|ψ⟩⟨ψ|)/(d+1)` for the maximally entangled state, decomposed
/// into a computational-basis test and phase-twirled Fourier tests.
pub fn mes_strategy(d: usize) -> Result<Strategy> {
    if d < 2 {
        return Err(QsvError::invalid(format!("MES strategy needs d >= 2, got {d}")));
    }
    let lambda = SchmidtVector::uniform(d)?;
    let l1sq = 1.0 / d as f64;
    one_way_qudit_weighted(&lambda, l1sq / (1.0 + l1sq), "mes", gaps::mes(d))
}

/// Average of a one-way strategy, built with `λ̄² = (λ₁² + λ₂²)/2`, and its
/// swap.
pub fn two_way_qudit(lambda: &SchmidtVector) -> Result<Strategy> {
    let c = lambda.coeffs();
    if c.len() < 2 {
        return Err(QsvError::invalid("qudit strategies need d >= 2"));
    }
    let bar = 0.5 * (c[0] * c[0] + c[1] * c[1]);
    let predicted = gaps::two_way_qudit(c[0], c[1]);
    let one_way = one_way_qudit_weighted(lambda, bar / (1.0 + bar), "twoway-qudit", predicted)?;
    let v = swap_operator(lambda.dim())?;
    let mut tests = Vec::with_capacity(2 * one_way.tests().len());
    for t in one_way.tests() {
        let mut half = t.clone();
        half.probability *= 0.5;
        tests.push(half.swapped(&v)?);
        tests.push(half);
    }
    Strategy::new("twoway-qudit", one_way.target().clone(), tests, Some(predicted))
}

/// Outcome of the one-way feasibility conditions on the aggregate `Ω`:
/// separability (via PPT), `Tr_B Ω = 𝟙` and `⟨ψ|Ω|ψ⟩ = 1`.
#[derive(Clone, Debug, Serialize)]
pub struct OneWayReport {
    pub ppt: bool,
    pub ppt_min_eigenvalue: f64,
    /// PPT is equivalent to separability only for `2⊗2` and `2⊗3`.
    pub ppt_is_exact: bool,
    pub marginal_identity: bool,
    pub marginal_error: f64,
    pub target_pass: bool,
    pub target_pass_probability: f64,
}

impl OneWayReport {
    pub fn all_pass(&self) -> bool {
        self.ppt && self.marginal_identity && self.target_pass
    }
}

pub fn check_one_way_constraints(s: &Strategy) -> Result<OneWayReport> {
    let (da, db) = bipartite_dims(s.target())?;
    let omega = s.aggregate()?;
    let pt = partial_transpose(&omega, 1)?;
    let ppt_min = *hermitian_eigenvalues(&pt)?.last().expect("nonempty");
    let marginal = partial_trace(&omega, &[0])?;
    let marginal_error = marginal.max_abs_diff(&Operator::identity(&[da])?);
    let overlap = omega.expectation(s.target())?.re;
    Ok(OneWayReport {
        ppt: ppt_min >= -DERIVED_TOL,
        ppt_min_eigenvalue: ppt_min,
        ppt_is_exact: da * db <= 6,
        marginal_identity: marginal_error <= DERIVED_TOL,
        marginal_error,
        target_pass: (overlap - 1.0).abs() <= DERIVED_TOL,
        target_pass_probability: overlap,
    })
}
