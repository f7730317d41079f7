//! Sample planning when the source may be correlated across rounds.
//!
//! Only the high-precision asymptotics (`ε, δ → 0`) are provided. Every
//! plan carries `asymptotic: true` to say so. Tests are assumed to be drawn
//! with unit frequency; other frequencies are not covered.

use serde::Serialize;

use crate::error::{QsvError, Result};
use crate::qmath::{hermitian_eigenvalues, Operator, PureState, DERIVED_TOL};
use crate::strategies::{Effect, Strategy, Test};

/// Below this a numerically extracted eigenvalue is treated as zero.
const ZERO_EIGENVALUE: f64 = 1e-12;

/// `|ψ⟩⟨ψ| + λ(𝟙 − |ψ⟩⟨ψ|)`, realised as the target projector with
/// probability `1 − λ` and the trivial test with probability `λ`.
pub fn homogeneous_strategy(target: &PureState, lambda: f64) -> Result<Strategy> {
    if !(0.0..1.0).contains(&lambda) {
        return Err(QsvError::invalid(format!("λ must lie in [0, 1), got {lambda}")));
    }
    let mut tests = vec![Test::new(1.0 - lambda, Effect::Dense(target.projector())).with_setting("target")];
    if lambda > 0.0 {
        tests.push(Test::new(lambda, Effect::Dense(Operator::identity(target.dims())?)).with_setting("trivial"));
    }
    Strategy::new("homogeneous", target.clone(), tests, Some(1.0 - lambda))
}

/// `(x ln x⁻¹)⁻¹`, the per-eigenvalue overhead factor.
pub fn prefactor(x: f64) -> Result<f64> {
    if !(x > 0.0 && x < 1.0) {
        return Err(QsvError::DivergentOverhead(format!(
            "eigenvalue {x} gives an unbounded overhead"
        )));
    }
    Ok(1.0 / (x * (1.0 / x).ln()))
}

/// `h = max{(λ ln λ⁻¹)⁻¹, (τ ln τ⁻¹)⁻¹}`.
pub fn adversarial_overhead(lambda: f64, tau: f64) -> Result<f64> {
    Ok(prefactor(lambda)?.max(prefactor(tau)?))
}

fn check_eps_delta(eps: f64, delta: f64) -> Result<()> {
    for (x, name) in [(eps, "infidelity"), (delta, "significance")] {
        if !(x > 0.0 && x < 1.0) {
            return Err(QsvError::invalid(format!("{name} must lie in (0, 1), got {x}")));
        }
    }
    Ok(())
}

/// Values within this relative distance above an integer round down, so
/// eigenvalue roundoff cannot bump an exact integer to the next one.
const CEIL_SLACK: f64 = 1e-10;

fn rounds(h: f64, eps: f64, delta: f64) -> u64 {
    let x = h * (1.0 / delta).ln() / eps;
    (x * (1.0 - CEIL_SLACK)).ceil().max(1.0) as u64
}

/// `⌈(λ ln λ⁻¹)⁻¹ ε⁻¹ ln δ⁻¹⌉` for a homogeneous strategy.
pub fn adversarial_samples_homogeneous(eps: f64, delta: f64, lambda: f64) -> Result<u64> {
    check_eps_delta(eps, delta)?;
    Ok(rounds(prefactor(lambda)?, eps, delta))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AdversarialPlan {
    pub eps: f64,
    pub delta: f64,
    /// Second-largest eigenvalue of `Ω`.
    pub lambda: f64,
    /// Smallest eigenvalue of `Ω`.
    pub tau: f64,
    pub overhead: f64,
    pub rounds: u64,
    pub asymptotic: bool,
}

/// Plan from the two eigenvalues that matter.
pub fn plan_from_spectrum(eps: f64, delta: f64, lambda: f64, tau: f64) -> Result<AdversarialPlan> {
    check_eps_delta(eps, delta)?;
    if tau > lambda {
        return Err(QsvError::invalid(format!("τ = {tau} exceeds λ = {lambda}")));
    }
    let overhead = adversarial_overhead(lambda, tau)?;
    Ok(AdversarialPlan {
        eps,
        delta,
        lambda,
        tau,
        overhead,
        rounds: rounds(overhead, eps, delta),
        asymptotic: true,
    })
}

/// Extract `λ` and `τ` from a verification operator and plan.
pub fn adversarial_samples_general(
    eps: f64,
    delta: f64,
    omega: &Operator,
    target: &PureState,
) -> Result<AdversarialPlan> {
    let overlap = omega.expectation(target)?.re;
    if (overlap - 1.0).abs() > DERIVED_TOL {
        return Err(QsvError::NotVerificationOperator(format!(
            "target pass probability is {overlap}, not 1"
        )));
    }
    let vals = hermitian_eigenvalues(omega)?;
    if vals.len() < 2 {
        return Err(QsvError::invalid("a one-dimensional space has nothing to verify"));
    }
    if (vals[0] - 1.0).abs() > DERIVED_TOL {
        return Err(QsvError::NotVerificationOperator(format!(
            "largest eigenvalue is {}, not 1",
            vals[0]
        )));
    }
    let lambda = vals[1];
    let tau = *vals.last().expect("nonempty");
    if tau < ZERO_EIGENVALUE {
        return Err(QsvError::DivergentOverhead(format!(
            "smallest eigenvalue {tau:.3e} is zero; adversarial verification is not efficient"
        )));
    }
    plan_from_spectrum(eps, delta, lambda, tau)
}

#[derive(Clone, Debug, Serialize)]
pub struct TrivialMix {
    /// Weight of the trivial test.
    pub q: f64,
    pub plan: AdversarialPlan,
}

/// Replace `Ω` by `(1−q)Ω + q𝟙` and pick `q` on a uniform grid of `steps`
/// points in `[0, 1)` to minimise the overhead.
pub fn trivial_mix_plan(eps: f64, delta: f64, lambda: f64, tau: f64, steps: usize) -> Result<TrivialMix> {
    let steps = steps.max(1);
    let mut best: Option<TrivialMix> = None;
    for i in 0..steps {
        let q = i as f64 / steps as f64;
        let mixed = |x: f64| (1.0 - q) * x + q;
        let Ok(plan) = plan_from_spectrum(eps, delta, mixed(lambda), mixed(tau)) else {
            continue;
        };
        if best.as_ref().is_none_or(|b| plan.overhead < b.plan.overhead) {
            best = Some(TrivialMix { q, plan });
        }
    }
    best.ok_or_else(|| QsvError::DivergentOverhead("no mixing weight gives a finite overhead".into()))
}
