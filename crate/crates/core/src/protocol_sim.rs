//! Monte Carlo verification experiments.
//!
//! Each round draws a test `ℓ` with probability `p_ℓ` and passes with
//! probability `Tr(Ω_ℓ σ)`. Adaptive LOCC tests are simulated at operator
//! level, which gives the same round statistics as replaying the messages.
//!
//! Round `k` draws from its own ChaCha8 stream keyed by `(seed, k)`, so the
//! transcript does not depend on how rounds are scheduled across threads.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{QsvError, Result};
use crate::qmath::{hermitian_eigenvalues, hermitian_spectrum, Operator, PureState, C64, DERIVED_TOL};
use crate::stats::{decide, TestResult};
use crate::strategies::{Effect, Strategy};

/// Pass probabilities this close to 0 or 1 are snapped, so that exact
/// sources pass every round rather than almost every round.
const SNAP_TOL: f64 = 1e-12;

/// The state a source emits in every round.
#[derive(Clone, Debug)]
pub enum SourceState {
    /// `Σ wᵢ |φᵢ⟩⟨φᵢ| + white · 𝟙/D`.
    Mixture {
        components: Vec<(f64, PureState)>,
        white: f64,
    },
    Dense(Operator),
}

impl SourceState {
    pub fn pure(psi: PureState) -> Self {
        SourceState::Mixture {
            components: vec![(1.0, psi)],
            white: 0.0,
        }
    }

    pub fn dims(&self) -> Vec<usize> {
        match self {
            SourceState::Mixture { components, .. } => components[0].1.dims().to_vec(),
            SourceState::Dense(rho) => rho.dims().to_vec(),
        }
    }

    /// `Tr(Ω_ℓ σ)`.
    pub fn pass_probability(&self, effect: &Effect) -> Result<f64> {
        if effect.dims() != self.dims() {
            return Err(QsvError::DimensionMismatch(format!(
                "effect {:?} vs state {:?}",
                effect.dims(),
                self.dims()
            )));
        }
        match self {
            SourceState::Mixture { components, white } => {
                let mut q = 0.0;
                for (w, phi) in components {
                    q += w * effect.expectation(phi);
                }
                if *white != 0.0 {
                    let trace = effect.to_sparse()?.trace().re;
                    q += white * trace / effect.dim() as f64;
                }
                Ok(q)
            }
            SourceState::Dense(rho) => effect.trace_with(rho.matrix()),
        }
    }

    /// `⟨ψ|σ|ψ⟩`.
    pub fn fidelity(&self, target: &PureState) -> Result<f64> {
        if target.dims() != self.dims().as_slice() {
            return Err(QsvError::DimensionMismatch("target and source differ in shape".into()));
        }
        match self {
            SourceState::Mixture { components, white } => {
                let mut f = white / target.dim() as f64;
                for (w, phi) in components {
                    f += w * target.fidelity(phi);
                }
                Ok(f)
            }
            SourceState::Dense(rho) => Ok(rho.expectation(target)?.re),
        }
    }

    pub fn to_density(&self) -> Result<Operator> {
        match self {
            SourceState::Mixture { components, white } => {
                let dims = self.dims();
                let d: usize = dims.iter().product();
                let mut m = DMatrix::from_element(d, d, C64::new(0.0, 0.0));
                for (w, phi) in components {
                    let a = phi.amplitudes();
                    m += (a * a.adjoint()) * C64::new(*w, 0.0);
                }
                for i in 0..d {
                    m[(i, i)] += C64::new(white / d as f64, 0.0);
                }
                Operator::new(dims, m)
            }
            SourceState::Dense(rho) => Ok(rho.clone()),
        }
    }
}

/// Check trace one and positivity, both to `1e-9`.
pub fn check_density(rho: &Operator) -> Result<()> {
    let tr = rho.trace();
    if (tr.re - 1.0).abs() > DERIVED_TOL || tr.im.abs() > DERIVED_TOL {
        return Err(QsvError::invalid(format!("density operator has trace {tr}")));
    }
    let ev = hermitian_eigenvalues(rho)?;
    let min = *ev.last().expect("nonempty");
    if min < -DERIVED_TOL {
        return Err(QsvError::invalid(format!(
            "density operator has eigenvalue {min:.3e}"
        )));
    }
    Ok(())
}

/// Worst-case state at infidelity `ε` and whether the choice of `|ψ⊥⟩` was
/// forced by a tie-break.
#[derive(Clone, Debug)]
pub struct WorstCase {
    pub state: SourceState,
    pub perp: PureState,
    pub second_eigenvalue: f64,
    /// Set when the second eigenvalue is degenerate; `|ψ⊥⟩` is then the
    /// first vector of that eigenspace in the spectral ordering.
    pub degenerate: bool,
}

/// `(1−ε)|ψ⟩⟨ψ| + ε|ψ⊥⟩⟨ψ⊥|` with `|ψ⊥⟩` the eigenvector of `Ω` for its
/// second-largest eigenvalue, which saturates `Tr(Ωσ) = 1 − εν`.
pub fn worst_case_state(s: &Strategy, eps: f64) -> Result<WorstCase> {
    if !(0.0..=1.0).contains(&eps) {
        return Err(QsvError::invalid(format!("infidelity must lie in [0, 1], got {eps}")));
    }
    let omega = s.aggregate()?;
    let psi = s.target();
    let overlap = omega.expectation(psi)?.re;
    if (overlap - 1.0).abs() > DERIVED_TOL {
        return Err(QsvError::NotVerificationOperator(format!(
            "target pass probability is {overlap}, not 1"
        )));
    }
    // Compress Ω to the complement of |ψ⟩: its top eigenvector there is |ψ⊥⟩.
    let d = psi.dim();
    let a = psi.amplitudes();
    let p = DMatrix::<C64>::identity(d, d) - a * a.adjoint();
    let compressed = Operator::new(psi.dims().to_vec(), &p * omega.matrix() * &p)?.hermitian_part();
    let spec = hermitian_spectrum(&compressed)?;
    let k = (0..d)
        .find(|&k| psi.amplitudes().dotc(&spec.vectors.column(k)).norm() < 0.5)
        .ok_or_else(|| QsvError::NumericalIntegrity("no eigenvector orthogonal to the target".into()))?;
    let mut v = spec.vectors.column(k).into_owned();
    let along = a.dotc(&v);
    v -= a * along;
    let perp = PureState::normalized(psi.dims().to_vec(), v)?;
    let second_eigenvalue = spec.values[k];
    let degenerate = spec
        .values
        .get(k + 1)
        .is_some_and(|&next| (second_eigenvalue - next).abs() <= DERIVED_TOL);
    let state = SourceState::Mixture {
        components: vec![(1.0 - eps, psi.clone()), (eps, perp.clone())],
        white: 0.0,
    };
    Ok(WorstCase {
        state,
        perp,
        second_eigenvalue,
        degenerate,
    })
}

/// `(1−p)|ψ⟩⟨ψ| + p·𝟙/D`.
pub fn depolarized_state(target: &PureState, p: f64) -> Result<SourceState> {
    if !(0.0..=1.0).contains(&p) {
        return Err(QsvError::invalid(format!("depolarizing weight must lie in [0, 1], got {p}")));
    }
    Ok(SourceState::Mixture {
        components: vec![(1.0 - p, target.clone())],
        white: p,
    })
}

/// Source kinds; every kind emits the same state in every round.
#[derive(Clone, Debug)]
pub enum Source {
    ExactTarget,
    WorstCase(f64),
    Depolarized(f64),
    Custom(Operator),
}

impl Source {
    /// The per-round state for a given strategy.
    pub fn state(&self, s: &Strategy) -> Result<SourceState> {
        match self {
            Source::ExactTarget => Ok(SourceState::pure(s.target().clone())),
            Source::WorstCase(eps) => Ok(worst_case_state(s, *eps)?.state),
            Source::Depolarized(p) => depolarized_state(s.target(), *p),
            Source::Custom(rho) => {
                if rho.dims() != s.target().dims() {
                    return Err(QsvError::DimensionMismatch(format!(
                        "custom state {:?} vs target {:?}",
                        rho.dims(),
                        s.target().dims()
                    )));
                }
                check_density(rho)?;
                Ok(SourceState::Dense(rho.clone()))
            }
        }
    }
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Source::ExactTarget => write!(f, "exact"),
            Source::WorstCase(eps) => write!(f, "worst:{eps}"),
            Source::Depolarized(p) => write!(f, "depolarized:{p}"),
            Source::Custom(_) => write!(f, "custom"),
        }
    }
}

/// Parses `exact`, `worst:EPS` and `depolarized:P`. Custom sources carry
/// a density operator and are built directly.
impl FromStr for Source {
    type Err = QsvError;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, arg) = match s.split_once(':') {
            Some((k, a)) => (k, Some(a)),
            None => (s, None),
        };
        let number = |a: Option<&str>| -> Result<f64> {
            a.ok_or_else(|| QsvError::invalid(format!("source '{kind}' needs a parameter")))?
                .parse::<f64>()
                .map_err(|e| QsvError::invalid(format!("source parameter: {e}")))
        };
        match kind {
            "exact" if arg.is_none() => Ok(Source::ExactTarget),
            "worst" | "worst-case" => Ok(Source::WorstCase(number(arg)?)),
            "depolarized" => Ok(Source::Depolarized(number(arg)?)),
            _ => Err(QsvError::invalid(format!("unknown source '{s}'"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundRecord {
    pub test: usize,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Transcript {
    pub seed: u64,
    pub strategy: String,
    pub source: String,
    pub passes: u64,
    pub frequency: f64,
    pub records: Vec<RoundRecord>,
}

impl Transcript {
    pub fn rounds(&self) -> u64 {
        self.records.len() as u64
    }
}

fn test_selector(s: &Strategy) -> Vec<f64> {
    let mut acc = 0.0;
    s.tests()
        .iter()
        .map(|t| {
            acc += t.probability;
            acc
        })
        .collect()
}

fn checked_probability(q: f64, k: usize) -> Result<f64> {
    if !(-DERIVED_TOL..=1.0 + DERIVED_TOL).contains(&q) {
        return Err(QsvError::NumericalIntegrity(format!(
            "test {k} has pass probability {q}"
        )));
    }
    Ok(if q < SNAP_TOL {
        0.0
    } else if q > 1.0 - SNAP_TOL {
        1.0
    } else {
        q
    })
}

fn play_round(base: &ChaCha8Rng, round: u64, cumulative: &[f64], pass: &[f64], probs: &[f64]) -> RoundRecord {
    let mut rng = base.clone();
    rng.set_stream(round);
    let u: f64 = rng.random();
    let total = *cumulative.last().expect("nonempty");
    let test = cumulative
        .iter()
        .position(|&c| u * total < c)
        .unwrap_or_else(|| probs.iter().rposition(|&p| p > 0.0).unwrap_or(0));
    let v: f64 = rng.random();
    RoundRecord {
        test,
        pass: v < pass[test],
    }
}

/// Pass probability of every test against the source.
pub fn test_pass_probabilities(s: &Strategy, state: &SourceState) -> Result<Vec<f64>> {
    s.tests()
        .iter()
        .enumerate()
        .map(|(k, t)| checked_probability(state.pass_probability(&t.effect)?, k))
        .collect()
}

/// Run `rounds` rounds on the global thread pool.
pub fn run_protocol(s: &Strategy, src: &Source, rounds: u64, seed: u64) -> Result<Transcript> {
    if rounds == 0 {
        return Err(QsvError::invalid("a protocol needs at least one round"));
    }
    let state = src.state(s)?;
    let pass = test_pass_probabilities(s, &state)?;
    let probs: Vec<f64> = s.tests().iter().map(|t| t.probability).collect();
    let cumulative = test_selector(s);
    let base = ChaCha8Rng::seed_from_u64(seed);
    let records: Vec<RoundRecord> = (0..rounds)
        .into_par_iter()
        .map(|k| play_round(&base, k, &cumulative, &pass, &probs))
        .collect();
    let passes = records.iter().filter(|r| r.pass).count() as u64;
    Ok(Transcript {
        seed,
        strategy: s.label().to_string(),
        source: src.to_string(),
        passes,
        frequency: passes as f64 / rounds as f64,
        records,
    })
}

/// [`run_protocol`] on a dedicated pool of `threads` workers.
pub fn run_protocol_with_threads(
    s: &Strategy,
    src: &Source,
    rounds: u64,
    seed: u64,
    threads: usize,
) -> Result<Transcript> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| QsvError::invalid(format!("thread pool: {e}")))?;
    pool.install(|| run_protocol(s, src, rounds, seed))
}

/// Frequency decision for a transcript against the plan `(ε, ν)`.
pub fn evaluate_transcript(tr: &Transcript, eps: f64, nu: f64) -> Result<TestResult> {
    decide(tr.passes, tr.rounds(), eps, nu)
}
