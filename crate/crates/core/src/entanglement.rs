//! Statistical entanglement detection from verification test statistics.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{QsvError, Result};
use crate::qmath::{
    hermitian_spectrum, partial_trace, random::haar_state, Operator, PureState, C64, DERIVED_TOL,
};
use crate::stats::chernoff_hoeffding_confidence;

/// `𝟙/d − |ψ⟩⟨ψ|` for a maximally entangled `|ψ⟩` on `d ⊗ d`.
pub fn witness_operator(target: &PureState) -> Result<Operator> {
    let d = match target.dims() {
        [a, b] if a == b => *a,
        dims => {
            return Err(QsvError::invalid(format!(
                "witness needs a d⊗d target, got {dims:?}"
            )))
        }
    };
    let reduced = partial_trace(&target.projector(), &[0])?;
    let err = reduced.max_abs_diff(&Operator::identity(&[d])?.scale(1.0 / d as f64));
    if err > DERIVED_TOL {
        return Err(QsvError::invalid("witness target is not maximally entangled"));
    }
    Operator::identity(target.dims())?
        .scale(1.0 / d as f64)
        .sub(&target.projector())
}

/// Largest pass probability of a separable state under the maximally
/// entangled strategy: `1 − (1 − 1/d)·d/(d+1) = 2/(d+1)`.
pub fn separable_pass_bound(d: usize) -> Result<f64> {
    if d < 2 {
        return Err(QsvError::invalid(format!("local dimension must be at least 2, got {d}")));
    }
    Ok(2.0 / (d as f64 + 1.0))
}

/// `exp(−D(f‖q_s)·N)`: significance for rejecting "every state was
/// separable" after observing pass frequency `f`.
pub fn entanglement_confidence(f: f64, q_s: f64, n: u64) -> Result<f64> {
    chernoff_hoeffding_confidence(f, q_s, n).map_err(|e| match e {
        QsvError::CannotReject(_) => QsvError::CannotReject(format!(
            "frequency {f} does not exceed the separable bound {q_s}"
        )),
        other => other,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct WitnessReport {
    pub d: usize,
    pub rounds: u64,
    pub passes: u64,
    pub frequency: f64,
    pub separable_bound: f64,
    pub entangled: bool,
    pub delta_bound: Option<f64>,
    pub confidence: Option<f64>,
}

/// Decision for `passes` out of `rounds` under the `d`-dimensional
/// maximally entangled strategy.
pub fn witness_confidence(d: usize, passes: u64, rounds: u64) -> Result<WitnessReport> {
    if rounds == 0 || passes > rounds {
        return Err(QsvError::invalid(format!("{passes} passes out of {rounds} rounds")));
    }
    let q_s = separable_pass_bound(d)?;
    let f = passes as f64 / rounds as f64;
    let delta_bound = if f > q_s {
        Some(entanglement_confidence(f, q_s, rounds)?)
    } else {
        None
    };
    Ok(WitnessReport {
        d,
        rounds,
        passes,
        frequency: f,
        separable_bound: q_s,
        entangled: delta_bound.is_some(),
        delta_bound,
        confidence: delta_bound.map(|x| 1.0 - x),
    })
}

/// `⟨a|Ω|a⟩` as an operator on the second factor.
fn contract_first(omega: &Operator, a: &DVector<C64>, db: usize) -> Result<Operator> {
    let da = a.len();
    let m = omega.matrix();
    let out = DMatrix::from_fn(db, db, |j, l| {
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..da {
            for k in 0..da {
                acc += a[i].conj() * m[(i * db + j, k * db + l)] * a[k];
            }
        }
        acc
    });
    Operator::new(vec![db], out)
}

fn contract_second(omega: &Operator, b: &DVector<C64>, da: usize) -> Result<Operator> {
    let db = b.len();
    let m = omega.matrix();
    let out = DMatrix::from_fn(da, da, |i, k| {
        let mut acc = C64::new(0.0, 0.0);
        for j in 0..db {
            for l in 0..db {
                acc += b[j].conj() * m[(i * db + j, k * db + l)] * b[l];
            }
        }
        acc
    });
    Operator::new(vec![da], out)
}

fn quadratic(op: &Operator, v: &DVector<C64>) -> f64 {
    v.dotc(&(op.matrix() * v)).re
}

fn top_vector(op: &Operator) -> Result<(f64, DVector<C64>)> {
    let spec = hermitian_spectrum(op)?;
    Ok((spec.values[0], spec.vectors.column(0).into_owned()))
}

#[derive(Clone, Debug)]
pub struct ProductSearch {
    /// Best `Tr(Ω |a,b⟩⟨a,b|)` found.
    pub max: f64,
    pub alice: PureState,
    pub bob: PureState,
}

/// Maximise `⟨a,b|Ω|a,b⟩` over product kets: `samples` Haar starting points
/// (sample `k` drawn from ChaCha8 stream `k` of `seed`), each refined by
/// `sweeps` alternating exact maximisations over one side.
///
/// The result is a lower bound on the separable maximum, used to test a
/// claimed upper bound; it is not a separability solver.
pub fn product_pass_search(
    omega: &Operator,
    samples: usize,
    sweeps: usize,
    seed: u64,
) -> Result<ProductSearch> {
    let [da, db] = *omega.dims() else {
        return Err(QsvError::invalid("product search needs a bipartite operator"));
    };
    let base = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<(f64, DVector<C64>, DVector<C64>)> = None;
    for k in 0..samples.max(1) {
        let mut rng = base.clone();
        rng.set_stream(k as u64);
        let mut a = haar_state(&[da], &mut rng)?.amplitudes().clone();
        let mut b = haar_state(&[db], &mut rng)?.amplitudes().clone();
        let mut value = quadratic(&contract_first(omega, &a, db)?, &b);
        for _ in 0..sweeps {
            let (_, nb) = top_vector(&contract_first(omega, &a, db)?)?;
            b = nb;
            let (v, na) = top_vector(&contract_second(omega, &b, da)?)?;
            a = na;
            value = v;
        }
        if best.as_ref().is_none_or(|(m, _, _)| value > *m) {
            best = Some((value, a, b));
        }
    }
    let (max, a, b) = best.expect("at least one sample");
    Ok(ProductSearch {
        max,
        alice: PureState::normalized(vec![da], a)?,
        bob: PureState::normalized(vec![db], b)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{bell_state, two_qubit_state};

    #[test]
    fn witness_needs_maximal_entanglement() {
        assert!(witness_operator(&bell_state()).is_ok());
        assert!(witness_operator(&two_qubit_state(0.3).unwrap()).is_err());
    }

    #[test]
    fn below_bound_cannot_conclude() {
        assert!(matches!(
            entanglement_confidence(0.6, 2.0 / 3.0, 20),
            Err(QsvError::CannotReject(_))
        ));
        let r = witness_confidence(2, 13, 20).unwrap();
        assert!(!r.entangled && r.delta_bound.is_none());
    }
}
