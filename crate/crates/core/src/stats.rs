//! Hypothesis testing for verification experiments: binomial tails, sample
//! planning, and frequency-based decisions with Chernoff-Hoeffding bounds.
//!
//! Every bound returned here is an upper bound on the significance `δ`, not
//! an exact error probability.

use serde::{Deserialize, Serialize};

use crate::error::{QsvError, Result};

fn check_probability(x: f64, name: &str) -> Result<()> {
    if !(0.0..=1.0).contains(&x) {
        return Err(QsvError::invalid(format!("{name} must lie in [0, 1], got {x}")));
    }
    Ok(())
}

fn check_open(x: f64, name: &str) -> Result<()> {
    if !(x > 0.0 && x < 1.0) {
        return Err(QsvError::invalid(format!("{name} must lie in (0, 1), got {x}")));
    }
    Ok(())
}

/// `ln C(n, k)`, summed over the shorter side.
fn ln_binomial(n: u64, k: u64) -> f64 {
    let k = k.min(n - k);
    (1..=k).map(|i| ((n - k + i) as f64 / i as f64).ln()).sum()
}

fn ln_pmf(n: u64, p: f64, k: u64) -> f64 {
    ln_binomial(n, k) + k as f64 * p.ln() + (n - k) as f64 * (-p).ln_1p()
}

/// Sum of the pmf from `start` outward (upwards or downwards), where `start`
/// lies on the far side of the mean so terms only shrink.
fn tail_from(n: u64, p: f64, start: u64, upward: bool) -> f64 {
    let odds = p / (1.0 - p);
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = start;
    loop {
        if upward {
            if k == n {
                break;
            }
            term *= (n - k) as f64 / (k + 1) as f64 * odds;
            k += 1;
        } else {
            if k == 0 {
                break;
            }
            term *= k as f64 / (n - k + 1) as f64 / odds;
            k -= 1;
        }
        sum += term;
        if term < sum * 1e-18 {
            break;
        }
    }
    (ln_pmf(n, p, start) + sum.ln()).exp()
}

/// `P(T ≥ t)` for `T ~ Binomial(n, p)`, exact up to rounding.
///
/// The smaller tail is summed directly; the other is its complement.
pub fn binomial_tail(n: u64, p: f64, t: u64) -> Result<f64> {
    check_probability(p, "success probability")?;
    if t > n {
        return Err(QsvError::invalid(format!("threshold {t} exceeds trial count {n}")));
    }
    if t == 0 {
        return Ok(1.0);
    }
    if p == 0.0 {
        return Ok(0.0);
    }
    if p == 1.0 {
        return Ok(1.0);
    }
    let mean = n as f64 * p;
    let value = if t as f64 >= mean {
        tail_from(n, p, t, true)
    } else {
        1.0 - tail_from(n, p, t - 1, false)
    };
    Ok(value.clamp(0.0, 1.0))
}

/// `P(T ≤ t)` for `T ~ Binomial(n, p)`.
pub fn binomial_cdf(n: u64, p: f64, t: u64) -> Result<f64> {
    check_probability(p, "success probability")?;
    if t > n {
        return Err(QsvError::invalid(format!("threshold {t} exceeds trial count {n}")));
    }
    if t == n || p == 0.0 {
        return Ok(1.0);
    }
    if p == 1.0 {
        return Ok(0.0);
    }
    let mean = n as f64 * p;
    let value = if (t as f64) <= mean {
        tail_from(n, p, t, false)
    } else {
        1.0 - tail_from(n, p, t + 1, true)
    };
    Ok(value.clamp(0.0, 1.0))
}

/// Type I and type II errors of the rule "reject when `T ≥ reject_at`".
#[derive(Clone, Debug, Serialize)]
pub struct CoinErrors {
    pub tosses: u64,
    pub reject_at: u64,
    pub type_one: f64,
    pub type_two: f64,
}

/// Error probabilities for a coin test: the null has heads probability
/// `p_null`, the alternative `p_alt`, and `T < reject_at` accepts.
pub fn coin_errors(tosses: u64, p_null: f64, p_alt: f64, reject_at: u64) -> Result<CoinErrors> {
    if reject_at == 0 || reject_at > tosses {
        return Err(QsvError::invalid(format!(
            "rejection threshold must lie in 1..={tosses}, got {reject_at}"
        )));
    }
    Ok(CoinErrors {
        tosses,
        reject_at,
        type_one: binomial_tail(tosses, p_null, reject_at)?,
        type_two: binomial_cdf(tosses, p_alt, reject_at - 1)?,
    })
}

/// `p0^N`: the p-value of `N` passes in a row when one pass has probability
/// at most `p0` under the null.
pub fn all_pass_pvalue(n: u64, p0: f64) -> Result<f64> {
    check_probability(p0, "pass probability")?;
    Ok(p0.powf(n as f64))
}

/// Largest pass probability of a state with infidelity `ε`: `1 − εν`.
pub fn worst_case_pass_prob(eps: f64, nu: f64) -> Result<f64> {
    check_probability(eps, "infidelity")?;
    check_probability(nu, "spectral gap")?;
    Ok(1.0 - eps * nu)
}

/// Smallest `N` with `(1 − εν)^N ≤ δ`.
pub fn required_samples(eps: f64, delta: f64, nu: f64) -> Result<u64> {
    check_open(eps, "infidelity")?;
    check_open(delta, "significance")?;
    check_probability(nu, "spectral gap")?;
    let base = 1.0 - eps * nu;
    if eps * nu == 0.0 || base >= 1.0 {
        return Err(QsvError::Unverifiable(format!(
            "εν = {} gives no rejection power",
            eps * nu
        )));
    }
    let estimate = (delta.ln() / (-eps * nu).ln_1p()).ceil();
    if !estimate.is_finite() || estimate > 9.0e15 {
        return Err(QsvError::Unverifiable(format!("εν = {} needs too many samples", eps * nu)));
    }
    // The closed form can land one off after rounding; settle against the
    // power itself so the defining inequality holds exactly.
    let mut n = (estimate as u64).max(1);
    while base.powf(n as f64) > delta {
        n += 1;
    }
    while n > 1 && base.powf((n - 1) as f64) <= delta {
        n -= 1;
    }
    Ok(n)
}

/// Binary relative entropy `D(x‖y)` in nats, with `0 ln 0 = 0`.
/// Returns `+∞` when `y ∈ {0, 1}` and `x` puts weight where `y` has none.
pub fn kl_divergence(x: f64, y: f64) -> Result<f64> {
    check_probability(x, "x")?;
    check_probability(y, "y")?;
    let mut d = 0.0;
    if x > 0.0 {
        if y == 0.0 {
            return Ok(f64::INFINITY);
        }
        d += x * (x / y).ln();
    }
    if x < 1.0 {
        if y == 1.0 {
            return Ok(f64::INFINITY);
        }
        d += (1.0 - x) * ((1.0 - x) / (1.0 - y)).ln();
    }
    Ok(d.max(0.0))
}

/// Chernoff-Hoeffding bound `exp(−D(f‖threshold)·N)` on the probability of
/// observing pass frequency `f` when every round passes with probability at
/// most `threshold`.
///
/// At `f = 1` this is evaluated as `threshold^N`, identical to
/// [`all_pass_pvalue`].
pub fn chernoff_hoeffding_confidence(f: f64, threshold: f64, n: u64) -> Result<f64> {
    check_probability(f, "frequency")?;
    check_probability(threshold, "threshold")?;
    if f <= threshold {
        return Err(QsvError::CannotReject(format!(
            "frequency {f} does not exceed threshold {threshold}"
        )));
    }
    if n == 0 {
        return Ok(1.0);
    }
    if f == 1.0 {
        return all_pass_pvalue(n, threshold);
    }
    let d = kl_divergence(f, threshold)?;
    Ok((-d * n as f64).exp().min(1.0))
}

/// Hoeffding's inequality `exp(−2ε²N²/Σ(bᵢ−aᵢ)²)` for a sum of `N`
/// independent variables with ranges `[aᵢ, bᵢ]`, clamped to `[0, 1]`.
pub fn hoeffding_bound(eps: f64, n: u64, ranges: &[(f64, f64)]) -> Result<f64> {
    if !(eps >= 0.0) {
        return Err(QsvError::invalid(format!("deviation must be nonnegative, got {eps}")));
    }
    if ranges.is_empty() || ranges.len() as u64 != n {
        return Err(QsvError::invalid(format!(
            "need one range per variable: {} ranges for N = {n}",
            ranges.len()
        )));
    }
    let mut spread = 0.0;
    for &(a, b) in ranges {
        if !(b >= a) {
            return Err(QsvError::invalid(format!("range [{a}, {b}] is empty")));
        }
        spread += (b - a) * (b - a);
    }
    if spread == 0.0 {
        return Ok(if eps > 0.0 { 0.0 } else { 1.0 });
    }
    let nf = n as f64;
    Ok((-2.0 * eps * eps * nf * nf / spread).exp().clamp(0.0, 1.0))
}

/// Sample plan for rejecting "every state has infidelity at least `ε`" at
/// significance `δ` with a strategy of gap `ν`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestPlan {
    pub eps: f64,
    pub delta: f64,
    pub nu: f64,
    pub rounds: u64,
}

impl TestPlan {
    pub fn new(eps: f64, delta: f64, nu: f64) -> Result<Self> {
        let rounds = required_samples(eps, delta, nu)?;
        Ok(TestPlan { eps, delta, nu, rounds })
    }

    /// `1 − εν`.
    pub fn threshold(&self) -> f64 {
        1.0 - self.eps * self.nu
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Decision {
    /// The null "average infidelity ≥ ε" is rejected.
    Reject,
    Accept,
}

#[derive(Clone, Debug, Serialize)]
pub struct TestResult {
    pub rounds: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub passes: Option<u64>,
    pub frequency: f64,
    pub threshold: f64,
    pub decision: Decision,
    /// Upper bound on `δ`; present only when rejecting.
    pub delta_bound: Option<f64>,
    /// `1 − delta_bound`.
    pub confidence: Option<f64>,
}

/// Reject the fidelity null iff `f > 1 − εν`, with the Chernoff-Hoeffding
/// bound as the significance.
pub fn fidelity_decision(f: f64, eps: f64, nu: f64, n: u64) -> Result<TestResult> {
    check_probability(f, "frequency")?;
    let threshold = worst_case_pass_prob(eps, nu)?;
    if n == 0 {
        return Err(QsvError::invalid("a decision needs at least one round"));
    }
    let (decision, delta_bound) = if f > threshold {
        let bound = chernoff_hoeffding_confidence(f, threshold, n)?;
        (Decision::Reject, Some(bound))
    } else {
        (Decision::Accept, None)
    };
    Ok(TestResult {
        rounds: n,
        passes: None,
        frequency: f,
        threshold,
        decision,
        delta_bound,
        confidence: delta_bound.map(|d| 1.0 - d),
    })
}

/// [`fidelity_decision`] from a pass count.
pub fn decide(passes: u64, n: u64, eps: f64, nu: f64) -> Result<TestResult> {
    if passes > n {
        return Err(QsvError::invalid(format!("{passes} passes out of {n} rounds")));
    }
    if n == 0 {
        return Err(QsvError::invalid("a decision needs at least one round"));
    }
    let mut result = fidelity_decision(passes as f64 / n as f64, eps, nu, n)?;
    result.passes = Some(passes);
    Ok(result)
}
