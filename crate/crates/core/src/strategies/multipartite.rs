use super::gaps;
use super::strategy::{Effect, Strategy, Test};
use crate::error::{QsvError, Result};
use crate::qmath::{SparseOperator, C64};
use crate::states::{dicke, w_state};

const MAX_QUBITS: usize = 12;

fn check_n(n: usize, what: &str) -> Result<()> {
    if !(3..=MAX_QUBITS).contains(&n) {
        return Err(QsvError::invalid(format!("{what} needs 3 <= n <= {MAX_QUBITS}, got {n}")));
    }
    Ok(())
}

/// What the pair `(i, j)` is checked against, given the Hamming weight
/// observed on the other `n − 2` qubits.
#[derive(Clone, Copy, PartialEq)]
enum PairCheck {
    Fail,
    Pass,
    Zeros,
    Ones,
    /// `(𝟙 + X⊗X)/2`.
    XxPlus,
}

/// Test on pair `(i, j)`: `Z` on every other qubit, then the pair check
/// selected by `rule` from the observed weight.
fn pair_test(n: usize, i: usize, j: usize, rule: impl Fn(usize) -> PairCheck) -> Result<Effect> {
    let d = 1usize << n;
    let bi = 1usize << (n - 1 - i);
    let bj = 1usize << (n - 1 - j);
    let pair = bi | bj;
    let half = C64::new(0.5, 0.0);
    let one = C64::new(1.0, 0.0);
    let rows = (0..d)
        .map(|r| {
            let rest = (r & !pair).count_ones() as usize;
            let on_pair = r & pair;
            match rule(rest) {
                PairCheck::Fail => vec![],
                PairCheck::Pass => vec![(r, one)],
                PairCheck::Zeros if on_pair == 0 => vec![(r, one)],
                PairCheck::Ones if on_pair == pair => vec![(r, one)],
                PairCheck::XxPlus => vec![(r, half), (r ^ pair, half)],
                _ => vec![],
            }
        })
        .collect();
    Ok(Effect::Sparse(SparseOperator::from_rows(vec![2; n], rows)?))
}

/// Pair conditioning for `k` excitations: `k` elsewhere leaves `|00⟩`,
/// `k − 2` leaves `|11⟩`, `k − 1` leaves a symmetric single excitation.
fn dicke_rule(k: usize) -> impl Fn(usize) -> PairCheck {
    move |rest| {
        if rest == k {
            PairCheck::Zeros
        } else if rest + 2 == k {
            PairCheck::Ones
        } else if rest + 1 == k {
            PairCheck::XxPlus
        } else {
            PairCheck::Fail
        }
    }
}

fn pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |i| (i + 1..n).map(move |j| (i, j)))
}

fn pair_strategy(label: &str, n: usize, k: usize, predicted: f64) -> Result<Strategy> {
    let psi = dicke(n, k)?;
    let w = 2.0 / (n * (n - 1)) as f64;
    let tests = pairs(n)
        .map(|(i, j)| {
            Ok(Test::new(w, pair_test(n, i, j, dicke_rule(k))?)
                .with_setting(format!("pair({},{})", i + 1, j + 1)))
        })
        .collect::<Result<Vec<_>>>()?;
    Strategy::new(label, psi, tests, Some(predicted))
}

/// Adaptive pair tests averaged over all pairs.
pub fn w_locc(n: usize) -> Result<Strategy> {
    check_n(n, "W LOCC strategy")?;
    pair_strategy("w-locc", n, 1, gaps::w_locc(n))
}

/// The W pair strategy with the conditioning extended to `k` excitations.
/// Its predicted gap is the W value for the same `n`.
pub fn dicke_locc(n: usize, k: usize) -> Result<Strategy> {
    check_n(n, "Dicke LOCC strategy")?;
    if !(1..n).contains(&k) {
        return Err(QsvError::invalid(format!("Dicke LOCC strategy needs 1 <= k <= n-1, got {k}")));
    }
    pair_strategy("dicke-locc", n, k, gaps::w_locc(n))
}

/// Nonadaptive W strategy: the all-`Z` weight-one test with probability
/// `1/2`, plus pair tests reading `X⊗X` on the pair and `Z` elsewhere.
pub fn w_local(n: usize) -> Result<Strategy> {
    check_n(n, "W local strategy")?;
    let psi = w_state(n)?;
    let d = 1usize << n;
    let weight_one = SparseOperator::from_rows(
        vec![2; n],
        (0..d)
            .map(|r| {
                if r.count_ones() == 1 {
                    vec![(r, C64::new(1.0, 0.0))]
                } else {
                    vec![]
                }
            })
            .collect(),
    )?;
    let mut tests = vec![Test::new(0.5, Effect::Sparse(weight_one)).with_setting("Z".repeat(n))];
    let w = 1.0 / (n * (n - 1)) as f64;
    let rule = |rest: usize| match rest {
        1 => PairCheck::Pass,
        0 => PairCheck::XxPlus,
        _ => PairCheck::Fail,
    };
    for (i, j) in pairs(n) {
        let setting: String = (0..n).map(|q| if q == i || q == j { 'X' } else { 'Z' }).collect();
        tests.push(Test::new(w, pair_test(n, i, j, rule)?).with_setting(setting));
    }
    Strategy::new("w-local", psi, tests, Some(gaps::w_local(n)))
}
