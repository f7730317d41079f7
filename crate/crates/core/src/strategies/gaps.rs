//! Closed-form spectral gaps of the built-in strategy families.

/// Bell and maximally entangled qudit strategies: `d/(d+1)`.
pub fn mes(d: usize) -> f64 {
    d as f64 / (d as f64 + 1.0)
}

/// Stabilizer strategy using every non-identity group element.
pub fn stabilizer(n: usize) -> f64 {
    let half = 2f64.powi(n as i32 - 1);
    half / (2.0 * half - 1.0)
}

/// Coloring strategy with `m` colors.
pub fn coloring(m: usize) -> f64 {
    1.0 / m as f64
}

/// Optimal nonadaptive local strategy for `cos θ|00⟩ + sin θ|11⟩`.
pub fn local_optimal(theta: f64) -> f64 {
    1.0 / (2.0 + theta.sin() * theta.cos())
}

/// Weight of the `P_ZZ` test in the local optimal strategy.
pub fn local_optimal_alpha(theta: f64) -> f64 {
    let s = (2.0 * theta).sin();
    (2.0 - s) / (4.0 + s)
}

pub fn one_way_qubit(theta: f64) -> f64 {
    1.0 / (1.0 + theta.cos().powi(2))
}

pub fn many_round_qubit(theta: f64) -> f64 {
    1.0 / (1.0 + theta.sin() * theta.cos())
}

/// One-way qudit strategy, largest Schmidt coefficient `λ₁`.
pub fn one_way_qudit(lambda1: f64) -> f64 {
    1.0 / (1.0 + lambda1 * lambda1)
}

/// Swap-averaged qudit strategy, two largest Schmidt coefficients.
pub fn two_way_qudit(lambda1: f64, lambda2: f64) -> f64 {
    1.0 / (1.0 + 0.5 * (lambda1 * lambda1 + lambda2 * lambda2))
}

pub fn w_locc(n: usize) -> f64 {
    if n == 3 {
        1.0 / 3.0
    } else {
        1.0 / (n as f64 - 1.0)
    }
}

pub fn w_local(n: usize) -> f64 {
    if n == 3 {
        0.25
    } else {
        1.0 / (2.0 * (n as f64 - 1.0))
    }
}
