use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{QsvError, Result};
use crate::graphs::PauliString;
use crate::qmath::{
    hermitian_eigenvalues, kron, spectral_gap, total_dim, Operator, PureState, SparseOperator,
    C64, DERIVED_TOL, INPUT_TOL,
};

/// Largest side at which a loaded effect is kept dense.
const DENSE_LOAD_LIMIT: usize = 256;

/// Largest side at which a stabilizer effect is also written out densely.
const DENSE_WRITE_LIMIT: usize = 256;

/// A binary test's pass effect `Ω_ℓ`.
#[derive(Clone, Debug, PartialEq)]
pub enum Effect {
    Dense(Operator),
    Sparse(SparseOperator),
    /// Projector onto the joint `+1` eigenspace of commuting real-phase
    /// Pauli strings, `∏ (𝟙 + g)/2`.
    Stabilizer(Vec<PauliString>),
}

impl Effect {
    pub fn stabilizer(gens: Vec<PauliString>) -> Result<Self> {
        let n = gens
            .first()
            .map(PauliString::len)
            .ok_or_else(|| QsvError::invalid("stabilizer effect needs at least one string"))?;
        total_dim(&vec![2; n])?;
        for (i, g) in gens.iter().enumerate() {
            if g.len() != n {
                return Err(QsvError::DimensionMismatch("stabilizer strings differ in length".into()));
            }
            if g.real_sign().is_none() {
                return Err(QsvError::invalid(format!("stabilizer string {g} has an imaginary phase")));
            }
            if let Some(h) = gens[..i].iter().find(|h| !h.commutes_with(g)) {
                return Err(QsvError::invalid(format!("stabilizer strings {h} and {g} do not commute")));
            }
        }
        Ok(Effect::Stabilizer(gens))
    }

    pub fn dims(&self) -> Vec<usize> {
        match self {
            Effect::Dense(op) => op.dims().to_vec(),
            Effect::Sparse(s) => s.dims().to_vec(),
            Effect::Stabilizer(g) => vec![2; g[0].len()],
        }
    }

    pub fn dim(&self) -> usize {
        self.dims().iter().product()
    }

    pub fn to_sparse(&self) -> Result<SparseOperator> {
        match self {
            Effect::Dense(op) => Ok(SparseOperator::from_dense(op)),
            Effect::Sparse(s) => Ok(s.clone()),
            Effect::Stabilizer(gens) => {
                let mut acc = gens[0].projector_sparse(1)?;
                for g in &gens[1..] {
                    acc = acc.matmul(&g.projector_sparse(1)?)?;
                }
                Ok(acc)
            }
        }
    }

    pub fn to_dense(&self) -> Result<Operator> {
        match self {
            Effect::Dense(op) => Ok(op.clone()),
            other => Ok(other.to_sparse()?.to_dense()),
        }
    }

    pub fn apply(&self, v: &DVector<C64>) -> DVector<C64> {
        match self {
            Effect::Dense(op) => op.apply(v),
            Effect::Sparse(s) => s.apply(v),
            Effect::Stabilizer(gens) => gens.iter().fold(v.clone(), |acc, g| {
                let gv = g.apply(&acc);
                (acc + gv) * C64::new(0.5, 0.0)
            }),
        }
    }

    /// `⟨ψ|Ω_ℓ|ψ⟩`.
    pub fn expectation(&self, psi: &PureState) -> f64 {
        psi.amplitudes().dotc(&self.apply(psi.amplitudes())).re
    }

    /// `Re Tr(Ω_ℓ ρ)`.
    pub fn trace_with(&self, rho: &DMatrix<C64>) -> Result<f64> {
        match self {
            Effect::Dense(op) => {
                let n = op.dim();
                let m = op.matrix();
                let mut acc = C64::new(0.0, 0.0);
                for j in 0..n {
                    for i in 0..n {
                        acc += m[(i, j)] * rho[(j, i)];
                    }
                }
                Ok(acc.re)
            }
            Effect::Sparse(s) => Ok(s.trace_with(rho).re),
            Effect::Stabilizer(_) => Ok(self.to_sparse()?.trace_with(rho).re),
        }
    }

    /// `acc += weight · Ω_ℓ`, visiting nonzero entries only so that dense and
    /// sparse encodings of one effect accumulate identically.
    pub fn add_scaled_into(&self, acc: &mut DMatrix<C64>, weight: f64) -> Result<()> {
        match self {
            Effect::Dense(op) => {
                let m = op.matrix();
                let zero = C64::new(0.0, 0.0);
                for i in 0..op.dim() {
                    for j in 0..op.dim() {
                        let v = m[(i, j)];
                        if v != zero {
                            acc[(i, j)] += v * weight;
                        }
                    }
                }
            }
            Effect::Sparse(s) => s.add_scaled_into(acc, weight),
            Effect::Stabilizer(_) => self.to_sparse()?.add_scaled_into(acc, weight),
        }
        Ok(())
    }

    /// Smallest and largest eigenvalue. Projectors are recognised from
    /// `S² = S` and reported as `(0, 1)` without diagonalising.
    pub fn spectrum_bounds(&self) -> Result<(f64, f64)> {
        if let Effect::Stabilizer(_) = self {
            return Ok((0.0, 1.0));
        }
        let sparse = self.to_sparse()?;
        if sparse.is_projector(1e-12) {
            return Ok((0.0, 1.0));
        }
        let dense = self.to_dense()?;
        let ev = hermitian_eigenvalues(&dense)?;
        Ok((*ev.last().expect("nonempty"), ev[0]))
    }

    pub fn max_asymmetry(&self) -> Result<f64> {
        Ok(match self {
            Effect::Dense(op) => op.max_asymmetry(),
            Effect::Sparse(s) => s.max_asymmetry(),
            Effect::Stabilizer(_) => 0.0,
        })
    }
}

/// One summand of a product decomposition `Ω_ℓ = Σ_k A_k ⊗ B_k`.
///
/// For one-way tests the Alice sides form Alice's measurement, summing to
/// the identity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalTerm {
    pub alice: Operator,
    pub bob: Operator,
}

/// `(p_ℓ, Ω_ℓ)` plus optional metadata.
#[derive(Clone, Debug, PartialEq)]
pub struct Test {
    pub probability: f64,
    pub effect: Effect,
    pub setting: Option<String>,
    pub local: Option<Vec<LocalTerm>>,
}

impl Test {
    pub fn new(probability: f64, effect: Effect) -> Self {
        Self {
            probability,
            effect,
            setting: None,
            local: None,
        }
    }

    pub fn with_setting(mut self, setting: impl Into<String>) -> Self {
        self.setting = Some(setting.into());
        self
    }

    /// Builds the test from a product decomposition; the effect is the sum
    /// of the terms.
    pub fn from_local(probability: f64, terms: Vec<LocalTerm>) -> Result<Self> {
        let first = terms
            .first()
            .ok_or_else(|| QsvError::invalid("local decomposition is empty"))?;
        let mut acc = Operator::zeros(&[first.alice.dims(), first.bob.dims()].concat())?;
        for t in &terms {
            acc.add_scaled(&kron(&t.alice, &t.bob)?, 1.0)?;
        }
        Ok(Self {
            probability,
            effect: Effect::Dense(acc),
            setting: None,
            local: Some(terms),
        })
    }

    /// The same test with Alice and Bob exchanged, `VΩ_ℓV†`.
    pub fn swapped(&self, swap: &Operator) -> Result<Self> {
        let effect = Effect::Dense(self.effect.to_dense()?.conjugate_by(swap)?);
        let local = self.local.as_ref().map(|terms| {
            terms
                .iter()
                .map(|t| LocalTerm {
                    alice: t.bob.clone(),
                    bob: t.alice.clone(),
                })
                .collect()
        });
        Ok(Self {
            probability: self.probability,
            effect,
            setting: self.setting.as_ref().map(|s| format!("swap({s})")),
            local,
        })
    }
}

/// Checks of the strategy invariants, with the worst observed deviations.
#[derive(Clone, Debug, Serialize)]
pub struct ValidationReport {
    pub probability_sum: f64,
    pub min_probability: f64,
    pub effect_min_eigenvalue: f64,
    pub effect_max_eigenvalue: f64,
    pub max_effect_asymmetry: f64,
    pub max_target_residual: f64,
    pub valid: bool,
}

/// A target state with a weighted list of tests.
#[derive(Clone, Debug, PartialEq)]
pub struct Strategy {
    label: String,
    target: PureState,
    tests: Vec<Test>,
    predicted_gap: Option<f64>,
}

impl Strategy {
    /// Cheap structural checks only; see [`Strategy::validate`] for the full
    /// invariant check.
    pub fn new(
        label: impl Into<String>,
        target: PureState,
        tests: Vec<Test>,
        predicted_gap: Option<f64>,
    ) -> Result<Self> {
        if tests.is_empty() {
            return Err(QsvError::invalid("strategy has no tests"));
        }
        let mut sum = 0.0;
        for (k, t) in tests.iter().enumerate() {
            if !t.probability.is_finite() || t.probability < 0.0 {
                return Err(QsvError::invalid(format!(
                    "test {k} has probability {}",
                    t.probability
                )));
            }
            if t.effect.dims() != target.dims() {
                return Err(QsvError::DimensionMismatch(format!(
                    "test {k} acts on {:?}, target on {:?}",
                    t.effect.dims(),
                    target.dims()
                )));
            }
            sum += t.probability;
        }
        if (sum - 1.0).abs() > INPUT_TOL {
            return Err(QsvError::invalid(format!(
                "test probabilities sum to {sum}, not 1"
            )));
        }
        Ok(Self {
            label: label.into(),
            target,
            tests,
            predicted_gap,
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn target(&self) -> &PureState {
        &self.target
    }

    pub fn tests(&self) -> &[Test] {
        &self.tests
    }

    pub fn predicted_gap(&self) -> Option<f64> {
        self.predicted_gap
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// `Ω = Σ p_ℓ Ω_ℓ`.
    pub fn aggregate(&self) -> Result<Operator> {
        let d = self.target.dim();
        let mut acc = DMatrix::from_element(d, d, C64::new(0.0, 0.0));
        for t in &self.tests {
            t.effect.add_scaled_into(&mut acc, t.probability)?;
        }
        Operator::new(self.target.dims().to_vec(), acc)
    }

    /// Spectral gap of the aggregate operator.
    pub fn gap(&self) -> Result<f64> {
        spectral_gap(&self.aggregate()?, &self.target)
    }

    /// `Σ p_ℓ Tr(Ω_ℓ ρ)`.
    pub fn pass_probability(&self, rho: &Operator) -> Result<f64> {
        if rho.dims() != self.target.dims() {
            return Err(QsvError::DimensionMismatch(format!(
                "state {:?} vs strategy {:?}",
                rho.dims(),
                self.target.dims()
            )));
        }
        self.tests.iter().try_fold(0.0, |acc, t| {
            Ok(acc + t.probability * t.effect.trace_with(rho.matrix())?)
        })
    }

    /// Per-test `Tr(Ω_ℓ ρ)`.
    pub fn test_pass_probabilities(&self, rho: &Operator) -> Result<Vec<f64>> {
        self.tests
            .iter()
            .map(|t| t.effect.trace_with(rho.matrix()))
            .collect()
    }

    /// Probability simplex, effect spectra in `[0, 1]` and `Ω_ℓ|ψ⟩ = |ψ⟩`,
    /// all to `1e-9` (the simplex to `1e-12`).
    pub fn validate(&self) -> Result<ValidationReport> {
        let probability_sum: f64 = self.tests.iter().map(|t| t.probability).sum();
        let min_probability = self
            .tests
            .iter()
            .map(|t| t.probability)
            .fold(f64::INFINITY, f64::min);
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        let mut asym = 0.0f64;
        let mut residual = 0.0f64;
        let psi = self.target.amplitudes();
        for t in &self.tests {
            let a = t.effect.max_asymmetry()?;
            asym = asym.max(a);
            if a > DERIVED_TOL {
                continue;
            }
            let (l, h) = t.effect.spectrum_bounds()?;
            lo = lo.min(l);
            hi = hi.max(h);
            residual = residual.max((t.effect.apply(psi) - psi).norm());
        }
        let valid = (probability_sum - 1.0).abs() <= INPUT_TOL
            && min_probability >= 0.0
            && asym <= DERIVED_TOL
            && lo >= -DERIVED_TOL
            && hi <= 1.0 + DERIVED_TOL
            && residual <= DERIVED_TOL;
        Ok(ValidationReport {
            probability_sum,
            min_probability,
            effect_min_eigenvalue: lo,
            effect_max_eigenvalue: hi,
            max_effect_asymmetry: asym,
            max_target_residual: residual,
            valid,
        })
    }

    pub fn to_json(&self) -> Result<String> {
        let wire = StrategyJson::from_strategy(self)?;
        serde_json::to_string(&wire).map_err(|e| QsvError::invalid(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let wire: StrategyJson =
            serde_json::from_str(text).map_err(|e| QsvError::schema("<strategy>", e.to_string()))?;
        wire.into_strategy()
            .map_err(|e| QsvError::schema("<strategy>", e.to_string()))
    }

    pub fn read_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text).map_err(|e| match e {
            QsvError::Schema { message, .. } => QsvError::schema(path.display().to_string(), message),
            other => other,
        })
    }

    pub fn write_file(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TestJson {
    p: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    effect: Option<Operator>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    stabilizers: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    setting: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    local: Option<Vec<LocalTerm>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StrategyJson {
    label: String,
    target: PureState,
    tests: Vec<TestJson>,
    predicted_gap: Option<f64>,
}

impl StrategyJson {
    fn from_strategy(s: &Strategy) -> Result<Self> {
        let tests = s
            .tests
            .iter()
            .map(|t| {
                let (effect, stabilizers) = match &t.effect {
                    Effect::Stabilizer(gens) => {
                        let names = gens.iter().map(|g| g.to_string()).collect();
                        let dense = (t.effect.dim() <= DENSE_WRITE_LIMIT)
                            .then(|| t.effect.to_dense())
                            .transpose()?;
                        (dense, Some(names))
                    }
                    other => (Some(other.to_dense()?), None),
                };
                Ok(TestJson {
                    p: t.probability,
                    effect,
                    stabilizers,
                    setting: t.setting.clone(),
                    local: t.local.clone(),
                })
            })
            .collect::<Result<_>>()?;
        Ok(Self {
            label: s.label.clone(),
            target: s.target.clone(),
            tests,
            predicted_gap: s.predicted_gap,
        })
    }

    fn into_strategy(self) -> Result<Strategy> {
        let tests = self
            .tests
            .into_iter()
            .enumerate()
            .map(|(k, t)| {
                let effect = match (t.stabilizers, t.effect) {
                    (Some(names), dense) => {
                        let gens = names
                            .iter()
                            .map(|n| n.parse())
                            .collect::<Result<Vec<PauliString>>>()?;
                        let e = Effect::stabilizer(gens)?;
                        if let Some(d) = dense {
                            if e.to_dense()?.max_abs_diff(&d) > INPUT_TOL {
                                return Err(QsvError::invalid(format!(
                                    "test {k}: \"effect\" disagrees with \"stabilizers\""
                                )));
                            }
                        }
                        e
                    }
                    (None, Some(d)) if d.dim() <= DENSE_LOAD_LIMIT => Effect::Dense(d),
                    (None, Some(d)) => Effect::Sparse(SparseOperator::from_dense(&d)),
                    (None, None) => {
                        return Err(QsvError::invalid(format!(
                            "test {k} has neither \"effect\" nor \"stabilizers\""
                        )))
                    }
                };
                Ok(Test {
                    probability: t.p,
                    effect,
                    setting: t.setting,
                    local: t.local,
                })
            })
            .collect::<Result<_>>()?;
        Strategy::new(self.label, self.target, tests, self.predicted_gap)
    }
}
