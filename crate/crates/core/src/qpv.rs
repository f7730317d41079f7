//! Gate verification through the Choi isomorphism.
//!
//! Choi matrices put the ancilla (input) factor first:
//! `J(E) = Σ |α⟩⟨β| ⊗ E(|α⟩⟨β|)`, so `Tr J = d_in` for a channel.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{QsvError, Result};
use crate::qmath::{
    hermitian_eigenvalues, hermitian_spectrum, kron, partial_trace, random::haar_unitary, Operator,
    PureState, C64, DERIVED_TOL,
};
use crate::strategies::Strategy;

#[derive(Clone, Debug, PartialEq)]
pub struct ChannelChoi {
    d_in: usize,
    d_out: usize,
    j: Operator,
}

impl ChannelChoi {
    /// Wraps a Choi matrix on `d_in ⊗ d_out`, checking Hermiticity and
    /// positivity to `1e-9`.
    pub fn new(d_in: usize, d_out: usize, j: DMatrix<C64>) -> Result<Self> {
        let j = Operator::new(vec![d_in, d_out], j)?;
        if !j.is_hermitian(DERIVED_TOL) {
            return Err(QsvError::NotHermitian(j.max_asymmetry()));
        }
        let min = *hermitian_eigenvalues(&j)?.last().expect("nonempty");
        if min < -DERIVED_TOL {
            return Err(QsvError::invalid(format!(
                "Choi matrix has eigenvalue {min:.3e}; the map is not completely positive"
            )));
        }
        Ok(ChannelChoi { d_in, d_out, j })
    }

    /// `Σ_k |K_k⟩⟩⟨⟨K_k|` with `|K⟩⟩ = Σ_α |α⟩ ⊗ K|α⟩`.
    pub fn from_kraus(kraus: &[Operator]) -> Result<Self> {
        let first = kraus.first().ok_or_else(|| QsvError::invalid("no Kraus operators"))?;
        let (d_out, d_in) = first.matrix().shape();
        let mut j = DMatrix::from_element(d_in * d_out, d_in * d_out, C64::new(0.0, 0.0));
        for k in kraus {
            if k.matrix().shape() != (d_out, d_in) {
                return Err(QsvError::DimensionMismatch("Kraus operators differ in shape".into()));
            }
            let v = DVector::from_fn(d_in * d_out, |r, _| k.matrix()[(r % d_out, r / d_out)]);
            j += &v * v.adjoint();
        }
        Self::new(d_in, d_out, j)
    }

    pub fn unitary(u: &Operator) -> Result<Self> {
        if !u.is_unitary(DERIVED_TOL) {
            return Err(QsvError::invalid("gate is not unitary"));
        }
        Self::from_kraus(std::slice::from_ref(u))
    }

    pub fn identity(d: usize) -> Result<Self> {
        Self::unitary(&Operator::identity(&[d])?)
    }

    /// `ρ ↦ (1−p)ρ + p Tr(ρ) 𝟙/d`.
    pub fn depolarizing(d: usize, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(QsvError::invalid(format!("depolarizing weight must lie in [0, 1], got {p}")));
        }
        let id = Self::identity(d)?;
        let white = DMatrix::<C64>::identity(d * d, d * d).unscale(d as f64);
        let j = id.j.matrix() * C64::new(1.0 - p, 0.0) + white * C64::new(p, 0.0);
        Self::new(d, d, j)
    }

    /// Random channel of Kraus rank `rank`: the Kraus operators are the
    /// `d × d` blocks of the first `d` columns of a Haar unitary on `d·rank`.
    pub fn random<R: Rng + ?Sized>(d: usize, rank: usize, rng: &mut R) -> Result<Self> {
        let rank = rank.max(1);
        let big = haar_unitary(d * rank, rng)?;
        let kraus = (0..rank)
            .map(|k| Operator::new(vec![d], big.matrix().view((k * d, 0), (d, d)).into_owned()))
            .collect::<Result<Vec<_>>>()?;
        Self::from_kraus(&kraus)
    }

    pub fn d_in(&self) -> usize {
        self.d_in
    }

    pub fn d_out(&self) -> usize {
        self.d_out
    }

    pub fn matrix(&self) -> &Operator {
        &self.j
    }

    /// `Tr_out J = 𝟙` to `1e-9`.
    pub fn is_trace_preserving(&self) -> Result<bool> {
        let reduced = partial_trace(&self.j, &[0])?;
        Ok(reduced.max_abs_diff(&Operator::identity(&[self.d_in])?) <= DERIVED_TOL)
    }

    /// `J / Tr J`.
    pub fn choi_state(&self) -> Result<Operator> {
        let tr = self.j.trace().re;
        if tr <= 0.0 {
            return Err(QsvError::invalid("Choi matrix has zero trace"));
        }
        Ok(self.j.scale(1.0 / tr))
    }
}

/// Choi matrix and the normalised Choi state `(1/√d) Σ |α⟩ ⊗ U|α⟩`.
pub fn choi_of_unitary(u: &Operator) -> Result<(ChannelChoi, PureState)> {
    let c = ChannelChoi::unitary(u)?;
    let d = u.dim();
    let amps = DVector::from_fn(d * d, |r, _| u.matrix()[(r % d, r / d)] / (d as f64).sqrt());
    Ok((c, PureState::new(vec![d, d], amps)?))
}

/// `E(ρ) = Tr_A[(ρᵀ ⊗ 𝟙) J]`.
pub fn apply_choi(c: &ChannelChoi, rho: &Operator) -> Result<Operator> {
    if rho.dims() != [c.d_in] {
        return Err(QsvError::DimensionMismatch(format!(
            "input state {:?} vs channel input {}",
            rho.dims(),
            c.d_in
        )));
    }
    let lifted = kron(&rho.transpose(), &Operator::identity(&[c.d_out])?)?;
    partial_trace(&lifted.matmul(&c.j)?, &[1])
}

/// `F_e(E, U) = Tr(ρ_E ρ_U)` with normalised Choi states.
pub fn entanglement_gate_fidelity(e: &ChannelChoi, u: &Operator) -> Result<f64> {
    let (_, psi) = choi_of_unitary(u)?;
    if e.d_in != u.dim() || e.d_out != u.dim() {
        return Err(QsvError::DimensionMismatch("channel and gate dimensions differ".into()));
    }
    Ok(e.choi_state()?.expectation(&psi)?.re.clamp(0.0, 1.0))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PmTest {
    pub p: f64,
    pub input: Operator,
    pub effect: Operator,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub setting: Option<String>,
}

/// Prepare-and-measure plan `Ξ = Σ p_ℓ ρ_ℓᵀ ⊗ N_ℓ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PmStrategy {
    pub label: String,
    pub tests: Vec<PmTest>,
}

impl PmStrategy {
    pub fn xi(&self) -> Result<Operator> {
        let first = self.tests.first().ok_or_else(|| QsvError::invalid("empty plan"))?;
        let mut acc = Operator::zeros(&[first.input.dim(), first.effect.dim()])?;
        for t in &self.tests {
            acc.add_scaled(&kron(&t.input.transpose(), &t.effect)?, t.p)?;
        }
        Ok(acc)
    }

    pub fn probability_sum(&self) -> f64 {
        self.tests.iter().map(|t| t.p).sum()
    }

    /// `Tr(U ρ_ℓ U† N_ℓ)` for every test; all should be one.
    pub fn target_pass(&self, u: &Operator) -> Result<Vec<f64>> {
        self.tests
            .iter()
            .map(|t| Ok(t.effect.trace_product(&t.input.conjugate_by(u)?)?.re))
            .collect()
    }
}

/// `V` with `|ψ⟩ = (1/√d) Σ |α⟩ ⊗ V|α⟩`, read off as `V_{βα} = √d ⟨αβ|ψ⟩`.
fn choi_unitary_of(psi: &PureState) -> Result<Operator> {
    let [da, db] = psi.dims() else {
        return Err(QsvError::invalid("Choi state must be bipartite"));
    };
    if da != db {
        return Err(QsvError::invalid("Choi state must have equal factors"));
    }
    let d = *da;
    let root = (d as f64).sqrt();
    let v = DMatrix::from_fn(d, d, |beta, alpha| psi.amplitude(alpha * d + beta) * root);
    let v = Operator::new(vec![d], v)?;
    if !v.is_unitary(DERIVED_TOL) {
        return Err(QsvError::invalid("strategy target is not maximally entangled"));
    }
    Ok(v)
}

/// Turn a one-way strategy `Σ M ⊗ N` for the Choi state of `gate` into a
/// prepare-and-measure plan: `p = Tr M / d`, `ρ = Mᵀ / Tr M`.
///
/// Alice's effects are first split into rank-one pieces. If the strategy
/// verifies the Choi state of another unitary `V`, Bob's tests are rotated
/// by `U V†` so the plan verifies `gate`.
pub fn convert_one_way_to_pm(s: &Strategy, gate: &Operator) -> Result<PmStrategy> {
    let v = choi_unitary_of(s.target())?;
    let d = v.dim();
    if gate.dims() != [d] {
        return Err(QsvError::DimensionMismatch(format!(
            "gate acts on {:?}, strategy on {d}-dimensional systems",
            gate.dims()
        )));
    }
    if !gate.is_unitary(DERIVED_TOL) {
        return Err(QsvError::invalid("gate is not unitary"));
    }
    let w = gate.matmul(&v.adjoint())?;

    let mut povm_sum = Operator::zeros(&[d])?;
    let mut tests = Vec::new();
    for (k, t) in s.tests().iter().enumerate() {
        let terms = t.local.as_ref().ok_or_else(|| {
            QsvError::InvalidPovm(format!("test {k} has no product decomposition"))
        })?;
        for term in terms {
            povm_sum.add_scaled(&term.alice, t.probability)?;
            let bob = term.bob.conjugate_by(&w)?;
            let spec = hermitian_spectrum(&term.alice)?;
            for (i, &mu) in spec.values.iter().enumerate() {
                if mu <= DERIVED_TOL {
                    continue;
                }
                let e = spec.vectors.column(i).into_owned();
                let proj = Operator::outer(&[d], &e, &e)?;
                tests.push(PmTest {
                    p: t.probability * mu / d as f64,
                    input: proj.transpose(),
                    effect: bob.clone(),
                    setting: t.setting.clone(),
                });
            }
        }
    }
    let err = povm_sum.max_abs_diff(&Operator::identity(&[d])?);
    if err > DERIVED_TOL {
        return Err(QsvError::InvalidPovm(format!(
            "Alice's effects sum to the identity only within {err:.3e}"
        )));
    }
    Ok(PmStrategy {
        label: format!("pm:{}", s.label()),
        tests,
    })
}

/// Both sides of `Σ p_ℓ Tr[E(ρ_ℓ) N_ℓ] = Tr[Ξ J(E)]`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct PmPass {
    pub operational: f64,
    pub choi: f64,
}

pub fn pm_pass_sides(xi: &PmStrategy, e: &ChannelChoi) -> Result<PmPass> {
    let mut operational = 0.0;
    for t in &xi.tests {
        operational += t.p * apply_choi(e, &t.input)?.trace_product(&t.effect)?.re;
    }
    let choi = xi.xi()?.trace_product(e.matrix())?.re;
    Ok(PmPass { operational, choi })
}

/// Pass probability of a channel, computed both ways and cross-checked to
/// `1e-9`.
pub fn pm_pass_prob(xi: &PmStrategy, e: &ChannelChoi) -> Result<f64> {
    let sides = pm_pass_sides(xi, e)?;
    if (sides.operational - sides.choi).abs() > DERIVED_TOL {
        return Err(QsvError::NumericalIntegrity(format!(
            "operational pass probability {} disagrees with Choi form {}",
            sides.operational, sides.choi
        )));
    }
    Ok(sides.operational)
}
