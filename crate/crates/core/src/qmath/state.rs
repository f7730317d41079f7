use nalgebra::DVector;

use super::{digits, flat_index, total_dim, Operator, C64, INPUT_TOL, ONE, ZERO};
use crate::error::{QsvError, Result};

/// Normalized complex amplitude vector with a tensor-factor signature.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    dims: Vec<usize>,
    amps: DVector<C64>,
}

impl PureState {
    /// Wraps amplitudes that are already normalized to within `1e-12`.
    pub fn new(dims: Vec<usize>, amps: DVector<C64>) -> Result<Self> {
        let d = total_dim(&dims)?;
        if amps.len() != d {
            return Err(QsvError::DimensionMismatch(format!(
                "{} amplitudes for dims {:?}",
                amps.len(),
                dims
            )));
        }
        let norm_sqr = amps.norm_squared();
        if (norm_sqr - 1.0).abs() > INPUT_TOL {
            return Err(QsvError::invalid(format!(
                "state is not normalized (squared norm {norm_sqr})"
            )));
        }
        Ok(Self { dims, amps })
    }

    /// Rescales arbitrary nonzero amplitudes to unit norm.
    pub fn normalized(dims: Vec<usize>, amps: DVector<C64>) -> Result<Self> {
        let d = total_dim(&dims)?;
        if amps.len() != d {
            return Err(QsvError::DimensionMismatch(format!(
                "{} amplitudes for dims {:?}",
                amps.len(),
                dims
            )));
        }
        let norm = amps.norm();
        if norm < 1e-300 || !norm.is_finite() {
            return Err(QsvError::invalid("cannot normalize a zero vector"));
        }
        Ok(Self {
            dims,
            amps: amps.unscale(norm),
        })
    }

    pub fn from_real(dims: Vec<usize>, amps: &[f64]) -> Result<Self> {
        let v = DVector::from_iterator(amps.len(), amps.iter().map(|&x| C64::new(x, 0.0)));
        Self::normalized(dims, v)
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(dims: &[usize], index: usize) -> Result<Self> {
        let d = total_dim(dims)?;
        if index >= d {
            return Err(QsvError::invalid(format!("basis index {index} >= {d}")));
        }
        let mut amps = DVector::from_element(d, ZERO);
        amps[index] = ONE;
        Ok(Self {
            dims: dims.to_vec(),
            amps,
        })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amps
    }

    pub fn amplitude(&self, index: usize) -> C64 {
        self.amps[index]
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &PureState) -> C64 {
        self.amps.dotc(&other.amps)
    }

    /// `|⟨self|other⟩|²`.
    pub fn fidelity(&self, other: &PureState) -> f64 {
        if self.amps.len() != other.amps.len() {
            return 0.0;
        }
        self.inner(other).norm_sqr()
    }

    pub fn projector(&self) -> Operator {
        Operator::projector(self)
    }

    pub fn tensor(&self, other: &PureState) -> Result<PureState> {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        total_dim(&dims)?;
        Ok(Self {
            dims,
            amps: self.amps.kronecker(&other.amps),
        })
    }

    /// Reorders tensor factors: factor `k` of the result is factor `perm[k]`
    /// of `self`.
    pub fn permute_factors(&self, perm: &[usize]) -> Result<PureState> {
        let n = self.dims.len();
        let mut seen = vec![false; n];
        if perm.len() != n || perm.iter().any(|&p| p >= n || std::mem::replace(&mut seen[p], true)) {
            return Err(QsvError::invalid(format!("{perm:?} is not a permutation of 0..{n}")));
        }
        let new_dims: Vec<usize> = perm.iter().map(|&p| self.dims[p]).collect();
        let mut out = DVector::from_element(self.dim(), ZERO);
        for (src, &amp) in self.amps.iter().enumerate() {
            let old = digits(src, &self.dims);
            let new: Vec<usize> = perm.iter().map(|&p| old[p]).collect();
            out[flat_index(&new, &new_dims)] = amp;
        }
        Ok(Self {
            dims: new_dims,
            amps: out,
        })
    }

    /// `|ψ⟩ ↦ e^{iφ}|ψ⟩` with the first nonzero amplitude made real positive.
    pub fn canonical_phase(&self) -> PureState {
        let mut amps = self.amps.clone();
        if let Some(first) = amps.iter().copied().find(|z| z.norm() > 1e-12) {
            let phase = first.conj() / first.norm();
            amps *= phase;
        }
        Self {
            dims: self.dims.clone(),
            amps,
        }
    }
}
