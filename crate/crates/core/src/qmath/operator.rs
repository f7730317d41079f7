use nalgebra::{DMatrix, DVector};

use super::{total_dim, PureState, C64, ONE, ZERO};
use crate::error::{QsvError, Result};

/// Dense complex square matrix with a tensor-factor signature.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    dims: Vec<usize>,
    mat: DMatrix<C64>,
}

impl Operator {
    pub fn new(dims: Vec<usize>, mat: DMatrix<C64>) -> Result<Self> {
        let d = total_dim(&dims)?;
        if mat.nrows() != d || mat.ncols() != d {
            return Err(QsvError::DimensionMismatch(format!(
                "matrix is {}x{} but dims {:?} require {d}x{d}",
                mat.nrows(),
                mat.ncols(),
                dims
            )));
        }
        Ok(Self { dims, mat })
    }

    pub fn zeros(dims: &[usize]) -> Result<Self> {
        let d = total_dim(dims)?;
        Ok(Self {
            dims: dims.to_vec(),
            mat: DMatrix::from_element(d, d, ZERO),
        })
    }

    pub fn identity(dims: &[usize]) -> Result<Self> {
        let d = total_dim(dims)?;
        Ok(Self {
            dims: dims.to_vec(),
            mat: DMatrix::identity(d, d),
        })
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn projector(state: &PureState) -> Self {
        let v = state.amplitudes();
        Self {
            dims: state.dims().to_vec(),
            mat: v * v.adjoint(),
        }
    }

    /// Outer product `|a⟩⟨b|` of two vectors sharing a signature.
    pub fn outer(dims: &[usize], a: &DVector<C64>, b: &DVector<C64>) -> Result<Self> {
        Self::new(dims.to_vec(), a * b.adjoint())
    }

    pub fn from_real_diagonal(dims: &[usize], diag: &[f64]) -> Result<Self> {
        let d = total_dim(dims)?;
        if diag.len() != d {
            return Err(QsvError::DimensionMismatch(format!(
                "diagonal has {} entries, expected {d}",
                diag.len()
            )));
        }
        let mut mat = DMatrix::from_element(d, d, ZERO);
        for (i, &x) in diag.iter().enumerate() {
            mat[(i, i)] = C64::new(x, 0.0);
        }
        Ok(Self {
            dims: dims.to_vec(),
            mat,
        })
    }

    /// Single-factor operator from row-major entries.
    pub fn from_rows(rows: &[&[C64]]) -> Result<Self> {
        let d = rows.len();
        if rows.iter().any(|r| r.len() != d) {
            return Err(QsvError::invalid("rows must form a square matrix"));
        }
        Self::new(vec![d], DMatrix::from_fn(d, d, |i, j| rows[i][j]))
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.mat
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.mat
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.mat[(row, col)]
    }

    /// Same entries, new factor signature with equal total dimension.
    pub fn with_dims(self, dims: Vec<usize>) -> Result<Self> {
        Self::new(dims, self.mat)
    }

    pub fn adjoint(&self) -> Self {
        Self {
            dims: self.dims.clone(),
            mat: self.mat.adjoint(),
        }
    }

    pub fn transpose(&self) -> Self {
        Self {
            dims: self.dims.clone(),
            mat: self.mat.transpose(),
        }
    }

    pub fn conj(&self) -> Self {
        Self {
            dims: self.dims.clone(),
            mat: self.mat.map(|z| z.conj()),
        }
    }

    /// Largest entrywise `|A - A†|`.
    pub fn max_asymmetry(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        for j in 0..n {
            for i in j..n {
                worst = worst.max((self.mat[(i, j)] - self.mat[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.max_asymmetry() <= tol
    }

    /// `(A + A†)/2`.
    pub fn hermitian_part(&self) -> Self {
        Self {
            dims: self.dims.clone(),
            mat: (&self.mat + self.mat.adjoint()) * C64::new(0.5, 0.0),
        }
    }

    pub fn trace(&self) -> C64 {
        self.mat.trace()
    }

    pub fn scale(&self, factor: f64) -> Self {
        self.scale_complex(C64::new(factor, 0.0))
    }

    pub fn scale_complex(&self, factor: C64) -> Self {
        Self {
            dims: self.dims.clone(),
            mat: &self.mat * factor,
        }
    }

    fn check_same_shape(&self, other: &Operator, what: &str) -> Result<()> {
        if self.dims != other.dims {
            return Err(QsvError::DimensionMismatch(format!(
                "{what}: {:?} vs {:?}",
                self.dims, other.dims
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Operator) -> Result<Self> {
        self.check_same_shape(other, "add")?;
        Ok(Self {
            dims: self.dims.clone(),
            mat: &self.mat + &other.mat,
        })
    }

    pub fn sub(&self, other: &Operator) -> Result<Self> {
        self.check_same_shape(other, "sub")?;
        Ok(Self {
            dims: self.dims.clone(),
            mat: &self.mat - &other.mat,
        })
    }

    /// `self += weight * other`.
    pub fn add_scaled(&mut self, other: &Operator, weight: f64) -> Result<()> {
        self.check_same_shape(other, "add_scaled")?;
        let w = C64::new(weight, 0.0);
        self.mat.zip_apply(&other.mat, |a, b| *a += b * w);
        Ok(())
    }

    pub fn matmul(&self, other: &Operator) -> Result<Self> {
        self.check_same_shape(other, "matmul")?;
        Ok(Self {
            dims: self.dims.clone(),
            mat: &self.mat * &other.mat,
        })
    }

    pub fn apply(&self, v: &DVector<C64>) -> DVector<C64> {
        &self.mat * v
    }

    pub fn apply_state(&self, psi: &PureState) -> Result<DVector<C64>> {
        if psi.dims() != self.dims.as_slice() {
            return Err(QsvError::DimensionMismatch(format!(
                "operator {:?} vs state {:?}",
                self.dims,
                psi.dims()
            )));
        }
        Ok(&self.mat * psi.amplitudes())
    }

    /// `⟨ψ|A|ψ⟩`.
    pub fn expectation(&self, psi: &PureState) -> Result<C64> {
        let av = self.apply_state(psi)?;
        Ok(psi.amplitudes().dotc(&av))
    }

    /// `Tr(A·B)` without forming the product.
    pub fn trace_product(&self, other: &Operator) -> Result<C64> {
        self.check_same_shape(other, "trace_product")?;
        let n = self.dim();
        let mut acc = ZERO;
        for j in 0..n {
            for i in 0..n {
                acc += self.mat[(i, j)] * other.mat[(j, i)];
            }
        }
        Ok(acc)
    }

    /// `U A U†`.
    pub fn conjugate_by(&self, u: &Operator) -> Result<Self> {
        self.check_same_shape(u, "conjugate_by")?;
        Ok(Self {
            dims: self.dims.clone(),
            mat: &u.mat * &self.mat * u.mat.adjoint(),
        })
    }

    pub fn max_abs_diff(&self, other: &Operator) -> f64 {
        if self.mat.shape() != other.mat.shape() {
            return f64::INFINITY;
        }
        self.mat
            .iter()
            .zip(other.mat.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        let prod = self.mat.adjoint() * &self.mat;
        let n = self.dim();
        for j in 0..n {
            for i in 0..n {
                let expect = if i == j { ONE } else { ZERO };
                if (prod[(i, j)] - expect).norm() > tol {
                    return false;
                }
            }
        }
        true
    }
}
