//! Dense complex linear algebra over small tensor-product spaces.
//!
//! Every operator and state carries its tensor-factor dimensions. The basis
//! is ordered lexicographically with the first factor most significant, so a
//! three-qubit index `r` stores qubit 1 in bit 2 and qubit 3 in bit 0.
//!
//! Dense operators are capped at [`MAX_DIM`]; larger requests are rejected
//! with [`QsvError::SizeLimit`](crate::QsvError::SizeLimit).

mod json;
mod operator;
mod partial;
pub mod random;
mod sparse;
mod spectrum;
mod state;

pub use json::{OperatorJson, StateJson};
pub use operator::Operator;
pub use partial::{kron, kron_all, kron_states, partial_trace, partial_transpose, swap_operator};
pub use sparse::SparseOperator;
pub use spectrum::{hermitian_eigenvalues, hermitian_spectrum, spectral_gap, Spectrum};
pub use state::PureState;

pub use num_complex::Complex64 as C64;

use crate::error::{QsvError, Result};

/// Largest dense operator side (12 qubits).
pub const MAX_DIM: usize = 4096;

/// Tolerance on caller-supplied Hermiticity and normalization.
pub const INPUT_TOL: f64 = 1e-12;

/// Tolerance on quantities derived by computation.
pub const DERIVED_TOL: f64 = 1e-9;

pub(crate) const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub(crate) const ONE: C64 = C64 { re: 1.0, im: 0.0 };

/// Product of the factor dimensions, validated against [`MAX_DIM`].
pub fn total_dim(dims: &[usize]) -> Result<usize> {
    if dims.is_empty() {
        return Err(QsvError::invalid("dimension list is empty"));
    }
    let mut total: usize = 1;
    for &d in dims {
        if d == 0 {
            return Err(QsvError::invalid("factor dimension must be positive"));
        }
        total = total
            .checked_mul(d)
            .filter(|&t| t <= MAX_DIM)
            .ok_or_else(|| {
                QsvError::SizeLimit(format!(
                    "dimensions {dims:?} exceed the dense cap of {MAX_DIM}"
                ))
            })?;
    }
    Ok(total)
}

/// Split a flat basis index into per-factor digits.
pub(crate) fn digits(mut index: usize, dims: &[usize]) -> Vec<usize> {
    let mut out = vec![0; dims.len()];
    for (slot, &d) in out.iter_mut().zip(dims).rev() {
        *slot = index % d;
        index /= d;
    }
    out
}

/// Inverse of [`digits`].
pub(crate) fn flat_index(digits: &[usize], dims: &[usize]) -> usize {
    digits.iter().zip(dims).fold(0, |acc, (&x, &d)| acc * d + x)
}
