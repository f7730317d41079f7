use std::cmp::Ordering;

use nalgebra::{DMatrix, SymmetricEigen};

use super::{Operator, PureState, C64, DERIVED_TOL, INPUT_TOL};
use crate::error::{QsvError, Result};

/// Eigen-decomposition of a Hermitian operator.
///
/// `values` are sorted descending. Column `k` of `vectors` is the unit
/// eigenvector for `values[k]`, phased so its first component with modulus
/// above `1e-10` is real and positive. Near-equal eigenvalues (within `1e-9`)
/// are ordered by the position of that leading component, then
/// lexicographically by the components themselves.
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub values: Vec<f64>,
    pub vectors: DMatrix<C64>,
}

impl Spectrum {
    pub fn vector(&self, k: usize) -> Vec<C64> {
        self.vectors.column(k).iter().copied().collect()
    }

    pub fn min(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }
}

fn hermitian_input(a: &Operator) -> Result<DMatrix<C64>> {
    let scale = a.matrix().iter().map(|z| z.norm()).fold(1.0, f64::max);
    let asym = a.max_asymmetry();
    if asym > INPUT_TOL * scale {
        return Err(QsvError::NotHermitian(asym));
    }
    Ok(a.hermitian_part().into_matrix())
}

/// Eigenvalues only, descending.
pub fn hermitian_eigenvalues(a: &Operator) -> Result<Vec<f64>> {
    let m = hermitian_input(a)?;
    let mut vals: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
    vals.sort_by(|x, y| y.total_cmp(x));
    Ok(vals)
}

pub fn hermitian_spectrum(a: &Operator) -> Result<Spectrum> {
    let m = hermitian_input(a)?;
    let n = m.nrows();
    let eig = SymmetricEigen::new(m);

    let mut columns: Vec<(f64, Vec<C64>)> = (0..n)
        .map(|k| {
            let mut v: Vec<C64> = eig.eigenvectors.column(k).iter().copied().collect();
            let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if let Some(first) = v.iter().copied().find(|z| z.norm() > 1e-10) {
                let phase = first.conj() / (first.norm() * norm);
                for z in v.iter_mut() {
                    *z *= phase;
                }
            }
            (eig.eigenvalues[k], v)
        })
        .collect();

    columns.sort_by(|(la, _), (lb, _)| lb.total_cmp(la));
    let lead = |v: &[C64]| v.iter().position(|z| z.norm() > 1e-10).unwrap_or(v.len());
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && columns[end - 1].0 - columns[end].0 <= DERIVED_TOL {
            end += 1;
        }
        columns[start..end]
            .sort_by(|(_, va), (_, vb)| lead(va).cmp(&lead(vb)).then_with(|| lexicographic_desc(va, vb)));
        start = end;
    }

    let values = columns.iter().map(|(l, _)| *l).collect();
    let vectors = DMatrix::from_fn(n, n, |i, k| columns[k].1[i]);
    Ok(Spectrum { values, vectors })
}

fn lexicographic_desc(a: &[C64], b: &[C64]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| y.re.total_cmp(&x.re).then(y.im.total_cmp(&x.im)))
        .find(|o| *o != Ordering::Equal)
        .unwrap_or(Ordering::Equal)
}

/// `1 − λ₂` for a verification operator of `target`.
///
/// Fails with [`QsvError::NotVerificationOperator`] unless `⟨ψ|Ω|ψ⟩` and the
/// top eigenvalue are both within `1e-9` of one.
pub fn spectral_gap(omega: &Operator, target: &PureState) -> Result<f64> {
    if omega.dims() != target.dims() {
        return Err(QsvError::DimensionMismatch(format!(
            "operator {:?} vs target {:?}",
            omega.dims(),
            target.dims()
        )));
    }
    let overlap = omega.expectation(target)?.re;
    if (overlap - 1.0).abs() > DERIVED_TOL {
        return Err(QsvError::NotVerificationOperator(format!(
            "target pass probability is {overlap}, not 1"
        )));
    }
    let vals = hermitian_eigenvalues(omega)?;
    if (vals[0] - 1.0).abs() > DERIVED_TOL {
        return Err(QsvError::NotVerificationOperator(format!(
            "largest eigenvalue is {}, not 1",
            vals[0]
        )));
    }
    match vals.get(1) {
        Some(&l2) => Ok((1.0 - l2).clamp(0.0, 1.0)),
        None => Ok(1.0),
    }
}
