use nalgebra::{DMatrix, DVector};

use super::{total_dim, Operator, C64, ZERO};
use crate::error::{QsvError, Result};

/// Row-compressed complex operator.
///
/// Stabilizer projectors on many qubits have a handful of nonzeros per row,
/// so strategies with thousands of such tests stay small in memory.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseOperator {
    dims: Vec<usize>,
    rows: Vec<Vec<(usize, C64)>>,
}

impl SparseOperator {
    /// Entries per row are sorted by column, duplicates summed and exact
    /// zeros dropped.
    pub fn from_rows(dims: Vec<usize>, rows: Vec<Vec<(usize, C64)>>) -> Result<Self> {
        let d = total_dim(&dims)?;
        if rows.len() != d {
            return Err(QsvError::DimensionMismatch(format!(
                "{} rows for dims {:?}",
                rows.len(),
                dims
            )));
        }
        let mut clean = Vec::with_capacity(d);
        for mut row in rows {
            if row.iter().any(|&(c, _)| c >= d) {
                return Err(QsvError::invalid("sparse column index out of range"));
            }
            row.sort_by_key(|&(c, _)| c);
            let mut merged: Vec<(usize, C64)> = Vec::with_capacity(row.len());
            for (c, v) in row {
                match merged.last_mut() {
                    Some(last) if last.0 == c => last.1 += v,
                    _ => merged.push((c, v)),
                }
            }
            merged.retain(|&(_, v)| v != ZERO);
            clean.push(merged);
        }
        Ok(Self { dims, rows: clean })
    }

    pub fn identity(dims: &[usize]) -> Result<Self> {
        let d = total_dim(dims)?;
        Ok(Self {
            dims: dims.to_vec(),
            rows: (0..d).map(|i| vec![(i, C64::new(1.0, 0.0))]).collect(),
        })
    }

    pub fn from_dense(op: &Operator) -> Self {
        let m = op.matrix();
        let rows = (0..op.dim())
            .map(|i| {
                (0..op.dim())
                    .filter_map(|j| {
                        let v = m[(i, j)];
                        (v != ZERO).then_some((j, v))
                    })
                    .collect()
            })
            .collect();
        Self {
            dims: op.dims().to_vec(),
            rows,
        }
    }

    pub fn to_dense(&self) -> Operator {
        let d = self.dim();
        let mut m = DMatrix::from_element(d, d, ZERO);
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, v) in row {
                m[(i, j)] = v;
            }
        }
        Operator::new(self.dims.clone(), m).expect("dims validated at construction")
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn rows(&self) -> &[Vec<(usize, C64)>] {
        &self.rows
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.rows[row]
            .binary_search_by_key(&col, |&(c, _)| c)
            .map(|k| self.rows[row][k].1)
            .unwrap_or(ZERO)
    }

    pub fn apply(&self, v: &DVector<C64>) -> DVector<C64> {
        DVector::from_iterator(
            self.dim(),
            self.rows
                .iter()
                .map(|row| row.iter().fold(ZERO, |acc, &(j, a)| acc + a * v[j])),
        )
    }

    /// `acc += weight * self`.
    pub fn add_scaled_into(&self, acc: &mut DMatrix<C64>, weight: f64) {
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, v) in row {
                acc[(i, j)] += v * weight;
            }
        }
    }

    /// `Tr(self · rho)`.
    pub fn trace_with(&self, rho: &DMatrix<C64>) -> C64 {
        let mut acc = ZERO;
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, v) in row {
                acc += v * rho[(j, i)];
            }
        }
        acc
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim()).map(|i| self.get(i, i)).sum()
    }

    pub fn adjoint(&self) -> Self {
        let mut rows: Vec<Vec<(usize, C64)>> = vec![Vec::new(); self.dim()];
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, v) in row {
                rows[j].push((i, v.conj()));
            }
        }
        Self {
            dims: self.dims.clone(),
            rows,
        }
    }

    pub fn matmul(&self, other: &SparseOperator) -> Result<Self> {
        if self.dims != other.dims {
            return Err(QsvError::DimensionMismatch(format!(
                "sparse matmul: {:?} vs {:?}",
                self.dims, other.dims
            )));
        }
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let mut out: Vec<(usize, C64)> = Vec::new();
                for &(k, a) in row {
                    for &(j, b) in &other.rows[k] {
                        out.push((j, a * b));
                    }
                }
                out
            })
            .collect();
        Self::from_rows(self.dims.clone(), rows)
    }

    pub fn max_abs_diff(&self, other: &SparseOperator) -> f64 {
        if self.dims != other.dims {
            return f64::INFINITY;
        }
        let mut worst = 0.0f64;
        for (ra, rb) in self.rows.iter().zip(&other.rows) {
            let (mut x, mut y) = (0, 0);
            while x < ra.len() || y < rb.len() {
                let ca = ra.get(x).map_or(usize::MAX, |e| e.0);
                let cb = rb.get(y).map_or(usize::MAX, |e| e.0);
                let diff = if ca == cb {
                    x += 1;
                    y += 1;
                    ra[x - 1].1 - rb[y - 1].1
                } else if ca < cb {
                    x += 1;
                    ra[x - 1].1
                } else {
                    y += 1;
                    rb[y - 1].1
                };
                worst = worst.max(diff.norm());
            }
        }
        worst
    }

    pub fn max_asymmetry(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    /// Hermitian and idempotent within `tol`.
    pub fn is_projector(&self, tol: f64) -> bool {
        if self.max_asymmetry() > tol {
            return false;
        }
        match self.matmul(self) {
            Ok(sq) => sq.max_abs_diff(self) <= tol,
            Err(_) => false,
        }
    }
}
