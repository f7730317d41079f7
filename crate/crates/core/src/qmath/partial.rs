use nalgebra::DMatrix;

use super::{digits, flat_index, total_dim, Operator, PureState, ONE, ZERO};
use crate::error::{QsvError, Result};

/// Tensor product `a ⊗ b`; factor lists are concatenated.
pub fn kron(a: &Operator, b: &Operator) -> Result<Operator> {
    let mut dims = a.dims().to_vec();
    dims.extend_from_slice(b.dims());
    total_dim(&dims)?;
    Operator::new(dims, a.matrix().kronecker(b.matrix()))
}

/// Left-to-right tensor product of a nonempty list.
pub fn kron_all(ops: &[Operator]) -> Result<Operator> {
    let (first, rest) = ops
        .split_first()
        .ok_or_else(|| QsvError::invalid("kron_all of an empty list"))?;
    rest.iter().try_fold(first.clone(), |acc, op| kron(&acc, op))
}

pub fn kron_states(a: &PureState, b: &PureState) -> Result<PureState> {
    a.tensor(b)
}

/// Traces out every factor not listed in `keep`. The kept factors stay in
/// ascending order.
pub fn partial_trace(a: &Operator, keep: &[usize]) -> Result<Operator> {
    let dims = a.dims();
    let n = dims.len();
    let mut keep_sorted = keep.to_vec();
    keep_sorted.sort_unstable();
    keep_sorted.dedup();
    if keep_sorted.len() != keep.len() || keep_sorted.iter().any(|&k| k >= n) {
        return Err(QsvError::invalid(format!(
            "keep set {keep:?} is not a set of factor indices below {n}"
        )));
    }
    if keep_sorted.is_empty() {
        return Operator::new(vec![1], DMatrix::from_element(1, 1, a.trace()));
    }
    let traced: Vec<usize> = (0..n).filter(|i| !keep_sorted.contains(i)).collect();
    let kdims: Vec<usize> = keep_sorted.iter().map(|&i| dims[i]).collect();
    let tdims: Vec<usize> = traced.iter().map(|&i| dims[i]).collect();
    let dk: usize = kdims.iter().product();
    let dt: usize = tdims.iter().product();

    // compose[k * dt + t] is the full index with kept digits k and traced digits t.
    let mut compose = vec![0usize; dk * dt];
    let mut full = vec![0usize; n];
    for k in 0..dk {
        let kd = digits(k, &kdims);
        for (slot, &i) in keep_sorted.iter().enumerate() {
            full[i] = kd[slot];
        }
        for t in 0..dt {
            let td = digits(t, &tdims);
            for (slot, &i) in traced.iter().enumerate() {
                full[i] = td[slot];
            }
            compose[k * dt + t] = flat_index(&full, dims);
        }
    }

    let m = a.matrix();
    let out = DMatrix::from_fn(dk, dk, |r, c| {
        let mut acc = ZERO;
        for t in 0..dt {
            acc += m[(compose[r * dt + t], compose[c * dt + t])];
        }
        acc
    });
    Operator::new(kdims, out)
}

/// Transposes the chosen factor only. Applying it twice restores the input
/// exactly, since it only permutes entries.
pub fn partial_transpose(a: &Operator, factor: usize) -> Result<Operator> {
    let dims = a.dims();
    if factor >= dims.len() {
        return Err(QsvError::invalid(format!(
            "factor {factor} out of range for {} factors",
            dims.len()
        )));
    }
    let stride: usize = dims[factor + 1..].iter().product();
    let df = dims[factor];
    let digit = |i: usize| (i / stride) % df;
    let m = a.matrix();
    let d = a.dim();
    let out = DMatrix::from_fn(d, d, |r, c| {
        let (dr, dc) = (digit(r), digit(c));
        let src_r = r - dr * stride + dc * stride;
        let src_c = c - dc * stride + dr * stride;
        m[(src_r, src_c)]
    });
    Operator::new(dims.to_vec(), out)
}

/// `V|αβ⟩ = |βα⟩` on `d ⊗ d`.
pub fn swap_operator(d: usize) -> Result<Operator> {
    if d == 0 {
        return Err(QsvError::invalid("swap dimension must be positive"));
    }
    total_dim(&[d, d])?;
    let mut m = DMatrix::from_element(d * d, d * d, ZERO);
    for a in 0..d {
        for b in 0..d {
            m[(b * d + a, a * d + b)] = ONE;
        }
    }
    Operator::new(vec![d, d], m)
}
