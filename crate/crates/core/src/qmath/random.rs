//! Haar-random unitaries, states and density operators.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use super::{total_dim, Operator, PureState, C64};
use crate::error::Result;

fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> DMatrix<C64> {
    DMatrix::from_fn(rows, cols, |_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

/// Haar unitary on a single factor of dimension `d`.
pub fn haar_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<Operator> {
    total_dim(&[d])?;
    let qr = ginibre(d, d, rng).qr();
    let r = qr.r();
    let mut q = qr.q();
    // Fix the phase freedom of QR so the distribution is Haar.
    for k in 0..d {
        let rkk = r[(k, k)];
        let phase = if rkk.norm() > 0.0 { rkk / rkk.norm() } else { C64::new(1.0, 0.0) };
        for i in 0..d {
            q[(i, k)] *= phase;
        }
    }
    Operator::new(vec![d], q)
}

pub fn haar_state<R: Rng + ?Sized>(dims: &[usize], rng: &mut R) -> Result<PureState> {
    let d = total_dim(dims)?;
    let v = DVector::from_fn(d, |_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    PureState::normalized(dims.to_vec(), v)
}

/// Random density operator `G G† / Tr(G G†)` with a `d × rank` Ginibre `G`.
pub fn random_density<R: Rng + ?Sized>(dims: &[usize], rank: usize, rng: &mut R) -> Result<Operator> {
    let d = total_dim(dims)?;
    let g = ginibre(d, rank.max(1), rng);
    let rho = &g * g.adjoint();
    let tr = rho.trace().re;
    Operator::new(dims.to_vec(), rho.unscale(tr))
}
