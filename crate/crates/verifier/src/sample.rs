//! Random states, projectors, unitaries and channels.
//!
//! Every trial owns a ChaCha8 stream selected by `(seed, trial index)`, so
//! results do not depend on scheduling.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::state::{CMatrix, CVector, ChannelRep, DensityMatrix};
use crate::Result;

pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn normal_c<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Matrix of i.i.d. standard complex Gaussians.
pub fn ginibre<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    DMatrix::from_fn(rows, cols, |_, _| normal_c(rng))
}

pub fn random_vector<R: Rng + ?Sized>(rng: &mut R, d: usize) -> CVector {
    let v = CVector::from_fn(d, |_, _| normal_c(rng));
    let n = v.norm();
    v.unscale(n)
}

/// `G G† / Tr(G G†)` with `G` of size `d × rank`.
pub fn random_state_rank<R: Rng + ?Sized>(rng: &mut R, dims: &[usize], rank: usize) -> Result<DensityMatrix> {
    let d: usize = dims.iter().product();
    let g = ginibre(rng, d, rank.max(1));
    let m = &g * g.adjoint();
    let tr = m.trace().re;
    DensityMatrix::new(m.unscale(tr), dims.to_vec())
}

/// Full-rank Ginibre state.
pub fn random_state<R: Rng + ?Sized>(rng: &mut R, dims: &[usize]) -> Result<DensityMatrix> {
    let d = dims.iter().product();
    random_state_rank(rng, dims, d)
}

/// Rank drawn uniformly from `1..=d`.
pub fn random_state_any_rank<R: Rng + ?Sized>(rng: &mut R, dims: &[usize]) -> Result<DensityMatrix> {
    let d: usize = dims.iter().product();
    let rank = rng.random_range(1..=d);
    random_state_rank(rng, dims, rank)
}

pub fn random_pure<R: Rng + ?Sized>(rng: &mut R, dims: &[usize]) -> Result<DensityMatrix> {
    let d = dims.iter().product();
    DensityMatrix::pure(&random_vector(rng, d), dims.to_vec())
}

/// Orthonormal columns from the QR factorization of a `rows × cols`
/// Ginibre matrix, with phases fixed so the distribution is Haar.
pub fn random_isometry_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    let qr = ginibre(rng, rows, cols).qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..cols.min(rows) {
        let d = r[(j, j)];
        if d.norm() > 0.0 {
            let phase = d / d.norm();
            for i in 0..rows {
                q[(i, j)] *= phase;
            }
        }
    }
    q
}

pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, d: usize) -> CMatrix {
    random_isometry_matrix(rng, d, d)
}

/// Orthogonal projector of the given rank onto a Haar-random subspace.
pub fn random_projector<R: Rng + ?Sized>(rng: &mut R, d: usize, rank: usize) -> CMatrix {
    if rank == 0 {
        return CMatrix::zeros(d, d);
    }
    let u = random_isometry_matrix(rng, d, rank.min(d));
    &u * u.adjoint()
}

/// Channel `d_in → d_out` with environment `d_env`; needs `d_in ≤ d_out·d_env`.
pub fn random_channel<R: Rng + ?Sized>(rng: &mut R, d_in: usize, d_out: usize, d_env: usize) -> Result<ChannelRep> {
    let v = random_isometry_matrix(rng, d_out * d_env, d_in);
    ChannelRep::new(v, d_in, d_out, d_env)
}

/// `U diag(levels) U†` with Haar `U`.
pub fn random_hamiltonian<R: Rng + ?Sized>(rng: &mut R, levels: &[f64]) -> CMatrix {
    let u = random_unitary(rng, levels.len());
    let d = CMatrix::from_diagonal(&CVector::from_iterator(
        levels.len(),
        levels.iter().map(|&l| Complex64::new(l, 0.0)),
    ));
    &u * d * u.adjoint()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::trace;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: f64 = trial_rng(7, 3).sample(StandardNormal);
        let b: f64 = trial_rng(7, 3).sample(StandardNormal);
        let c: f64 = trial_rng(7, 4).sample(StandardNormal);
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn samplers_respect_invariants() {
        let mut rng = trial_rng(1, 0);
        for d in 1..7 {
            let u = random_unitary(&mut rng, d);
            let defect = (u.adjoint() * &u - CMatrix::identity(d, d)).norm();
            assert!(defect < 1e-12);
            for r in 0..=d {
                let p = random_projector(&mut rng, d, r);
                assert!((&p * &p - &p).norm() < 1e-12);
                assert!((trace(&p).re - r as f64).abs() < 1e-12);
            }
            let rho = random_state_any_rank(&mut rng, &[d]).unwrap();
            assert!((trace(rho.matrix()).re - 1.0).abs() < 1e-12);
        }
        let ch = random_channel(&mut rng, 8, 4, 4).unwrap();
        assert_eq!(ch.kraus().len(), 4);
    }
}
