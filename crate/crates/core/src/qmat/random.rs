//! Random states, unitaries and channels for tests and the brute-force
//! verifiers. All generators draw from a caller-supplied RNG so results are
//! seed-reproducible.

use rand::Rng;
use rand_distr::StandardNormal;

use super::{c, CMatrix, CVector, DensityMatrix, KrausChannel, PureState, StinespringIsometry};

pub fn ginibre<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| c(rng.sample(StandardNormal), rng.sample(StandardNormal)))
}

pub fn random_vector<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> CVector {
    CVector::from_fn(dim, |_, _| c(rng.sample(StandardNormal), rng.sample(StandardNormal)))
}

/// Haar-random pure state.
pub fn random_pure_state<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> PureState {
    PureState::normalized(random_vector(rng, dim)).expect("gaussian vector is nonzero")
}

/// Full-rank density matrix from the Hilbert-Schmidt ensemble.
pub fn random_density<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> DensityMatrix {
    let g = ginibre(rng, dim, dim);
    let m = &g * g.adjoint();
    let tr = super::trace(&m).re;
    DensityMatrix::from_trusted(m.unscale(tr))
}

/// Random density matrix of a prescribed rank.
pub fn random_density_rank<R: Rng + ?Sized>(rng: &mut R, dim: usize, rank: usize) -> DensityMatrix {
    let g = ginibre(rng, dim, rank.max(1));
    let m = &g * g.adjoint();
    let tr = super::trace(&m).re;
    DensityMatrix::from_trusted(m.unscale(tr))
}

pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> CMatrix {
    super::hermitian_part(&ginibre(rng, dim, dim))
}

/// Matrix with orthonormal columns obtained from the QR decomposition of a
/// Ginibre matrix (phases of `R`'s diagonal fixed so the law is Haar).
pub fn random_isometry<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    assert!(rows >= cols, "isometry needs rows >= cols");
    let qr = ginibre(rng, rows, cols).qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..cols {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { c(1.0, 0.0) };
        for i in 0..rows {
            q[(i, j)] *= phase;
        }
    }
    q
}

pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> CMatrix {
    random_isometry(rng, dim, dim)
}

/// Random channel with `n_kraus` Kraus operators, drawn through a random
/// Stinespring isometry.
pub fn random_channel<R: Rng + ?Sized>(rng: &mut R, dim_in: usize, dim_out: usize, n_kraus: usize) -> KrausChannel {
    let v = random_isometry(rng, dim_out * n_kraus, dim_in);
    StinespringIsometry::new(v, dim_out, n_kraus)
        .expect("QR columns are orthonormal")
        .to_kraus()
}
