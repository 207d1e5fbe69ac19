//! Dense complex linear algebra, quantum states and channels, and the
//! fidelity-based distance measures.
//!
//! Tensor products are left-factor-major throughout: in `a ⊗ b` the index of
//! `a` varies slowest, matching [`nalgebra::Matrix::kronecker`].

mod channel;
mod distance;
pub mod random;
pub mod serial;
mod state;

pub use channel::{apply_channel, channel_tensor, stinespring_from_kraus, KrausChannel, StinespringIsometry};
pub use distance::{bures_angle, bures_distance, fidelity, sine_distance, trace_distance};
pub(crate) use distance::fidelity_psd;
pub use state::{DensityMatrix, PureState};

use nalgebra::{DMatrix, DVector};
pub use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub const TOL_HERM: f64 = 1e-9;
pub const TOL_TRACE: f64 = 1e-9;
pub const TOL_PSD: f64 = 1e-8;
pub const TOL_CPTP: f64 = 1e-9;

/// Which factor of a bipartite space to keep in [`partial_trace`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    First,
    Second,
}

pub(crate) fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn check_finite(m: &CMatrix) -> Result<()> {
    if m.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite)
    }
}

/// Largest entrywise deviation `|m - m†|`.
pub fn hermitian_deviation(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// Eigen-decomposition of a Hermitian matrix; only the upper triangle's
/// Hermitian part is trusted.
pub fn hermitian_eigen(m: &CMatrix) -> (DVector<f64>, CMatrix) {
    let eig = hermitian_part(m).symmetric_eigen();
    (eig.eigenvalues, eig.eigenvectors)
}

pub fn hermitian_eigenvalues(m: &CMatrix) -> DVector<f64> {
    hermitian_part(m).symmetric_eigenvalues()
}

/// Principal square root of a positive semidefinite matrix. Small negative
/// eigenvalues from round-off are clamped to zero.
pub fn psd_sqrt(m: &CMatrix) -> CMatrix {
    let (vals, vecs) = hermitian_eigen(m);
    let roots = DVector::from_iterator(vals.len(), vals.iter().map(|&v| c(v.max(0.0).sqrt(), 0.0)));
    &vecs * CMatrix::from_diagonal(&roots) * vecs.adjoint()
}

/// Sum of singular values.
pub fn trace_norm(m: &CMatrix) -> Result<f64> {
    check_finite(m)?;
    if m.is_empty() {
        return Ok(0.0);
    }
    Ok(m.clone().svd(false, false).singular_values.sum())
}

/// Trace norm of a Hermitian matrix as the sum of absolute eigenvalues.
/// Cheaper than the SVD route; used in the brute-force search loops.
pub fn hermitian_trace_norm(m: &CMatrix) -> f64 {
    hermitian_eigenvalues(m).iter().map(|v| v.abs()).sum()
}

pub fn trace(m: &CMatrix) -> C64 {
    m.diagonal().sum()
}

pub fn tensor(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn identity(d: usize) -> CMatrix {
    CMatrix::identity(d, d)
}

/// Partial trace of an operator on `d1 ⊗ d2`, keeping `keep`.
pub fn partial_trace(m: &CMatrix, dims: (usize, usize), keep: Subsystem) -> Result<CMatrix> {
    let (d1, d2) = dims;
    let n = d1 * d2;
    if m.nrows() != n || m.ncols() != n {
        return Err(Error::dims(format!("{n}x{n}"), format!("{}x{}", m.nrows(), m.ncols())));
    }
    let out = match keep {
        Subsystem::First => CMatrix::from_fn(d1, d1, |i, j| (0..d2).map(|k| m[(i * d2 + k, j * d2 + k)]).sum()),
        Subsystem::Second => CMatrix::from_fn(d2, d2, |i, j| (0..d1).map(|k| m[(k * d2 + i, k * d2 + j)]).sum()),
    };
    Ok(out)
}

/// `|ψ⟩⟨ψ|`
pub fn outer(v: &CVector) -> CMatrix {
    v * v.adjoint()
}

/// Computational basis vector `|i⟩` of dimension `d`.
pub fn basis(d: usize, i: usize) -> CVector {
    let mut v = CVector::zeros(d);
    v[i] = c(1.0, 0.0);
    v
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}
