use super::{hermitian_eigen, hermitian_trace_norm, CMatrix, DensityMatrix};
use crate::error::{Error, Result};

fn same_dim(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<()> {
    if rho.dim() == sigma.dim() {
        Ok(())
    } else {
        Err(Error::dims(rho.dim(), sigma.dim()))
    }
}

/// `½‖ρ − σ‖₁`
pub fn trace_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    same_dim(rho, sigma)?;
    Ok((0.5 * hermitian_trace_norm(&(rho.matrix() - sigma.matrix()))).clamp(0.0, 1.0))
}

/// `F(ρ, σ) = ‖√ρ √σ‖₁`, clamped to `[0, 1]`.
pub fn fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    same_dim(rho, sigma)?;
    Ok(fidelity_psd(rho.matrix(), sigma.matrix()).clamp(0.0, 1.0))
}

/// Eigenvalues at or below this multiple of `d·ε·λ_max` are treated as
/// round-off and dropped from the square-root factors.
const FACTOR_CUTOFF: f64 = 16.0;

/// `F` with `√λ`-scaled eigenvectors of `m`, keeping eigenvalues above the
/// round-off level, so that `m ≈ F F†`.
fn psd_factor(m: &CMatrix) -> CMatrix {
    let (vals, vecs) = hermitian_eigen(m);
    let top = vals.iter().copied().fold(0.0, f64::max);
    let cutoff = FACTOR_CUTOFF * m.nrows() as f64 * f64::EPSILON * top;
    let keep: Vec<usize> = (0..vals.len()).filter(|&i| vals[i] > cutoff).collect();
    CMatrix::from_fn(m.nrows(), keep.len(), |r, j| vecs[(r, keep[j])] * vals[keep[j]].sqrt())
}

/// Fidelity of two positive semidefinite matrices (not necessarily
/// normalized), as `‖A†B‖₁` with `a = AA†` and `b = BB†`. Taking singular
/// values of `A†B` avoids the square-root amplification of round-off that
/// `Tr √(√a b √a)` suffers on rank-deficient inputs.
pub(crate) fn fidelity_psd(a: &CMatrix, b: &CMatrix) -> f64 {
    let (fa, fb) = (psd_factor(a), psd_factor(b));
    if fa.ncols() == 0 || fb.ncols() == 0 {
        return 0.0;
    }
    (fa.adjoint() * fb).svd(false, false).singular_values.sum()
}

/// `arccos F(ρ, σ)` in `[0, π/2]`.
pub fn bures_angle(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    Ok(fidelity(rho, sigma)?.acos())
}

/// `√(2 − 2F) = 2 sin(θ/2)` with `θ` the Bures angle.
pub fn bures_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    Ok(2.0 * (bures_angle(rho, sigma)? / 2.0).sin())
}

/// `√(1 − F²) = sin θ`.
pub fn sine_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    Ok(bures_angle(rho, sigma)?.sin())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmat::PureState;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4};

    fn zero() -> DensityMatrix {
        DensityMatrix::basis(2, 0)
    }
    fn one() -> DensityMatrix {
        DensityMatrix::basis(2, 1)
    }
    fn plus() -> DensityMatrix {
        PureState::plus().density()
    }

    #[test]
    fn trace_distance_examples() {
        assert_abs_diff_eq!(trace_distance(&plus(), &plus()).unwrap(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(trace_distance(&zero(), &one()).unwrap(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(trace_distance(&zero(), &plus()).unwrap(), FRAC_1_SQRT_2, epsilon = 1e-12);
    }

    #[test]
    fn fidelity_examples() {
        assert_abs_diff_eq!(fidelity(&plus(), &plus()).unwrap(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(fidelity(&zero(), &one()).unwrap(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(fidelity(&zero(), &plus()).unwrap(), FRAC_1_SQRT_2, epsilon = 1e-12);
        let mixed = DensityMatrix::maximally_mixed(2);
        assert_abs_diff_eq!(fidelity(&mixed, &mixed).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn angle_examples() {
        assert_abs_diff_eq!(bures_angle(&zero(), &one()).unwrap(), FRAC_PI_2, epsilon = 1e-7);
        assert_abs_diff_eq!(bures_angle(&zero(), &plus()).unwrap(), FRAC_PI_4, epsilon = 1e-12);
        let th = FRAC_PI_4;
        assert_abs_diff_eq!(bures_distance(&zero(), &plus()).unwrap(), 2.0 * (th / 2.0).sin(), epsilon = 1e-12);
        assert_abs_diff_eq!(sine_distance(&zero(), &plus()).unwrap(), th.sin(), epsilon = 1e-12);
        let b = bures_distance(&zero(), &plus()).unwrap();
        assert_abs_diff_eq!(b, (2.0 - 2.0 * FRAC_1_SQRT_2).sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn identical_mixed_states_have_zero_angle() {
        let m = DensityMatrix::maximally_mixed(3);
        assert!(bures_angle(&m, &m).unwrap() < 1e-7);
    }

    #[test]
    fn dimension_mismatch() {
        let a = DensityMatrix::maximally_mixed(2);
        let b = DensityMatrix::maximally_mixed(3);
        assert!(trace_distance(&a, &b).is_err());
        assert!(fidelity(&a, &b).is_err());
    }
}
