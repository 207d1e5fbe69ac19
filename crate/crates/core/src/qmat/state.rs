use super::{c, check_finite, hermitian_deviation, hermitian_eigenvalues, hermitian_part, outer, trace, CMatrix, CVector};
use super::{TOL_HERM, TOL_PSD, TOL_TRACE};
use crate::error::{Error, Result};

/// A validated density operator: Hermitian, positive semidefinite, unit trace.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: CMatrix,
}

impl DensityMatrix {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        check_finite(&matrix)?;
        if !matrix.is_square() {
            return Err(Error::dims("square matrix", format!("{}x{}", matrix.nrows(), matrix.ncols())));
        }
        let dev = hermitian_deviation(&matrix);
        if dev > TOL_HERM {
            return Err(Error::NotHermitian(dev));
        }
        let matrix = hermitian_part(&matrix);
        let tr = trace(&matrix).re;
        if (tr - 1.0).abs() > TOL_TRACE {
            return Err(Error::BadTrace(tr));
        }
        let min_eig = hermitian_eigenvalues(&matrix).min();
        if min_eig < -TOL_PSD {
            return Err(Error::NotPsd(min_eig));
        }
        Ok(DensityMatrix { matrix })
    }

    /// Wraps a matrix known to be a state up to round-off (e.g. the output of
    /// a CPTP map); only the Hermitian part is kept.
    pub(crate) fn from_trusted(matrix: CMatrix) -> Self {
        DensityMatrix {
            matrix: hermitian_part(&matrix),
        }
    }

    pub fn pure(state: &PureState) -> Self {
        DensityMatrix::from_trusted(outer(state.amplitudes()))
    }

    pub fn basis(dim: usize, i: usize) -> Self {
        DensityMatrix::pure(&PureState::basis(dim, i))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        DensityMatrix {
            matrix: CMatrix::identity(dim, dim).scale(1.0 / dim as f64),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    /// Convex combination `Σ wᵢ ρᵢ`; weights must be a probability vector.
    pub fn mixture(weights: &[f64], states: &[DensityMatrix]) -> Result<Self> {
        if weights.len() != states.len() || states.is_empty() {
            return Err(Error::dims(states.len(), weights.len()));
        }
        let dim = states[0].dim();
        let mut acc = CMatrix::zeros(dim, dim);
        for (w, s) in weights.iter().zip(states) {
            if s.dim() != dim {
                return Err(Error::dims(dim, s.dim()));
            }
            acc += s.matrix.scale(*w);
        }
        DensityMatrix::new(acc)
    }
}

impl TryFrom<CMatrix> for DensityMatrix {
    type Error = Error;

    fn try_from(m: CMatrix) -> Result<Self> {
        DensityMatrix::new(m)
    }
}

impl From<DensityMatrix> for CMatrix {
    fn from(d: DensityMatrix) -> CMatrix {
        d.matrix
    }
}

/// A unit state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: CVector,
}

impl PureState {
    pub fn new(amplitudes: CVector) -> Result<Self> {
        if !amplitudes.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > TOL_TRACE {
            return Err(Error::BadNorm(norm));
        }
        Ok(PureState { amplitudes })
    }

    /// Normalizes an arbitrary nonzero vector.
    pub fn normalized(v: CVector) -> Result<Self> {
        let norm = v.norm();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::BadNorm(norm));
        }
        PureState::new(v.unscale(norm))
    }

    pub fn basis(dim: usize, i: usize) -> Self {
        PureState {
            amplitudes: super::basis(dim, i),
        }
    }

    /// `(|0⟩ + |1⟩)/√2`
    pub fn plus() -> Self {
        let s = 0.5f64.sqrt();
        PureState {
            amplitudes: CVector::from_vec(vec![c(s, 0.0), c(s, 0.0)]),
        }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn density(&self) -> DensityMatrix {
        DensityMatrix::pure(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_invalid_states() {
        let not_herm = CMatrix::from_row_slice(2, 2, &[c(0.5, 0.0), c(0.1, 0.0), c(0.2, 0.0), c(0.5, 0.0)]);
        assert!(matches!(DensityMatrix::new(not_herm), Err(Error::NotHermitian(_))));

        let bad_trace = CMatrix::identity(2, 2);
        assert!(matches!(DensityMatrix::new(bad_trace), Err(Error::BadTrace(_))));

        let negative = CMatrix::from_row_slice(2, 2, &[c(1.5, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-0.5, 0.0)]);
        assert!(matches!(DensityMatrix::new(negative), Err(Error::NotPsd(_))));

        let rect = CMatrix::zeros(2, 3);
        assert!(matches!(DensityMatrix::new(rect), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn pure_state_norm_checked() {
        let v = CVector::from_vec(vec![c(1.0, 0.0), c(1.0, 0.0)]);
        assert!(matches!(PureState::new(v.clone()), Err(Error::BadNorm(_))));
        let p = PureState::normalized(v).unwrap();
        assert!((p.amplitudes().norm() - 1.0).abs() < 1e-15);
    }
}
