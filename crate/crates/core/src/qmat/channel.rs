use super::{c, check_finite, identity, max_abs_diff, partial_trace, tensor, CMatrix, DensityMatrix, Subsystem, TOL_CPTP};
use crate::error::{Error, Result};

/// A CPTP map given by Kraus operators `Kᵢ: ℂ^dim_in → ℂ^dim_out` with
/// `Σ Kᵢ†Kᵢ = I`.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausChannel {
    dim_in: usize,
    dim_out: usize,
    kraus: Vec<CMatrix>,
}

impl KrausChannel {
    pub fn new(kraus: Vec<CMatrix>) -> Result<Self> {
        let first = kraus
            .first()
            .ok_or_else(|| Error::InvalidParameter("channel needs at least one Kraus operator".into()))?;
        let (dim_out, dim_in) = first.shape();
        for k in &kraus {
            check_finite(k)?;
            if k.shape() != (dim_out, dim_in) {
                return Err(Error::dims(
                    format!("{dim_out}x{dim_in}"),
                    format!("{}x{}", k.nrows(), k.ncols()),
                ));
            }
        }
        let ch = KrausChannel { dim_in, dim_out, kraus };
        let dev = ch.trace_preservation_error();
        if dev > TOL_CPTP {
            return Err(Error::NotTracePreserving(dev));
        }
        Ok(ch)
    }

    pub fn identity(dim: usize) -> Self {
        KrausChannel {
            dim_in: dim,
            dim_out: dim,
            kraus: vec![identity(dim)],
        }
    }

    /// `ρ ↦ UρU†`; `u` must be unitary within `TOL_CPTP`.
    pub fn unitary(u: CMatrix) -> Result<Self> {
        check_finite(&u)?;
        if !u.is_square() {
            return Err(Error::dims("square matrix", format!("{}x{}", u.nrows(), u.ncols())));
        }
        let dev = max_abs_diff(&(u.adjoint() * &u), &identity(u.nrows()));
        if dev > TOL_CPTP {
            return Err(Error::NotUnitary(dev));
        }
        Ok(KrausChannel {
            dim_in: u.ncols(),
            dim_out: u.nrows(),
            kraus: vec![u],
        })
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn kraus(&self) -> &[CMatrix] {
        &self.kraus
    }

    /// Max entrywise deviation of `Σ Kᵢ†Kᵢ` from the identity.
    pub fn trace_preservation_error(&self) -> f64 {
        let sum = self
            .kraus
            .iter()
            .fold(CMatrix::zeros(self.dim_in, self.dim_in), |acc, k| acc + k.adjoint() * k);
        max_abs_diff(&sum, &identity(self.dim_in))
    }

    /// Applies the channel to an arbitrary operator on the input space.
    pub fn apply_operator(&self, m: &CMatrix) -> CMatrix {
        self.kraus
            .iter()
            .fold(CMatrix::zeros(self.dim_out, self.dim_out), |acc, k| acc + k * m * k.adjoint())
    }

    /// `𝒪 ⊗ id_R` with `dim(R) = dim_ref`.
    pub fn with_reference(&self, dim_ref: usize) -> KrausChannel {
        channel_tensor(self, &KrausChannel::identity(dim_ref))
    }

    /// Applies `𝒪 ⊗ id_R` to an operator on `A ⊗ R` without materializing
    /// the enlarged Kraus set.
    pub fn apply_with_reference(&self, m: &CMatrix, dim_ref: usize) -> CMatrix {
        let (din, dout) = (self.dim_in, self.dim_out);
        let mut out = CMatrix::zeros(dout * dim_ref, dout * dim_ref);
        // (K ⊗ I) M (K ⊗ I)†, blockwise over the reference indices.
        for k in &self.kraus {
            let mut left = CMatrix::zeros(dout * dim_ref, din * dim_ref);
            for b in 0..dout {
                for a in 0..din {
                    let kv = k[(b, a)];
                    if kv == c(0.0, 0.0) {
                        continue;
                    }
                    for r in 0..dim_ref {
                        for col in 0..din * dim_ref {
                            left[(b * dim_ref + r, col)] += kv * m[(a * dim_ref + r, col)];
                        }
                    }
                }
            }
            for b in 0..dout {
                for a in 0..din {
                    let kv = k[(b, a)].conj();
                    if kv == c(0.0, 0.0) {
                        continue;
                    }
                    for r in 0..dim_ref {
                        for row in 0..dout * dim_ref {
                            out[(row, b * dim_ref + r)] += left[(row, a * dim_ref + r)] * kv;
                        }
                    }
                }
            }
        }
        out
    }
}

/// `Σᵢ Kᵢ ρ Kᵢ†`
pub fn apply_channel(ch: &KrausChannel, rho: &DensityMatrix) -> Result<DensityMatrix> {
    if rho.dim() != ch.dim_in {
        return Err(Error::dims(ch.dim_in, rho.dim()));
    }
    Ok(DensityMatrix::from_trusted(ch.apply_operator(rho.matrix())))
}

/// Kraus set `{Kᵢ ⊗ Lⱼ}` of `a ⊗ b`.
pub fn channel_tensor(a: &KrausChannel, b: &KrausChannel) -> KrausChannel {
    let kraus = a
        .kraus
        .iter()
        .flat_map(|ka| b.kraus.iter().map(move |kb| tensor(ka, kb)))
        .collect();
    KrausChannel {
        dim_in: a.dim_in * b.dim_in,
        dim_out: a.dim_out * b.dim_out,
        kraus,
    }
}

/// An isometry `V: A → B ⊗ E` (output factor first) with `V†V = I`.
#[derive(Debug, Clone, PartialEq)]
pub struct StinespringIsometry {
    dim_in: usize,
    dim_out: usize,
    dim_env: usize,
    matrix: CMatrix,
}

impl StinespringIsometry {
    pub fn new(matrix: CMatrix, dim_out: usize, dim_env: usize) -> Result<Self> {
        check_finite(&matrix)?;
        if matrix.nrows() != dim_out * dim_env {
            return Err(Error::dims(dim_out * dim_env, matrix.nrows()));
        }
        let dim_in = matrix.ncols();
        let dev = max_abs_diff(&(matrix.adjoint() * &matrix), &identity(dim_in));
        if dev > TOL_CPTP {
            return Err(Error::NotIsometry(dev));
        }
        Ok(StinespringIsometry {
            dim_in,
            dim_out,
            dim_env,
            matrix,
        })
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn dim_env(&self) -> usize {
        self.dim_env
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// Row of `V` for output index `b` and environment index `e`.
    pub fn row_index(&self, b: usize, e: usize) -> usize {
        b * self.dim_env + e
    }

    /// `ρ ↦ Tr_E(VρV†)`
    pub fn apply(&self, rho: &CMatrix) -> Result<CMatrix> {
        if rho.nrows() != self.dim_in || rho.ncols() != self.dim_in {
            return Err(Error::dims(self.dim_in, rho.nrows()));
        }
        let full = &self.matrix * rho * self.matrix.adjoint();
        partial_trace(&full, (self.dim_out, self.dim_env), Subsystem::First)
    }

    /// Embeds the environment into a larger one by appending zero rows for
    /// the extra environment basis states.
    pub fn padded(&self, dim_env: usize) -> Result<StinespringIsometry> {
        if dim_env < self.dim_env {
            return Err(Error::dims(format!(">= {}", self.dim_env), dim_env));
        }
        let mut m = CMatrix::zeros(self.dim_out * dim_env, self.dim_in);
        for b in 0..self.dim_out {
            for e in 0..self.dim_env {
                m.row_mut(b * dim_env + e).copy_from(&self.matrix.row(self.row_index(b, e)));
            }
        }
        Ok(StinespringIsometry {
            dim_in: self.dim_in,
            dim_out: self.dim_out,
            dim_env,
            matrix: m,
        })
    }

    pub fn to_kraus(&self) -> KrausChannel {
        let kraus = (0..self.dim_env)
            .map(|e| CMatrix::from_fn(self.dim_out, self.dim_in, |b, a| self.matrix[(self.row_index(b, e), a)]))
            .collect();
        KrausChannel {
            dim_in: self.dim_in,
            dim_out: self.dim_out,
            kraus,
        }
    }
}

/// `V|ψ⟩ = Σᵢ (Kᵢ|ψ⟩) ⊗ |i⟩_E`
pub fn stinespring_from_kraus(ch: &KrausChannel) -> StinespringIsometry {
    let dim_env = ch.kraus.len();
    let mut m = CMatrix::zeros(ch.dim_out * dim_env, ch.dim_in);
    for (e, k) in ch.kraus.iter().enumerate() {
        for b in 0..ch.dim_out {
            m.row_mut(b * dim_env + e).copy_from(&k.row(b));
        }
    }
    StinespringIsometry {
        dim_in: ch.dim_in,
        dim_out: ch.dim_out,
        dim_env,
        matrix: m,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmat::random::{random_channel, random_density};
    use crate::qmat::{basis, outer};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn adc(r: f64) -> KrausChannel {
        KrausChannel::new(vec![
            CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c((1.0 - r).sqrt(), 0.0)]),
            CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(r.sqrt(), 0.0), c(0.0, 0.0), c(0.0, 0.0)]),
        ])
        .unwrap()
    }

    #[test]
    fn rejects_non_trace_preserving() {
        let k = identity(2).scale(0.9);
        assert!(matches!(KrausChannel::new(vec![k]), Err(Error::NotTracePreserving(_))));
        assert!(KrausChannel::new(vec![]).is_err());
        assert!(KrausChannel::new(vec![identity(2), CMatrix::zeros(3, 2)]).is_err());
    }

    #[test]
    fn identity_channel_is_noop() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let rho = random_density(&mut rng, 3);
        let out = apply_channel(&KrausChannel::identity(3), &rho).unwrap();
        assert!(max_abs_diff(out.matrix(), rho.matrix()) < 1e-15);
    }

    #[test]
    fn damping_of_excited_state() {
        let r = 0.3;
        let out = apply_channel(&adc(r), &DensityMatrix::basis(2, 1)).unwrap();
        let expect = outer(&basis(2, 1)).scale(1.0 - r) + outer(&basis(2, 0)).scale(r);
        assert!(max_abs_diff(out.matrix(), &expect) < 1e-15);
    }

    #[test]
    fn apply_channel_dimension_error() {
        assert!(apply_channel(&adc(0.1), &DensityMatrix::maximally_mixed(3)).is_err());
    }

    #[test]
    fn random_channel_outputs_are_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let ch = random_channel(&mut rng, 3, 2, 4);
            let rho = random_density(&mut rng, 3);
            let out = apply_channel(&ch, &rho).unwrap();
            assert!((crate::qmat::trace(out.matrix()).re - 1.0).abs() < 1e-12);
            assert!(DensityMatrix::new(out.into_matrix()).is_ok());
        }
    }

    #[test]
    fn stinespring_identity_has_trivial_env() {
        let v = stinespring_from_kraus(&KrausChannel::identity(2));
        assert_eq!(v.dim_env(), 1);
        assert!(max_abs_diff(v.matrix(), &identity(2)) < 1e-15);
    }

    #[test]
    fn stinespring_of_damping_matches_dilation() {
        // (|0⟩⟨0| + √(1-r)|1⟩⟨1|) ⊗ |0⟩_E + √r |0⟩⟨1| ⊗ |1⟩_E
        let r: f64 = 0.37;
        let v = stinespring_from_kraus(&adc(r));
        let e0 = CMatrix::from_column_slice(2, 1, basis(2, 0).as_slice());
        let e1 = CMatrix::from_column_slice(2, 1, basis(2, 1).as_slice());
        let k0 = CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c((1.0 - r).sqrt(), 0.0)]);
        let k1 = CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(r.sqrt(), 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        let expect = tensor(&k0, &e0) + tensor(&k1, &e1);
        assert!(max_abs_diff(v.matrix(), &expect) < 1e-15);
        assert!(StinespringIsometry::new(v.matrix().clone(), 2, 2).is_ok());
    }

    #[test]
    fn stinespring_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let ch = random_channel(&mut rng, 4, 4, 3);
            let rho = random_density(&mut rng, 4);
            let v = stinespring_from_kraus(&ch);
            let via_v = v.apply(rho.matrix()).unwrap();
            let direct = apply_channel(&ch, &rho).unwrap();
            assert!(max_abs_diff(&via_v, direct.matrix()) < 1e-12);
            assert_eq!(v.to_kraus(), ch);
            let padded = v.padded(5).unwrap();
            assert!(max_abs_diff(&padded.apply(rho.matrix()).unwrap(), direct.matrix()) < 1e-12);
        }
    }

    #[test]
    fn tensor_channel_examples() {
        let idid = channel_tensor(&KrausChannel::identity(2), &KrausChannel::identity(3));
        assert_eq!(idid.kraus().len(), 1);
        assert!(max_abs_diff(&idid.kraus()[0], &identity(6)) < 1e-15);

        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let rho = random_density(&mut rng, 2);
        let sigma = random_density(&mut rng, 2);
        let ch = channel_tensor(&adc(0.4), &KrausChannel::identity(2));
        let lhs = ch.apply_operator(&tensor(rho.matrix(), sigma.matrix()));
        let rhs = tensor(apply_channel(&adc(0.4), &rho).unwrap().matrix(), sigma.matrix());
        assert!(max_abs_diff(&lhs, &rhs) < 1e-14);
    }

    #[test]
    fn apply_with_reference_matches_tensor() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let ch = random_channel(&mut rng, 2, 3, 2);
        let rho = random_density(&mut rng, 4);
        let a = ch.apply_with_reference(rho.matrix(), 2);
        let b = ch.with_reference(2).apply_operator(rho.matrix());
        assert!(max_abs_diff(&a, &b) < 1e-13);
    }
}
