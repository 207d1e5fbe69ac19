use std::fmt;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qmat::{c, CMatrix, C64};

/// Sparse real symmetric matrix stored as its upper triangle (`row <= col`).
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SymMatrix {
    pub dim: usize,
    pub entries: Vec<(usize, usize, f64)>,
}

impl SymMatrix {
    pub fn new(dim: usize) -> Self {
        SymMatrix { dim, entries: Vec::new() }
    }

    /// Upper triangle of a dense symmetric matrix, dropping exact zeros.
    pub fn from_dense(m: &DMatrix<f64>) -> Self {
        let dim = m.nrows();
        let mut entries = Vec::new();
        for j in 0..dim {
            for i in 0..=j {
                let v = 0.5 * (m[(i, j)] + m[(j, i)]);
                if v != 0.0 {
                    entries.push((i, j, v));
                }
            }
        }
        SymMatrix { dim, entries }
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for &(i, j, v) in &self.entries {
            m[(i, j)] += v;
            if i != j {
                m[(j, i)] += v;
            }
        }
        m
    }

    /// Frobenius inner product with a dense symmetric matrix.
    pub fn dot(&self, x: &DMatrix<f64>) -> f64 {
        self.entries
            .iter()
            .map(|&(i, j, v)| if i == j { v * x[(i, i)] } else { v * (x[(i, j)] + x[(j, i)]) })
            .sum()
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.entries.iter().all(|e| e.2.abs() <= tol)
    }
}

/// One linear equality `Σ_b ⟨A_b, X_b⟩ = rhs`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Constraint {
    pub terms: Vec<(usize, SymMatrix)>,
    pub rhs: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sense {
    Minimize,
    Maximize,
}

/// Which of the program families produced a problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Formulation {
    MinTraceNorm,
    MinAvgTraceNorm,
    WeightedDiamondNorm,
    AvgWeightedDiamond,
    Custom,
}

impl fmt::Display for Formulation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Formulation::MinTraceNorm => "min_trace_norm",
            Formulation::MinAvgTraceNorm => "min_avg_trace_norm",
            Formulation::WeightedDiamondNorm => "weighted_diamond_norm",
            Formulation::AvgWeightedDiamond => "avg_weighted_diamond",
            Formulation::Custom => "custom",
        };
        f.write_str(s)
    }
}

/// A conic program over a product of real symmetric PSD cones:
/// optimize `Σ_b ⟨C_b, X_b⟩` subject to linear equalities and `X_b ⪰ 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SdpProblem {
    pub formulation: Formulation,
    pub sense: Sense,
    pub block_sizes: Vec<usize>,
    pub objective: Vec<(usize, SymMatrix)>,
    pub constraints: Vec<Constraint>,
}

impl SdpProblem {
    pub fn validate(&self) -> Result<()> {
        let check = |block: usize, m: &SymMatrix, what: &str| -> Result<()> {
            let size = *self
                .block_sizes
                .get(block)
                .ok_or_else(|| Error::InvalidParameter(format!("{what} references undeclared block {block}")))?;
            if m.dim != size {
                return Err(Error::dims(format!("block {block} of size {size}"), format!("{what} of size {}", m.dim)));
            }
            for &(i, j, v) in &m.entries {
                if i > j || j >= size {
                    return Err(Error::InvalidParameter(format!("{what}: entry ({i},{j}) outside upper triangle of block {block}")));
                }
                if !v.is_finite() {
                    return Err(Error::NonFinite);
                }
            }
            Ok(())
        };
        for (b, m) in &self.objective {
            check(*b, m, "objective")?;
        }
        for (k, con) in self.constraints.iter().enumerate() {
            if !con.rhs.is_finite() {
                return Err(Error::NonFinite);
            }
            for (b, m) in &con.terms {
                check(*b, m, &format!("constraint {k}"))?;
            }
        }
        Ok(())
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn objective_value(&self, blocks: &[DMatrix<f64>]) -> f64 {
        self.objective.iter().map(|(b, m)| m.dot(&blocks[*b])).sum()
    }

    /// Largest absolute residual of the equality constraints at `blocks`.
    pub fn max_constraint_residual(&self, blocks: &[DMatrix<f64>]) -> f64 {
        self.constraints
            .iter()
            .map(|con| (con.terms.iter().map(|(b, m)| m.dot(&blocks[*b])).sum::<f64>() - con.rhs).abs())
            .fold(0.0, f64::max)
    }

    /// Self-describing JSON for external checking.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("problem is serializable")
    }

    pub fn write_json(&self, path: &std::path::Path) -> std::io::Result<()> {
        std::fs::write(path, self.to_json())
    }
}

/// `h ↦ [[Re h, −Im h], [Im h, Re h]]`. The map is a real *-homomorphism:
/// symmetric iff `h` Hermitian, PSD iff `h` PSD, and `Tr = 2 Re Tr h`.
pub fn embed_hermitian(h: &CMatrix) -> Result<DMatrix<f64>> {
    if !h.is_square() {
        return Err(Error::dims("square matrix", format!("{}x{}", h.nrows(), h.ncols())));
    }
    Ok(embed(h))
}

fn embed(h: &CMatrix) -> DMatrix<f64> {
    let n = h.nrows();
    DMatrix::from_fn(2 * n, 2 * n, |i, j| {
        let z = h[(i % n, j % n)];
        match (i < n, j < n) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    })
}

/// Inverse of the embedding on arbitrary (not necessarily structured)
/// real symmetric matrices: projects onto the structured subspace first, so
/// a PSD argument always yields a PSD Hermitian result.
pub fn extract_hermitian(w: &DMatrix<f64>) -> CMatrix {
    let n = w.nrows() / 2;
    CMatrix::from_fn(n, n, |i, j| {
        c(
            0.5 * (w[(i, j)] + w[(i + n, j + n)]),
            0.5 * (w[(i + n, j)] - w[(i, j + n)]),
        )
    })
}

/// How complex blocks were represented in a lowered program.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Embedding {
    /// `H ↦ [[Re H, −Im H], [Im H, Re H]]`
    Complex,
    /// Real symmetric blocks used directly.
    Real,
}

impl Embedding {
    /// Recovers the Hermitian block from a real solver block.
    pub fn extract(self, w: &DMatrix<f64>) -> CMatrix {
        match self {
            Embedding::Complex => extract_hermitian(w),
            Embedding::Real => w.map(|v| c(v, 0.0)),
        }
    }
}

/// Real coefficient matrix `A` with `⟨A, embed(H)⟩ = Re Tr(K H)` for every
/// Hermitian `H`, i.e. ½·embed of the Hermitian part of `K`.
fn real_functional(k: &CMatrix) -> SymMatrix {
    let herm = (k + k.adjoint()).scale(0.25);
    SymMatrix::from_dense(&embed(&herm))
}

/// Builder for programs whose variables are complex Hermitian PSD blocks.
/// Each complex block of size `n` becomes a real block of size `2n`;
/// constraints and objectives are complex-linear functionals `Tr(K H)`.
#[derive(Debug, Clone)]
pub struct HermitianProgram {
    formulation: Formulation,
    sense: Sense,
    dims: Vec<usize>,
    objective: Vec<(usize, CMatrix)>,
    equalities: Vec<(Vec<(usize, CMatrix)>, C64)>,
}

/// Coefficients below this magnitude are treated as structural zeros when
/// deciding whether the imaginary half of a complex equality is trivial.
const TRIVIAL_COEFF: f64 = 1e-14;

impl HermitianProgram {
    pub fn new(formulation: Formulation, sense: Sense) -> Self {
        HermitianProgram {
            formulation,
            sense,
            dims: Vec::new(),
            objective: Vec::new(),
            equalities: Vec::new(),
        }
    }

    pub fn add_block(&mut self, dim: usize) -> usize {
        self.dims.push(dim);
        self.dims.len() - 1
    }

    pub fn block_dim(&self, block: usize) -> usize {
        self.dims[block]
    }

    /// Adds `Re Tr(K H_block)` to the objective.
    pub fn add_objective(&mut self, block: usize, k: CMatrix) {
        self.objective.push((block, k));
    }

    /// `Σ Tr(K_b H_b) = rhs` as a complex equation (real and imaginary parts).
    pub fn add_equality(&mut self, terms: Vec<(usize, CMatrix)>, rhs: C64) {
        self.equalities.push((terms, rhs));
    }

    /// True when every coefficient and right-hand side is real.
    pub fn has_real_data(&self) -> bool {
        let real = |k: &CMatrix| k.iter().all(|z| z.im.abs() <= TRIVIAL_COEFF);
        self.objective.iter().all(|(_, k)| real(k))
            && self
                .equalities
                .iter()
                .all(|(terms, rhs)| rhs.im.abs() <= TRIVIAL_COEFF && terms.iter().all(|(_, k)| real(k)))
    }

    /// Lowers to the smallest equivalent real program. With real data the
    /// program is invariant under complex conjugation, so averaging any
    /// optimum with its conjugate gives a real symmetric optimum and the
    /// blocks need no embedding.
    pub fn lower(self) -> (SdpProblem, Embedding) {
        if self.has_real_data() {
            (self.into_real_symmetric(), Embedding::Real)
        } else {
            (self.into_real(), Embedding::Complex)
        }
    }

    /// Real symmetric program over blocks of the original size; only
    /// equivalent when [`HermitianProgram::has_real_data`] holds.
    pub fn into_real_symmetric(self) -> SdpProblem {
        let functional = |k: &CMatrix| {
            let re = k.map(|z| z.re);
            SymMatrix::from_dense(&((&re + re.transpose()) * 0.5))
        };
        let objective = self.objective.iter().map(|(b, k)| (*b, functional(k))).collect();
        let constraints = self
            .equalities
            .iter()
            .filter_map(|(terms, rhs)| {
                let part: Vec<_> = terms
                    .iter()
                    .map(|(b, k)| (*b, functional(k)))
                    .filter(|(_, m)| !m.is_zero(TRIVIAL_COEFF))
                    .collect();
                (!part.is_empty()).then_some(Constraint { terms: part, rhs: rhs.re })
            })
            .collect();
        SdpProblem {
            formulation: self.formulation,
            sense: self.sense,
            block_sizes: self.dims.clone(),
            objective,
            constraints,
        }
    }

    pub fn into_real(self) -> SdpProblem {
        let block_sizes = self.dims.iter().map(|d| 2 * d).collect();
        let objective = self
            .objective
            .iter()
            .map(|(b, k)| (*b, real_functional(k)))
            .collect();
        let mut constraints = Vec::new();
        for (terms, rhs) in &self.equalities {
            let re: Vec<_> = terms.iter().map(|(b, k)| (*b, real_functional(k))).collect();
            // Im Tr(K H) = Re Tr(−iK H)
            let im: Vec<_> = terms
                .iter()
                .map(|(b, k)| (*b, real_functional(&k.map(|z| z * c(0.0, -1.0)))))
                .collect();
            for (part, value) in [(re, rhs.re), (im, rhs.im)] {
                let part: Vec<_> = part.into_iter().filter(|(_, m)| !m.is_zero(TRIVIAL_COEFF)).collect();
                if part.is_empty() {
                    debug_assert!(value.abs() <= TRIVIAL_COEFF, "inconsistent trivial equality");
                    continue;
                }
                constraints.push(Constraint { terms: part, rhs: value });
            }
        }
        SdpProblem {
            formulation: self.formulation,
            sense: self.sense,
            block_sizes,
            objective,
            constraints,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmat::random::random_hermitian;
    use crate::qmat::{hermitian_eigenvalues, trace};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn sorted(mut v: Vec<f64>) -> Vec<f64> {
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v
    }

    #[test]
    fn real_symmetric_input_gives_block_diagonal_copy() {
        let h = CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(2.0, 0.0), c(2.0, 0.0), c(-1.0, 0.0)]);
        let e = embed_hermitian(&h).unwrap();
        assert_eq!(e.view((0, 2), (2, 2)).abs().sum(), 0.0);
        assert_eq!(e.view((0, 0), (2, 2)), e.view((2, 2), (2, 2)));
        let ev = sorted(e.symmetric_eigenvalues().iter().copied().collect());
        let hv = sorted(hermitian_eigenvalues(&h).iter().copied().collect());
        for (k, v) in ev.iter().enumerate() {
            assert!((v - hv[k / 2]).abs() < 1e-12);
        }
    }

    #[test]
    fn pauli_y_embedding_spectrum() {
        let h = CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(0.0, 0.0)]);
        let e = embed_hermitian(&h).unwrap();
        assert_eq!(e, e.transpose());
        let ev = sorted(e.symmetric_eigenvalues().iter().copied().collect());
        let expect = [-1.0, -1.0, 1.0, 1.0];
        for (a, b) in ev.iter().zip(expect) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn psd_equivalence_on_random_hermitian() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let h = random_hermitian(&mut rng, 3);
            let e = embed_hermitian(&h).unwrap();
            let hmin = hermitian_eigenvalues(&h).min();
            let emin = e.symmetric_eigenvalues().min();
            assert!((hmin - emin).abs() < 1e-10);
            assert!((e.trace() - 2.0 * trace(&h).re).abs() < 1e-12);
            assert!(crate::qmat::max_abs_diff(&extract_hermitian(&e), &h) < 1e-15);
        }
    }

    #[test]
    fn non_square_rejected() {
        assert!(embed_hermitian(&CMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn functional_reproduces_complex_trace() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..20 {
            let h = random_hermitian(&mut rng, 3);
            let k = crate::qmat::random::ginibre(&mut rng, 3, 3);
            let w = embed(&h);
            let expect = trace(&(&k * &h)).re;
            assert!((real_functional(&k).dot(&w) - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn trivial_imaginary_parts_are_dropped() {
        let mut p = HermitianProgram::new(Formulation::Custom, Sense::Minimize);
        let b = p.add_block(2);
        p.add_equality(vec![(b, CMatrix::identity(2, 2))], c(1.0, 0.0));
        let real = p.into_real();
        assert_eq!(real.constraints.len(), 1);
        real.validate().unwrap();
    }

    #[test]
    fn validate_catches_bad_block() {
        let p = SdpProblem {
            formulation: Formulation::Custom,
            sense: Sense::Minimize,
            block_sizes: vec![2],
            objective: vec![(1, SymMatrix::new(2))],
            constraints: vec![],
        };
        assert!(p.validate().is_err());
    }
}
