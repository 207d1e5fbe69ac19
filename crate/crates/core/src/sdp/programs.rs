//! The four program families and the two-state Holevo–Helstrom value.
//!
//! All programs share one shape: a density-operator block `σ` on the input
//! space and, per term, a Hermitian block `[[Y, X], [X†, Z]] ⪰ 0` tied to
//! `σ` through complementary maps `σ ↦ Tr_B(S σ T†)`.
//!
//! * trace-norm minimizations: `X` is pinned, `½Tr(Y) + ½Tr(Z)` minimized;
//! * fidelity (diamond-norm) maximizations: `Y` and `Z` are pinned,
//!   `Re Tr X` maximized.
//!
//! For the maximizations the environment is first compressed onto the
//! support of `Tr_B(S S†)` (resp. `T T†`). Without that step `Y` is singular
//! for every feasible `σ` and the program has no interior.

use serde::Serialize;

use super::problem::{Embedding, Formulation, HermitianProgram, Sense};
use super::solver::{solve, Residuals};
use super::SolverStatus;
use crate::error::{Error, Result};
use crate::qmat::{
    c, hermitian_eigen, hermitian_trace_norm, stinespring_from_kraus, trace_norm, CMatrix, DensityMatrix, KrausChannel,
    StinespringIsometry,
};

/// Widening applied to solver values before they enter a bound.
pub const EPS_ROUND: f64 = 1e-7;

/// Tolerance on prior normalization.
pub const PRIOR_TOL: f64 = 1e-12;

/// Relative eigenvalue cutoff for the environment support.
const SUPPORT_CUTOFF: f64 = 1e-12;

/// Which weighted difference the averaged diamond program measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DiamondSide {
    /// `𝒪^ξ − αΨ`
    OracleMinusRef,
    /// `α𝒪^ξ − Ψ`
    RefMinusOracle,
}

/// Result of one of the programs together with the optimizing input state.
#[derive(Debug, Clone, Serialize)]
pub struct ProgramResult {
    pub formulation: Formulation,
    pub sense: Sense,
    pub value: f64,
    pub dual_value: f64,
    #[serde(skip)]
    pub sigma: DensityMatrix,
    pub status: SolverStatus,
    pub residuals: Residuals,
    pub iterations: usize,
}

impl ProgramResult {
    /// The value pushed by [`EPS_ROUND`] (and by the primal/dual spread) in
    /// the direction that cannot invalidate a lower bound built from it:
    /// downwards for minimizations, upwards for maximizations.
    pub fn safe_value(&self) -> f64 {
        match self.sense {
            Sense::Minimize => self.value.min(self.dual_value) - EPS_ROUND,
            Sense::Maximize => self.value.max(self.dual_value) + EPS_ROUND,
        }
    }

    pub fn is_near_optimal(&self) -> bool {
        self.status == SolverStatus::NearOptimal
    }
}

/// A linear map `A → B ⊗ E` (output factor first), not necessarily isometric.
#[derive(Debug, Clone)]
struct Dilation {
    matrix: CMatrix,
    dim_out: usize,
    dim_env: usize,
}

impl Dilation {
    fn from_isometry(v: &StinespringIsometry) -> Self {
        Dilation {
            matrix: v.matrix().clone(),
            dim_out: v.dim_out(),
            dim_env: v.dim_env(),
        }
    }

    fn from_channel(ch: &KrausChannel) -> Self {
        Dilation::from_isometry(&stinespring_from_kraus(ch))
    }

    fn dim_in(&self) -> usize {
        self.matrix.ncols()
    }

    fn row(&self, b: usize, e: usize) -> usize {
        b * self.dim_env + e
    }

    fn scaled(&self, s: f64) -> Self {
        Dilation {
            matrix: self.matrix.scale(s),
            ..self.clone()
        }
    }

    /// Direct sum over the environment: `self ⊗ |0⟩ + other ⊗ |1⟩`.
    fn stack(&self, other: &Dilation) -> Self {
        assert_eq!(self.dim_out, other.dim_out);
        let env = self.dim_env + other.dim_env;
        let mut m = CMatrix::zeros(self.dim_out * env, self.dim_in());
        for b in 0..self.dim_out {
            for e in 0..self.dim_env {
                m.row_mut(b * env + e).copy_from(&self.matrix.row(self.row(b, e)));
            }
            for e in 0..other.dim_env {
                m.row_mut(b * env + self.dim_env + e).copy_from(&other.matrix.row(other.row(b, e)));
            }
        }
        Dilation {
            matrix: m,
            dim_out: self.dim_out,
            dim_env: env,
        }
    }

    /// `Tr_B(S σ T†)` for `S = self`.
    fn complementary(&self, t: &Dilation, sigma: &CMatrix) -> CMatrix {
        let full = &self.matrix * sigma * t.matrix.adjoint();
        CMatrix::from_fn(self.dim_env, t.dim_env, |e, f| {
            (0..self.dim_out).map(|b| full[(self.row(b, e), t.row(b, f))]).sum()
        })
    }

    /// `K` with `[Tr_B(S σ T†)]_{ef} = Tr(K σ)`.
    fn coefficient(&self, t: &Dilation, e: usize, f: usize) -> CMatrix {
        let d = self.dim_in();
        let mut k = CMatrix::zeros(d, d);
        for b in 0..self.dim_out {
            let srow = self.matrix.row(self.row(b, e));
            let trow = t.matrix.row(t.row(b, f));
            for i in 0..d {
                let ti = trow[i].conj();
                if ti == c(0.0, 0.0) {
                    continue;
                }
                for j in 0..d {
                    k[(i, j)] += ti * srow[j];
                }
            }
        }
        k
    }

    /// Restricts the environment to the support of `Tr_B(S S†)`; returns the
    /// compressed map and the isometry `P: E' → E`.
    fn compress(&self) -> (Dilation, CMatrix) {
        let gram = self.complementary(self, &CMatrix::identity(self.dim_in(), self.dim_in()));
        let (vals, vecs) = hermitian_eigen(&gram);
        let top = vals.iter().copied().fold(0.0, f64::max);
        let keep: Vec<usize> = (0..vals.len()).filter(|&i| vals[i] > SUPPORT_CUTOFF * top.max(1.0)).collect();
        let p = CMatrix::from_fn(self.dim_env, keep.len(), |e, k| vecs[(e, keep[k])]);
        let env = keep.len();
        let mut m = CMatrix::zeros(self.dim_out * env, self.dim_in());
        for b in 0..self.dim_out {
            for k in 0..env {
                let mut row = m.row_mut(b * env + k);
                for e in 0..self.dim_env {
                    let w = p[(e, k)].conj();
                    if w != c(0.0, 0.0) {
                        row += self.matrix.row(self.row(b, e)) * w;
                    }
                }
            }
        }
        (
            Dilation {
                matrix: m,
                dim_out: self.dim_out,
                dim_env: env,
            },
            p,
        )
    }
}

fn unit(dim: usize, row: usize, col: usize) -> CMatrix {
    let mut k = CMatrix::zeros(dim, dim);
    k[(row, col)] = c(1.0, 0.0);
    k
}

fn check_priors(priors: &[f64]) -> Result<()> {
    if priors.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
        return Err(Error::InvalidPriors(format!("negative or non-finite prior in {priors:?}")));
    }
    let total: f64 = priors.iter().sum();
    if (total - 1.0).abs() > PRIOR_TOL {
        return Err(Error::InvalidPriors(format!("priors sum to {total}")));
    }
    Ok(())
}

/// Density operator recovered from a (slightly infeasible) solver block:
/// Hermitian part, negative eigenvalues clipped, trace renormalized.
fn recover_state(block: &nalgebra::DMatrix<f64>, embedding: Embedding) -> DensityMatrix {
    let h = embedding.extract(block);
    let (vals, vecs) = hermitian_eigen(&h);
    let clipped: Vec<f64> = vals.iter().map(|v| v.max(0.0)).collect();
    let total: f64 = clipped.iter().sum();
    let d = h.nrows();
    if total <= 0.0 {
        return DensityMatrix::maximally_mixed(d);
    }
    let diag = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        d,
        clipped.iter().map(|v| c(v / total, 0.0)),
    ));
    DensityMatrix::from_trusted(&vecs * diag * vecs.adjoint())
}

fn run(prog: HermitianProgram, scale: f64) -> Result<ProgramResult> {
    let (problem, embedding) = prog.lower();
    let (formulation, sense) = (problem.formulation, problem.sense);
    let sol = solve(&problem)?;
    if !sol.is_usable() {
        return Err(Error::Solver(sol.status));
    }
    if sol.status == SolverStatus::NearOptimal {
        log::warn!(
            "{formulation} program only near-optimal after {} iterations (residuals {:?})",
            sol.iterations,
            sol.residuals
        );
    }
    Ok(ProgramResult {
        formulation,
        sense,
        value: scale * sol.value,
        dual_value: scale * sol.dual_value,
        sigma: recover_state(&sol.block_values[0], embedding),
        status: sol.status,
        residuals: sol.residuals,
        iterations: sol.iterations,
    })
}

/// Builds `min Σ w ‖Tr_B(S σ T†)‖₁` over density operators `σ`.
fn trace_norm_program(formulation: Formulation, dim_in: usize, terms: &[(f64, Dilation, Dilation)]) -> HermitianProgram {
    let mut prog = HermitianProgram::new(formulation, Sense::Minimize);
    let sigma = prog.add_block(dim_in);
    prog.add_equality(vec![(sigma, CMatrix::identity(dim_in, dim_in))], c(1.0, 0.0));
    for (w, s, t) in terms {
        let (dy, dz) = (s.dim_env, t.dim_env);
        let n = dy + dz;
        let blk = prog.add_block(n);
        // ‖X‖₁ = min ½Tr Y + ½Tr Z over [[Y, X], [X†, Z]] ⪰ 0.
        prog.add_objective(blk, CMatrix::identity(n, n).scale(0.5 * w));
        for e in 0..dy {
            for f in 0..dz {
                let k = s.coefficient(t, e, f);
                prog.add_equality(vec![(blk, unit(n, dy + f, e)), (sigma, -k)], c(0.0, 0.0));
            }
        }
    }
    prog
}

/// Builds `max Σ w F(Tr_B(S σ S†), Tr_B(T σ T†))` over density operators.
fn fidelity_program(formulation: Formulation, dim_in: usize, terms: &[(f64, Dilation, Dilation)]) -> HermitianProgram {
    let mut prog = HermitianProgram::new(formulation, Sense::Maximize);
    let sigma = prog.add_block(dim_in);
    prog.add_equality(vec![(sigma, CMatrix::identity(dim_in, dim_in))], c(1.0, 0.0));
    for (w, s, t) in terms {
        let (s, ps) = s.compress();
        let (t, pt) = t.compress();
        let (dy, dz) = (s.dim_env, t.dim_env);
        let n = dy + dz;
        let blk = prog.add_block(n);
        // Re Tr X_full with X_full = P_S X P_T†, i.e. Re Tr(P_T† P_S X).
        let overlap = pt.adjoint() * &ps;
        let mut k = CMatrix::zeros(n, n);
        for g in 0..dz {
            for e in 0..dy {
                k[(dy + g, e)] = overlap[(g, e)] * *w;
            }
        }
        prog.add_objective(blk, k);
        for (off, d, map) in [(0, dy, &s), (dy, dz, &t)] {
            for e in 0..d {
                for f in e..d {
                    let coeff = map.coefficient(map, e, f);
                    prog.add_equality(vec![(blk, unit(n, off + f, off + e)), (sigma, -coeff)], c(0.0, 0.0));
                }
            }
        }
    }
    prog
}

/// `min_σ ‖Tr_B(O¹ σ O⁰†)‖₁`; its value is `cos τ` for the two-channel
/// Bures-angle bound. Environments of different size are allowed; the
/// off-diagonal block is then rectangular, which is equivalent to padding
/// the smaller environment with zero rows.
pub fn min_trace_norm_sdp(o0: &StinespringIsometry, o1: &StinespringIsometry) -> Result<ProgramResult> {
    if o0.dim_in() != o1.dim_in() || o0.dim_out() != o1.dim_out() {
        return Err(Error::dims(
            format!("{}→{}", o0.dim_in(), o0.dim_out()),
            format!("{}→{}", o1.dim_in(), o1.dim_out()),
        ));
    }
    let terms = [(1.0, Dilation::from_isometry(o1), Dilation::from_isometry(o0))];
    run(trace_norm_program(Formulation::MinTraceNorm, o0.dim_in(), &terms), 1.0)
}

/// `min_σ Σ_ξ p_ξ ‖Tr_B(O^ξ σ V†)‖₁`; its value is `cos θ_𝒜(Ψ ⊗ id)`.
pub fn min_avg_trace_norm_sdp(oracles: &[(f64, StinespringIsometry)], reference: &StinespringIsometry) -> Result<ProgramResult> {
    check_priors(&oracles.iter().map(|o| o.0).collect::<Vec<_>>())?;
    for (_, o) in oracles {
        if o.dim_in() != reference.dim_in() || o.dim_out() != reference.dim_out() {
            return Err(Error::dims(reference.dim_in(), o.dim_in()));
        }
    }
    let v = Dilation::from_isometry(reference);
    let terms: Vec<_> = oracles
        .iter()
        .filter(|(p, _)| *p > 0.0)
        .map(|(p, o)| (*p, Dilation::from_isometry(o), v.clone()))
        .collect();
    run(trace_norm_program(Formulation::MinAvgTraceNorm, reference.dim_in(), &terms), 1.0)
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha.is_finite() && alpha >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("weight α = {alpha} must be a finite non-negative number")))
    }
}

fn same_shape(a: &KrausChannel, b: &KrausChannel) -> Result<()> {
    if a.dim_in() == b.dim_in() && a.dim_out() == b.dim_out() {
        Ok(())
    } else {
        Err(Error::dims(
            format!("{}→{}", a.dim_in(), a.dim_out()),
            format!("{}→{}", b.dim_in(), b.dim_out()),
        ))
    }
}

/// `S` and `T` with `Tr_E(S ρ T†) = a𝒪⁰(ρ) − b𝒪¹(ρ)` for `a, b ≥ 0`.
fn difference_dilations(ch0: &KrausChannel, a: f64, ch1: &KrausChannel, b: f64) -> (Dilation, Dilation) {
    let d0 = Dilation::from_channel(ch0).scaled(a.sqrt());
    let d1 = Dilation::from_channel(ch1).scaled(b.sqrt());
    (d0.stack(&d1), d0.stack(&d1.scaled(-1.0)))
}

/// `‖𝒪⁰ − α𝒪¹‖_⋄` via Watrous' fidelity program.
pub fn weighted_diamond_norm_sdp(ch0: &KrausChannel, ch1: &KrausChannel, alpha: f64) -> Result<ProgramResult> {
    check_alpha(alpha)?;
    same_shape(ch0, ch1)?;
    let (s, t) = difference_dilations(ch0, 1.0, ch1, alpha);
    run(fidelity_program(Formulation::WeightedDiamondNorm, ch0.dim_in(), &[(1.0, s, t)]), 1.0)
}

/// `max_φ Σ_ξ p_ξ ½‖(𝒪^ξ − αΨ)(φ)‖₁` (or `α𝒪^ξ − Ψ`), with one input state
/// shared by all terms.
pub fn avg_weighted_diamond_sdp(
    oracles: &[(f64, KrausChannel)],
    reference: &KrausChannel,
    alpha: f64,
    side: DiamondSide,
) -> Result<ProgramResult> {
    check_alpha(alpha)?;
    check_priors(&oracles.iter().map(|o| o.0).collect::<Vec<_>>())?;
    for (_, o) in oracles {
        same_shape(o, reference)?;
    }
    let terms: Vec<_> = oracles
        .iter()
        .filter(|(p, _)| *p > 0.0)
        .map(|(p, o)| {
            let (s, t) = match side {
                DiamondSide::OracleMinusRef => difference_dilations(o, 1.0, reference, alpha),
                DiamondSide::RefMinusOracle => difference_dilations(o, alpha, reference, 1.0),
            };
            (*p, s, t)
        })
        .collect();
    run(fidelity_program(Formulation::AvgWeightedDiamond, reference.dim_in(), &terms), 0.5)
}

/// The real program behind [`weighted_diamond_norm_sdp`], for inspection or
/// export.
pub fn weighted_diamond_norm_problem(ch0: &KrausChannel, ch1: &KrausChannel, alpha: f64) -> Result<super::SdpProblem> {
    check_alpha(alpha)?;
    same_shape(ch0, ch1)?;
    let (s, t) = difference_dilations(ch0, 1.0, ch1, alpha);
    Ok(fidelity_program(Formulation::WeightedDiamondNorm, ch0.dim_in(), &[(1.0, s, t)]).lower().0)
}

/// The real program behind [`min_trace_norm_sdp`].
pub fn min_trace_norm_problem(o0: &StinespringIsometry, o1: &StinespringIsometry) -> super::SdpProblem {
    let terms = [(1.0, Dilation::from_isometry(o1), Dilation::from_isometry(o0))];
    trace_norm_program(Formulation::MinTraceNorm, o0.dim_in(), &terms).lower().0
}

/// Direct evaluation of `‖Tr_B(O¹ σ O⁰†)‖₁` at a given state.
pub fn trace_norm_objective(o0: &StinespringIsometry, o1: &StinespringIsometry, sigma: &DensityMatrix) -> Result<f64> {
    let x = Dilation::from_isometry(o1).complementary(&Dilation::from_isometry(o0), sigma.matrix());
    trace_norm(&x)
}

/// Direct evaluation of `Σ p_ξ ‖Tr_B(O^ξ σ V†)‖₁`.
pub fn avg_trace_norm_objective(
    oracles: &[(f64, StinespringIsometry)],
    reference: &StinespringIsometry,
    sigma: &DensityMatrix,
) -> Result<f64> {
    let v = Dilation::from_isometry(reference);
    oracles.iter().try_fold(0.0, |acc, (p, o)| {
        let x = Dilation::from_isometry(o).complementary(&v, sigma.matrix());
        Ok(acc + p * trace_norm(&x)?)
    })
}

/// Direct evaluation of `‖((𝒪⁰ − α𝒪¹) ⊗ id)(|φ⟩⟨φ|)‖₁` for the purification
/// `φ` of `σ`, computed as a fidelity of complementary outputs.
pub fn weighted_diamond_objective(ch0: &KrausChannel, ch1: &KrausChannel, alpha: f64, sigma: &DensityMatrix) -> f64 {
    let (s, t) = difference_dilations(ch0, 1.0, ch1, alpha);
    crate::qmat::fidelity_psd(&s.complementary(&s, sigma.matrix()), &t.complementary(&t, sigma.matrix()))
}

/// Direct evaluation of the averaged program's objective at `σ`.
pub fn avg_weighted_diamond_objective(
    oracles: &[(f64, KrausChannel)],
    reference: &KrausChannel,
    alpha: f64,
    side: DiamondSide,
    sigma: &DensityMatrix,
) -> f64 {
    oracles
        .iter()
        .map(|(p, o)| {
            let (s, t) = match side {
                DiamondSide::OracleMinusRef => difference_dilations(o, 1.0, reference, alpha),
                DiamondSide::RefMinusOracle => difference_dilations(o, alpha, reference, 1.0),
            };
            0.5 * p * crate::qmat::fidelity_psd(&s.complementary(&s, sigma.matrix()), &t.complementary(&t, sigma.matrix()))
        })
        .sum()
}

/// `½(1 − ‖p₀ρ₀ − p₁ρ₁‖₁)`, the optimal two-state discrimination error.
pub fn helstrom_error(p0: f64, rho0: &DensityMatrix, p1: f64, rho1: &DensityMatrix) -> Result<f64> {
    check_priors(&[p0, p1])?;
    if rho0.dim() != rho1.dim() {
        return Err(Error::dims(rho0.dim(), rho1.dim()));
    }
    let diff = rho0.matrix().scale(p0) - rho1.matrix().scale(p1);
    Ok((0.5 * (1.0 - hermitian_trace_norm(&diff))).clamp(0.0, 0.5))
}

/// Exact single-query error `½(1 − ‖p₀𝒪⁰ − p₁𝒪¹‖_⋄)`.
pub fn one_shot_error(p0: f64, ch0: &KrausChannel, p1: f64, ch1: &KrausChannel) -> Result<ProgramResult> {
    check_priors(&[p0, p1])?;
    // ‖p₀𝒪⁰ − p₁𝒪¹‖_⋄ = p₀‖𝒪⁰ − (p₁/p₀)𝒪¹‖_⋄; swap roles when p₀ = 0.
    let mut r = if p0 > 0.0 {
        let mut r = weighted_diamond_norm_sdp(ch0, ch1, p1 / p0)?;
        r.value *= p0;
        r.dual_value *= p0;
        r
    } else {
        weighted_diamond_norm_sdp(ch1, ch0, 0.0)?
    };
    r.value = 0.5 * (1.0 - r.value);
    r.dual_value = 0.5 * (1.0 - r.dual_value);
    r.sense = Sense::Minimize;
    Ok(r)
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmat::{PureState, KrausChannel};
    use approx::assert_abs_diff_eq;

    fn adc(r: f64) -> KrausChannel {
        KrausChannel::new(vec![
            CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c((1.0 - r).sqrt(), 0.0)]),
            CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(r.sqrt(), 0.0), c(0.0, 0.0), c(0.0, 0.0)]),
        ])
        .unwrap()
    }

    #[test]
    fn helstrom_examples() {
        let z = DensityMatrix::basis(2, 0);
        let o = DensityMatrix::basis(2, 1);
        let p = PureState::plus().density();
        assert_abs_diff_eq!(helstrom_error(0.5, &p, 0.5, &p).unwrap(), 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(helstrom_error(0.5, &z, 0.5, &o).unwrap(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(
            helstrom_error(0.5, &z, 0.5, &p).unwrap(),
            0.5 * (1.0 - std::f64::consts::FRAC_1_SQRT_2),
            epsilon = 1e-12
        );
        assert!(helstrom_error(0.5, &z, 0.6, &p).is_err());
        assert!(helstrom_error(0.5, &z, 0.5, &DensityMatrix::maximally_mixed(3)).is_err());
    }

    #[test]
    fn identical_isometries_give_one() {
        let v = stinespring_from_kraus(&adc(0.3));
        let r = min_trace_norm_sdp(&v, &v).unwrap();
        assert_abs_diff_eq!(r.value, 1.0, epsilon = 1e-7);
    }

    #[test]
    fn damping_pair_closed_form() {
        let (r0, r1): (f64, f64) = (0.2, 0.4);
        let res = min_trace_norm_sdp(&stinespring_from_kraus(&adc(r0)), &stinespring_from_kraus(&adc(r1))).unwrap();
        let expect = (r0 * r1).sqrt() + ((1.0 - r0) * (1.0 - r1)).sqrt();
        assert_abs_diff_eq!(expect, 0.975663, epsilon = 1e-6);
        assert_abs_diff_eq!(res.value, expect, epsilon = 1e-7);
        assert_eq!(res.status, SolverStatus::Optimal);
    }

    #[test]
    fn diamond_trivial_cases() {
        let a = adc(0.25);
        assert_abs_diff_eq!(weighted_diamond_norm_sdp(&a, &a, 0.0).unwrap().value, 1.0, epsilon = 1e-7);
        assert_abs_diff_eq!(weighted_diamond_norm_sdp(&a, &a, 1.0).unwrap().value, 0.0, epsilon = 1e-7);
        assert!(weighted_diamond_norm_sdp(&a, &a, -0.1).is_err());
    }

    #[test]
    fn identity_vs_z_is_perfectly_distinguishable() {
        let id = KrausChannel::identity(2);
        let z = KrausChannel::unitary(CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)])).unwrap();
        assert_abs_diff_eq!(weighted_diamond_norm_sdp(&id, &z, 1.0).unwrap().value, 2.0, epsilon = 1e-7);
    }

    #[test]
    fn avg_program_trivial_cases() {
        let a = adc(0.4);
        let r = avg_weighted_diamond_sdp(&[(0.5, a.clone()), (0.5, a.clone())], &a, 1.0, DiamondSide::OracleMinusRef).unwrap();
        assert_abs_diff_eq!(r.value, 0.0, epsilon = 1e-7);
        let b = adc(0.1);
        let single = avg_weighted_diamond_sdp(&[(1.0, b.clone())], &a, 0.7, DiamondSide::OracleMinusRef).unwrap();
        let full = weighted_diamond_norm_sdp(&b, &a, 0.7).unwrap();
        assert_abs_diff_eq!(single.value, 0.5 * full.value, epsilon = 1e-7);
        assert!(avg_weighted_diamond_sdp(&[(0.7, b.clone())], &a, 0.7, DiamondSide::OracleMinusRef).is_err());
    }

    #[test]
    fn min_avg_trivial_cases() {
        let v = stinespring_from_kraus(&adc(0.4));
        let r = min_avg_trace_norm_sdp(&[(0.3, v.clone()), (0.7, v.clone())], &v).unwrap();
        assert_abs_diff_eq!(r.value, 1.0, epsilon = 1e-7);
        let w = stinespring_from_kraus(&adc(0.1));
        let single = min_avg_trace_norm_sdp(&[(1.0, w.clone())], &v).unwrap();
        let pair = min_trace_norm_sdp(&v, &w).unwrap();
        assert_abs_diff_eq!(single.value, pair.value, epsilon = 1e-7);
    }

    #[test]
    fn safe_value_direction() {
        let v = stinespring_from_kraus(&adc(0.4));
        let w = stinespring_from_kraus(&adc(0.1));
        let r = min_trace_norm_sdp(&v, &w).unwrap();
        assert!(r.safe_value() < r.value);
        let d = weighted_diamond_norm_sdp(&adc(0.1), &adc(0.4), 1.0).unwrap();
        assert!(d.safe_value() > d.value);
    }
}
