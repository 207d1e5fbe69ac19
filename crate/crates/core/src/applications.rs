//! Concrete problem families: unstructured search, channel position finding
//! with amplitude damping, and discrimination of two damping channels.

use std::f64::consts::FRAC_PI_2;

use serde::Serialize;

use crate::bounds::{
    check_priors, p_err_zero, theorem1_bound, theorem2_bound, theorem3_bound, theorem4_bound, BoundResult,
    DiscriminationProblem, WEIGHT_TOL,
};
use crate::error::{Error, Result};
use crate::qmat::{c, channel_tensor, stinespring_from_kraus, CMatrix, KrausChannel};
use crate::sdp::{avg_weighted_diamond_sdp, min_trace_norm_sdp, weighted_diamond_norm_sdp, DiamondSide};

/// Allowed disagreement between the closed-form and SDP values of `τ_𝒜`.
pub const TAU_AGREEMENT_TOL: f64 = 1e-6;

fn check_rate(r: f64) -> Result<()> {
    if r.is_finite() && (0.0..=1.0).contains(&r) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("damping rate {r} outside [0, 1]")))
    }
}

/// Amplitude damping with rate `r`: `K₀ = |0⟩⟨0| + √(1−r)|1⟩⟨1|`,
/// `K₁ = √r|0⟩⟨1|`.
pub fn adc_channel(r: f64) -> Result<KrausChannel> {
    check_rate(r)?;
    let zero = c(0.0, 0.0);
    KrausChannel::new(vec![
        CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), zero, zero, c((1.0 - r).sqrt(), 0.0)]),
        CMatrix::from_row_slice(2, 2, &[zero, c(r.sqrt(), 0.0), zero, zero]),
    ])
}

/// `arccos(√(r₀r₁) + √((1−r₀)(1−r₁)))`.
pub fn bhattacharyya_angle(r0: f64, r1: f64) -> f64 {
    let (r0, r1) = (r0.clamp(0.0, 1.0), r1.clamp(0.0, 1.0));
    ((r0 * r1).sqrt() + ((1.0 - r0) * (1.0 - r1)).sqrt()).clamp(-1.0, 1.0).acos()
}

/// Search for any of `k` marked items among `N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GroverInstance {
    pub n_items: usize,
    pub marked: usize,
}

impl GroverInstance {
    pub fn new(n_items: usize, marked: usize) -> Result<Self> {
        if marked == 0 || 2 * marked > n_items {
            return Err(Error::InvalidParameter(format!(
                "need 1 ≤ k ≤ N/2, got N = {n_items}, k = {marked}"
            )));
        }
        Ok(GroverInstance { n_items, marked })
    }

    /// `arcsin √(k/N)`.
    pub fn angle(&self) -> f64 {
        (self.marked as f64 / self.n_items as f64).sqrt().asin()
    }

    /// Whether `(2n+1)·arcsin √(k/N) ≤ π/2`.
    pub fn in_region(&self, n: usize) -> bool {
        (2 * n + 1) as f64 * self.angle() <= FRAC_PI_2 + crate::bounds::ANGLE_TOL
    }

    /// Largest query count inside the region.
    pub fn max_queries(&self) -> usize {
        let mut n = ((FRAC_PI_2 / self.angle() - 1.0) / 2.0).floor().max(0.0) as usize;
        while self.in_region(n + 1) {
            n += 1;
        }
        while n > 0 && !self.in_region(n) {
            n -= 1;
        }
        n
    }
}

/// `I − 2Σ_{u∈marked}|u⟩⟨u|` as a unitary channel on `N` levels.
pub fn grover_oracle(n_items: usize, marked: &[usize]) -> Result<KrausChannel> {
    if let Some(&bad) = marked.iter().find(|&&u| u >= n_items) {
        return Err(Error::InvalidParameter(format!("marked item {bad} outside 0..{n_items}")));
    }
    let mut u = CMatrix::identity(n_items, n_items);
    for &m in marked {
        u[(m, m)] = c(-1.0, 0.0);
    }
    KrausChannel::unitary(u)
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// The full search problem: one oracle per `k`-subset, uniform priors, and
/// one answer group per item collecting the subsets that contain it.
/// The size is `C(N, k)` oracles of dimension `N`; meant for small `N`.
pub fn grover_problem(inst: &GroverInstance) -> Result<DiscriminationProblem> {
    let sets = subsets(inst.n_items, inst.marked);
    let p = 1.0 / sets.len() as f64;
    let oracles = sets
        .iter()
        .map(|s| Ok((p, grover_oracle(inst.n_items, s)?)))
        .collect::<Result<Vec<_>>>()?;
    let groups = (0..inst.n_items)
        .map(|eta| (0..sets.len()).filter(|&i| sets[i].contains(&eta)).collect())
        .collect();
    DiscriminationProblem::new(oracles, groups)
}

/// `cos²((2n+1)·arcsin √(k/N))` from the Bures-angle bound with
/// `θ_𝒜 = 2·arcsin √(k/N)` and the exact zero-query error `1 − k/N`.
pub fn grover_bound(inst: &GroverInstance, n: usize) -> BoundResult {
    let a = inst.angle();
    let p0 = 1.0 - inst.marked as f64 / inst.n_items as f64;
    theorem1_bound(n, 0, 2.0 * a, p0).expect("Grover parameters are always in range")
}

/// Success probability `sin²((2n+1)·arcsin √(k/N))` of the standard
/// algorithm, defined inside the region where it is optimal.
pub fn grover_success(inst: &GroverInstance, n: usize) -> Result<f64> {
    if !inst.in_region(n) {
        return Err(Error::ConstraintViolation(format!(
            "(2n+1)·arcsin√(k/N) > π/2 at N = {}, k = {}, n = {n}",
            inst.n_items, inst.marked
        )));
    }
    let arg = ((2 * n + 1) as f64 * inst.angle()).min(FRAC_PI_2);
    if (FRAC_PI_2 - arg).abs() <= crate::bounds::ANGLE_TOL {
        return Ok(1.0);
    }
    Ok(arg.sin().powi(2))
}

/// Channel position finding over `ℓ` damping channels: one slot has rate
/// `r₁`, the others rate `r₀`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CpfInstance {
    pub ell: usize,
    pub r0: f64,
    pub r1: f64,
}

impl CpfInstance {
    pub fn new(ell: usize, r0: f64, r1: f64) -> Result<Self> {
        if ell < 2 {
            return Err(Error::InvalidParameter(format!("ℓ = {ell} must be at least 2")));
        }
        check_rate(r0)?;
        check_rate(r1)?;
        Ok(CpfInstance { ell, r0, r1 })
    }

    /// `1 − 1/ℓ`.
    pub fn p_err_zero(&self) -> f64 {
        1.0 - 1.0 / self.ell as f64
    }

    /// The `ℓ`-qubit problem with uniform priors. Dimension `2^ℓ`.
    pub fn problem(&self) -> Result<DiscriminationProblem> {
        let (e0, e1) = (adc_channel(self.r0)?, adc_channel(self.r1)?);
        let oracles = (0..self.ell)
            .map(|xi| {
                let mut ch = if xi == 0 { e1.clone() } else { e0.clone() };
                for slot in 1..self.ell {
                    ch = channel_tensor(&ch, if slot == xi { &e1 } else { &e0 });
                }
                (1.0 / self.ell as f64, ch)
            })
            .collect();
        DiscriminationProblem::identification(oracles)
    }

    /// `(ℰ^{r₀})^{⊗ℓ}`.
    pub fn reference(&self) -> Result<KrausChannel> {
        let e0 = adc_channel(self.r0)?;
        Ok((1..self.ell).fold(e0.clone(), |acc, _| channel_tensor(&acc, &e0)))
    }
}

fn check_cpf_weights(n: usize, k: usize, alpha0: f64, alpha1: f64) -> Result<()> {
    if k > n {
        return Err(Error::InvalidParameter(format!("k = {k} exceeds n = {n}")));
    }
    let (l, r) = (alpha0.powi((n - k) as i32), alpha1.powi(k as i32));
    if (l - r).abs() > WEIGHT_TOL * l.abs().max(r.abs()).max(1.0) {
        return Err(Error::ConstraintViolation(format!("α₀^(n−k) = {l} ≠ α₁^k = {r}")));
    }
    Ok(())
}

/// Weighted-trace-distance bound for position finding, using the reduction
/// of both `ℓ`-qubit quantities to single-qubit diamond norms
/// `½‖ℰ^{r₁} − α₀ℰ^{r₀}‖_⋄` and `½‖α₁ℰ^{r₁} − ℰ^{r₀}‖_⋄`.
pub fn cpf_bound(inst: &CpfInstance, n: usize, k: usize, alpha0: f64, alpha1: f64) -> Result<BoundResult> {
    check_cpf_weights(n, k, alpha0, alpha1)?;
    let (e0, e1) = (adc_channel(inst.r0)?, adc_channel(inst.r1)?);
    let mut statuses = Vec::new();
    let theta0 = if n > k {
        let r = weighted_diamond_norm_sdp(&e1, &e0, alpha0)?;
        statuses.push(r.status);
        0.5 * r.safe_value().max(0.0)
    } else {
        0.0
    };
    let theta1 = if k > 0 {
        let r = weighted_diamond_norm_sdp(&e0, &e1, alpha1)?;
        statuses.push(r.status);
        0.5 * r.safe_value().max(0.0)
    } else {
        0.0
    };
    let mut b = theorem2_bound(n, 0, k, alpha0, alpha1, theta0, theta1, inst.p_err_zero())?;
    b.params.reference = Some(format!("adc({})^{}", inst.r0, inst.ell));
    b.diagnostics = statuses;
    Ok(b)
}

/// The same bound computed with the `ℓ`-qubit averaged programs directly.
/// Cost grows as `4^ℓ`; intended for cross-checking the reduction.
pub fn cpf_bound_direct(inst: &CpfInstance, n: usize, k: usize, alpha0: f64, alpha1: f64) -> Result<BoundResult> {
    check_cpf_weights(n, k, alpha0, alpha1)?;
    let prob = inst.problem()?;
    let reference = inst.reference()?;
    let mut statuses = Vec::new();
    let theta0 = if n > k {
        let r = avg_weighted_diamond_sdp(prob.oracles(), &reference, alpha0, DiamondSide::OracleMinusRef)?;
        statuses.push(r.status);
        r.safe_value().max(0.0)
    } else {
        0.0
    };
    let theta1 = if k > 0 {
        let r = avg_weighted_diamond_sdp(prob.oracles(), &reference, alpha1, DiamondSide::RefMinusOracle)?;
        statuses.push(r.status);
        r.safe_value().max(0.0)
    } else {
        0.0
    };
    let mut b = theorem2_bound(n, 0, k, alpha0, alpha1, theta0, theta1, p_err_zero(&prob))?;
    b.params.reference = Some(format!("adc({})^{}", inst.r0, inst.ell));
    b.diagnostics = statuses;
    Ok(b)
}

/// Two damping channels with priors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TwoAdcInstance {
    pub p0: f64,
    pub p1: f64,
    pub r0: f64,
    pub r1: f64,
}

impl TwoAdcInstance {
    pub fn new(p0: f64, p1: f64, r0: f64, r1: f64) -> Result<Self> {
        check_priors(&[p0, p1])?;
        check_rate(r0)?;
        check_rate(r1)?;
        Ok(TwoAdcInstance { p0, p1, r0, r1 })
    }

    pub fn channels(&self) -> (KrausChannel, KrausChannel) {
        (
            adc_channel(self.r0).expect("validated rate"),
            adc_channel(self.r1).expect("validated rate"),
        )
    }

    pub fn problem(&self) -> DiscriminationProblem {
        let (e0, e1) = self.channels();
        DiscriminationProblem::two_channel(self.p0, e0, self.p1, e1).expect("validated priors")
    }

    /// `τ_𝒜` in closed form.
    pub fn tau_a(&self) -> f64 {
        bhattacharyya_angle(self.r0, self.r1)
    }

    /// `τ_𝒜` from the trace-norm program on the two isometries (unrounded).
    pub fn tau_a_sdp(&self) -> Result<f64> {
        let (e0, e1) = self.channels();
        let r = min_trace_norm_sdp(&stinespring_from_kraus(&e0), &stinespring_from_kraus(&e1))?;
        Ok(r.value.clamp(0.0, 1.0).acos())
    }
}

/// Bures-angle bound with `τ_𝒜 = Δ(r₀, r₁)`.
pub fn two_adc_bures_bound(inst: &TwoAdcInstance, n: usize) -> BoundResult {
    theorem3_bound(n, inst.p0, inst.p1, inst.tau_a()).expect("validated instance")
}

/// [`two_adc_bures_bound`] after checking the closed form against the SDP.
pub fn two_adc_bures_bound_checked(inst: &TwoAdcInstance, n: usize) -> Result<BoundResult> {
    let (closed, sdp) = (inst.tau_a(), inst.tau_a_sdp()?);
    // Compare cosines: the angle is ill-conditioned near τ = 0.
    if (closed.cos() - sdp.cos()).abs() > TAU_AGREEMENT_TOL {
        return Err(Error::ConstraintViolation(format!(
            "closed-form cos τ = {} but SDP gives {}",
            closed.cos(),
            sdp.cos()
        )));
    }
    Ok(two_adc_bures_bound(inst, n))
}

/// Weighted-trace-distance bound from `‖ℰ^{r₀} − α₀ℰ^{r₁}‖_⋄` and
/// `‖α₁ℰ^{r₀} − ℰ^{r₁}‖_⋄`, under `p₀α₀^k = p₁α₁^{n−k}`.
pub fn two_adc_trace_bound(inst: &TwoAdcInstance, n: usize, k: usize, alpha0: f64, alpha1: f64) -> Result<BoundResult> {
    if k > n {
        return Err(Error::InvalidParameter(format!("k = {k} exceeds n = {n}")));
    }
    let (l, r) = (inst.p0 * alpha0.powi(k as i32), inst.p1 * alpha1.powi((n - k) as i32));
    if (l - r).abs() > WEIGHT_TOL * l.abs().max(r.abs()).max(1.0) {
        return Err(Error::ConstraintViolation(format!("p₀α₀^k = {l} ≠ p₁α₁^(n−k) = {r}")));
    }
    let (e0, e1) = inst.channels();
    let mut statuses = Vec::new();
    let tau0 = if k > 0 {
        let r = weighted_diamond_norm_sdp(&e0, &e1, alpha0)?;
        statuses.push(r.status);
        r.safe_value().max(0.0)
    } else {
        0.0
    };
    let tau1 = if k < n {
        let r = weighted_diamond_norm_sdp(&e1, &e0, alpha1)?;
        statuses.push(r.status);
        r.safe_value().max(0.0)
    } else {
        0.0
    };
    let mut b = theorem4_bound(n, k, inst.p0, inst.p1, alpha0, alpha1, tau0, tau1)?;
    b.diagnostics = statuses;
    Ok(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmat::{apply_channel, DensityMatrix};
    use approx::assert_abs_diff_eq;

    #[test]
    fn adc_examples() {
        let one = DensityMatrix::basis(2, 1);
        let out = apply_channel(&adc_channel(0.5).unwrap(), &one).unwrap();
        assert_abs_diff_eq!(out.matrix()[(0, 0)].re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(out.matrix()[(1, 1)].re, 0.5, epsilon = 1e-15);
        let id = adc_channel(0.0).unwrap();
        assert_eq!(apply_channel(&id, &one).unwrap().matrix(), one.matrix());
        let dump = apply_channel(&adc_channel(1.0).unwrap(), &one).unwrap();
        assert_abs_diff_eq!(dump.matrix()[(0, 0)].re, 1.0, epsilon = 1e-15);
        assert!(adc_channel(1.2).is_err());
    }

    #[test]
    fn bhattacharyya_examples() {
        assert_eq!(bhattacharyya_angle(0.3, 0.3), 0.0);
        assert_abs_diff_eq!(bhattacharyya_angle(0.0, 1.0), FRAC_PI_2, epsilon = 1e-15);
        assert_abs_diff_eq!(bhattacharyya_angle(0.10, 0.11), 0.0163147, epsilon = 1e-7);
    }

    #[test]
    fn grover_examples() {
        let g = GroverInstance::new(4, 1).unwrap();
        assert_eq!(grover_bound(&g, 1).value, 0.0);
        assert_eq!(grover_success(&g, 1).unwrap(), 1.0);
        assert_abs_diff_eq!(grover_bound(&g, 0).value, 0.75, epsilon = 1e-15);
        assert_abs_diff_eq!(grover_success(&g, 0).unwrap(), 0.25, epsilon = 1e-15);
        let g = GroverInstance::new(16, 2).unwrap();
        let expect = (3.0 * 0.125f64.sqrt().asin()).cos().powi(2);
        assert_abs_diff_eq!(grover_bound(&g, 1).value, expect, epsilon = 1e-15);
        assert_abs_diff_eq!(grover_bound(&g, 1).value + grover_success(&g, 1).unwrap(), 1.0, epsilon = 1e-15);
        let g = GroverInstance::new(16, 1).unwrap();
        assert_abs_diff_eq!(grover_success(&g, 2).unwrap(), 3721.0 / 4096.0, epsilon = 1e-15);
        assert!(grover_success(&g, 3).is_err());
        assert_eq!(g.max_queries(), 2);
        assert!(GroverInstance::new(4, 3).is_err());
    }

    #[test]
    fn grover_problem_structure() {
        let g = GroverInstance::new(4, 2).unwrap();
        let p = grover_problem(&g).unwrap();
        assert_eq!(p.len(), 6);
        assert_abs_diff_eq!(p_err_zero(&p), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn cpf_trivial() {
        let inst = CpfInstance::new(3, 0.2, 0.2).unwrap();
        assert_abs_diff_eq!(cpf_bound(&inst, 6, 3, 1.0, 1.0).unwrap().value, 2.0 / 3.0, epsilon = 1e-6);
        assert_abs_diff_eq!(cpf_bound(&inst, 0, 0, 1.0, 1.0).unwrap().value, 2.0 / 3.0, epsilon = 1e-15);
        assert!(cpf_bound(&inst, 4, 2, 0.5, 0.6).is_err());
    }

    #[test]
    fn two_adc_examples() {
        let same = TwoAdcInstance::new(0.3, 0.7, 0.2, 0.2).unwrap();
        assert_abs_diff_eq!(two_adc_bures_bound(&same, 7).value, 0.3, epsilon = 1e-15);
        let inst = TwoAdcInstance::new(0.5, 0.5, 0.10, 0.11).unwrap();
        assert_abs_diff_eq!(two_adc_bures_bound_checked(&inst, 90).unwrap().value, 0.0026229, epsilon = 1e-6);
        let far = TwoAdcInstance::new(0.5, 0.5, 0.0, 1.0).unwrap();
        let b = two_adc_bures_bound(&far, 2);
        assert!(!b.applicable && b.value == 0.0);
        let same = TwoAdcInstance::new(0.5, 0.5, 0.3, 0.3).unwrap();
        assert_abs_diff_eq!(two_adc_trace_bound(&same, 4, 2, 1.0, 1.0).unwrap().value, 0.5, epsilon = 1e-6);
    }
}
