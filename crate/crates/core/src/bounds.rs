//! Lower bounds on the minimum error probability of channel discrimination
//! with `n` adaptive queries.
//!
//! The scalar evaluators (`theorem*_bound`) take precomputed angle or norm
//! quantities; the `*_from_*` helpers obtain those from the SDP programs and
//! move the solver values in the direction that keeps the bound valid.
//!
//! A bound whose applicability condition fails is reported as the trivial
//! value `0` with `applicable = false`.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::qmat::{fidelity, max_abs_diff, stinespring_from_kraus, CMatrix, DensityMatrix, KrausChannel, TOL_CPTP};
use crate::sdp::{
    avg_weighted_diamond_sdp, min_avg_trace_norm_sdp, min_trace_norm_sdp, weighted_diamond_norm_sdp, DiamondSide,
    SolverStatus, PRIOR_TOL,
};

/// Slack on angle conditions such as `nτ ≤ π/2`.
pub const ANGLE_TOL: f64 = 1e-12;

/// Tolerance on the weight constraints of the weighted bounds.
pub const WEIGHT_TOL: f64 = 1e-10;

/// Below this distance from 1 geometric sums are summed term by term.
const GEOMETRIC_SERIES_CUTOFF: f64 = 1e-9;

/// Phase differences this close to a full turn are treated as zero.
const PHASE_TOL: f64 = 1e-12;

/// Channels with priors and answer groups. Groups may overlap and need not
/// cover every index.
#[derive(Debug, Clone)]
pub struct DiscriminationProblem {
    oracles: Vec<(f64, KrausChannel)>,
    groups: Vec<Vec<usize>>,
}

impl DiscriminationProblem {
    pub fn new(oracles: Vec<(f64, KrausChannel)>, groups: Vec<Vec<usize>>) -> Result<Self> {
        check_priors(&oracles.iter().map(|o| o.0).collect::<Vec<_>>())?;
        if let Some((a, b)) = oracles.first().and_then(|(_, first)| {
            oracles
                .iter()
                .find(|(_, o)| o.dim_in() != first.dim_in() || o.dim_out() != first.dim_out())
                .map(|(_, o)| (first, o))
        }) {
            return Err(Error::dims(
                format!("{}→{}", a.dim_in(), a.dim_out()),
                format!("{}→{}", b.dim_in(), b.dim_out()),
            ));
        }
        for (g, group) in groups.iter().enumerate() {
            if let Some(&bad) = group.iter().find(|&&i| i >= oracles.len()) {
                return Err(Error::InvalidParameter(format!(
                    "group {g} references oracle {bad}, but there are only {}",
                    oracles.len()
                )));
            }
        }
        Ok(DiscriminationProblem { oracles, groups })
    }

    /// Two channels with singleton answer groups.
    pub fn two_channel(p0: f64, ch0: KrausChannel, p1: f64, ch1: KrausChannel) -> Result<Self> {
        DiscriminationProblem::new(vec![(p0, ch0), (p1, ch1)], vec![vec![0], vec![1]])
    }

    /// One singleton group per channel.
    pub fn identification(oracles: Vec<(f64, KrausChannel)>) -> Result<Self> {
        let groups = (0..oracles.len()).map(|i| vec![i]).collect();
        DiscriminationProblem::new(oracles, groups)
    }

    pub fn oracles(&self) -> &[(f64, KrausChannel)] {
        &self.oracles
    }

    pub fn groups(&self) -> &[Vec<usize>] {
        &self.groups
    }

    pub fn priors(&self) -> Vec<f64> {
        self.oracles.iter().map(|o| o.0).collect()
    }

    pub fn len(&self) -> usize {
        self.oracles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.oracles.is_empty()
    }
}

pub(crate) fn check_priors(priors: &[f64]) -> Result<()> {
    if priors.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
        return Err(Error::InvalidPriors(format!("negative or non-finite prior in {priors:?}")));
    }
    let total: f64 = priors.iter().sum();
    if (total - 1.0).abs() > PRIOR_TOL {
        return Err(Error::InvalidPriors(format!("priors sum to {total}, expected 1")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Theorem {
    T1,
    T2,
    T3,
    T4,
    C1,
    Analytic,
}

/// Parameters a bound was evaluated at.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct BoundParams {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reference: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundResult {
    pub value: f64,
    pub theorem: Theorem,
    pub n: usize,
    pub params: BoundParams,
    pub applicable: bool,
    /// Statuses of the solver runs behind the value, in evaluation order.
    pub diagnostics: Vec<SolverStatus>,
}

impl BoundResult {
    fn new(theorem: Theorem, n: usize, params: BoundParams, value: Option<f64>) -> Self {
        BoundResult {
            value: value.unwrap_or(0.0),
            theorem,
            n,
            params,
            applicable: value.is_some(),
            diagnostics: Vec::new(),
        }
    }

    fn with_diagnostics(mut self, statuses: impl IntoIterator<Item = SolverStatus>) -> Self {
        self.diagnostics.extend(statuses);
        self
    }

    /// Checks `value ∈ [0, 1]` and that an inapplicable bound is exactly 0.
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.value) {
            return Err(Error::ConstraintViolation(format!("bound value {} outside [0, 1]", self.value)));
        }
        if !self.applicable && self.value != 0.0 {
            return Err(Error::ConstraintViolation("inapplicable bound with nonzero value".into()));
        }
        Ok(())
    }
}

/// Precomputed angle and norm quantities; any subset may be present.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct AngleQuantities {
    pub theta_a: Option<f64>,
    pub theta_d0: Option<f64>,
    pub theta_d1: Option<f64>,
    pub tau_a: Option<f64>,
    pub tau_d0: Option<f64>,
    pub tau_d1: Option<f64>,
    pub theta_m: Option<f64>,
}

impl AngleQuantities {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("theta_a", self.theta_a), ("tau_a", self.tau_a), ("theta_m", self.theta_m)] {
            if let Some(v) = v {
                check_angle(name, v)?;
            }
        }
        for (name, v) in [
            ("theta_d0", self.theta_d0),
            ("theta_d1", self.theta_d1),
            ("tau_d0", self.tau_d0),
            ("tau_d1", self.tau_d1),
        ] {
            if let Some(v) = v {
                check_nonneg(name, v)?;
            }
        }
        Ok(())
    }
}

fn check_angle(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && (-ANGLE_TOL..=FRAC_PI_2 + ANGLE_TOL).contains(&v) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} = {v} is not an angle in [0, π/2]")))
    }
}

fn check_nonneg(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} = {v} must be non-negative")))
    }
}

fn check_probability(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} = {v} is not a probability")))
    }
}

fn check_weight_constraint(lhs: f64, rhs: f64, what: &str) -> Result<()> {
    if (lhs - rhs).abs() <= WEIGHT_TOL * lhs.abs().max(rhs.abs()).max(1.0) {
        Ok(())
    } else {
        Err(Error::ConstraintViolation(format!("{what}: {lhs} ≠ {rhs}")))
    }
}

/// `Σ_{i<t} α^i`.
pub fn geometric_sum(alpha: f64, t: usize) -> f64 {
    if t == 0 {
        return 0.0;
    }
    if (alpha - 1.0).abs() < GEOMETRIC_SERIES_CUTOFF {
        let mut acc = 0.0;
        let mut term = 1.0;
        for _ in 0..t {
            acc += term;
            term *= alpha;
        }
        return acc;
    }
    (alpha.powi(t as i32) - 1.0) / (alpha - 1.0)
}

/// `cos²(x)` for `x ∈ [0, π/2]`, exactly 0 at the right end.
fn cos_sq(x: f64) -> f64 {
    if (FRAC_PI_2 - x).abs() <= ANGLE_TOL {
        0.0
    } else {
        x.cos().powi(2)
    }
}

/// `½(1 − √(1 − x))` without cancellation for small `x`.
fn half_one_minus_sqrt(x: f64) -> f64 {
    let x = x.clamp(0.0, 1.0);
    x / (2.0 * (1.0 + (1.0 - x).sqrt()))
}

/// Zero-query error: the prior mass outside the best answer group.
pub fn p_err_zero(prob: &DiscriminationProblem) -> f64 {
    prob.groups
        .iter()
        .map(|g| {
            let mass: f64 = (0..prob.len())
                .filter(|i| !g.contains(i))
                .map(|i| prob.oracles[i].0)
                .sum();
            mass.clamp(0.0, 1.0)
        })
        .fold(1.0, f64::min)
}

/// `arccos √p`.
pub fn theta_m(p_err_m_lb: f64) -> f64 {
    p_err_m_lb.clamp(0.0, 1.0).sqrt().acos()
}

/// `cos²((n−m)θ_𝒜 + θ_m)` when the argument stays in `[0, π/2]`.
///
/// Any certified lower bound on `p_err(m)` may be supplied: a smaller value
/// only enlarges `θ_m` and so weakens the result.
pub fn theorem1_bound(n: usize, m: usize, theta_a: f64, p_err_m_lb: f64) -> Result<BoundResult> {
    if m > n {
        return Err(Error::InvalidParameter(format!("m = {m} exceeds n = {n}")));
    }
    check_angle("theta_a", theta_a)?;
    check_probability("p_err(m)", p_err_m_lb)?;
    let value = if n == m {
        Some(p_err_m_lb)
    } else {
        let arg = (n - m) as f64 * theta_a.max(0.0) + theta_m(p_err_m_lb);
        (arg <= FRAC_PI_2 + ANGLE_TOL).then(|| cos_sq(arg.min(FRAC_PI_2)))
    };
    let params = BoundParams {
        m: Some(m),
        ..Default::default()
    };
    Ok(BoundResult::new(Theorem::T1, n, params, value))
}

/// `p_err(m) − (Σ_{i<n−k} α₀^i)θ⁰_⋄ − (Σ_{i<k−m} α₁^i)θ¹_⋄`, clipped at 0,
/// under `α₀^{n−k} = α₁^{k−m}`.
#[allow(clippy::too_many_arguments)]
pub fn theorem2_bound(
    n: usize,
    m: usize,
    k: usize,
    alpha0: f64,
    alpha1: f64,
    theta_d0: f64,
    theta_d1: f64,
    p_err_m_lb: f64,
) -> Result<BoundResult> {
    if !(m <= k && k <= n) {
        return Err(Error::InvalidParameter(format!("need m ≤ k ≤ n, got m={m}, k={k}, n={n}")));
    }
    check_nonneg("alpha0", alpha0)?;
    check_nonneg("alpha1", alpha1)?;
    check_nonneg("theta_d0", theta_d0)?;
    check_nonneg("theta_d1", theta_d1)?;
    check_probability("p_err(m)", p_err_m_lb)?;
    check_weight_constraint(
        alpha0.powi((n - k) as i32),
        alpha1.powi((k - m) as i32),
        "α₀^(n−k) = α₁^(k−m)",
    )?;
    let value = p_err_m_lb - geometric_sum(alpha0, n - k) * theta_d0 - geometric_sum(alpha1, k - m) * theta_d1;
    let params = BoundParams {
        m: Some(m),
        k: Some(k),
        alpha0: Some(alpha0),
        alpha1: Some(alpha1),
        reference: None,
    };
    Ok(BoundResult::new(Theorem::T2, n, params, Some(value.clamp(0.0, 1.0))))
}

/// `½(1 − √(1 − 4p₀p₁cos²(nτ_𝒜)))` when `nτ_𝒜 ≤ π/2`.
pub fn theorem3_bound(n: usize, p0: f64, p1: f64, tau_a: f64) -> Result<BoundResult> {
    check_priors(&[p0, p1])?;
    check_angle("tau_a", tau_a)?;
    let arg = n as f64 * tau_a.max(0.0);
    let value = (arg <= FRAC_PI_2 + ANGLE_TOL).then(|| half_one_minus_sqrt(4.0 * p0 * p1 * cos_sq(arg.min(FRAC_PI_2))));
    Ok(BoundResult::new(Theorem::T3, n, BoundParams::default(), value))
}

/// `½[1 − p₀(Σ_{i<k} α₀^i)τ⁰_⋄ − p₁(Σ_{i<n−k} α₁^i)τ¹_⋄]`, clipped at 0,
/// under `p₀α₀^k = p₁α₁^{n−k}`.
#[allow(clippy::too_many_arguments)]
pub fn theorem4_bound(
    n: usize,
    k: usize,
    p0: f64,
    p1: f64,
    alpha0: f64,
    alpha1: f64,
    tau_d0: f64,
    tau_d1: f64,
) -> Result<BoundResult> {
    if k > n {
        return Err(Error::InvalidParameter(format!("k = {k} exceeds n = {n}")));
    }
    check_priors(&[p0, p1])?;
    check_nonneg("alpha0", alpha0)?;
    check_nonneg("alpha1", alpha1)?;
    check_nonneg("tau_d0", tau_d0)?;
    check_nonneg("tau_d1", tau_d1)?;
    check_weight_constraint(
        p0 * alpha0.powi(k as i32),
        p1 * alpha1.powi((n - k) as i32),
        "p₀α₀^k = p₁α₁^(n−k)",
    )?;
    let value =
        0.5 * (1.0 - p0 * geometric_sum(alpha0, k) * tau_d0 - p1 * geometric_sum(alpha1, n - k) * tau_d1);
    let params = BoundParams {
        m: None,
        k: Some(k),
        alpha0: Some(alpha0),
        alpha1: Some(alpha1),
        reference: None,
    };
    Ok(BoundResult::new(Theorem::T4, n, params, Some(value.clamp(0.0, 1.0))))
}

/// `√((a₀+a₁)² − 4a₀a₁F(ρ₀,ρ₁)²)`, an upper bound on `‖a₀ρ₀ − a₁ρ₁‖₁`.
pub fn fuchs_vdg_generalized(a0: f64, a1: f64, rho0: &DensityMatrix, rho1: &DensityMatrix) -> Result<f64> {
    check_nonneg("a0", a0)?;
    check_nonneg("a1", a1)?;
    let f = fidelity(rho0, rho1)?;
    Ok(((a0 + a1).powi(2) - 4.0 * a0 * a1 * f * f).max(0.0).sqrt())
}

/// `min_k max_ℓ arg_{≥0}(e^{i(θ_ℓ−θ_k)})`: the shortest arc, traversed
/// counter-clockwise from one of the points, containing all phases.
pub fn covering_angle(phases: &[f64]) -> Result<f64> {
    if phases.is_empty() {
        return Err(Error::InvalidParameter("covering angle of an empty set".into()));
    }
    if phases.iter().any(|p| !p.is_finite()) {
        return Err(Error::NonFinite);
    }
    let two_pi = 2.0 * PI;
    let spread = |k: usize| {
        phases
            .iter()
            .map(|&p| {
                let d = (p - phases[k]).rem_euclid(two_pi);
                if d > two_pi - PHASE_TOL {
                    0.0
                } else {
                    d
                }
            })
            .fold(0.0, f64::max)
    };
    // Strict comparison keeps the smallest reference index on ties.
    let mut best = spread(0);
    for k in 1..phases.len() {
        let s = spread(k);
        if s < best {
            best = s;
        }
    }
    Ok(best)
}

/// Eigenphases of `U₀†U₁` in `[0, 2π)`.
pub fn relative_eigenphases(u0: &CMatrix, u1: &CMatrix) -> Result<Vec<f64>> {
    check_unitary(u0)?;
    check_unitary(u1)?;
    if u0.shape() != u1.shape() {
        return Err(Error::dims(u0.nrows(), u1.nrows()));
    }
    let w = u0.adjoint() * u1;
    let eig = w
        .clone()
        .schur()
        .eigenvalues()
        .ok_or_else(|| Error::Unsupported("Schur form did not converge".into()))?;
    Ok(eig.iter().map(|z| z.arg().rem_euclid(2.0 * PI)).collect())
}

fn check_unitary(u: &CMatrix) -> Result<()> {
    if !u.is_square() {
        return Err(Error::dims("square matrix", format!("{}x{}", u.nrows(), u.ncols())));
    }
    let dev = max_abs_diff(&(u.adjoint() * u), &CMatrix::identity(u.nrows(), u.nrows()));
    if dev > TOL_CPTP {
        return Err(Error::NotUnitary(dev));
    }
    Ok(())
}

/// Exact minimum error for discriminating two unitary channels with `n`
/// queries, `½(1 − √(1 − 4p₀p₁cos²(nθ_cover/2)))`, valid while
/// `nθ_cover/2 ≤ π/2`.
pub fn unitary_exact_error(n: usize, p0: f64, p1: f64, u0: &CMatrix, u1: &CMatrix) -> Result<BoundResult> {
    check_priors(&[p0, p1])?;
    let theta = covering_angle(&relative_eigenphases(u0, u1)?)?;
    let half = 0.5 * theta;
    let arg = n as f64 * half;
    let value = (arg <= FRAC_PI_2 + ANGLE_TOL).then(|| half_one_minus_sqrt(4.0 * p0 * p1 * cos_sq(arg.min(FRAC_PI_2))));
    Ok(BoundResult::new(Theorem::C1, n, BoundParams::default(), value))
}

/// `τ_𝒜` of two channels from the trace-norm program, rounded upwards.
pub fn tau_a_sdp(ch0: &KrausChannel, ch1: &KrausChannel) -> Result<(f64, SolverStatus)> {
    let r = min_trace_norm_sdp(&stinespring_from_kraus(ch0), &stinespring_from_kraus(ch1))?;
    Ok((r.safe_value().clamp(0.0, 1.0).acos(), r.status))
}

/// `θ_𝒜(Ψ ⊗ id)` from the averaged trace-norm program, rounded upwards.
pub fn theta_a_sdp(prob: &DiscriminationProblem, reference: &KrausChannel) -> Result<(f64, SolverStatus)> {
    let oracles: Vec<_> = prob.oracles.iter().map(|(p, o)| (*p, stinespring_from_kraus(o))).collect();
    let r = min_avg_trace_norm_sdp(&oracles, &stinespring_from_kraus(reference))?;
    Ok((r.safe_value().clamp(0.0, 1.0).acos(), r.status))
}

/// Theorem 3 with `τ_𝒜` computed by the SDP.
pub fn theorem3_from_channels(n: usize, p0: f64, ch0: &KrausChannel, p1: f64, ch1: &KrausChannel) -> Result<BoundResult> {
    let (tau, status) = tau_a_sdp(ch0, ch1)?;
    Ok(theorem3_bound(n, p0, p1, tau.min(FRAC_PI_2))?.with_diagnostics([status]))
}

/// Theorem 1 with `m = 0`, the exact `p_err(0)` and `θ_𝒜` from the SDP.
pub fn theorem1_from_problem(prob: &DiscriminationProblem, reference: &KrausChannel, n: usize) -> Result<BoundResult> {
    let (theta, status) = theta_a_sdp(prob, reference)?;
    Ok(theorem1_bound(n, 0, theta.min(FRAC_PI_2), p_err_zero(prob))?.with_diagnostics([status]))
}

/// `α₁` forced by `p₀α₀^k = p₁α₁^{n−k}`; `None` when `k = n`.
pub fn theorem4_alpha1(n: usize, k: usize, p0: f64, p1: f64, alpha0: f64) -> Option<f64> {
    (k < n).then(|| {
        if p1 == 0.0 {
            // Only reachable with p₀α₀^k = 0; any α₁ works, 1 is canonical.
            1.0
        } else {
            (p0 * alpha0.powi(k as i32) / p1).powf(1.0 / (n - k) as f64)
        }
    })
}

/// `α₀` forced by the same constraint when `k = n > 0`.
pub fn theorem4_alpha0_at_full(n: usize, p0: f64, p1: f64) -> f64 {
    if p0 == 0.0 {
        1.0
    } else {
        (p1 / p0).powf(1.0 / n as f64)
    }
}

/// The weights `(α₀, α₁)` of the Theorem 4 family at a given `k` and free
/// parameter `α₀` (ignored where the constraint pins it).
pub fn theorem4_weights(n: usize, k: usize, p0: f64, p1: f64, alpha0: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 1.0);
    }
    match theorem4_alpha1(n, k, p0, p1, alpha0) {
        Some(a1) => (alpha0, a1),
        None => (theorem4_alpha0_at_full(n, p0, p1), 1.0),
    }
}

/// Theorem 4 with both weighted diamond norms from the SDP. The unused norm
/// of an empty sum is not computed.
pub fn theorem4_from_channels(
    n: usize,
    k: usize,
    p0: f64,
    ch0: &KrausChannel,
    p1: f64,
    ch1: &KrausChannel,
    alpha0: f64,
) -> Result<BoundResult> {
    check_priors(&[p0, p1])?;
    let (a0, a1) = theorem4_weights(n, k, p0, p1, alpha0);
    let mut statuses = Vec::new();
    let tau0 = if k > 0 {
        let r = weighted_diamond_norm_sdp(ch0, ch1, a0)?;
        statuses.push(r.status);
        r.safe_value().max(0.0)
    } else {
        0.0
    };
    let tau1 = if k < n {
        let r = weighted_diamond_norm_sdp(ch1, ch0, a1)?;
        statuses.push(r.status);
        r.safe_value().max(0.0)
    } else {
        0.0
    };
    Ok(theorem4_bound(n, k, p0, p1, a0, a1, tau0, tau1)?.with_diagnostics(statuses))
}

/// The weights `(α₀, α₁)` of the Theorem 2 family with `m = 0`.
pub fn theorem2_weights(n: usize, k: usize, alpha0: f64) -> (f64, f64) {
    if k == 0 {
        // α₀^n = 1 pins α₀; the α₁ sum is empty.
        (1.0, 1.0)
    } else if k == n {
        // α₁^n = 1 pins α₁; the α₀ sum is empty.
        (1.0, 1.0)
    } else {
        (alpha0, alpha0.powf((n - k) as f64 / k as f64))
    }
}

/// Theorem 2 with `m = 0`, exact `p_err(0)` and both averaged diamond
/// quantities from the SDP.
pub fn theorem2_from_problem(
    prob: &DiscriminationProblem,
    reference: &KrausChannel,
    n: usize,
    k: usize,
    alpha0: f64,
) -> Result<BoundResult> {
    if k > n {
        return Err(Error::InvalidParameter(format!("k = {k} exceeds n = {n}")));
    }
    let (a0, a1) = theorem2_weights(n, k, alpha0);
    let mut statuses = Vec::new();
    let theta0 = if n > k {
        let r = avg_weighted_diamond_sdp(prob.oracles(), reference, a0, DiamondSide::OracleMinusRef)?;
        statuses.push(r.status);
        r.safe_value().max(0.0)
    } else {
        0.0
    };
    let theta1 = if k > 0 {
        let r = avg_weighted_diamond_sdp(prob.oracles(), reference, a1, DiamondSide::RefMinusOracle)?;
        statuses.push(r.status);
        r.safe_value().max(0.0)
    } else {
        0.0
    };
    Ok(theorem2_bound(n, 0, k, a0, a1, theta0, theta1, p_err_zero(prob))?.with_diagnostics(statuses))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmat::{c, PureState};
    use approx::assert_abs_diff_eq;

    fn diag_phase(phis: &[f64]) -> CMatrix {
        CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            phis.len(),
            phis.iter().map(|&p| c(p.cos(), p.sin())),
        ))
    }

    #[test]
    fn p_err_zero_examples() {
        let id = KrausChannel::identity(2);
        let two = DiscriminationProblem::two_channel(0.5, id.clone(), 0.5, id.clone()).unwrap();
        assert_abs_diff_eq!(p_err_zero(&two), 0.5, epsilon = 1e-15);
        let three = DiscriminationProblem::identification(vec![(1.0 / 3.0, id.clone()); 3]).unwrap();
        assert_abs_diff_eq!(p_err_zero(&three), 2.0 / 3.0, epsilon = 1e-15);
        let four = DiscriminationProblem::identification(vec![(0.25, id.clone()); 4]).unwrap();
        assert_abs_diff_eq!(p_err_zero(&four), 0.75, epsilon = 1e-15);
        assert_abs_diff_eq!(theta_m(0.75), 0.5f64.asin(), epsilon = 1e-15);
        let none = DiscriminationProblem::new(vec![(1.0, id.clone())], vec![]).unwrap();
        assert_eq!(p_err_zero(&none), 1.0);
        assert!(DiscriminationProblem::new(vec![(1.0, id.clone())], vec![vec![1]]).is_err());
        assert!(matches!(
            DiscriminationProblem::two_channel(0.5, id.clone(), 0.6, id),
            Err(Error::InvalidPriors(_))
        ));
    }

    #[test]
    fn theorem1_examples() {
        let b = theorem1_bound(3, 3, 0.4, 0.37).unwrap();
        assert_abs_diff_eq!(b.value, 0.37, epsilon = 1e-14);
        let s = 0.25f64.asin();
        let b = theorem1_bound(2, 0, 2.0 * s, 1.0 - 1.0 / 16.0).unwrap();
        assert_abs_diff_eq!(b.value, (5.0 * s).cos().powi(2), epsilon = 1e-14);
        assert_abs_diff_eq!(b.value, 375.0 / 4096.0, epsilon = 1e-14);
        let off = theorem1_bound(10, 0, 1.0, 0.5).unwrap();
        assert!(!off.applicable);
        assert_eq!(off.value, 0.0);
        assert!(theorem1_bound(1, 2, 0.1, 0.5).is_err());
    }

    #[test]
    fn theorem2_examples() {
        let b = theorem2_bound(4, 4, 4, 0.3, 0.7, 0.2, 0.1, 0.6).unwrap();
        assert_abs_diff_eq!(b.value, 0.6, epsilon = 1e-15);
        let b = theorem2_bound(6, 0, 3, 0.5, 0.5, 0.0, 0.0, 0.6).unwrap();
        assert_abs_diff_eq!(b.value, 0.6, epsilon = 1e-15);
        let b = theorem2_bound(3, 0, 1, 0.5, 0.25, 0.01, 0.02, 0.6).unwrap();
        assert_abs_diff_eq!(b.value, 0.6 - 1.5 * 0.01 - 0.02, epsilon = 1e-15);
        assert!(matches!(
            theorem2_bound(3, 0, 1, 0.5, 0.5, 0.01, 0.02, 0.6),
            Err(Error::ConstraintViolation(_))
        ));
        assert!(theorem2_bound(3, 2, 1, 1.0, 1.0, 0.0, 0.0, 0.5).is_err());
    }

    #[test]
    fn theorem3_examples() {
        assert_eq!(theorem3_bound(2, 0.5, 0.5, FRAC_PI_2 / 2.0).unwrap().value, 0.0);
        assert_abs_diff_eq!(theorem3_bound(5, 0.3, 0.7, 0.0).unwrap().value, 0.3, epsilon = 1e-15);
        let delta = (0.10f64 * 0.11).sqrt() + (0.90f64 * 0.89).sqrt();
        let b = theorem3_bound(90, 0.5, 0.5, delta.acos()).unwrap();
        assert_abs_diff_eq!(b.value, 0.00262, epsilon = 1e-5);
        let off = theorem3_bound(3, 0.5, 0.5, 1.0).unwrap();
        assert!(!off.applicable && off.value == 0.0);
    }

    #[test]
    fn theorem4_examples() {
        let b = theorem4_bound(4, 2, 0.5, 0.5, 1.0, 1.0, 0.0, 0.0).unwrap();
        assert_abs_diff_eq!(b.value, 0.5, epsilon = 1e-15);
        let b = theorem4_bound(1, 0, 0.5, 0.5, 0.3, 1.0, 9.0, 0.4).unwrap();
        assert_abs_diff_eq!(b.value, 0.5 * (1.0 - 0.2), epsilon = 1e-15);
        assert!(theorem4_bound(1, 0, 0.5, 0.5, 0.3, 0.9, 0.0, 0.4).is_err());
        assert_eq!(theorem4_weights(3, 0, 0.25, 0.75, 0.9).1, (1.0f64 / 3.0).powf(1.0 / 3.0));
    }

    #[test]
    fn geometric_sum_branches() {
        assert_eq!(geometric_sum(0.7, 0), 0.0);
        assert_eq!(geometric_sum(0.0, 4), 1.0);
        assert_abs_diff_eq!(geometric_sum(1.0, 90), 90.0, epsilon = 1e-12);
        assert_abs_diff_eq!(geometric_sum(1.0 + 1e-10, 90), 90.0, epsilon = 1e-6);
        assert_abs_diff_eq!(geometric_sum(0.5, 3), 1.75, epsilon = 1e-15);
    }

    #[test]
    fn fuchs_examples() {
        let r = DensityMatrix::basis(2, 0);
        assert_abs_diff_eq!(fuchs_vdg_generalized(1.0, 1.0, &r, &r).unwrap(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(
            fuchs_vdg_generalized(1.0, 0.0, &r, &PureState::plus().density()).unwrap(),
            1.0,
            epsilon = 1e-12
        );
        assert!(fuchs_vdg_generalized(-1.0, 0.0, &r, &r).is_err());
    }

    #[test]
    fn covering_examples() {
        assert_eq!(covering_angle(&[1.3]).unwrap(), 0.0);
        assert_abs_diff_eq!(covering_angle(&[0.0, 0.3]).unwrap(), 0.3, epsilon = 1e-15);
        let third = 2.0 * PI / 3.0;
        assert_abs_diff_eq!(covering_angle(&[0.0, third, 2.0 * third]).unwrap(), 2.0 * third, epsilon = 1e-12);
        assert!(covering_angle(&[]).is_err());
        assert_abs_diff_eq!(covering_angle(&[6.2, 0.1]).unwrap(), 0.1 + 2.0 * PI - 6.2, epsilon = 1e-12);
    }

    #[test]
    fn unitary_examples() {
        let id = CMatrix::identity(2, 2);
        assert_abs_diff_eq!(unitary_exact_error(3, 0.5, 0.5, &id, &id).unwrap().value, 0.5, epsilon = 1e-15);
        let v = unitary_exact_error(1, 0.5, 0.5, &id, &diag_phase(&[0.0, 0.3])).unwrap();
        assert_abs_diff_eq!(v.value, 0.5 * (1.0 - 0.15f64.sin()), epsilon = 1e-12);
        assert_abs_diff_eq!(v.value, 0.425281, epsilon = 1e-6);
        let z = unitary_exact_error(1, 0.5, 0.5, &id, &diag_phase(&[0.0, PI])).unwrap();
        assert_abs_diff_eq!(z.value, 0.0, epsilon = 1e-15);
        assert!(matches!(
            unitary_exact_error(1, 0.5, 0.5, &id, &(id.scale(2.0))),
            Err(Error::NotUnitary(_))
        ));
    }

    #[test]
    fn validate_flags() {
        let mut b = theorem3_bound(1, 0.5, 0.5, 0.2).unwrap();
        assert!(b.validate().is_ok());
        b.applicable = false;
        assert!(b.validate().is_err());
    }
}
