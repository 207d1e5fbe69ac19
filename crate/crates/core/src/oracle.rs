//! Brute-force estimates of the program values, by derivative-free search
//! over pure input states of `A ⊗ R` with `dim R = dim A`.
//!
//! Max-type searches return values below the true maximum and min-type
//! searches values above the true minimum, so together with the SDP they
//! sandwich the exact value. [`sandwich_suite`] runs that comparison on random
//! qubit instances.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{check_priors, p_err_zero, DiscriminationProblem};
use crate::error::{Error, Result};
use crate::qmat::random::random_channel;
use crate::qmat::{
    c, channel_tensor, fidelity_psd, hermitian_trace_norm, stinespring_from_kraus, CMatrix, CVector, KrausChannel,
};
use crate::sdp::{
    avg_weighted_diamond_sdp, min_avg_trace_norm_sdp, min_trace_norm_sdp, weighted_diamond_norm_sdp, DiamondSide,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub restarts: usize,
    pub steps: usize,
    pub initial_step: f64,
    /// The step size halves after this many steps.
    pub halve_every: usize,
    pub seed: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            restarts: 64,
            steps: 2000,
            initial_step: 0.3,
            halve_every: 200,
            seed: 0,
        }
    }
}

impl SearchConfig {
    pub fn with_seed(seed: u64) -> Self {
        SearchConfig {
            seed,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return Err(Error::InvalidParameter("search needs at least one restart".into()));
        }
        if !(self.initial_step.is_finite() && self.initial_step > 0.0) || self.halve_every == 0 {
            return Err(Error::InvalidParameter("bad step schedule".into()));
        }
        Ok(())
    }

    /// Step size used at step `t`.
    pub fn step_at(&self, t: usize) -> f64 {
        self.initial_step * 0.5f64.powi((t / self.halve_every) as i32)
    }
}

/// Unit vector in `ℂ^d` from `2d − 2` hyperspherical coordinates: `d − 1`
/// magnitude angles followed by `d − 1` relative phases.
pub fn pure_from_coords(coords: &[f64], d: usize) -> CVector {
    assert_eq!(coords.len(), 2 * d - 2, "need 2d − 2 coordinates");
    let (angles, phases) = coords.split_at(d - 1);
    let mut v = CVector::zeros(d);
    let mut s = 1.0;
    for i in 0..d {
        let mag = if i + 1 < d { s * angles[i].cos() } else { s };
        if i + 1 < d {
            s *= angles[i].sin();
        }
        let ph = if i == 0 { 0.0 } else { phases[i - 1] };
        v[i] = c(mag * ph.cos(), mag * ph.sin());
    }
    v
}

/// `(𝒩 ⊗ id_R)(|ψ⟩⟨ψ|)` with `ψ` indexed `a·d_R + r`.
pub fn output_with_reference(ch: &KrausChannel, psi: &CVector, dim_ref: usize) -> CMatrix {
    let din = ch.dim_in();
    let psi_mat = CMatrix::from_fn(din, dim_ref, |a, r| psi[a * dim_ref + r]);
    let dout = ch.dim_out();
    let mut rho = CMatrix::zeros(dout * dim_ref, dout * dim_ref);
    for k in ch.kraus() {
        let w = k * &psi_mat;
        let v = CVector::from_fn(dout * dim_ref, |i, _| w[(i / dim_ref, i % dim_ref)]);
        rho += &v * v.adjoint();
    }
    rho
}

/// Random-restart hill climbing; returns the best value found.
fn hill_climb<F>(d: usize, maximize: bool, f: F, cfg: &SearchConfig) -> Result<f64>
where
    F: Fn(&CVector) -> f64 + Sync,
{
    cfg.validate()?;
    let sign = if maximize { 1.0 } else { -1.0 };
    let np = 2 * d - 2;
    if np == 0 {
        return Ok(f(&CVector::from_element(1, c(1.0, 0.0))));
    }
    let best: Vec<f64> = (0..cfg.restarts)
        .into_par_iter()
        .map(|restart| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(restart as u64));
            let mut x: Vec<f64> = (0..np)
                .map(|i| if i < d - 1 { rng.random::<f64>() * FRAC_PI_2 } else { rng.random::<f64>() * 2.0 * PI })
                .collect();
            let mut fx = sign * f(&pure_from_coords(&x, d));
            let mut trial = vec![0.0; np];
            for t in 0..cfg.steps {
                let h = cfg.step_at(t);
                let dir: Vec<f64> = (0..np).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
                let norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
                for i in 0..np {
                    trial[i] = x[i] + h * dir[i] / norm;
                }
                let ft = sign * f(&pure_from_coords(&trial, d));
                if ft > fx {
                    fx = ft;
                    std::mem::swap(&mut x, &mut trial);
                }
            }
            fx
        })
        .collect();
    Ok(sign * best.into_iter().fold(f64::NEG_INFINITY, f64::max))
}

fn same_shape(a: &KrausChannel, b: &KrausChannel) -> Result<()> {
    if a.dim_in() == b.dim_in() && a.dim_out() == b.dim_out() {
        Ok(())
    } else {
        Err(Error::dims(a.dim_in(), b.dim_in()))
    }
}

/// Search estimate of `max_φ ‖((𝒪⁰ − α𝒪¹) ⊗ id)(|φ⟩⟨φ|)‖₁`, from below.
pub fn max_weighted_trace_norm_search(ch0: &KrausChannel, ch1: &KrausChannel, alpha: f64, cfg: &SearchConfig) -> Result<f64> {
    same_shape(ch0, ch1)?;
    let dr = ch0.dim_in();
    hill_climb(
        dr * dr,
        true,
        |psi| {
            let diff = output_with_reference(ch0, psi, dr) - output_with_reference(ch1, psi, dr).scale(alpha);
            hermitian_trace_norm(&diff)
        },
        cfg,
    )
}

/// Search estimate of `max_φ Σ_ξ p_ξ ½‖((𝒪^ξ − αΨ) ⊗ id)(|φ⟩⟨φ|)‖₁` (or the
/// `α𝒪^ξ − Ψ` variant), from below.
pub fn max_avg_weighted_trace_norm_search(
    oracles: &[(f64, KrausChannel)],
    reference: &KrausChannel,
    alpha: f64,
    side: DiamondSide,
    cfg: &SearchConfig,
) -> Result<f64> {
    check_priors(&oracles.iter().map(|o| o.0).collect::<Vec<_>>())?;
    for (_, o) in oracles {
        same_shape(o, reference)?;
    }
    let dr = reference.dim_in();
    hill_climb(
        dr * dr,
        true,
        |psi| {
            let out_ref = output_with_reference(reference, psi, dr);
            oracles
                .iter()
                .map(|(p, o)| {
                    let out = output_with_reference(o, psi, dr);
                    let diff = match side {
                        DiamondSide::OracleMinusRef => out - out_ref.scale(alpha),
                        DiamondSide::RefMinusOracle => out.scale(alpha) - &out_ref,
                    };
                    0.5 * p * hermitian_trace_norm(&diff)
                })
                .sum()
        },
        cfg,
    )
}

/// Search estimate of `min_φ Σ_ξ p_ξ F((𝒪^ξ ⊗ id)(φ), (Ψ ⊗ id)(φ))`, from
/// above.
pub fn min_avg_fidelity_search(oracles: &[(f64, KrausChannel)], reference: &KrausChannel, cfg: &SearchConfig) -> Result<f64> {
    check_priors(&oracles.iter().map(|o| o.0).collect::<Vec<_>>())?;
    for (_, o) in oracles {
        same_shape(o, reference)?;
    }
    let dr = reference.dim_in();
    hill_climb(
        dr * dr,
        false,
        |psi| {
            let out_ref = output_with_reference(reference, psi, dr);
            oracles
                .iter()
                .map(|(p, o)| p * fidelity_psd(&output_with_reference(o, psi, dr), &out_ref))
                .sum()
        },
        cfg,
    )
}

/// Search estimate of `min_φ F((𝒪⁰ ⊗ id)(φ), (𝒪¹ ⊗ id)(φ))`, from above.
pub fn min_fidelity_search(ch0: &KrausChannel, ch1: &KrausChannel, cfg: &SearchConfig) -> Result<f64> {
    min_avg_fidelity_search(&[(1.0, ch1.clone())], ch0, cfg)
}

/// Error probability achievable for a two-channel problem: exact one-shot
/// value (up to the search) for `n = 1`, best non-adaptive parallel
/// strategy found for `n = 2`. Every valid lower bound lies below it.
pub fn exhaustive_small_check(prob: &DiscriminationProblem, n: usize, cfg: &SearchConfig) -> Result<f64> {
    if n == 0 {
        return Ok(p_err_zero(prob));
    }
    let singleton = prob.len() == 2 && prob.groups().len() == 2 && prob.groups().iter().all(|g| g.len() == 1);
    if !singleton || prob.groups()[0] == prob.groups()[1] {
        return Err(Error::Unsupported("only two-channel identification problems are supported".into()));
    }
    let (p0, ch0) = &prob.oracles()[prob.groups()[0][0]];
    let (p1, ch1) = &prob.oracles()[prob.groups()[1][0]];
    let (c0, c1) = match n {
        1 => (ch0.clone(), ch1.clone()),
        2 => (channel_tensor(ch0, ch0), channel_tensor(ch1, ch1)),
        _ => return Err(Error::Unsupported(format!("n = {n} > 2"))),
    };
    if *p0 == 0.0 || *p1 == 0.0 {
        return Ok(0.0);
    }
    // ‖p₀ρ₀ − p₁ρ₁‖₁ = p₀‖ρ₀ − (p₁/p₀)ρ₁‖₁
    let norm = p0 * max_weighted_trace_norm_search(&c0, &c1, p1 / p0, cfg)?;
    Ok((0.5 * (1.0 - norm)).clamp(0.0, 1.0))
}

/// The four program families checked against the searches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SandwichOp {
    WeightedDiamond,
    TraceNorm,
    AvgWeightedDiamond,
    AvgTraceNorm,
}

impl SandwichOp {
    pub const ALL: [SandwichOp; 4] = [
        SandwichOp::WeightedDiamond,
        SandwichOp::TraceNorm,
        SandwichOp::AvgWeightedDiamond,
        SandwichOp::AvgTraceNorm,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SandwichOp::WeightedDiamond => "weighted_diamond_norm",
            SandwichOp::TraceNorm => "min_trace_norm",
            SandwichOp::AvgWeightedDiamond => "avg_weighted_diamond",
            SandwichOp::AvgTraceNorm => "min_avg_trace_norm",
        }
    }

    /// Max-type programs are approached from below by the search.
    pub fn is_max(self) -> bool {
        matches!(self, SandwichOp::WeightedDiamond | SandwichOp::AvgWeightedDiamond)
    }
}

/// Search never beats the SDP by more than this.
pub const SANDWICH_SIDE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SandwichReport {
    pub op: SandwichOp,
    pub instances: usize,
    /// Largest `|SDP − search|`.
    pub max_gap: f64,
    /// Largest amount by which the search crossed the SDP value.
    pub max_crossing: f64,
    pub tol: f64,
    pub passed: bool,
}

fn random_qubit_channel<R: Rng>(rng: &mut R) -> KrausChannel {
    let k = rng.random_range(1..=3);
    random_channel(rng, 2, 2, k)
}

fn random_oracles<R: Rng>(rng: &mut R) -> Vec<(f64, KrausChannel)> {
    let len = rng.random_range(2..=3);
    let w: Vec<f64> = (0..len).map(|_| rng.random_range(0.1..1.0)).collect();
    let total: f64 = w.iter().sum();
    let mut out: Vec<(f64, KrausChannel)> = w.iter().map(|x| (x / total, random_qubit_channel(rng))).collect();
    let rest: f64 = out[1..].iter().map(|o| o.0).sum();
    out[0].0 = 1.0 - rest;
    out
}

/// SDP value and search value for one random qubit instance of `op`.
pub fn sandwich_instance(op: SandwichOp, seed: u64, cfg: &SearchConfig) -> Result<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let alpha = rng.random_range(0.2..1.5);
    Ok(match op {
        SandwichOp::WeightedDiamond => {
            let (a, b) = (random_qubit_channel(&mut rng), random_qubit_channel(&mut rng));
            (
                weighted_diamond_norm_sdp(&a, &b, alpha)?.value,
                max_weighted_trace_norm_search(&a, &b, alpha, cfg)?,
            )
        }
        SandwichOp::TraceNorm => {
            let (a, b) = (random_qubit_channel(&mut rng), random_qubit_channel(&mut rng));
            (
                min_trace_norm_sdp(&stinespring_from_kraus(&a), &stinespring_from_kraus(&b))?.value,
                min_fidelity_search(&a, &b, cfg)?,
            )
        }
        SandwichOp::AvgWeightedDiamond => {
            let oracles = random_oracles(&mut rng);
            let reference = random_qubit_channel(&mut rng);
            let side = if rng.random_bool(0.5) {
                DiamondSide::OracleMinusRef
            } else {
                DiamondSide::RefMinusOracle
            };
            (
                avg_weighted_diamond_sdp(&oracles, &reference, alpha, side)?.value,
                max_avg_weighted_trace_norm_search(&oracles, &reference, alpha, side, cfg)?,
            )
        }
        SandwichOp::AvgTraceNorm => {
            let oracles = random_oracles(&mut rng);
            let reference = random_qubit_channel(&mut rng);
            let dilated: Vec<_> = oracles.iter().map(|(p, o)| (*p, stinespring_from_kraus(o))).collect();
            (
                min_avg_trace_norm_sdp(&dilated, &stinespring_from_kraus(&reference))?.value,
                min_avg_fidelity_search(&oracles, &reference, cfg)?,
            )
        }
    })
}

/// Compares SDP and search on `instances` random qubit instances. Instance
/// `i` uses seed `seed + i` for both the instance and the search.
pub fn sandwich_suite(op: SandwichOp, instances: usize, seed: u64, cfg: &SearchConfig, tol: f64) -> Result<SandwichReport> {
    let mut max_gap = 0.0f64;
    let mut max_crossing = 0.0f64;
    for i in 0..instances as u64 {
        let s = seed.wrapping_add(i);
        let (sdp, search) = sandwich_instance(op, s, &SearchConfig { seed: s, ..*cfg })?;
        let crossing = if op.is_max() { search - sdp } else { sdp - search };
        max_gap = max_gap.max((sdp - search).abs());
        max_crossing = max_crossing.max(crossing);
    }
    Ok(SandwichReport {
        op,
        instances,
        max_gap,
        max_crossing,
        tol,
        passed: max_gap <= tol && max_crossing <= SANDWICH_SIDE_TOL,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::applications::adc_channel;
    use approx::assert_abs_diff_eq;

    fn quick() -> SearchConfig {
        SearchConfig {
            restarts: 8,
            steps: 1200,
            ..Default::default()
        }
    }

    #[test]
    fn coordinates_give_unit_vectors() {
        let v = pure_from_coords(&[0.3, 1.2, -0.4, 2.0, 0.1, 5.0], 4);
        assert_abs_diff_eq!(v.norm(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn trivial_values() {
        let e = adc_channel(0.3).unwrap();
        assert_abs_diff_eq!(max_weighted_trace_norm_search(&e, &e, 1.0, &quick()).unwrap(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(max_weighted_trace_norm_search(&e, &e, 0.0, &quick()).unwrap(), 1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(min_avg_fidelity_search(&[(1.0, e.clone())], &e, &quick()).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn seed_determinism() {
        let (a, b) = (adc_channel(0.2).unwrap(), adc_channel(0.4).unwrap());
        let x = max_weighted_trace_norm_search(&a, &b, 0.8, &quick()).unwrap();
        let y = max_weighted_trace_norm_search(&a, &b, 0.8, &quick()).unwrap();
        assert_eq!(x.to_bits(), y.to_bits());
    }

    #[test]
    fn small_check_examples() {
        let id = KrausChannel::identity(2);
        let same = DiscriminationProblem::two_channel(0.3, id.clone(), 0.7, id.clone()).unwrap();
        assert_abs_diff_eq!(exhaustive_small_check(&same, 1, &quick()).unwrap(), 0.3, epsilon = 1e-9);
        let z = c(0.0, 0.0);
        let o = c(1.0, 0.0);
        let to0 = KrausChannel::new(vec![
            CMatrix::from_row_slice(2, 2, &[o, z, z, z]),
            CMatrix::from_row_slice(2, 2, &[z, o, z, z]),
        ])
        .unwrap();
        let to1 = KrausChannel::new(vec![
            CMatrix::from_row_slice(2, 2, &[z, z, o, z]),
            CMatrix::from_row_slice(2, 2, &[z, z, z, o]),
        ])
        .unwrap();
        let orth = DiscriminationProblem::two_channel(0.5, to0, 0.5, to1).unwrap();
        assert_abs_diff_eq!(exhaustive_small_check(&orth, 1, &quick()).unwrap(), 0.0, epsilon = 1e-9);
        let three = DiscriminationProblem::identification(vec![(1.0 / 3.0, id.clone()); 3]).unwrap();
        assert!(exhaustive_small_check(&three, 1, &quick()).is_err());
    }
}
