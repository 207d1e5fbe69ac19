//! Parameter search for the weighted-trace-distance bounds: exhaustive over
//! the split point `k`, golden-section over the free weight `α₀`.
//!
//! Any parameter choice yields a valid bound, so the search only affects
//! tightness. Quantities that depend on a single weight are memoized, which
//! makes sweeps over `n` share most solver calls.

use std::collections::HashMap;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use rayon::prelude::*;
use serde::Serialize;

use crate::applications::{adc_channel, CpfInstance};
use crate::bounds::{
    check_priors, p_err_zero, theorem2_bound, theorem2_weights, theorem4_bound, theorem4_weights, BoundResult,
    DiscriminationProblem,
};
use crate::error::{Error, Result};
use crate::qmat::KrausChannel;
use crate::sdp::{avg_weighted_diamond_sdp, weighted_diamond_norm_sdp, DiamondSide, SolverStatus};

pub const ALPHA_MIN: f64 = 1e-6;
pub const ALPHA_MAX: f64 = 2.0;
pub const GOLDEN_TOL: f64 = 1e-6;
pub const PRESCAN_POINTS: usize = 16;

const INV_PHI: f64 = 0.618_033_988_749_894_9;

fn eval_checked<F: FnMut(f64) -> Result<f64>>(f: &mut F, x: f64) -> Result<f64> {
    let v = f(x)?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::InvalidParameter(format!("objective is not finite at x = {x}")))
    }
}

/// Golden-section search for a maximum of `f` on `[lo, hi]`. Returns the
/// best point seen, within `tol` of a local maximum for unimodal `f`.
pub fn golden_section_max<F: FnMut(f64) -> Result<f64>>(mut f: F, lo: f64, hi: f64, tol: f64) -> Result<(f64, f64)> {
    if !(lo.is_finite() && hi.is_finite() && lo < hi && tol > 0.0) {
        return Err(Error::InvalidParameter(format!("bad bracket [{lo}, {hi}] or tol {tol}")));
    }
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = eval_checked(&mut f, c)?;
    let mut fd = eval_checked(&mut f, d)?;
    let fa = eval_checked(&mut f, a)?;
    let fb = eval_checked(&mut f, b)?;
    let mut best = if fa >= fb { (a, fa) } else { (b, fb) };
    while b - a > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = eval_checked(&mut f, c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = eval_checked(&mut f, d)?;
        }
    }
    for (x, v) in [(c, fc), (d, fd)] {
        if v > best.1 {
            best = (x, v);
        }
    }
    Ok(best)
}

/// Outcome of [`prescan_max`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScalarMax {
    pub x: f64,
    pub value: f64,
    /// The maximizer lies within the tolerance of a bracket end.
    pub at_edge: bool,
    /// Number of separate local maxima seen by the pre-scan.
    pub peaks: usize,
}

/// Coarse uniform pre-scan, then golden-section inside the bracket of every
/// local maximum of the scan; the best result is kept.
pub fn prescan_max<F: FnMut(f64) -> Result<f64>>(mut f: F, lo: f64, hi: f64, tol: f64) -> Result<ScalarMax> {
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::InvalidParameter(format!("bad bracket [{lo}, {hi}]")));
    }
    let npts = PRESCAN_POINTS;
    let xs: Vec<f64> = (0..npts)
        .map(|i| if i + 1 == npts { hi } else { lo + (hi - lo) * i as f64 / (npts - 1) as f64 })
        .collect();
    let vs = xs.iter().map(|&x| eval_checked(&mut f, x)).collect::<Result<Vec<_>>>()?;
    // Runs of equal values count as a single peak.
    let mut brackets = Vec::new();
    let mut i = 0;
    while i < npts {
        let mut j = i;
        while j + 1 < npts && vs[j + 1] == vs[i] {
            j += 1;
        }
        let left_ok = i == 0 || vs[i - 1] < vs[i];
        let right_ok = j + 1 == npts || vs[j + 1] < vs[j];
        if left_ok && right_ok {
            brackets.push((xs[i.saturating_sub(1)], xs[(j + 1).min(npts - 1)]));
        }
        i = j + 1;
    }
    let mut best = (0..npts).fold((xs[0], vs[0]), |b, k| if vs[k] > b.1 { (xs[k], vs[k]) } else { b });
    for &(a, b) in &brackets {
        if b > a {
            let (x, v) = golden_section_max(&mut f, a, b, tol)?;
            if v > best.1 {
                best = (x, v);
            }
        }
    }
    let at_edge = best.0 - lo <= tol || hi - best.0 <= tol;
    Ok(ScalarMax {
        x: best.0,
        value: best.1,
        at_edge,
        peaks: brackets.len(),
    })
}

type Provider<'a> = Box<dyn Fn(f64) -> Result<(f64, SolverStatus)> + Send + Sync + 'a>;

/// A weight-dependent quantity with a cache keyed by the exact weight.
struct Memo<'a> {
    f: Provider<'a>,
    cache: Mutex<HashMap<u64, (f64, SolverStatus)>>,
    calls: AtomicUsize,
}

impl<'a> Memo<'a> {
    fn new(f: Provider<'a>) -> Self {
        Memo {
            f,
            cache: Mutex::new(HashMap::new()),
            calls: AtomicUsize::new(0),
        }
    }

    fn get(&self, alpha: f64) -> Result<(f64, SolverStatus)> {
        let key = alpha.to_bits();
        if let Some(v) = self.cache.lock().expect("cache lock").get(&key) {
            return Ok(*v);
        }
        let v = (self.f)(alpha)?;
        self.calls.fetch_add(1, Ordering::Relaxed);
        self.cache.lock().expect("cache lock").insert(key, v);
        Ok(v)
    }
}

#[derive(Debug, Clone, Copy)]
enum Family {
    /// Two channels: `p₀α₀^k = p₁α₁^{n−k}`.
    Two { p0: f64, p1: f64 },
    /// Grouped problem with `m = 0`: `α₀^{n−k} = α₁^k`.
    Grouped { p_err0: f64 },
}

/// Which `k` values to try.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KRange {
    Full,
    /// `k_min..=n`, for sweeps where the optimal `k` does not decrease.
    From(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KCandidate {
    pub k: usize,
    pub value: f64,
    pub alpha0: f64,
    pub alpha1: f64,
    pub at_edge: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimizationReport {
    pub n: usize,
    /// Bound at the best `(k, α₀)` found.
    pub best: BoundResult,
    pub k_star: usize,
    /// Bound at `k = ⌊n/2⌋` with `α₀` optimized.
    pub half_k: BoundResult,
    pub candidates: Vec<KCandidate>,
    /// `k` values dropped because a solver call failed, with the reason.
    pub skipped: Vec<(usize, String)>,
    /// Solver calls made so far by the optimizer (cache misses).
    pub solver_calls: usize,
}

/// Optimizer for one weighted bound family with fixed channels; reusable
/// across `n` so that memoized quantities are shared.
pub struct WeightedOptimizer<'a> {
    family: Family,
    tol: f64,
    q0: Memo<'a>,
    q1: Memo<'a>,
}

impl<'a> WeightedOptimizer<'a> {
    /// Two-channel weighted bound with `τ⁰_⋄(α) = ‖𝒪⁰ − α𝒪¹‖_⋄` and
    /// `τ¹_⋄(α) = ‖α𝒪⁰ − 𝒪¹‖_⋄`.
    pub fn two_channel(p0: f64, ch0: &'a KrausChannel, p1: f64, ch1: &'a KrausChannel) -> Result<Self> {
        check_priors(&[p0, p1])?;
        if ch0.dim_in() != ch1.dim_in() || ch0.dim_out() != ch1.dim_out() {
            return Err(Error::dims(ch0.dim_in(), ch1.dim_in()));
        }
        Ok(WeightedOptimizer {
            family: Family::Two { p0, p1 },
            tol: GOLDEN_TOL,
            q0: Memo::new(Box::new(move |a| {
                let r = weighted_diamond_norm_sdp(ch0, ch1, a)?;
                Ok((r.safe_value().max(0.0), r.status))
            })),
            q1: Memo::new(Box::new(move |a| {
                let r = weighted_diamond_norm_sdp(ch1, ch0, a)?;
                Ok((r.safe_value().max(0.0), r.status))
            })),
        })
    }

    /// Grouped weighted bound with `m = 0` and reference channel `Ψ`,
    /// evaluated with the averaged programs.
    pub fn grouped(prob: &'a DiscriminationProblem, reference: &'a KrausChannel) -> Result<Self> {
        Ok(WeightedOptimizer {
            family: Family::Grouped { p_err0: p_err_zero(prob) },
            tol: GOLDEN_TOL,
            q0: Memo::new(Box::new(move |a| {
                let r = avg_weighted_diamond_sdp(prob.oracles(), reference, a, DiamondSide::OracleMinusRef)?;
                Ok((r.safe_value().max(0.0), r.status))
            })),
            q1: Memo::new(Box::new(move |a| {
                let r = avg_weighted_diamond_sdp(prob.oracles(), reference, a, DiamondSide::RefMinusOracle)?;
                Ok((r.safe_value().max(0.0), r.status))
            })),
        })
    }

    /// Position finding through the single-qubit reduction.
    pub fn cpf(inst: &CpfInstance) -> Result<WeightedOptimizer<'static>> {
        let (e0, e1) = (adc_channel(inst.r0)?, adc_channel(inst.r1)?);
        let (f0, f1) = (e0.clone(), e1.clone());
        Ok(WeightedOptimizer {
            family: Family::Grouped {
                p_err0: inst.p_err_zero(),
            },
            tol: GOLDEN_TOL,
            q0: Memo::new(Box::new(move |a| {
                let r = weighted_diamond_norm_sdp(&e1, &e0, a)?;
                Ok((0.5 * r.safe_value().max(0.0), r.status))
            })),
            q1: Memo::new(Box::new(move |a| {
                let r = weighted_diamond_norm_sdp(&f0, &f1, a)?;
                Ok((0.5 * r.safe_value().max(0.0), r.status))
            })),
        })
    }

    /// Golden-section tolerance in `α₀` (default [`GOLDEN_TOL`]).
    pub fn with_tol(mut self, tol: f64) -> Result<Self> {
        if !(tol.is_finite() && tol > 0.0) {
            return Err(Error::InvalidParameter(format!("tolerance {tol} must be positive")));
        }
        self.tol = tol;
        Ok(self)
    }

    pub fn solver_calls(&self) -> usize {
        self.q0.calls.load(Ordering::Relaxed) + self.q1.calls.load(Ordering::Relaxed)
    }

    /// Weights at `(n, k)` for free parameter `α₀`, and whether `α₀` is free.
    fn weights(&self, n: usize, k: usize, alpha0: f64) -> ((f64, f64), bool) {
        match self.family {
            Family::Two { p0, p1 } => (theorem4_weights(n, k, p0, p1, alpha0), n > 0 && k > 0 && k < n),
            Family::Grouped { .. } => (theorem2_weights(n, k, alpha0), n > 0 && k > 0 && k < n),
        }
    }

    /// Whether each of the two quantities enters the bound at `(n, k)`.
    fn uses(&self, n: usize, k: usize) -> (bool, bool) {
        match self.family {
            Family::Two { .. } => (k > 0, k < n),
            Family::Grouped { .. } => (n > k, k > 0),
        }
    }

    /// The bound at `(n, k, α₀)` with solver diagnostics.
    pub fn bound(&self, n: usize, k: usize, alpha0: f64) -> Result<BoundResult> {
        if k > n {
            return Err(Error::InvalidParameter(format!("k = {k} exceeds n = {n}")));
        }
        let ((a0, a1), _) = self.weights(n, k, alpha0);
        let (use0, use1) = self.uses(n, k);
        let mut statuses = Vec::new();
        let q0 = if use0 {
            let (v, s) = self.q0.get(a0)?;
            statuses.push(s);
            v
        } else {
            0.0
        };
        let q1 = if use1 {
            let (v, s) = self.q1.get(a1)?;
            statuses.push(s);
            v
        } else {
            0.0
        };
        let mut b = match self.family {
            Family::Two { p0, p1 } => theorem4_bound(n, k, p0, p1, a0, a1, q0, q1)?,
            Family::Grouped { p_err0 } => theorem2_bound(n, 0, k, a0, a1, q0, q1, p_err0)?,
        };
        b.diagnostics = statuses;
        Ok(b)
    }

    /// Best `α₀` at fixed `(n, k)`.
    pub fn optimize_k(&self, n: usize, k: usize) -> Result<(BoundResult, KCandidate)> {
        let (_, free) = self.weights(n, k, 1.0);
        let (alpha0, at_edge) = if free {
            let m = prescan_max(|a| Ok(self.bound(n, k, a)?.value), ALPHA_MIN, ALPHA_MAX, self.tol)?;
            if m.at_edge {
                log::warn!("n = {n}, k = {k}: optimal α₀ = {} at the search bracket edge", m.x);
            }
            (m.x, m.at_edge)
        } else {
            (1.0, false)
        };
        let b = self.bound(n, k, alpha0)?;
        let cand = KCandidate {
            k,
            value: b.value,
            alpha0: b.params.alpha0.unwrap_or(alpha0),
            alpha1: b.params.alpha1.unwrap_or(1.0),
            at_edge,
        };
        Ok((b, cand))
    }

    /// Exhaustive search over `k` in `range`, golden-section over `α₀`.
    pub fn optimize(&self, n: usize, range: KRange) -> Result<OptimizationReport> {
        let k_min = match range {
            KRange::Full => 0,
            KRange::From(k) => k.min(n),
        };
        let results: Vec<(usize, Result<(BoundResult, KCandidate)>)> =
            (k_min..=n).into_par_iter().map(|k| (k, self.optimize_k(n, k))).collect();
        let mut best: Option<(BoundResult, usize)> = None;
        let mut candidates = Vec::new();
        let mut skipped = Vec::new();
        let mut half = None;
        for (k, r) in results {
            match r {
                Ok((b, cand)) => {
                    if k == n / 2 {
                        half = Some(b.clone());
                    }
                    if best.as_ref().is_none_or(|(bb, _)| b.value > bb.value) {
                        best = Some((b, k));
                    }
                    candidates.push(cand);
                }
                Err(e) => {
                    log::warn!("n = {n}: skipping k = {k}: {e}");
                    skipped.push((k, e.to_string()));
                }
            }
        }
        let half_k = match half {
            Some(h) => h,
            None => self.optimize_k(n, n / 2)?.0,
        };
        let Some((best, k_star)) = best else {
            return Err(Error::Solver(SolverStatus::NumericalFailure));
        };
        Ok(OptimizationReport {
            n,
            best,
            k_star,
            half_k,
            candidates,
            skipped,
            solver_calls: self.solver_calls(),
        })
    }

    /// Sweep over increasing `n`, starting each `k` search at the previous
    /// optimum.
    pub fn sweep_n(&self, ns: &[usize]) -> Result<Vec<OptimizationReport>> {
        let mut out: Vec<OptimizationReport> = Vec::with_capacity(ns.len());
        for &n in ns {
            let range = match out.last() {
                Some(prev) if prev.n <= n => KRange::From(prev.k_star),
                _ => KRange::Full,
            };
            out.push(self.optimize(n, range)?);
        }
        Ok(out)
    }
}

/// Best two-channel weighted bound at `n`.
pub fn optimize_theorem4(
    p0: f64,
    ch0: &KrausChannel,
    p1: f64,
    ch1: &KrausChannel,
    n: usize,
    range: KRange,
) -> Result<OptimizationReport> {
    WeightedOptimizer::two_channel(p0, ch0, p1, ch1)?.optimize(n, range)
}

/// Best grouped weighted bound at `n` with `m = 0`.
pub fn optimize_theorem2(
    prob: &DiscriminationProblem,
    reference: &KrausChannel,
    n: usize,
    range: KRange,
) -> Result<OptimizationReport> {
    WeightedOptimizer::grouped(prob, reference)?.optimize(n, range)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::applications::TwoAdcInstance;
    use approx::assert_abs_diff_eq;

    #[test]
    fn golden_on_parabola() {
        let (x, v) = golden_section_max(|x| Ok(-(x - 0.3) * (x - 0.3)), 0.0, 1.0, 1e-6).unwrap();
        assert_abs_diff_eq!(x, 0.3, epsilon = 1e-6);
        assert!(v <= 0.0 && v > -1e-12);
    }

    #[test]
    fn golden_on_monotone() {
        let (x, _) = golden_section_max(Ok, 0.0, 1.0, 1e-6).unwrap();
        assert_abs_diff_eq!(x, 1.0, epsilon = 1e-6);
        let m = prescan_max(|x| Ok(-x), 0.0, 1.0, 1e-6).unwrap();
        assert_eq!(m.x, 0.0);
        assert!(m.at_edge);
    }

    #[test]
    fn golden_rejects_nan() {
        assert!(golden_section_max(|_| Ok(f64::NAN), 0.0, 1.0, 1e-6).is_err());
        assert!(golden_section_max(Ok, 1.0, 0.0, 1e-6).is_err());
    }

    #[test]
    fn prescan_finds_global_of_two_peaks() {
        let f = |x: f64| Ok((-(x - 0.2).powi(2) * 200.0).exp() + 1.5 * (-(x - 1.6).powi(2) * 200.0).exp());
        let m = prescan_max(f, 0.0, 2.0, 1e-7).unwrap();
        assert_abs_diff_eq!(m.x, 1.6, epsilon = 1e-5);
        assert_eq!(m.peaks, 2);
    }

    #[test]
    fn zero_queries() {
        let inst = TwoAdcInstance::new(0.5, 0.5, 0.1, 0.11).unwrap();
        let (e0, e1) = inst.channels();
        let r = optimize_theorem4(0.5, &e0, 0.5, &e1, 0, KRange::Full).unwrap();
        assert_eq!(r.k_star, 0);
        assert_abs_diff_eq!(r.best.value, 0.5, epsilon = 1e-15);
    }

    #[test]
    fn identical_channels_give_half() {
        let e = adc_channel(0.3).unwrap();
        let r = optimize_theorem4(0.5, &e, 0.5, &e, 4, KRange::Full).unwrap();
        assert_abs_diff_eq!(r.best.value, 0.5, epsilon = 1e-6);
    }
}
