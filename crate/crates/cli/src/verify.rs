//! Oracle-versus-solver consistency suites.

use std::path::Path;

use chanbound::applications::{adc_channel, grover_bound, grover_success, GroverInstance};
use chanbound::bounds::{covering_angle, relative_eigenphases, theorem3_bound, theorem3_from_channels, unitary_exact_error};
use chanbound::optimizer::{optimize_theorem4, KRange};
use chanbound::oracle::{sandwich_suite, SandwichOp, SearchConfig};
use chanbound::qmat::random::{random_channel, random_unitary};
use chanbound::qmat::stinespring_from_kraus;
use chanbound::sdp::{min_trace_norm_sdp, one_shot_error};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::output::write_json;
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    All,
    Sandwich,
    TauGrid,
    Grover,
    OneShot,
    Unitary,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteOutcome {
    pub name: String,
    pub checks: usize,
    pub max_violation: f64,
    pub tol: f64,
    pub passed: bool,
}

impl SuiteOutcome {
    fn new(name: impl Into<String>, checks: usize, max_violation: f64, tol: f64) -> Self {
        SuiteOutcome {
            name: name.into(),
            checks,
            max_violation,
            tol,
            passed: max_violation <= tol,
        }
    }
}

pub struct VerifyArgs {
    pub suite: Suite,
    /// Overrides the number of random instances per suite.
    pub instances: Option<usize>,
}

fn sandwich(seed: u64, instances: usize, tol: f64) -> Result<Vec<SuiteOutcome>, CliError> {
    SandwichOp::ALL
        .iter()
        .map(|&op| {
            let r = sandwich_suite(op, instances, seed, &SearchConfig::with_seed(seed), tol)?;
            Ok(SuiteOutcome {
                name: format!("sandwich/{}", op.name()),
                checks: r.instances,
                max_violation: r.max_gap,
                tol,
                passed: r.passed,
            })
        })
        .collect()
}

fn tau_grid(tol: f64) -> Result<SuiteOutcome, CliError> {
    let rates: Vec<f64> = (1..=19).map(|i| 0.05 * i as f64).collect();
    let mut worst = 0.0f64;
    for &r0 in &rates {
        for &r1 in &rates {
            let v0 = stinespring_from_kraus(&adc_channel(r0)?);
            let v1 = stinespring_from_kraus(&adc_channel(r1)?);
            let sdp = min_trace_norm_sdp(&v0, &v1)?.value;
            let exact = (r0 * r1).sqrt() + ((1.0 - r0) * (1.0 - r1)).sqrt();
            worst = worst.max((sdp - exact).abs());
        }
    }
    Ok(SuiteOutcome::new("tau_closed_form", rates.len() * rates.len(), worst, tol))
}

fn grover(tol: f64) -> Result<SuiteOutcome, CliError> {
    let mut worst = 0.0f64;
    let mut checks = 0;
    for n_items in [4usize, 8, 16, 64, 1024] {
        let mut ks = vec![1, 2, n_items / 4];
        ks.dedup();
        for k in ks {
            let inst = GroverInstance::new(n_items, k)?;
            for n in 0..=inst.max_queries() {
                let b = grover_bound(&inst, n);
                worst = worst.max((b.value + grover_success(&inst, n)? - 1.0).abs());
                checks += 1;
            }
        }
    }
    let corner = grover_bound(&GroverInstance::new(4, 1)?, 1).value;
    worst = worst.max(corner.abs());
    Ok(SuiteOutcome::new("grover_optimality", checks + 1, worst, tol))
}

fn qubit_channel(rng: &mut ChaCha8Rng) -> chanbound::qmat::KrausChannel {
    let k = rng.random_range(1..=3);
    random_channel(rng, 2, 2, k)
}

fn one_shot(seed: u64, instances: usize, tol: f64) -> Result<SuiteOutcome, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..instances {
        let p0: f64 = rng.random_range(0.2..0.8);
        let p1 = 1.0 - p0;
        let (c0, c1) = (qubit_channel(&mut rng), qubit_channel(&mut rng));
        let exact = one_shot_error(p0, &c0, p1, &c1)?.value;
        let t3 = theorem3_from_channels(1, p0, &c0, p1, &c1)?.value;
        let t4 = optimize_theorem4(p0, &c0, p1, &c1, 1, KRange::Full)?.best.value;
        worst = worst.max(t3.max(t4) - exact);
    }
    Ok(SuiteOutcome::new("one_shot_consistency", instances, worst.max(0.0), tol))
}

fn unitary(seed: u64, instances: usize, tol: f64) -> Result<SuiteOutcome, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for i in 0..instances {
        let d = if i % 2 == 0 { 2 } else { 4 };
        let (u0, u1) = (random_unitary(&mut rng, d), random_unitary(&mut rng, d));
        let n = rng.random_range(1..=3);
        let exact = unitary_exact_error(n, 0.5, 0.5, &u0, &u1)?.value;
        let tau = 0.5 * covering_angle(&relative_eigenphases(&u0, &u1)?)?;
        let t3 = theorem3_bound(n, 0.5, 0.5, tau.min(std::f64::consts::FRAC_PI_2))?.value;
        worst = worst.max((exact - t3).abs());
    }
    Ok(SuiteOutcome::new("unitary_exact", instances, worst, tol))
}

/// Runs the selected suites, prints one line per suite and fails when any
/// suite fails. `tol` overrides every suite's tolerance.
pub fn verify(a: &VerifyArgs, seed: u64, tol: Option<f64>, out: Option<&Path>) -> Result<(), CliError> {
    let want = |s: Suite| a.suite == Suite::All || a.suite == s;
    let count = |default: usize| a.instances.unwrap_or(default);
    let mut outcomes = Vec::new();
    if want(Suite::Grover) {
        outcomes.push(grover(tol.unwrap_or(1e-12))?);
    }
    if want(Suite::Unitary) {
        outcomes.push(unitary(seed, count(100), tol.unwrap_or(1e-10))?);
    }
    if want(Suite::TauGrid) {
        outcomes.push(tau_grid(tol.unwrap_or(1e-6))?);
    }
    if want(Suite::OneShot) {
        outcomes.push(one_shot(seed, count(50), tol.unwrap_or(1e-6))?);
    }
    if want(Suite::Sandwich) {
        outcomes.extend(sandwich(seed, count(25), tol.unwrap_or(5e-4))?);
    }
    for o in &outcomes {
        println!(
            "{} {:<40} checks={:<4} max_violation={:.3e} tol={:.1e}",
            if o.passed { "PASS" } else { "FAIL" },
            o.name,
            o.checks,
            o.max_violation,
            o.tol
        );
    }
    if out.is_some() {
        write_json(out, &outcomes)?;
    }
    let failed: Vec<_> = outcomes.iter().filter(|o| !o.passed).map(|o| o.name.as_str()).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Failed(format!("failed suites: {}", failed.join(", "))))
    }
}
