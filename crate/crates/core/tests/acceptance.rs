//! Acceptance suite: one PASS/FAIL line per criterion. Runs without the test
//! harness so that the lines are printed by a plain `cargo test`.

use std::f64::consts::{FRAC_PI_2, PI};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use chanbound::applications::{
    adc_channel, grover_bound, grover_success, two_adc_bures_bound, CpfInstance, GroverInstance, TwoAdcInstance,
};
use chanbound::bounds::{
    covering_angle, fuchs_vdg_generalized, relative_eigenphases, theorem3_bound, theorem3_from_channels,
    unitary_exact_error,
};
use chanbound::optimizer::{optimize_theorem4, KRange, OptimizationReport, WeightedOptimizer};
use chanbound::oracle::{sandwich_suite, SandwichOp, SearchConfig};
use chanbound::qmat::random::{random_channel, random_density, random_density_rank, random_unitary};
use chanbound::qmat::{
    apply_channel, bures_angle, bures_distance, fidelity, sine_distance, stinespring_from_kraus, trace,
    trace_norm, DensityMatrix, KrausChannel,
};
use chanbound::sdp::{avg_weighted_diamond_sdp, min_trace_norm_sdp, one_shot_error, weighted_diamond_norm_sdp, DiamondSide};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    passed: bool,
    detail: String,
}

type Check = fn() -> chanbound::Result<Outcome>;

fn outcome(passed: bool, detail: String) -> chanbound::Result<Outcome> {
    Ok(Outcome { passed, detail })
}

fn secs(d: Duration) -> String {
    format!("{:.2}s", d.as_secs_f64())
}

fn grover_optimality() -> chanbound::Result<Outcome> {
    let t = Instant::now();
    let mut worst = 0.0f64;
    let mut points = 0;
    for n_items in [4usize, 8, 16, 64, 1024] {
        let mut ks = vec![1, 2, n_items / 4];
        ks.dedup();
        for k in ks {
            let inst = GroverInstance::new(n_items, k)?;
            for n in 0..=inst.max_queries() {
                let lb = grover_bound(&inst, n);
                assert!(lb.applicable);
                worst = worst.max((lb.value + grover_success(&inst, n)? - 1.0).abs());
                points += 1;
            }
        }
    }
    let corner = grover_bound(&GroverInstance::new(4, 1)?, 1).value;
    let elapsed = t.elapsed();
    outcome(
        worst <= 1e-12 && corner == 0.0 && elapsed < Duration::from_secs(1),
        format!("{points} points, max |bound + success − 1| = {worst:.2e} (tol 1e-12), N=4,k=1,n=1 bound = {corner}, {}", secs(elapsed)),
    )
}

fn tau_closed_form() -> chanbound::Result<Outcome> {
    let t = Instant::now();
    let rates: Vec<f64> = (1..=19).map(|i| 0.05 * i as f64).collect();
    let mut worst = 0.0f64;
    for &r0 in &rates {
        for &r1 in &rates {
            let v0 = stinespring_from_kraus(&adc_channel(r0)?);
            let v1 = stinespring_from_kraus(&adc_channel(r1)?);
            let sdp = min_trace_norm_sdp(&v0, &v1)?.value;
            worst = worst.max((sdp - ((r0 * r1).sqrt() + ((1.0 - r0) * (1.0 - r1)).sqrt())).abs());
        }
    }
    let elapsed = t.elapsed();
    outcome(
        worst <= 1e-6 && elapsed < Duration::from_secs(60),
        format!("19×19 grid, max |SDP − closed form| = {worst:.2e} (tol 1e-6), {}", secs(elapsed)),
    )
}

fn two_adc_sweep() -> chanbound::Result<(Vec<OptimizationReport>, Duration)> {
    let (e0, e1) = (adc_channel(0.10)?, adc_channel(0.11)?);
    let opt = WeightedOptimizer::two_channel(0.5, &e0, 0.5, &e1)?;
    let ns: Vec<usize> = (1..=90).collect();
    let t = Instant::now();
    let reports = opt.sweep_n(&ns)?;
    Ok((reports, t.elapsed()))
}

fn same_bits(a: &[OptimizationReport], b: &[OptimizationReport]) -> bool {
    a.len() == b.len()
        && a.iter().zip(b).all(|(x, y)| {
            x.k_star == y.k_star
                && x.best.value.to_bits() == y.best.value.to_bits()
                && x.half_k.value.to_bits() == y.half_k.value.to_bits()
                && x.best.params == y.best.params
        })
}

fn fig4_anchor() -> chanbound::Result<Outcome> {
    let inst = TwoAdcInstance::new(0.5, 0.5, 0.10, 0.11)?;
    let t3 = two_adc_bures_bound(&inst, 90).value;
    let (first, elapsed) = two_adc_sweep()?;
    let (second, _) = two_adc_sweep()?;
    let last = first.last().expect("non-empty sweep");
    let t4 = last.best.value;
    let ks_monotone = first.windows(2).all(|w| w[0].k_star <= w[1].k_star);
    let identical = same_bits(&first, &second);
    outcome(
        (t3 - 0.00262).abs() <= 1e-4 && t4 > t3 && identical && elapsed < Duration::from_secs(300),
        format!(
            "n=90: theorem3 = {t3:.6} (0.00262 ± 1e-4), theorem4 optimal = {t4:.6} at k* = {}, rerun bit-identical = {identical}, k* non-decreasing = {ks_monotone}, sweep 1..90 {}",
            last.k_star,
            secs(elapsed)
        ),
    )
}

fn cpf_reduction() -> chanbound::Result<Outcome> {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let r0: f64 = rng.random_range(0.0..0.9);
        let r1: f64 = rng.random_range(0.0..0.9);
        let alpha: f64 = rng.random_range(0.3..1.5);
        let inst = CpfInstance::new(2, r0, r1)?;
        let (prob, reference) = (inst.problem()?, inst.reference()?);
        let (e0, e1) = (adc_channel(r0)?, adc_channel(r1)?);
        let d0 = avg_weighted_diamond_sdp(prob.oracles(), &reference, alpha, DiamondSide::OracleMinusRef)?.value;
        let s0 = 0.5 * weighted_diamond_norm_sdp(&e1, &e0, alpha)?.value;
        let d1 = avg_weighted_diamond_sdp(prob.oracles(), &reference, alpha, DiamondSide::RefMinusOracle)?.value;
        let s1 = 0.5 * weighted_diamond_norm_sdp(&e0, &e1, alpha)?.value;
        worst = worst.max((d0 - s0).abs()).max((d1 - s1).abs());
    }
    let elapsed = t.elapsed();
    outcome(
        worst <= 1e-6 && elapsed < Duration::from_secs(120),
        format!("ℓ=2, 10 triples × 2 sides, max |direct − reduction| = {worst:.2e} (tol 1e-6), {}", secs(elapsed)),
    )
}

fn qubit_channel(rng: &mut ChaCha8Rng) -> KrausChannel {
    let k = rng.random_range(1..=3);
    random_channel(rng, 2, 2, k)
}

fn one_shot_consistency() -> chanbound::Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst = f64::INFINITY;
    for _ in 0..50 {
        let p0: f64 = rng.random_range(0.1..0.9);
        let p1 = 1.0 - p0;
        let (c0, c1) = (qubit_channel(&mut rng), qubit_channel(&mut rng));
        let exact = one_shot_error(p0, &c0, p1, &c1)?.value;
        let t3 = theorem3_from_channels(1, p0, &c0, p1, &c1)?.value;
        let t4 = optimize_theorem4(p0, &c0, p1, &c1, 1, KRange::Full)?.best.value;
        worst = worst.min(exact - t3).min(exact - t4);
    }
    outcome(
        worst >= -1e-6,
        format!("50 qubit pairs, min slack (one-shot − bound) = {worst:.2e} (must be ≥ −1e-6)"),
    )
}

fn sandwich() -> chanbound::Result<Outcome> {
    let t = Instant::now();
    let cfg = SearchConfig::default();
    let mut parts = Vec::new();
    let mut passed = true;
    for op in SandwichOp::ALL {
        let r = sandwich_suite(op, 25, 0, &cfg, 5e-4)?;
        passed &= r.passed;
        parts.push(format!("{} {:.1e}", op.name(), r.max_gap));
    }
    outcome(
        passed,
        format!("25 instances each, max |SDP − search|: {} (tol 5e-4), {}", parts.join(", "), secs(t.elapsed())),
    )
}

/// A state of random dimension-compatible rank, sometimes close to `near`.
fn state(rng: &mut ChaCha8Rng, d: usize, near: Option<&DensityMatrix>) -> DensityMatrix {
    let rank = rng.random_range(1..=d);
    let fresh = random_density_rank(rng, d, rank);
    match near {
        Some(n) if rng.random_bool(0.5) => {
            let w: f64 = rng.random_range(0.0..0.2);
            DensityMatrix::mixture(&[1.0 - w, w], &[n.clone(), fresh]).expect("valid mixture")
        }
        _ => fresh,
    }
}

fn property_suites() -> chanbound::Result<Outcome> {
    const SLACK: f64 = 1e-9;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut violations = [0usize; 6];
    let mut regimes = [0usize; 2];
    for _ in 0..500 {
        let d = rng.random_range(2..=4);
        let a = state(&mut rng, d, None);
        let b = state(&mut rng, d, Some(&a));
        let t = state(&mut rng, d, Some(&b));
        if bures_angle(&a, &b)? > bures_angle(&a, &t)? + bures_angle(&t, &b)? + SLACK {
            violations[0] += 1;
        }
        if bures_distance(&a, &b)? > bures_distance(&a, &t)? + bures_distance(&t, &b)? + SLACK {
            violations[1] += 1;
        }
        if sine_distance(&a, &b)? > sine_distance(&a, &t)? + sine_distance(&t, &b)? + SLACK {
            violations[2] += 1;
        }
        regimes[usize::from(bures_angle(&a, &t)? + bures_angle(&t, &b)? >= FRAC_PI_2)] += 1;
    }
    for _ in 0..500 {
        let d = rng.random_range(2..=4);
        let (s0, s1) = (state(&mut rng, d, None), state(&mut rng, d, None));
        let (a0, a1): (f64, f64) = (rng.random_range(0.0..2.0), rng.random_range(0.0..2.0));
        let lhs = trace_norm(&(s0.matrix().scale(a0) - s1.matrix().scale(a1)))?;
        if lhs > fuchs_vdg_generalized(a0, a1, &s0, &s1)? + SLACK {
            violations[3] += 1;
        }
    }
    for _ in 0..500 {
        let d = rng.random_range(2..=4);
        let m = rng.random_range(2..=4);
        let raw: Vec<f64> = (0..m).map(|_| rng.random_range(0.05..1.0)).collect();
        let total: f64 = raw.iter().sum();
        let mut w: Vec<f64> = raw.iter().map(|x| x / total).collect();
        let rest: f64 = w[1..].iter().sum();
        w[0] = 1.0 - rest;
        let rhos: Vec<_> = (0..m).map(|_| state(&mut rng, d, None)).collect();
        let sigmas: Vec<_> = rhos.iter().map(|x| state(&mut rng, d, Some(x))).collect();
        let avg: f64 = (0..m).map(|i| w[i] * fidelity(&rhos[i], &sigmas[i]).unwrap()).sum();
        let mixed = fidelity(&DensityMatrix::mixture(&w, &rhos)?, &DensityMatrix::mixture(&w, &sigmas)?)?;
        if mixed < avg - SLACK {
            violations[4] += 1;
        }
    }
    for _ in 0..500 {
        let (din, dout): (usize, usize) = (rng.random_range(1..=3), rng.random_range(1..=3));
        let k = rng.random_range(din.div_ceil(dout)..=4);
        let ch = random_channel(&mut rng, din, dout, k);
        let rho = random_density(&mut rng, din);
        let out = apply_channel(&ch, &rho)?;
        let via_dilation = stinespring_from_kraus(&ch).apply(rho.matrix())?;
        let bad = ch.trace_preservation_error() > SLACK
            || (trace(out.matrix()).re - 1.0).abs() > SLACK
            || (via_dilation - out.matrix()).norm() > SLACK
            || KrausChannel::new(ch.kraus().iter().map(|k| k.scale(1.01)).collect()).is_ok();
        if bad {
            violations[5] += 1;
        }
    }
    outcome(
        violations.iter().all(|&v| v == 0) && regimes.iter().all(|&r| r > 0),
        format!(
            "violations beyond 1e-9: Bures angle {}, Bures distance {}, sine distance {} (angle sums below/above π/2: {}/{}), generalized Fuchs–van de Graaf {}, joint concavity {}, CPTP {}",
            violations[0], violations[1], violations[2], regimes[0], regimes[1], violations[3], violations[4], violations[5]
        ),
    )
}

fn unitary_exact() -> chanbound::Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = 0.0f64;
    let mut applicable = 0;
    for i in 0..100 {
        let d = if i < 50 { 2 } else { 4 };
        let (u0, u1) = (random_unitary(&mut rng, d), random_unitary(&mut rng, d));
        let n = 1;
        let exact = unitary_exact_error(n, 0.5, 0.5, &u0, &u1)?;
        let theta = covering_angle(&relative_eigenphases(&u0, &u1)?)?;
        assert!((0.0..2.0 * PI).contains(&theta));
        let t3 = theorem3_bound(n, 0.5, 0.5, (0.5 * theta).min(FRAC_PI_2))?;
        applicable += usize::from(exact.applicable);
        worst = worst.max((exact.value - t3.value).abs());
    }
    outcome(
        worst <= 1e-10,
        format!("100 unitary pairs ({applicable} in the applicable region), max |exact − bound| = {worst:.2e} (tol 1e-10)"),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, Check); 8] = [
        ("Grover optimality", grover_optimality),
        ("τ closed form", tau_closed_form),
        ("two-ADC anchor and ordering", fig4_anchor),
        ("position-finding reduction", cpf_reduction),
        ("one-shot consistency", one_shot_consistency),
        ("oracle sandwich", sandwich),
        ("property suites", property_suites),
        ("unitary exact error", unitary_exact),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let label = format!("criterion {} ({name})", i + 1);
        if !filter.is_empty() && !filter.iter().any(|f| label.contains(f.as_str())) {
            continue;
        }
        match check() {
            Ok(o) => {
                println!("{} {label}: {}", if o.passed { "PASS" } else { "FAIL" }, o.detail);
                failed += usize::from(!o.passed);
            }
            Err(e) => {
                println!("FAIL {label}: error: {e}");
                failed += 1;
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
