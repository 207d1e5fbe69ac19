//! Sweep commands for the damping-channel and search applications.

use std::path::Path;

use chanbound::applications::{
    grover_bound, grover_success, two_adc_bures_bound, CpfInstance, GroverInstance, TwoAdcInstance,
};
use chanbound::optimizer::{KRange, OptimizationReport, WeightedOptimizer};
use chanbound::qmat::KrausChannel;
use rayon::prelude::*;

use crate::output::{check_row, fmt_f, worst_status, write_csv};
use crate::CliError;

/// `start, start + step, …` up to `end`, rounded to 10 decimals so that
/// grid points print cleanly.
pub fn float_range(start: f64, end: f64, step: f64) -> Result<Vec<f64>, CliError> {
    if !(start.is_finite() && end.is_finite() && step.is_finite()) || step <= 0.0 || end < start {
        return Err(CliError::Input(format!(
            "invalid range {start}..{end} step {step}"
        )));
    }
    let count = ((end - start) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|i| round10(start + i as f64 * step)).collect())
}

fn round10(x: f64) -> f64 {
    (x * 1e10).round() / 1e10
}

fn int_range(start: usize, end: usize) -> Result<Vec<usize>, CliError> {
    if end < start {
        return Err(CliError::Input(format!("invalid range {start}..{end}")));
    }
    Ok((start..=end).collect())
}

fn rate_pair(r0: f64, delta: f64) -> Result<(f64, f64), CliError> {
    let r1 = round10(r0 + delta);
    if !(0.0..=1.0).contains(&r0) || !(0.0..=1.0).contains(&r1) {
        return Err(CliError::Input(format!("damping rates ({r0}, {r1}) outside [0, 1]")));
    }
    Ok((r0, r1))
}

fn lib_err(e: chanbound::Error) -> CliError {
    CliError::from(e)
}

/// Sequential sweep where each point starts its `k` search at the previous
/// optimum; with `full_k` every point searches all `k` and points run in
/// parallel.
fn sweep<T: Sync>(
    points: &[T],
    full_k: bool,
    run: impl Fn(&T, KRange) -> Result<OptimizationReport, CliError> + Sync,
) -> Result<Vec<OptimizationReport>, CliError> {
    if full_k {
        return points.par_iter().map(|p| run(p, KRange::Full)).collect();
    }
    let mut out: Vec<OptimizationReport> = Vec::with_capacity(points.len());
    for p in points {
        let range = out.last().map_or(KRange::Full, |prev| KRange::From(prev.k_star));
        out.push(run(p, range)?);
    }
    Ok(out)
}

const WEIGHTED_COLUMNS: [&str; 8] = [
    "half_k_bound[prob]",
    "k_half[count]",
    "alpha0_half_k[1]",
    "optimal_k_bound[prob]",
    "k_star[count]",
    "alpha0_star[1]",
    "alpha1_star[1]",
    "skipped_k[count]",
];

fn weighted_cells(rep: &OptimizationReport) -> Vec<String> {
    vec![
        fmt_f(rep.half_k.value),
        rep.half_k.params.k.unwrap_or(rep.n / 2).to_string(),
        fmt_f(rep.half_k.params.alpha0.unwrap_or(1.0)),
        fmt_f(rep.best.value),
        rep.k_star.to_string(),
        fmt_f(rep.best.params.alpha0.unwrap_or(1.0)),
        fmt_f(rep.best.params.alpha1.unwrap_or(1.0)),
        rep.skipped.len().to_string(),
    ]
}

fn header(lead: &[&'static str], tail: &[&'static str]) -> Vec<&'static str> {
    lead.iter().chain(WEIGHTED_COLUMNS.iter()).chain(tail.iter()).copied().collect()
}

fn two_adc_row(lead: Vec<String>, inst: &TwoAdcInstance, n: usize, rep: &OptimizationReport) -> Result<Vec<String>, CliError> {
    let t3 = two_adc_bures_bound(inst, n);
    check_row([&t3, &rep.best, &rep.half_k])?;
    let mut row = lead;
    row.push(fmt_f(inst.tau_a()));
    row.push(fmt_f(t3.value));
    row.push(t3.applicable.to_string());
    row.extend(weighted_cells(rep));
    row.push(worst_status([&rep.best, &rep.half_k]).to_string());
    Ok(row)
}

fn two_adc_optimize(inst: &TwoAdcInstance, n: usize, range: KRange, tol: Option<f64>) -> Result<OptimizationReport, CliError> {
    let (c0, c1): (KrausChannel, KrausChannel) = inst.channels();
    let mut opt = WeightedOptimizer::two_channel(inst.p0, &c0, inst.p1, &c1).map_err(lib_err)?;
    if let Some(t) = tol {
        opt = opt.with_tol(t).map_err(lib_err)?;
    }
    opt.optimize(n, range).map_err(lib_err)
}

pub struct TwoAdcR0Args {
    pub r0_start: f64,
    pub r0_end: f64,
    pub r0_step: f64,
    pub delta: f64,
    pub n: usize,
    pub p0: f64,
    pub full_k: bool,
}

pub fn fig_two_adc_r0(a: &TwoAdcR0Args, tol: Option<f64>, out: Option<&Path>) -> Result<(), CliError> {
    let insts = float_range(a.r0_start, a.r0_end, a.r0_step)?
        .into_iter()
        .map(|r0| {
            let (r0, r1) = rate_pair(r0, a.delta)?;
            TwoAdcInstance::new(a.p0, 1.0 - a.p0, r0, r1).map_err(lib_err)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let reports = sweep(&insts, a.full_k, |inst, range| two_adc_optimize(inst, a.n, range, tol))?;
    let rows = insts
        .iter()
        .zip(&reports)
        .map(|(inst, rep)| two_adc_row(vec![fmt_f(inst.r0), fmt_f(inst.r1), a.n.to_string()], inst, a.n, rep))
        .collect::<Result<Vec<_>, _>>()?;
    let h = header(
        &["r0[rate]", "r1[rate]", "n[count]", "tau_a[rad]", "theorem3_bound[prob]", "theorem3_applicable[bool]"],
        &["solver_status"],
    );
    write_csv(out, &h, &rows)
}

pub struct TwoAdcNArgs {
    pub n_start: usize,
    pub n_end: usize,
    pub r0: f64,
    pub r1: f64,
    pub p0: f64,
    pub full_k: bool,
}

pub fn fig_two_adc_n(a: &TwoAdcNArgs, tol: Option<f64>, out: Option<&Path>) -> Result<(), CliError> {
    let inst = TwoAdcInstance::new(a.p0, 1.0 - a.p0, a.r0, a.r1).map_err(lib_err)?;
    let ns = int_range(a.n_start, a.n_end)?;
    let (c0, c1) = inst.channels();
    let mut opt = WeightedOptimizer::two_channel(inst.p0, &c0, inst.p1, &c1).map_err(lib_err)?;
    if let Some(t) = tol {
        opt = opt.with_tol(t).map_err(lib_err)?;
    }
    let reports = sweep(&ns, a.full_k, |&n, range| opt.optimize(n, range).map_err(lib_err))?;
    let rows = ns
        .iter()
        .zip(&reports)
        .map(|(&n, rep)| two_adc_row(vec![n.to_string(), fmt_f(inst.r0), fmt_f(inst.r1)], &inst, n, rep))
        .collect::<Result<Vec<_>, _>>()?;
    let h = header(
        &["n[count]", "r0[rate]", "r1[rate]", "tau_a[rad]", "theorem3_bound[prob]", "theorem3_applicable[bool]"],
        &["solver_status"],
    );
    write_csv(out, &h, &rows)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum CpfMode {
    #[value(name = "sweep_r0", alias = "sweep-r0")]
    SweepR0,
    #[value(name = "sweep_n", alias = "sweep-n")]
    SweepN,
}

pub struct CpfArgs {
    pub mode: CpfMode,
    pub ell: usize,
    pub n: usize,
    pub r0_start: f64,
    pub r0_end: f64,
    pub r0_step: f64,
    pub delta: f64,
    pub r0: f64,
    pub r1: f64,
    pub n_start: usize,
    pub n_end: usize,
    pub full_k: bool,
}

pub fn fig_cpf(a: &CpfArgs, tol: Option<f64>, out: Option<&Path>) -> Result<(), CliError> {
    let optimizer = |inst: &CpfInstance| -> Result<WeightedOptimizer<'static>, CliError> {
        let mut opt = WeightedOptimizer::cpf(inst).map_err(lib_err)?;
        if let Some(t) = tol {
            opt = opt.with_tol(t).map_err(lib_err)?;
        }
        Ok(opt)
    };
    let (points, reports): (Vec<(CpfInstance, usize)>, Vec<OptimizationReport>) = match a.mode {
        CpfMode::SweepR0 => {
            let points = float_range(a.r0_start, a.r0_end, a.r0_step)?
                .into_iter()
                .map(|r0| {
                    let (r0, r1) = rate_pair(r0, a.delta)?;
                    Ok((CpfInstance::new(a.ell, r0, r1).map_err(lib_err)?, a.n))
                })
                .collect::<Result<Vec<_>, CliError>>()?;
            let reports = sweep(&points, a.full_k, |(inst, n), range| {
                optimizer(inst)?.optimize(*n, range).map_err(lib_err)
            })?;
            (points, reports)
        }
        CpfMode::SweepN => {
            let inst = CpfInstance::new(a.ell, a.r0, a.r1).map_err(lib_err)?;
            let opt = optimizer(&inst)?;
            let points: Vec<_> = int_range(a.n_start, a.n_end)?.into_iter().map(|n| (inst, n)).collect();
            let reports = sweep(&points, a.full_k, |(_, n), range| opt.optimize(*n, range).map_err(lib_err))?;
            (points, reports)
        }
    };
    let rows = points
        .iter()
        .zip(&reports)
        .map(|((inst, n), rep)| {
            check_row([&rep.best, &rep.half_k])?;
            let mut row = vec![fmt_f(inst.r0), fmt_f(inst.r1), n.to_string(), inst.ell.to_string()];
            row.extend(weighted_cells(rep));
            row.push(worst_status([&rep.best, &rep.half_k]).to_string());
            Ok(row)
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let h = header(&["r0[rate]", "r1[rate]", "n[count]", "ell[count]"], &["solver_status"]);
    write_csv(out, &h, &rows)
}

pub struct GroverArgs {
    pub items: usize,
    pub marked: usize,
    pub n_start: usize,
    pub n_end: Option<usize>,
}

/// Default gap tolerance of the `grover` command.
pub const GROVER_GAP_TOL: f64 = 1e-12;

pub fn grover(a: &GroverArgs, tol: Option<f64>, out: Option<&Path>) -> Result<(), CliError> {
    let inst = GroverInstance::new(a.items, a.marked).map_err(lib_err)?;
    let last = a.n_end.unwrap_or_else(|| inst.max_queries());
    if last > inst.max_queries() {
        return Err(CliError::Input(format!(
            "n = {last} is outside the region where the search algorithm is optimal (n ≤ {})",
            inst.max_queries()
        )));
    }
    let tol = tol.unwrap_or(GROVER_GAP_TOL);
    let mut rows = Vec::new();
    let mut worst: Option<(usize, f64)> = None;
    for n in int_range(a.n_start, last)? {
        let b = grover_bound(&inst, n);
        check_row([&b])?;
        let s = grover_success(&inst, n).map_err(lib_err)?;
        let gap = (1.0 - b.value - s).abs();
        if gap > tol && worst.is_none_or(|(_, g)| gap > g) {
            worst = Some((n, gap));
        }
        rows.push(vec![n.to_string(), fmt_f(b.value), fmt_f(s), fmt_f(gap)]);
    }
    write_csv(
        out,
        &["n[count]", "lower_bound[prob]", "grover_success[prob]", "gap[prob]"],
        &rows,
    )?;
    match worst {
        Some((n, gap)) => Err(CliError::Runtime(format!("gap {gap:e} at n = {n} exceeds tolerance {tol:e}"))),
        None => Ok(()),
    }
}
