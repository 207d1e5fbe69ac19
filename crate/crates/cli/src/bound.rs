//! Single bound evaluation on a problem file.

use std::path::{Path, PathBuf};

use chanbound::bounds::{
    theorem1_from_problem, theorem2_from_problem, theorem3_from_channels, theorem4_from_channels, unitary_exact_error,
    BoundResult,
};
use chanbound::optimizer::{KRange, OptimizationReport, WeightedOptimizer};
use chanbound::qmat::KrausChannel;
use serde::Serialize;

use crate::output::write_json;
use crate::spec_file::{load_problem, LoadedProblem};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum TheoremArg {
    /// Bures-angle bound for grouped problems (needs a reference channel).
    T1,
    /// Weighted trace-distance bound for grouped problems (needs a reference channel).
    T2,
    /// Bures-angle bound for two channels.
    T3,
    /// Weighted trace-distance bound for two channels.
    T4,
    /// Exact error for two unitary channels.
    #[value(name = "c1", alias = "corollary1")]
    C1,
}

pub struct BoundArgs {
    pub spec: PathBuf,
    pub theorem: TheoremArg,
    pub n: usize,
    pub k: Option<usize>,
    pub alpha0: Option<f64>,
}

#[derive(Debug, Serialize)]
struct Provenance<'a> {
    tool: &'static str,
    version: &'static str,
    spec_file: &'a Path,
    theorem: TheoremArg,
    n: usize,
    k: Option<usize>,
    alpha0: Option<f64>,
    /// Whether `(k, α₀)` were chosen by the optimizer.
    optimized: bool,
    alpha_tol: Option<f64>,
    solver_calls: Option<usize>,
}

#[derive(Debug, Serialize)]
struct BoundOutput<'a> {
    result: &'a BoundResult,
    provenance: Provenance<'a>,
}

fn two_channel(p: &LoadedProblem, what: &str) -> Result<(f64, KrausChannel, f64, KrausChannel), CliError> {
    p.two_channel()
        .map(|(p0, c0, p1, c1)| (p0, c0.clone(), p1, c1.clone()))
        .ok_or_else(|| CliError::Input(format!("{what} needs a two-channel problem with singleton groups")))
}

fn reference<'a>(p: &'a LoadedProblem, what: &str) -> Result<&'a KrausChannel, CliError> {
    p.reference
        .as_ref()
        .ok_or_else(|| CliError::Input(format!("field `reference_channel`: required for {what}")))
}

fn single_kraus<'a>(ch: &'a KrausChannel, which: &str) -> Result<&'a chanbound::qmat::CMatrix, CliError> {
    match ch.kraus() {
        [u] => Ok(u),
        ops => Err(CliError::Input(format!(
            "c1 needs unitary channels, but {which} has {} Kraus operators",
            ops.len()
        ))),
    }
}

fn optimized(
    opt: WeightedOptimizer<'_>,
    n: usize,
    k: Option<usize>,
    tol: Option<f64>,
) -> Result<(OptimizationReport, usize), CliError> {
    let opt = match tol {
        Some(t) => opt.with_tol(t)?,
        None => opt,
    };
    let rep = match k {
        Some(k) if k > n => return Err(CliError::Input(format!("k = {k} exceeds n = {n}"))),
        Some(k) => {
            let (best, cand) = opt.optimize_k(n, k)?;
            OptimizationReport {
                n,
                best: best.clone(),
                k_star: cand.k,
                half_k: best,
                candidates: vec![cand],
                skipped: Vec::new(),
                solver_calls: opt.solver_calls(),
            }
        }
        None => opt.optimize(n, KRange::Full)?,
    };
    let calls = opt.solver_calls();
    Ok((rep, calls))
}

pub fn bound(a: &BoundArgs, tol: Option<f64>, out: Option<&Path>) -> Result<(), CliError> {
    let p = load_problem(&a.spec)?;
    let mut prov = Provenance {
        tool: "chanbound",
        version: env!("CARGO_PKG_VERSION"),
        spec_file: &a.spec,
        theorem: a.theorem,
        n: a.n,
        k: a.k,
        alpha0: a.alpha0,
        optimized: false,
        alpha_tol: None,
        solver_calls: None,
    };
    let weighted = matches!(a.theorem, TheoremArg::T2 | TheoremArg::T4);
    if !weighted && (a.k.is_some() || a.alpha0.is_some()) {
        return Err(CliError::Input("--k and --alpha0 only apply to t2 and t4".into()));
    }
    let result = match a.theorem {
        TheoremArg::T1 => theorem1_from_problem(&p.problem, reference(&p, "t1")?, a.n)?,
        TheoremArg::T3 => {
            let (p0, c0, p1, c1) = two_channel(&p, "t3")?;
            theorem3_from_channels(a.n, p0, &c0, p1, &c1)?
        }
        TheoremArg::C1 => {
            let (p0, c0, p1, c1) = two_channel(&p, "c1")?;
            unitary_exact_error(a.n, p0, p1, single_kraus(&c0, "channel 0")?, single_kraus(&c1, "channel 1")?)?
        }
        TheoremArg::T2 | TheoremArg::T4 => match (a.k, a.alpha0) {
            (Some(k), Some(alpha0)) => {
                if k > a.n {
                    return Err(CliError::Input(format!("k = {k} exceeds n = {}", a.n)));
                }
                if a.theorem == TheoremArg::T4 {
                    let (p0, c0, p1, c1) = two_channel(&p, "t4")?;
                    theorem4_from_channels(a.n, k, p0, &c0, p1, &c1, alpha0)?
                } else {
                    theorem2_from_problem(&p.problem, reference(&p, "t2")?, a.n, k, alpha0)?
                }
            }
            (k, None) => {
                let (rep, calls) = if a.theorem == TheoremArg::T4 {
                    let (p0, c0, p1, c1) = two_channel(&p, "t4")?;
                    let opt = WeightedOptimizer::two_channel(p0, &c0, p1, &c1)?;
                    optimized(opt, a.n, k, tol)?
                } else {
                    let r = reference(&p, "t2")?;
                    optimized(WeightedOptimizer::grouped(&p.problem, r)?, a.n, k, tol)?
                };
                prov.optimized = true;
                prov.alpha_tol = Some(tol.unwrap_or(chanbound::optimizer::GOLDEN_TOL));
                prov.solver_calls = Some(calls);
                rep.best
            }
            (None, Some(_)) => return Err(CliError::Input("--alpha0 needs --k".into())),
        },
    };
    result.validate()?;
    write_json(out, &BoundOutput { result: &result, provenance: prov })
}
