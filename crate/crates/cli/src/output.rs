//! CSV and JSON writers. CSV uses `,` separators, `.` decimals and LF line
//! endings; floats are printed in shortest round-trip form, with an exponent
//! for very small or large magnitudes.

use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use chanbound::bounds::BoundResult;
use chanbound::sdp::SolverStatus;

use crate::CliError;

pub fn fmt_f(x: f64) -> String {
    if x == 0.0 {
        "0.0".into()
    } else {
        format!("{x:?}")
    }
}

pub fn status_name(s: SolverStatus) -> &'static str {
    match s {
        SolverStatus::Optimal => "optimal",
        SolverStatus::NearOptimal => "near_optimal",
        SolverStatus::Infeasible => "infeasible",
        SolverStatus::NumericalFailure => "numerical_failure",
    }
}

/// Worst status across the solver runs behind a set of bounds, `none` when
/// no solver ran.
pub fn worst_status<'a>(results: impl IntoIterator<Item = &'a BoundResult>) -> &'static str {
    let rank = |s: &SolverStatus| match s {
        SolverStatus::Optimal => 0,
        SolverStatus::NearOptimal => 1,
        SolverStatus::Infeasible => 2,
        SolverStatus::NumericalFailure => 3,
    };
    results
        .into_iter()
        .flat_map(|r| r.diagnostics.iter())
        .max_by_key(|s| rank(s))
        .map_or("none", |s| status_name(*s))
}

/// Checks every bound of a row before it is written.
pub fn check_row<'a>(results: impl IntoIterator<Item = &'a BoundResult>) -> Result<(), CliError> {
    for r in results {
        r.validate()
            .map_err(|e| CliError::Runtime(format!("refusing to write invalid {:?} bound at n = {}: {e}", r.theorem, r.n)))?;
    }
    Ok(())
}

fn sink(out: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    Ok(match out {
        Some(p) => Box::new(File::create(p).map_err(|e| CliError::Runtime(format!("{}: {e}", p.display())))?),
        None => Box::new(io::stdout().lock()),
    })
}

pub fn write_csv(out: Option<&Path>, header: &[&str], rows: &[Vec<String>]) -> Result<(), CliError> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(sink(out)?);
    let io_err = |e: csv::Error| CliError::Runtime(format!("writing CSV: {e}"));
    w.write_record(header).map_err(io_err)?;
    for row in rows {
        debug_assert_eq!(row.len(), header.len());
        w.write_record(row).map_err(io_err)?;
    }
    w.flush().map_err(|e| CliError::Runtime(format!("writing CSV: {e}")))
}

pub fn write_json<T: serde::Serialize>(out: Option<&Path>, value: &T) -> Result<(), CliError> {
    let mut w = sink(out)?;
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::Runtime(e.to_string()))?;
    writeln!(w, "{text}").map_err(|e| CliError::Runtime(format!("writing JSON: {e}")))
}
