//! Conic programs for the trace-norm and diamond-norm optimizations, a
//! self-contained interior-point solver, and the two-state Holevo–Helstrom
//! error.

mod problem;
mod programs;
mod solver;

pub use problem::{embed_hermitian, extract_hermitian, Embedding, Constraint, Formulation, HermitianProgram, Sense, SdpProblem, SymMatrix};
pub use programs::*;
pub use solver::{solve, solve_with, Residuals, SdpSolution, SolverOptions, NEAR_OPTIMAL_TOL, TOL_SDP};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverStatus {
    Optimal,
    NearOptimal,
    Infeasible,
    NumericalFailure,
}
