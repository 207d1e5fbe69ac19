//! Primal-dual interior-point method for block-diagonal SDPs in standard form
//!
//! ```text
//!   min ⟨C, X⟩  s.t.  ⟨A_i, X⟩ = b_i,  X ⪰ 0
//!   max bᵀy     s.t.  Σ y_i A_i + S = C,  S ⪰ 0
//! ```
//!
//! Infeasible-start path following with the HKM search direction and a
//! Mehrotra predictor-corrector step. Everything is dense per block; the
//! Schur complement is assembled from the sparse constraint triplets.
//! There is no randomness and no dependence on thread scheduling, so
//! identical inputs give bit-identical outputs.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use serde::Serialize;

use super::problem::{SdpProblem, Sense};
use super::SolverStatus;
use crate::error::Result;

/// Search direction (dX, dy, dS).
type Direction = (Vec<DMatrix<f64>>, DVector<f64>, Vec<DMatrix<f64>>);

pub const TOL_SDP: f64 = 1e-8;
/// Residual level below which an unconverged run is still reported as
/// `NearOptimal`.
pub const NEAR_OPTIMAL_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy)]
pub struct SolverOptions {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tol: TOL_SDP,
            max_iter: 100,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, Serialize, PartialEq)]
pub struct Residuals {
    /// `‖b − A(X)‖ / (1 + ‖b‖)`
    pub primal_infeasibility: f64,
    /// `‖C − S − A*(y)‖ / (1 + ‖C‖)`
    pub dual_infeasibility: f64,
    /// `|pobj − dobj| / (1 + |pobj| + |dobj|)`
    pub relative_gap: f64,
}

impl Residuals {
    fn worst(&self) -> f64 {
        self.primal_infeasibility
            .max(self.dual_infeasibility)
            .max(self.relative_gap)
    }
}

#[derive(Debug, Clone)]
pub struct SdpSolution {
    /// Objective in the problem's own sense (primal objective).
    pub value: f64,
    pub primal_value: f64,
    pub dual_value: f64,
    pub block_values: Vec<DMatrix<f64>>,
    pub dual_slacks: Vec<DMatrix<f64>>,
    pub y: DVector<f64>,
    pub status: SolverStatus,
    pub residuals: Residuals,
    pub iterations: usize,
}

impl SdpSolution {
    pub fn is_usable(&self) -> bool {
        matches!(self.status, SolverStatus::Optimal | SolverStatus::NearOptimal)
    }
}

/// Triplets of one constraint restricted to one block, listed in full
/// (both `(i,j)` and `(j,i)` for off-diagonal entries).
struct BlockTerm {
    con: usize,
    rows: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl BlockTerm {
    fn dot(&self, z: &DMatrix<f64>) -> f64 {
        let mut s = 0.0;
        for k in 0..self.vals.len() {
            s += self.vals[k] * z[(self.rows[k], self.cols[k])];
        }
        s
    }

    fn nnz(&self) -> usize {
        self.vals.len()
    }
}

struct Layout {
    sizes: Vec<usize>,
    /// Per block: the constraints touching it.
    terms: Vec<Vec<BlockTerm>>,
    /// Per block: dense objective (already negated for maximization).
    c: Vec<DMatrix<f64>>,
    b: DVector<f64>,
    /// Per block: use the dense `X A_j S⁻¹` route for the Schur complement.
    dense_schur: Vec<bool>,
}

impl Layout {
    fn new(p: &SdpProblem) -> Layout {
        let sizes = p.block_sizes.clone();
        let nb = sizes.len();
        let sign = match p.sense {
            Sense::Minimize => 1.0,
            Sense::Maximize => -1.0,
        };
        let mut c: Vec<DMatrix<f64>> = sizes.iter().map(|&n| DMatrix::zeros(n, n)).collect();
        for (blk, m) in &p.objective {
            c[*blk] += m.to_dense() * sign;
        }
        let mut terms: Vec<Vec<BlockTerm>> = (0..nb).map(|_| Vec::new()).collect();
        for (k, con) in p.constraints.iter().enumerate() {
            for (blk, m) in &con.terms {
                let mut t = BlockTerm {
                    con: k,
                    rows: Vec::new(),
                    cols: Vec::new(),
                    vals: Vec::new(),
                };
                for &(i, j, v) in &m.entries {
                    t.rows.push(i);
                    t.cols.push(j);
                    t.vals.push(v);
                    if i != j {
                        t.rows.push(j);
                        t.cols.push(i);
                        t.vals.push(v);
                    }
                }
                terms[*blk].push(t);
            }
        }
        let dense_schur = (0..nb)
            .map(|blk| {
                let n = sizes[blk] as f64;
                let mb = terms[blk].len() as f64;
                let nnz: f64 = terms[blk].iter().map(|t| t.nnz() as f64).sum();
                let sparse_cost = 0.5 * nnz * nnz;
                let dense_cost = mb * (n * n * n + n * nnz / mb.max(1.0)) + 0.5 * mb * nnz;
                dense_cost < sparse_cost
            })
            .collect();
        let b = DVector::from_iterator(p.constraints.len(), p.constraints.iter().map(|c| c.rhs));
        Layout {
            sizes,
            terms,
            c,
            b,
            dense_schur,
        }
    }

    fn m(&self) -> usize {
        self.b.len()
    }

    /// `A(Z)_i = Σ_b ⟨A_i^b, Z_b⟩`
    fn apply(&self, z: &[DMatrix<f64>]) -> DVector<f64> {
        let mut out = DVector::zeros(self.m());
        for (blk, terms) in self.terms.iter().enumerate() {
            for t in terms {
                out[t.con] += t.dot(&z[blk]);
            }
        }
        out
    }

    /// `A*(y)` per block.
    fn adjoint(&self, y: &DVector<f64>) -> Vec<DMatrix<f64>> {
        self.sizes
            .iter()
            .enumerate()
            .map(|(blk, &n)| {
                let mut m = DMatrix::zeros(n, n);
                for t in &self.terms[blk] {
                    let w = y[t.con];
                    if w == 0.0 {
                        continue;
                    }
                    for k in 0..t.vals.len() {
                        m[(t.rows[k], t.cols[k])] += w * t.vals[k];
                    }
                }
                m
            })
            .collect()
    }

    /// HKM Schur complement `M_ij = Σ_b Tr(A_i X A_j S⁻¹)`.
    fn schur(&self, x: &[DMatrix<f64>], sinv: &[DMatrix<f64>]) -> DMatrix<f64> {
        let m = self.m();
        let mut schur = DMatrix::zeros(m, m);
        for (blk, terms) in self.terms.iter().enumerate() {
            let (xb, si) = (&x[blk], &sinv[blk]);
            let n = self.sizes[blk];
            if self.dense_schur[blk] {
                let mut t = DMatrix::zeros(n, n);
                for (jj, tj) in terms.iter().enumerate() {
                    t.fill(0.0);
                    // (X A_j)[:, col] += v X[:, row]
                    for k in 0..tj.vals.len() {
                        let (r, col, v) = (tj.rows[k], tj.cols[k], tj.vals[k]);
                        for i in 0..n {
                            t[(i, col)] += v * xb[(i, r)];
                        }
                    }
                    let g = &t * si;
                    for ti in &terms[..=jj] {
                        schur[(ti.con, tj.con)] += ti.dot(&g);
                    }
                }
            } else {
                for (jj, tj) in terms.iter().enumerate() {
                    for ti in &terms[..=jj] {
                        // Σ v w X[b,c] S⁻¹[d,a] over (a,b,v) ∈ A_i, (c,d,w) ∈ A_j
                        let mut s = 0.0;
                        for p in 0..ti.vals.len() {
                            let (a, bcol, v) = (ti.rows[p], ti.cols[p], ti.vals[p]);
                            for q in 0..tj.vals.len() {
                                s += v * tj.vals[q] * xb[(bcol, tj.rows[q])] * si[(tj.cols[q], a)];
                            }
                        }
                        schur[(ti.con, tj.con)] += s;
                    }
                }
            }
        }
        // Terms within a block are in constraint order, so only the upper
        // triangle was accumulated.
        for i in 0..m {
            for j in (i + 1)..m {
                schur[(j, i)] = schur[(i, j)];
            }
        }
        schur
    }
}

fn inner(a: &[DMatrix<f64>], b: &[DMatrix<f64>]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.dot(y)).sum()
}

fn frob(a: &[DMatrix<f64>]) -> f64 {
    a.iter().map(|x| x.norm_squared()).sum::<f64>().sqrt()
}

fn symmetrize(m: &mut DMatrix<f64>) {
    let n = m.nrows();
    for i in 0..n {
        for j in (i + 1)..n {
            let v = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
}

/// Largest `t` with `X + tΔ ⪰ 0` (infinite when Δ ⪰ 0), given `X = LLᵀ`.
fn max_step(chol: &Cholesky<f64, Dyn>, delta: &DMatrix<f64>) -> f64 {
    let l = chol.l();
    let mut w = l.solve_lower_triangular(delta).expect("Cholesky factor is nonsingular");
    w.transpose_mut();
    let mut p = l.solve_lower_triangular(&w).expect("Cholesky factor is nonsingular");
    symmetrize(&mut p);
    let lmin = p.symmetric_eigenvalues().min();
    if lmin >= 0.0 {
        f64::INFINITY
    } else {
        -1.0 / lmin
    }
}

fn step_length(chols: &[Cholesky<f64, Dyn>], delta: &[DMatrix<f64>]) -> f64 {
    chols
        .iter()
        .zip(delta)
        .map(|(ch, d)| max_step(ch, d))
        .fold(f64::INFINITY, f64::min)
}

fn cholesky_all(ms: &[DMatrix<f64>]) -> Option<Vec<Cholesky<f64, Dyn>>> {
    ms.iter().map(|m| Cholesky::new(m.clone())).collect()
}

fn solve_schur(m: &DMatrix<f64>, rhs: &DVector<f64>) -> Option<DVector<f64>> {
    if let Some(ch) = Cholesky::new(m.clone()) {
        return Some(ch.solve(rhs));
    }
    // Ill-conditioned near the optimum; regularize lightly and fall back to LU.
    let scale = m.diagonal().amax().max(1.0);
    let mut reg = m.clone();
    for i in 0..reg.nrows() {
        reg[(i, i)] += 1e-13 * scale;
    }
    if let Some(ch) = Cholesky::new(reg.clone()) {
        return Some(ch.solve(rhs));
    }
    reg.lu().solve(rhs)
}

struct Iterate {
    x: Vec<DMatrix<f64>>,
    y: DVector<f64>,
    s: Vec<DMatrix<f64>>,
}

/// Solves `problem` with default options.
pub fn solve(problem: &SdpProblem) -> Result<SdpSolution> {
    solve_with(problem, &SolverOptions::default())
}

pub fn solve_with(problem: &SdpProblem, opts: &SolverOptions) -> Result<SdpSolution> {
    problem.validate()?;
    let lay = Layout::new(problem);
    let m = lay.m();
    let nb = lay.sizes.len();
    let total_dim: f64 = lay.sizes.iter().map(|&n| n as f64).sum();

    let norm_b = lay.b.norm();
    let norm_c = frob(&lay.c);

    // Initial point scaled as in SDPT3.
    let mut it = {
        let mut x = Vec::with_capacity(nb);
        let mut s = Vec::with_capacity(nb);
        for (blk, &n) in lay.sizes.iter().enumerate() {
            let nf = n as f64;
            let mut xi = 10.0f64.max(nf.sqrt());
            let mut eta = 10.0f64.max(nf.sqrt()).max(lay.c[blk].norm());
            for t in &lay.terms[blk] {
                let an: f64 = t.vals.iter().map(|v| v * v).sum::<f64>().sqrt();
                xi = xi.max(nf * (1.0 + lay.b[t.con].abs()) / (1.0 + an));
                eta = eta.max(an);
            }
            x.push(DMatrix::identity(n, n) * xi);
            s.push(DMatrix::identity(n, n) * eta);
        }
        Iterate {
            x,
            y: DVector::zeros(m),
            s,
        }
    };

    let sign = match problem.sense {
        Sense::Minimize => 1.0,
        Sense::Maximize => -1.0,
    };

    let mut best: Option<(Residuals, Iterate, f64, f64)> = None;
    let mut iterations = 0;
    let mut status = SolverStatus::NumericalFailure;

    for iter in 0..=opts.max_iter {
        iterations = iter;
        let ax = lay.apply(&it.x);
        let rp = &lay.b - &ax;
        let aty = lay.adjoint(&it.y);
        let rd: Vec<DMatrix<f64>> = (0..nb).map(|k| &lay.c[k] - &it.s[k] - &aty[k]).collect();
        let pobj = inner(&lay.c, &it.x);
        let dobj = lay.b.dot(&it.y);
        let res = Residuals {
            primal_infeasibility: rp.norm() / (1.0 + norm_b),
            dual_infeasibility: frob(&rd) / (1.0 + norm_c),
            relative_gap: (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs()),
        };
        if best.as_ref().is_none_or(|(r, ..)| res.worst() <= r.worst()) {
            best = Some((
                res,
                Iterate {
                    x: it.x.clone(),
                    y: it.y.clone(),
                    s: it.s.clone(),
                },
                pobj,
                dobj,
            ));
        }
        if res.worst() < opts.tol {
            status = SolverStatus::Optimal;
            break;
        }
        if dobj > 1e12 * (1.0 + norm_c) && res.dual_infeasibility < opts.tol {
            status = SolverStatus::Infeasible;
            break;
        }
        if pobj < -1e12 * (1.0 + norm_b) && res.primal_infeasibility < opts.tol {
            status = SolverStatus::Infeasible;
            break;
        }
        if iter == opts.max_iter {
            break;
        }

        let mu = inner(&it.x, &it.s) / total_dim;
        let (Some(chol_x), Some(chol_s)) = (cholesky_all(&it.x), cholesky_all(&it.s)) else {
            break;
        };
        let sinv: Vec<DMatrix<f64>> = chol_s.iter().map(|c| c.inverse()).collect();
        let schur = lay.schur(&it.x, &sinv);

        // X Rd precomputed for both solves.
        let x_rd: Vec<DMatrix<f64>> = (0..nb).map(|k| &it.x[k] * &rd[k]).collect();

        let direction = |rc: &[DMatrix<f64>]| -> Option<Direction> {
            // Q = (R_c − X Rd) S⁻¹
            let q: Vec<DMatrix<f64>> = (0..nb).map(|k| (&rc[k] - &x_rd[k]) * &sinv[k]).collect();
            let rhs = &lay.b - lay.apply(&q);
            let dy = solve_schur(&schur, &rhs)?;
            let aty_d = lay.adjoint(&dy);
            let ds: Vec<DMatrix<f64>> = (0..nb).map(|k| &rd[k] - &aty_d[k]).collect();
            let dx: Vec<DMatrix<f64>> = (0..nb)
                .map(|k| {
                    let mut d = &q[k] - &it.x[k] + &it.x[k] * &aty_d[k] * &sinv[k];
                    symmetrize(&mut d);
                    d
                })
                .collect();
            Some((dx, dy, ds))
        };

        // Predictor.
        let zero_rc: Vec<DMatrix<f64>> = lay.sizes.iter().map(|&n| DMatrix::zeros(n, n)).collect();
        let Some((dx_p, _dy_p, ds_p)) = direction(&zero_rc) else {
            break;
        };
        let ap = step_length(&chol_x, &dx_p).min(1.0);
        let ad = step_length(&chol_s, &ds_p).min(1.0);
        let x_aff: Vec<DMatrix<f64>> = (0..nb).map(|k| &it.x[k] + &dx_p[k] * ap).collect();
        let s_aff: Vec<DMatrix<f64>> = (0..nb).map(|k| &it.s[k] + &ds_p[k] * ad).collect();
        let mu_aff = inner(&x_aff, &s_aff) / total_dim;
        let sigma = (mu_aff / mu).clamp(0.0, 1.0).powi(3);

        // Corrector: R_c = σμI − ΔX_p ΔS_p.
        let rc: Vec<DMatrix<f64>> = (0..nb)
            .map(|k| {
                let n = lay.sizes[k];
                DMatrix::identity(n, n) * (sigma * mu) - &dx_p[k] * &ds_p[k]
            })
            .collect();
        let Some((dx, dy, ds)) = direction(&rc) else {
            break;
        };
        let gamma = 0.9 + 0.09 * ap.min(ad);
        let ap = (gamma * step_length(&chol_x, &dx)).min(1.0);
        let ad = (gamma * step_length(&chol_s, &ds)).min(1.0);
        for k in 0..nb {
            it.x[k] += &dx[k] * ap;
            it.s[k] += &ds[k] * ad;
            symmetrize(&mut it.x[k]);
            symmetrize(&mut it.s[k]);
        }
        it.y += dy * ad;
    }

    let (residuals, best_it, pobj, dobj) = best.expect("at least one iterate evaluated");
    if status != SolverStatus::Optimal && status != SolverStatus::Infeasible {
        status = if residuals.worst() < NEAR_OPTIMAL_TOL {
            SolverStatus::NearOptimal
        } else {
            SolverStatus::NumericalFailure
        };
    }
    Ok(SdpSolution {
        value: sign * pobj,
        primal_value: sign * pobj,
        dual_value: sign * dobj,
        block_values: best_it.x,
        dual_slacks: best_it.s,
        y: best_it.y,
        status,
        residuals,
        iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sdp::problem::{Constraint, Formulation, SymMatrix};

    fn sym(dim: usize, entries: &[(usize, usize, f64)]) -> SymMatrix {
        SymMatrix {
            dim,
            entries: entries.to_vec(),
        }
    }

    #[test]
    fn min_eigenvalue_program() {
        // min ⟨C, X⟩ s.t. Tr X = 1  →  λ_min(C)
        let c = DMatrix::from_row_slice(3, 3, &[2.0, 1.0, 0.0, 1.0, 3.0, 0.5, 0.0, 0.5, 1.0]);
        let p = SdpProblem {
            formulation: Formulation::Custom,
            sense: Sense::Minimize,
            block_sizes: vec![3],
            objective: vec![(0, SymMatrix::from_dense(&c))],
            constraints: vec![Constraint {
                terms: vec![(0, sym(3, &[(0, 0, 1.0), (1, 1, 1.0), (2, 2, 1.0)]))],
                rhs: 1.0,
            }],
        };
        let sol = solve(&p).unwrap();
        assert_eq!(sol.status, SolverStatus::Optimal);
        let lmin = c.symmetric_eigenvalues().min();
        assert!((sol.value - lmin).abs() < 1e-7, "{} vs {}", sol.value, lmin);
        assert!(p.max_constraint_residual(&sol.block_values) < 1e-8);
    }

    #[test]
    fn max_off_diagonal_two_blocks() {
        // max 2 X01 s.t. X00 = 1, X11 = 4, second block Y00 = 1 → 2·2 = 4
        let p = SdpProblem {
            formulation: Formulation::Custom,
            sense: Sense::Maximize,
            block_sizes: vec![2, 1],
            objective: vec![(0, sym(2, &[(0, 1, 1.0)])), (1, sym(1, &[(0, 0, 1.0)]))],
            constraints: vec![
                Constraint {
                    terms: vec![(0, sym(2, &[(0, 0, 1.0)]))],
                    rhs: 1.0,
                },
                Constraint {
                    terms: vec![(0, sym(2, &[(1, 1, 1.0)]))],
                    rhs: 4.0,
                },
                Constraint {
                    terms: vec![(1, sym(1, &[(0, 0, 1.0)]))],
                    rhs: 1.0,
                },
            ],
        };
        let sol = solve(&p).unwrap();
        assert_eq!(sol.status, SolverStatus::Optimal);
        assert!((sol.value - 5.0).abs() < 1e-7, "{}", sol.value);
        assert!((sol.dual_value - sol.primal_value).abs() < 1e-6);
    }

    #[test]
    fn deterministic() {
        let c = DMatrix::from_row_slice(2, 2, &[1.0, -0.3, -0.3, 0.2]);
        let p = SdpProblem {
            formulation: Formulation::Custom,
            sense: Sense::Minimize,
            block_sizes: vec![2],
            objective: vec![(0, SymMatrix::from_dense(&c))],
            constraints: vec![Constraint {
                terms: vec![(0, sym(2, &[(0, 0, 1.0), (1, 1, 1.0)]))],
                rhs: 1.0,
            }],
        };
        let a = solve(&p).unwrap();
        let b = solve(&p).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        assert_eq!(a.iterations, b.iterations);
    }
}
