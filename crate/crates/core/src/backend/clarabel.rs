use std::time::Instant;

use clarabel::algebra::CscMatrix;
use clarabel::solver::{
    DefaultSettingsBuilder, DefaultSolver, IPSolver, SolverStatus, SupportedConeT,
};

use super::{ConicBackend, SolveLimits, SolveResult, SolveStatus};
use crate::relax::{ConicProblem, RowSense};

const SQRT2: f64 = std::f64::consts::SQRT_2;

/// Clarabel's standard form `min qᵀx  s.t.  Ax + s = b, s ∈ K` for a problem.
pub(crate) struct StandardForm {
    pub a_rows: Vec<usize>,
    pub a_cols: Vec<usize>,
    pub a_vals: Vec<f64>,
    pub b: Vec<f64>,
    pub cones: Vec<SupportedConeT<f64>>,
    pub q: Vec<f64>,
    pub num_rows: usize,
    /// Standard-form row of each linear row of the problem, and its sign.
    pub row_map: Vec<(usize, f64)>,
}

impl StandardForm {
    pub fn from_problem(p: &ConicProblem) -> Self {
        let mut f = StandardForm {
            a_rows: Vec::new(),
            a_cols: Vec::new(),
            a_vals: Vec::new(),
            b: Vec::new(),
            cones: Vec::new(),
            q: p.objective.clone(),
            num_rows: 0,
            row_map: vec![(0, 1.0); p.rows.len()],
        };
        let push_row = |f: &mut StandardForm, terms: &[(usize, f64)], scale: f64, rhs: f64| {
            let r = f.num_rows;
            for &(k, a) in terms {
                if a != 0.0 {
                    f.a_rows.push(r);
                    f.a_cols.push(k);
                    f.a_vals.push(scale * a);
                }
            }
            f.b.push(scale * rhs);
            f.num_rows += 1;
            r
        };

        let eq: Vec<usize> = (0..p.rows.len())
            .filter(|&r| p.rows[r].sense == RowSense::Eq)
            .collect();
        for &r in &eq {
            let idx = push_row(&mut f, &p.rows[r].terms, 1.0, p.rows[r].rhs);
            f.row_map[r] = (idx, 1.0);
        }
        if !eq.is_empty() {
            f.cones.push(SupportedConeT::ZeroConeT(eq.len()));
        }

        let start = f.num_rows;
        for (r, row) in p.rows.iter().enumerate() {
            let sign = match row.sense {
                RowSense::Eq => continue,
                RowSense::Le => 1.0,
                RowSense::Ge => -1.0,
            };
            let idx = push_row(&mut f, &row.terms, sign, row.rhs);
            f.row_map[r] = (idx, sign);
        }
        for k in 0..p.num_vars() {
            if p.lower[k].is_finite() {
                push_row(&mut f, &[(k, 1.0)], -1.0, p.lower[k]);
            }
            if p.upper[k].is_finite() {
                push_row(&mut f, &[(k, 1.0)], 1.0, p.upper[k]);
            }
        }
        if f.num_rows > start {
            f.cones
                .push(SupportedConeT::NonnegativeConeT(f.num_rows - start));
        }

        for block in &p.blocks {
            let d = block.dim;
            let base = f.num_rows;
            let svec = |i: usize, j: usize| base + j * (j + 1) / 2 + i;
            f.b.extend(std::iter::repeat(0.0).take(d * (d + 1) / 2));
            f.num_rows += d * (d + 1) / 2;
            for e in &block.entries {
                let r = svec(e.row, e.col);
                let scale = if e.row == e.col { 1.0 } else { SQRT2 };
                f.b[r] += scale * e.constant;
                for &(k, a) in &e.terms {
                    f.a_rows.push(r);
                    f.a_cols.push(k);
                    f.a_vals.push(-scale * a);
                }
            }
            f.cones.push(SupportedConeT::PSDTriangleConeT(d));
        }
        f
    }

    pub fn matrix(&self, num_vars: usize) -> CscMatrix<f64> {
        CscMatrix::new_from_triplets(
            self.num_rows,
            num_vars,
            self.a_rows.clone(),
            self.a_cols.clone(),
            self.a_vals.clone(),
        )
    }
}

pub(crate) fn map_status(status: SolverStatus) -> SolveStatus {
    match status {
        SolverStatus::Solved | SolverStatus::AlmostSolved => SolveStatus::Optimal,
        SolverStatus::PrimalInfeasible | SolverStatus::AlmostPrimalInfeasible => {
            SolveStatus::Infeasible
        }
        SolverStatus::DualInfeasible | SolverStatus::AlmostDualInfeasible => SolveStatus::Unbounded,
        SolverStatus::MaxTime => SolveStatus::TimeLimit,
        _ => SolveStatus::NumericalError,
    }
}

pub(crate) fn run_clarabel(
    q: &[f64],
    a: &CscMatrix<f64>,
    b: &[f64],
    cones: &[SupportedConeT<f64>],
    limits: &SolveLimits,
) -> Result<(SolverStatus, Vec<f64>, Vec<f64>), String> {
    let n = q.len();
    let p = CscMatrix::<f64>::zeros((n, n));
    let settings = DefaultSettingsBuilder::default()
        .verbose(false)
        .time_limit(limits.time.max(1e-3))
        .tol_feas(limits.feasibility_tol)
        .tol_gap_abs(limits.gap_tol)
        .tol_gap_rel(limits.gap_tol)
        .max_iter(400)
        .build()
        .map_err(|e| format!("settings: {e:?}"))?;
    let mut solver =
        DefaultSolver::new(&p, q, a, b, cones, settings).map_err(|e| format!("setup: {e:?}"))?;
    solver.solve();
    let sol = &solver.solution;
    Ok((sol.status, sol.x.clone(), sol.z.clone()))
}

/// Interior-point backend built on Clarabel.
#[derive(Debug, Clone, Default)]
pub struct ClarabelBackend;

impl ConicBackend for ClarabelBackend {
    fn name(&self) -> &str {
        "clarabel"
    }

    fn solve(&self, problem: &ConicProblem, limits: &SolveLimits) -> SolveResult {
        let start = Instant::now();
        if let Err(msg) = problem.validate() {
            return SolveResult::failed(
                SolveStatus::NumericalError,
                format!("malformed problem: {msg}"),
                0.0,
            );
        }
        let form = StandardForm::from_problem(problem);
        let a = form.matrix(problem.num_vars());
        let (status, x, z) = match run_clarabel(&form.q, &a, &form.b, &form.cones, limits) {
            Ok(r) => r,
            Err(msg) => {
                return SolveResult::failed(
                    SolveStatus::NumericalError,
                    msg,
                    start.elapsed().as_secs_f64(),
                )
            }
        };
        let elapsed = start.elapsed().as_secs_f64();
        let mapped = map_status(status);
        if mapped != SolveStatus::Optimal {
            return SolveResult::failed(mapped, format!("clarabel: {status:?}"), elapsed);
        }
        let dual = form.row_map.iter().map(|&(r, sign)| sign * z[r]).collect();
        SolveResult {
            status: mapped,
            objective: problem.objective_value(&x),
            primal: x,
            dual: Some(dual),
            solve_time: elapsed,
            message: format!("clarabel: {status:?}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::relax::{PsdBlock, PsdEntry, RowKind, VariableSpace};

    #[test]
    fn lp_single_lower_bound() {
        // min x  s.t. x >= 3
        let mut p = ConicProblem::new(VariableSpace::Auxiliary, 1);
        p.objective[0] = 1.0;
        p.add_row(vec![(0, 1.0)], RowSense::Ge, 3.0, RowKind::Other);
        let r = ClarabelBackend.solve(&p, &SolveLimits::default());
        assert_eq!(r.status, SolveStatus::Optimal);
        assert!((r.objective - 3.0).abs() < 1e-7);
    }

    #[test]
    fn sdp_two_by_two() {
        // min t  s.t. [[t, 1], [1, t]] PSD
        let mut p = ConicProblem::new(VariableSpace::Auxiliary, 1);
        p.objective[0] = 1.0;
        p.blocks.push(PsdBlock {
            dim: 2,
            entries: vec![
                PsdEntry {
                    row: 0,
                    col: 0,
                    terms: vec![(0, 1.0)],
                    constant: 0.0,
                },
                PsdEntry {
                    row: 0,
                    col: 1,
                    terms: vec![],
                    constant: 1.0,
                },
                PsdEntry {
                    row: 1,
                    col: 1,
                    terms: vec![(0, 1.0)],
                    constant: 0.0,
                },
            ],
        });
        let r = ClarabelBackend.solve(&p, &SolveLimits::default());
        assert_eq!(r.status, SolveStatus::Optimal);
        assert!((r.objective - 1.0).abs() < 1e-6, "{}", r.objective);
    }

    #[test]
    fn unbounded_and_infeasible_are_reported() {
        let mut p = ConicProblem::new(VariableSpace::Auxiliary, 1);
        p.objective[0] = -1.0;
        p.add_row(vec![(0, 1.0)], RowSense::Ge, 0.0, RowKind::Other);
        assert_eq!(
            ClarabelBackend.solve(&p, &SolveLimits::default()).status,
            SolveStatus::Unbounded
        );
        p.add_row(vec![(0, 1.0)], RowSense::Le, -1.0, RowKind::Other);
        assert_eq!(
            ClarabelBackend.solve(&p, &SolveLimits::default()).status,
            SolveStatus::Infeasible
        );
    }

    #[test]
    fn malformed_problem_is_a_numerical_error_not_a_panic() {
        let mut p = ConicProblem::new(VariableSpace::Auxiliary, 1);
        p.add_row(vec![(3, 1.0)], RowSense::Ge, 0.0, RowKind::Other);
        let r = ClarabelBackend.solve(&p, &SolveLimits::default());
        assert_eq!(r.status, SolveStatus::NumericalError);
        assert!(r.message.contains("malformed"));
    }
}
