use std::time::Instant;

use clarabel::algebra::CscMatrix;
use clarabel::solver::SupportedConeT;

use super::clarabel::{map_status, run_clarabel, StandardForm};
use super::{ConicBackend, SolveLimits, SolveResult, SolveStatus};
use crate::relax::ConicProblem;

/// Solves the conic dual `min bᵀz  s.t.  Aᵀz = -q, z ∈ K*` and recovers the
/// primal value by strong duality. A second route to the same optimum, used
/// to cross-check the primal backend.
#[derive(Debug, Clone, Default)]
pub struct DualClarabelBackend;

impl ConicBackend for DualClarabelBackend {
    fn name(&self) -> &str {
        "clarabel-dual"
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
        let m = form.num_rows;
        let n = problem.num_vars();

        // rows 0..n:   Aᵀ z + s = -q,  s ∈ {0}
        // rows n..n+k: -z_r + s = 0,    s ∈ K  (r ranges over the non-zero-cone rows)
        let zero_rows = match form.cones.first() {
            Some(SupportedConeT::ZeroConeT(k)) => *k,
            _ => 0,
        };
        let mut rows = Vec::with_capacity(form.a_vals.len() + m);
        let mut cols = Vec::with_capacity(form.a_vals.len() + m);
        let mut vals = Vec::with_capacity(form.a_vals.len() + m);
        for ((&r, &c), &v) in form.a_rows.iter().zip(&form.a_cols).zip(&form.a_vals) {
            rows.push(c);
            cols.push(r);
            vals.push(v);
        }
        for r in zero_rows..m {
            rows.push(n + r - zero_rows);
            cols.push(r);
            vals.push(-1.0);
        }
        let num_rows = n + m - zero_rows;
        let a = CscMatrix::new_from_triplets(num_rows, m, rows, cols, vals);
        let mut b: Vec<f64> = form.q.iter().map(|v| -v).collect();
        b.extend(std::iter::repeat(0.0).take(m - zero_rows));
        let mut cones = Vec::with_capacity(form.cones.len());
        if n > 0 {
            cones.push(SupportedConeT::ZeroConeT(n));
        }
        cones.extend(
            form.cones
                .iter()
                .filter(|c| !matches!(c, SupportedConeT::ZeroConeT(_)))
                .cloned(),
        );

        let (status, z, y) = match run_clarabel(&form.b, &a, &b, &cones, limits) {
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
        let mapped = match map_status(status) {
            SolveStatus::Infeasible => SolveStatus::Unbounded,
            SolveStatus::Unbounded => SolveStatus::Infeasible,
            s => s,
        };
        if mapped != SolveStatus::Optimal {
            return SolveResult::failed(mapped, format!("clarabel (dual): {status:?}"), elapsed);
        }
        let dual_value: f64 = form.b.iter().zip(&z).map(|(b, z)| b * z).sum();
        let x: Vec<f64> = y[..n].iter().map(|v| -v).collect();
        let dual = form.row_map.iter().map(|&(r, sign)| sign * z[r]).collect();
        SolveResult {
            status: mapped,
            objective: -dual_value + problem.objective_offset,
            primal: x,
            dual: Some(dual),
            solve_time: elapsed,
            message: format!("clarabel (dual): {status:?}"),
        }
    }
}
