//! Solving [`ConicProblem`]s, dense eigendecomposition, and the PSD-completion
//! oracle.

mod clarabel;
mod completion;
mod dual;
mod eigen;

use std::sync::Arc;

pub use self::clarabel::ClarabelBackend;
pub use completion::{complete_to_psd, completion_gap, CompletionGap, COMPLETION_TOL};
pub use dual::DualClarabelBackend;
pub use eigen::{eigendecomp, min_eigenvalue, Eigenpair};

use crate::error::{Error, Result};
use crate::relax::ConicProblem;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    Unbounded,
    NumericalError,
    TimeLimit,
}

impl SolveStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            SolveStatus::Optimal => "optimal",
            SolveStatus::Infeasible => "infeasible",
            SolveStatus::Unbounded => "unbounded",
            SolveStatus::NumericalError => "numerical_error",
            SolveStatus::TimeLimit => "time_limit",
        }
    }
}

impl std::fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub status: SolveStatus,
    /// Meaningful only when `status == Optimal`; NaN otherwise.
    pub objective: f64,
    pub primal: Vec<f64>,
    /// One multiplier per linear row, when the backend reports them.
    pub dual: Option<Vec<f64>>,
    pub solve_time: f64,
    pub message: String,
}

impl SolveResult {
    pub fn failed(status: SolveStatus, message: impl Into<String>, solve_time: f64) -> Self {
        Self {
            status,
            objective: f64::NAN,
            primal: Vec::new(),
            dual: None,
            solve_time,
            message: message.into(),
        }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == SolveStatus::Optimal
    }

    /// The optimal objective, or a solver error carrying the status.
    pub fn optimal_value(&self) -> Result<f64> {
        if self.is_optimal() {
            Ok(self.objective)
        } else {
            Err(Error::Solver {
                status: self.status.to_string(),
                detail: self.message.clone(),
            })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveLimits {
    /// Seconds.
    pub time: f64,
    pub feasibility_tol: f64,
    pub gap_tol: f64,
}

impl Default for SolveLimits {
    fn default() -> Self {
        Self {
            time: 600.0,
            feasibility_tol: 1e-8,
            gap_tol: 1e-8,
        }
    }
}

/// A conic solver for linear rows and PSD blocks.
pub trait ConicBackend: Send + Sync {
    fn name(&self) -> &str;

    fn solve(&self, problem: &ConicProblem, limits: &SolveLimits) -> SolveResult;
}

/// Backend by configuration key: `clarabel` (default) or `clarabel-dual`.
pub fn backend_from_name(name: &str) -> Result<Arc<dyn ConicBackend>> {
    match name {
        "clarabel" | "default" => Ok(Arc::new(ClarabelBackend)),
        "clarabel-dual" => Ok(Arc::new(DualClarabelBackend)),
        other => Err(Error::Config(format!(
            "unknown backend `{other}` (expected clarabel or clarabel-dual)"
        ))),
    }
}

pub fn default_backend() -> Arc<dyn ConicBackend> {
    Arc::new(ClarabelBackend)
}
