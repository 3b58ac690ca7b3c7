//! Convex-concave refinement of feasible points.
//!
//! Each quadratic `xᵀQx` is split as `xᵀPx - xᵀNx` with `P, N ⪰ 0`; the
//! concave part is linearized at the current point, which gives a convex
//! inner approximation of the feasible set and a convex majorant of the
//! objective. Iterates stay feasible and the objective never increases.

use crate::backend::{eigendecomp, ConicBackend, SolveLimits};
use crate::model::{QcqpInstance, QuadraticFunction, SymMatrix};
use crate::relax::{ConicProblem, PsdBlock, PsdEntry, RowKind, RowSense, VariableSpace};

struct Split {
    /// Columns of `L` with `P = L Lᵀ`.
    factor: Vec<Vec<f64>>,
    /// `N` as a dense row-major matrix.
    concave: Vec<f64>,
    c: Vec<f64>,
    d: f64,
}

impl Split {
    fn new(f: &QuadraticFunction, n: usize) -> Self {
        let mut q = SymMatrix::zeros(n);
        for &(i, j, v) in f.q.entries() {
            q.set(i, j, v);
        }
        let mut factor = Vec::new();
        let mut concave = vec![0.0; n * n];
        for pair in eigendecomp(&q) {
            if pair.value > 0.0 {
                let s = pair.value.sqrt();
                factor.push(pair.vector.iter().map(|v| s * v).collect());
            } else if pair.value < 0.0 {
                for i in 0..n {
                    for j in 0..n {
                        concave[i * n + j] -= pair.value * pair.vector[i] * pair.vector[j];
                    }
                }
            }
        }
        Self {
            factor,
            concave,
            c: f.c.clone(),
            d: f.d,
        }
    }

    /// Convex model at `x0`: returns the linear part `(a, b)` with
    /// `model(x) = ‖Lᵀx‖² + aᵀx + b`.
    fn linear_part(&self, x0: &[f64]) -> (Vec<f64>, f64) {
        let n = x0.len();
        let mut a = self.c.clone();
        let mut nx = vec![0.0; n];
        for i in 0..n {
            nx[i] = (0..n).map(|j| self.concave[i * n + j] * x0[j]).sum();
            a[i] -= 2.0 * nx[i];
        }
        let b = self.d + x0.iter().zip(&nx).map(|(x, y)| x * y).sum::<f64>();
        (a, b)
    }

    /// Adds `s >= ‖Lᵀx‖²` and returns `s`, or `None` if `P = 0`.
    fn epigraph(&self, problem: &mut ConicProblem, n: usize) -> Option<usize> {
        if self.factor.is_empty() {
            return None;
        }
        let s = problem.add_var(0.0, 0.0, f64::INFINITY);
        let r = self.factor.len();
        let mut entries = Vec::with_capacity(2 * r + 1);
        for (a, col) in self.factor.iter().enumerate() {
            entries.push(PsdEntry {
                row: a,
                col: a,
                terms: Vec::new(),
                constant: 1.0,
            });
            let terms: Vec<(usize, f64)> = (0..n)
                .filter(|&i| col[i] != 0.0)
                .map(|i| (i, col[i]))
                .collect();
            entries.push(PsdEntry {
                row: a,
                col: r,
                terms,
                constant: 0.0,
            });
        }
        entries.push(PsdEntry {
            row: r,
            col: r,
            terms: vec![(s, 1.0)],
            constant: 0.0,
        });
        problem.blocks.push(PsdBlock {
            dim: r + 1,
            entries,
        });
        Some(s)
    }
}

pub struct CcpRefiner<'a> {
    instance: &'a QcqpInstance,
    objective: Split,
    constraints: Vec<Split>,
    backend: &'a dyn ConicBackend,
    tol: f64,
    max_iters: usize,
}

impl<'a> CcpRefiner<'a> {
    pub fn new(instance: &'a QcqpInstance, backend: &'a dyn ConicBackend, tol: f64) -> Self {
        let n = instance.n();
        Self {
            instance,
            objective: Split::new(instance.objective(), n),
            constraints: instance
                .constraints()
                .iter()
                .map(|f| Split::new(f, n))
                .collect(),
            backend,
            tol,
            max_iters: 50,
        }
    }

    fn step(&self, x0: &[f64], lower: &[f64], upper: &[f64]) -> Option<Vec<f64>> {
        let n = x0.len();
        let mut problem = ConicProblem::new(VariableSpace::Auxiliary, n);
        problem.lower = lower.to_vec();
        problem.upper = upper.to_vec();
        let (a, b) = self.objective.linear_part(x0);
        problem.objective = a;
        problem.objective_offset = b;
        if let Some(t) = self.objective.epigraph(&mut problem, n) {
            problem.objective[t] = 1.0;
        }
        for (k, g) in self.constraints.iter().enumerate() {
            let (a, b) = g.linear_part(x0);
            let mut terms: Vec<(usize, f64)> = a
                .iter()
                .enumerate()
                .filter(|(_, v)| **v != 0.0)
                .map(|(i, v)| (i, *v))
                .collect();
            if let Some(s) = g.epigraph(&mut problem, n) {
                terms.push((s, 1.0));
            }
            problem.add_row(terms, RowSense::Le, -b, RowKind::Quadratic(k + 1));
        }
        let result = self.backend.solve(&problem, &SolveLimits::default());
        result.is_optimal().then(|| {
            result.primal[..n]
                .iter()
                .zip(lower.iter().zip(upper))
                .map(|(x, (l, u))| x.clamp(*l, *u))
                .collect()
        })
    }

    /// Longest step from `x0` toward `x1` that does not increase the
    /// violation of the true constraints beyond that of `x0` (or zero).
    fn feasible_step(&self, x0: &[f64], x1: &[f64]) -> Vec<f64> {
        let at = |t: f64| -> Vec<f64> { x0.iter().zip(x1).map(|(a, b)| a + t * (b - a)).collect() };
        let target = self.instance.max_violation(x0).max(0.0);
        if self.instance.max_violation(x1) <= target {
            return x1.to_vec();
        }
        let (mut lo, mut hi) = (0.0, 1.0);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if self.instance.max_violation(&at(mid)) <= target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        at(lo)
    }

    /// Refines a feasible `x` inside `[lower, upper]`; `None` if `x` is infeasible.
    pub fn refine_in(&self, x: &[f64], lower: &[f64], upper: &[f64]) -> Option<(f64, Vec<f64>)> {
        if self.instance.max_violation(x) > self.tol {
            return None;
        }
        let mut x = x.to_vec();
        let mut value = self.instance.objective_value(&x);
        for _ in 0..self.max_iters {
            let Some(next) = self.step(&x, lower, upper) else {
                break;
            };
            let next = self.feasible_step(&x, &next);
            let v = self.instance.objective_value(&next);
            if v >= value - 1e-13 * value.abs().max(1.0) {
                break;
            }
            let done = value - v <= 1e-11 * value.abs().max(1.0);
            x = next;
            value = v;
            if done {
                break;
            }
        }
        Some((value, x))
    }

    pub fn refine(&self, x: &[f64]) -> Option<(f64, Vec<f64>)> {
        self.refine_in(x, self.instance.lower(), self.instance.upper())
    }
}
