//! Spatial branch-and-bound with the McCormick + cuts LP as node relaxation.

mod ccp;
mod local;

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::sync::Arc;
use std::time::Instant;

pub use ccp::CcpRefiner;
pub use local::{brute_force_grid, grid_oracle, GridResult, Polisher, GRID_FEAS_TOL};

use crate::backend::{ConicBackend, SolveLimits, SolveStatus};
use crate::error::{Error, Result};
use crate::model::{build_support_set, EVector, QcqpInstance, SupportSet};
use crate::relax::{build_lp, McCormickMode};
use crate::separation::Cut;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BnbOptions {
    pub eps_rel: f64,
    pub node_limit: usize,
    pub time: f64,
    /// Constraint tolerance for incumbents.
    pub feas_tol: f64,
    pub mccormick: McCormickMode,
}

impl Default for BnbOptions {
    fn default() -> Self {
        Self {
            eps_rel: 1e-4,
            node_limit: 100_000,
            time: 600.0,
            feas_tol: 1e-7,
            mccormick: McCormickMode::Support,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BnbNode {
    pub id: usize,
    pub parent: Option<usize>,
    pub depth: usize,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    /// LP bound, never below the parent's.
    pub bound: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BnbStatus {
    Optimal,
    Infeasible,
    NodeLimit,
    TimeLimit,
}

impl BnbStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            BnbStatus::Optimal => "optimal",
            BnbStatus::Infeasible => "infeasible",
            BnbStatus::NodeLimit => "node_limit",
            BnbStatus::TimeLimit => "time_limit",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BnbResult {
    pub status: BnbStatus,
    /// `+inf` when no feasible point was found.
    pub z_best: f64,
    pub x_best: Option<Vec<f64>>,
    /// Global lower bound.
    pub bound: f64,
    pub root_bound: f64,
    pub gap: f64,
    pub nodes: usize,
    /// Nodes whose LP failed numerically; their boxes are kept at the parent bound.
    pub numerical_failures: usize,
    pub time: f64,
}

struct Queued(BnbNode, Option<EVector>);

impl PartialEq for Queued {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Queued {}
impl PartialOrd for Queued {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Queued {
    // max-heap on the negated bound; ties go to the older node
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .0
            .bound
            .total_cmp(&self.0.bound)
            .then_with(|| other.0.id.cmp(&self.0.id))
    }
}

enum NodeLp {
    Solved { bound: f64, z: EVector },
    Infeasible,
    Failed,
}

struct Context<'a> {
    instance: &'a QcqpInstance,
    space: Arc<SupportSet>,
    cuts: &'a [Cut],
    backend: &'a dyn ConicBackend,
    options: BnbOptions,
    polisher: Polisher,
    refiner: CcpRefiner<'a>,
}

impl Context<'_> {
    fn solve_node(&self, lower: &[f64], upper: &[f64], time_left: f64) -> Result<NodeLp> {
        let sub = self.instance.with_bounds(lower.to_vec(), upper.to_vec())?;
        let problem = build_lp(&sub, &self.space, self.cuts, self.options.mccormick)?;
        let result = self.backend.solve(
            &problem,
            &SolveLimits {
                time: time_left.max(1.0),
                ..SolveLimits::default()
            },
        );
        Ok(match result.status {
            SolveStatus::Optimal => NodeLp::Solved {
                bound: result.objective,
                z: EVector::from_values(self.space.clone(), result.primal)?,
            },
            SolveStatus::Infeasible => NodeLp::Infeasible,
            _ => NodeLp::Failed,
        })
    }

    /// Candidate incumbents from a node: the LP point, the box midpoint, and
    /// their polished versions.
    fn incumbents(&self, x_hat: &[f64], lower: &[f64], upper: &[f64]) -> Option<(f64, Vec<f64>)> {
        let mid: Vec<f64> = lower
            .iter()
            .zip(upper)
            .map(|(l, u)| 0.5 * (l + u))
            .collect();
        let mut best: Option<(f64, Vec<f64>)> = None;
        for start in [x_hat, mid.as_slice()] {
            let clamped: Vec<f64> = start
                .iter()
                .zip(self.instance.lower().iter().zip(self.instance.upper()))
                .map(|(x, (l, u))| x.clamp(*l, *u))
                .collect();
            let mut candidates = Vec::new();
            if self.instance.max_violation(&clamped) <= self.options.feas_tol {
                candidates.push((self.instance.objective_value(&clamped), clamped.clone()));
            }
            candidates.extend(self.polisher.polish(&clamped));
            for c in candidates {
                if best.as_ref().is_none_or(|b| c.0 < b.0) {
                    best = Some(c);
                }
            }
        }
        best
    }
}

/// Variable with the largest McCormick violation at the node LP point.
fn branching_variable(z: &EVector, n: usize) -> (usize, f64) {
    let x: Vec<f64> = (1..=n).map(|i| z.get(0, i)).collect();
    let mut score = vec![0.0f64; n];
    let mut off = vec![0.0f64; n];
    for ((i, j), v) in z.iter() {
        if i == 0 {
            continue;
        }
        let dev = (v - x[i - 1] * x[j - 1]).abs();
        if i == j {
            score[i - 1] += dev;
        } else {
            off[i - 1] = off[i - 1].max(dev);
            off[j - 1] = off[j - 1].max(dev);
        }
    }
    (0..n)
        .map(|i| (i, score[i] + off[i]))
        .fold((0, f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a })
}

/// Globally minimizes `instance` to relative gap `eps_rel`.
///
/// Cuts must be valid for the whole box (cone cuts are); they are added to
/// every node LP unchanged while McCormick rows follow the node box.
pub fn solve_global(
    instance: &QcqpInstance,
    cuts: &[Cut],
    options: &BnbOptions,
    backend: &dyn ConicBackend,
) -> Result<BnbResult> {
    let start = Instant::now();
    let n = instance.n();
    let space = match cuts.first() {
        Some(c) => c.coeffs.support().clone(),
        None => Arc::new(build_support_set(instance)),
    };
    let ctx = Context {
        instance,
        space,
        cuts,
        backend,
        options: *options,
        polisher: Polisher::new(instance, options.feas_tol),
        refiner: CcpRefiner::new(instance, backend, options.feas_tol),
    };
    let tol = |z: f64| options.eps_rel * z.abs().max(1.0);

    let mut z_best = f64::INFINITY;
    let mut x_best: Option<Vec<f64>> = None;
    let mut heap = BinaryHeap::new();
    let mut nodes = 0usize;
    let mut numerical_failures = 0usize;
    let mut next_id = 0usize;
    let mut root_bound = f64::NEG_INFINITY;
    let mut status = BnbStatus::Optimal;

    let mut pending = vec![BnbNode {
        id: 0,
        parent: None,
        depth: 0,
        lower: instance.lower().to_vec(),
        upper: instance.upper().to_vec(),
        bound: f64::NEG_INFINITY,
    }];
    next_id += 1;

    loop {
        // evaluate freshly created children
        for mut node in pending.drain(..) {
            nodes += 1;
            let elapsed = start.elapsed().as_secs_f64();
            match ctx.solve_node(&node.lower, &node.upper, options.time - elapsed)? {
                NodeLp::Infeasible => continue,
                NodeLp::Failed => {
                    numerical_failures += 1;
                    // keep the box with the inherited bound; it is split blindly below
                    heap.push(Queued(node, None));
                }
                NodeLp::Solved { bound, z } => {
                    node.bound = node.bound.max(bound);
                    if node.id == 0 {
                        root_bound = node.bound;
                    }
                    let x_hat: Vec<f64> = (1..=n).map(|i| z.get(0, i)).collect();
                    if let Some((v, x)) = ctx.incumbents(&x_hat, &node.lower, &node.upper) {
                        if v < z_best - 1e-9 * v.abs().max(1.0) {
                            // new incumbent: refine it before it prunes anything
                            let (v, x) = ctx
                                .refiner
                                .refine(&x)
                                .and_then(|(_, r)| ctx.polisher.polish(&r))
                                .filter(|r| r.0 < v)
                                .unwrap_or((v, x));
                            log::debug!(
                                "{}: incumbent {v:.8} at node {}",
                                instance.name(),
                                node.id
                            );
                            z_best = v;
                            x_best = Some(x);
                        }
                    }
                    heap.push(Queued(node, Some(z)));
                }
            }
        }

        // prune and pick the best-bound node
        let (node, z) = loop {
            match heap.pop() {
                None => {
                    let status = if x_best.is_none() {
                        BnbStatus::Infeasible
                    } else {
                        status
                    };
                    let bound = if x_best.is_none() {
                        f64::INFINITY
                    } else {
                        z_best
                    };
                    return Ok(finish(
                        status,
                        z_best,
                        x_best,
                        bound,
                        root_bound,
                        nodes,
                        numerical_failures,
                        start,
                    ));
                }
                Some(Queued(node, z)) => {
                    if node.bound >= z_best - tol(z_best) {
                        continue;
                    }
                    break (node, z);
                }
            }
        };
        let bound = node.bound;
        if z_best.is_finite() && (z_best - bound) <= tol(z_best) {
            return Ok(finish(
                BnbStatus::Optimal,
                z_best,
                x_best,
                bound.min(z_best),
                root_bound,
                nodes,
                numerical_failures,
                start,
            ));
        }
        if nodes >= options.node_limit || start.elapsed().as_secs_f64() >= options.time {
            status = if nodes >= options.node_limit {
                BnbStatus::NodeLimit
            } else {
                BnbStatus::TimeLimit
            };
            let lb = heap.iter().map(|q| q.0.bound).fold(bound, f64::min);
            return Ok(finish(
                status,
                z_best,
                x_best,
                lb,
                root_bound,
                nodes,
                numerical_failures,
                start,
            ));
        }

        let (var, split) = match &z {
            Some(z) => {
                let (var, score) = branching_variable(z, n);
                if score <= 1e-9 {
                    // the LP point is its own lift: the node is solved
                    continue;
                }
                (var, z.get(0, var + 1))
            }
            None => {
                let var = (0..n)
                    .max_by(|&a, &b| {
                        (node.upper[a] - node.lower[a]).total_cmp(&(node.upper[b] - node.lower[b]))
                    })
                    .unwrap_or(0);
                (var, 0.5 * (node.lower[var] + node.upper[var]))
            }
        };
        let (l, u) = (node.lower[var], node.upper[var]);
        if u - l <= 1e-12 * l.abs().max(u.abs()).max(1.0) {
            continue;
        }
        let t = split.clamp(l + 0.1 * (u - l), u - 0.1 * (u - l));
        for (lo, hi) in [(l, t), (t, u)] {
            let mut child = node.clone();
            child.id = next_id;
            next_id += 1;
            child.parent = Some(node.id);
            child.depth = node.depth + 1;
            child.lower[var] = lo;
            child.upper[var] = hi;
            pending.push(child);
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn finish(
    status: BnbStatus,
    z_best: f64,
    x_best: Option<Vec<f64>>,
    bound: f64,
    root_bound: f64,
    nodes: usize,
    numerical_failures: usize,
    start: Instant,
) -> BnbResult {
    let gap = if z_best.is_finite() && bound.is_finite() {
        (z_best - bound) / z_best.abs().max(1.0)
    } else {
        f64::INFINITY
    };
    BnbResult {
        status,
        z_best,
        x_best,
        bound,
        root_bound,
        gap,
        nodes,
        numerical_failures,
        time: start.elapsed().as_secs_f64(),
    }
}

/// Checks a global result against the instance: the returned point must be
/// feasible and reproduce `z_best`.
pub fn verify_result(instance: &QcqpInstance, result: &BnbResult, feas_tol: f64) -> Result<()> {
    let Some(x) = &result.x_best else {
        return Ok(());
    };
    if !instance.is_feasible(x, feas_tol) {
        return Err(Error::InvalidInstance(
            "incumbent violates constraints".into(),
        ));
    }
    let v = instance.objective_value(x);
    if (v - result.z_best).abs() > 1e-9 * v.abs().max(1.0) {
        return Err(Error::InvalidInstance("incumbent value mismatch".into()));
    }
    Ok(())
}
