//! Kelley cutting-plane loop over the four strategies: dense eigenvector cuts
//! (with McCormick on every pair or on `E`), sparse projection cuts, and
//! sparse cuts separated near the SDP optimum.

mod reference;
pub(crate) mod trace;

use std::sync::Arc;
use std::time::Instant;

use serde::{Deserialize, Serialize};

pub use reference::{compute_reference, ReferenceBounds};
pub use trace::{IterationRecord, SeparationPoint, Termination, Trace, TraceSummary};

use crate::backend::{ConicBackend, SolveLimits};
use crate::error::{Error, Result};
use crate::model::{
    build_support_set, embed_from_e, project_to_e, EVector, QcqpInstance, SupportSet,
};
use crate::relax::{build_lp, ConicProblem, McCormickMode};
use crate::separation::{
    blend_point, dense_eigen_cuts_on, Cut, CutMode, Separation, Separator, DEFAULT_ALPHA, TOL_EIGEN,
};

/// Relative size below which `z_sdp - z_mcc` counts as no gap.
pub const DEGENERATE_GAP_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum StrategyKind {
    DenseMcCPlusCuts,
    DenseCuts,
    SparseCuts,
    SdpPlusSparseCuts,
}

impl StrategyKind {
    pub const ALL: [StrategyKind; 4] = [
        StrategyKind::DenseMcCPlusCuts,
        StrategyKind::DenseCuts,
        StrategyKind::SparseCuts,
        StrategyKind::SdpPlusSparseCuts,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            StrategyKind::DenseMcCPlusCuts => "DenseMcCPlusCuts",
            StrategyKind::DenseCuts => "DenseCuts",
            StrategyKind::SparseCuts => "SparseCuts",
            StrategyKind::SdpPlusSparseCuts => "SdpPlusSparseCuts",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            StrategyKind::DenseMcCPlusCuts => "Dense McC.+Cuts",
            StrategyKind::DenseCuts => "Dense Cuts",
            StrategyKind::SparseCuts => "Sparse Cuts",
            StrategyKind::SdpPlusSparseCuts => "SDP+Sparse Cuts",
        }
    }

    pub fn is_dense(self) -> bool {
        matches!(
            self,
            StrategyKind::DenseMcCPlusCuts | StrategyKind::DenseCuts
        )
    }

    pub fn default_mccormick(self) -> McCormickMode {
        match self {
            StrategyKind::DenseMcCPlusCuts => McCormickMode::Full,
            _ => McCormickMode::Support,
        }
    }
}

impl std::fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for StrategyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .collect::<String>()
            .to_ascii_lowercase();
        match key.as_str() {
            "densemccpluscuts" | "densemcccuts" | "densemcc" => Ok(StrategyKind::DenseMcCPlusCuts),
            "densecuts" | "dense" => Ok(StrategyKind::DenseCuts),
            "sparsecuts" | "sparse" => Ok(StrategyKind::SparseCuts),
            "sdpplussparsecuts" | "sdpsparsecuts" | "sdpsparse" | "accelerated" => {
                Ok(StrategyKind::SdpPlusSparseCuts)
            }
            _ => Err(Error::Config(format!("unknown strategy `{s}`"))),
        }
    }
}

/// Cone of the sparse cuts. Dense strategies always use eigenvector (PSD) cuts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum ConeMode {
    #[default]
    Epsd,
    /// E-DNN cuts when every variable is nonnegative, E-PSD otherwise.
    EdnnIfNonneg,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Strategy {
    pub kind: StrategyKind,
    pub cone: ConeMode,
    pub alpha: f64,
    /// Overrides the strategy's McCormick pattern.
    pub mccormick: Option<McCormickMode>,
}

impl Strategy {
    pub fn new(kind: StrategyKind) -> Self {
        Self {
            kind,
            cone: ConeMode::Epsd,
            alpha: DEFAULT_ALPHA,
            mccormick: None,
        }
    }

    pub fn with_cone(mut self, cone: ConeMode) -> Self {
        self.cone = cone;
        self
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn with_mccormick(mut self, mode: McCormickMode) -> Self {
        self.mccormick = Some(mode);
        self
    }

    pub fn mccormick(&self) -> McCormickMode {
        self.mccormick.unwrap_or(self.kind.default_mccormick())
    }

    /// Cut family actually used on `instance`.
    pub fn effective_mode(&self, instance: &QcqpInstance) -> CutMode {
        if self.kind.is_dense() {
            CutMode::Dense
        } else if self.cone == ConeMode::EdnnIfNonneg && instance.nonneg() {
            CutMode::Ednn
        } else {
            CutMode::Epsd
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Limits {
    /// Wall-clock seconds for the loop (reference solves excluded).
    pub time: f64,
    pub max_iters: usize,
    pub gc_target: f64,
}

impl Default for Limits {
    fn default() -> Self {
        Self {
            time: 60.0,
            max_iters: 1000,
            gc_target: 0.99,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriverOptions {
    pub tol_violation: f64,
    pub tol_eigen: f64,
    /// Also separate `Ẑ_LP` in every accelerated round and record both
    /// violations.
    pub audit_blend: bool,
    /// Keep looping after the gap target is reached, until no violated cut.
    pub ignore_gc_target: bool,
}

impl Default for DriverOptions {
    fn default() -> Self {
        Self {
            tol_violation: crate::separation::TOL_VIOLATION,
            tol_eigen: TOL_EIGEN,
            audit_blend: false,
            ignore_gc_target: false,
        }
    }
}

/// `(z_lp - z_mcc) / (z_sdp - z_mcc)`.
pub fn gap_closed(z_lp: f64, z_mcc: f64, z_sdp: f64) -> Result<f64> {
    if z_sdp - z_mcc <= DEGENERATE_GAP_TOL * z_sdp.abs().max(1.0) {
        return Err(Error::DegenerateGap { z_mcc, z_sdp });
    }
    Ok((z_lp - z_mcc) / (z_sdp - z_mcc))
}

struct LpPoint {
    value: f64,
    point: EVector,
    time: f64,
}

fn solve_lp(
    problem: &ConicProblem,
    space: &Arc<SupportSet>,
    backend: &dyn ConicBackend,
    limits: &SolveLimits,
) -> Result<LpPoint> {
    let result = backend.solve(problem, limits);
    let value = result.optimal_value()?;
    let point = EVector::from_values(space.clone(), result.primal)?;
    Ok(LpPoint {
        value,
        point,
        time: result.solve_time,
    })
}

/// Runs one strategy on `instance`.
///
/// `reference` must hold the bounds for the strategy's cut family (the DNN
/// bound when E-DNN cuts are used). Backend failures end the run with a
/// [`Termination::BackendFailure`] status instead of an error.
pub fn run_cutting_plane(
    instance: &QcqpInstance,
    strategy: &Strategy,
    limits: &Limits,
    reference: &ReferenceBounds,
    backend: &dyn ConicBackend,
    options: &DriverOptions,
) -> Result<Trace> {
    if !(strategy.alpha > 0.0 && strategy.alpha < 1.0) {
        return Err(Error::InvalidAlpha(strategy.alpha));
    }
    if limits.time <= 0.0 || limits.max_iters == 0 {
        return Err(Error::Config("limits must be positive".into()));
    }
    let start = Instant::now();
    let mode = strategy.effective_mode(instance);
    let dnn = mode == CutMode::Ednn;
    let (z_ref, y_star) = reference.target(dnn)?;
    let e = Arc::new(build_support_set(instance));
    let space = if strategy.kind.is_dense() {
        Arc::new(SupportSet::full(e.dim()))
    } else {
        e.clone()
    };
    let blend_target = match strategy.kind {
        StrategyKind::SdpPlusSparseCuts => Some(project_to_e(y_star, &e)?),
        _ => None,
    };
    let separator = Separator::new(backend).with_tolerance(options.tol_violation);
    let gc_of = |z: f64| gap_closed(z, reference.z_mcc, z_ref).ok();

    let mut trace = Trace::new(
        instance.name(),
        strategy,
        mode,
        reference,
        z_ref,
        space.len(),
    );
    let mut cuts: Vec<Cut> = Vec::new();
    let solve_limits = |elapsed: f64| SolveLimits {
        time: (limits.time - elapsed).max(1.0),
        ..SolveLimits::default()
    };

    let problem = build_lp(instance, &space, &cuts, strategy.mccormick())?;
    let mut lp = match solve_lp(&problem, &space, backend, &solve_limits(0.0)) {
        Ok(lp) => lp,
        Err(err) => {
            return Ok(trace.finish(Termination::BackendFailure(err.to_string()), start, cuts))
        }
    };
    trace.push(IterationRecord::initial(lp.value, gc_of(lp.value), lp.time));

    let termination = loop {
        let iter = trace.records.len();
        if let Some(gc) = gc_of(lp.value) {
            if gc >= limits.gc_target && !options.ignore_gc_target {
                break Termination::GapClosed;
            }
        }
        if iter > limits.max_iters {
            break Termination::IterationLimit;
        }
        if start.elapsed().as_secs_f64() >= limits.time {
            break Termination::TimeLimit;
        }

        let sep_start = Instant::now();
        let round = match separate_round(
            &lp.point,
            mode,
            &separator,
            blend_target.as_ref(),
            strategy.alpha,
            options,
            &space,
        ) {
            Ok(round) => round,
            Err(err) => break Termination::BackendFailure(err.to_string()),
        };
        let t_separation = sep_start.elapsed().as_secs_f64();
        if round.cuts.is_empty() {
            break Termination::NoViolatedCut;
        }
        cuts.extend(round.cuts.iter().cloned());

        let problem = build_lp(instance, &space, &cuts, strategy.mccormick())?;
        if !strategy.kind.is_dense()
            && (problem.num_vars() != e.len() || space.as_ref() != e.as_ref())
        {
            return Err(Error::SupportMismatch);
        }
        lp = match solve_lp(
            &problem,
            &space,
            backend,
            &solve_limits(start.elapsed().as_secs_f64()),
        ) {
            Ok(lp) => lp,
            Err(err) => break Termination::BackendFailure(err.to_string()),
        };
        log::debug!(
            "{} {}: iter {iter} z_lp {:.8} cuts {}",
            instance.name(),
            strategy.kind,
            lp.value,
            cuts.len()
        );
        trace.push(IterationRecord {
            iter,
            z_lp: lp.value,
            gc: gc_of(lp.value),
            num_cuts: cuts.len(),
            t_separation,
            t_lp: lp.time,
            point: round.point,
            raw_violation: round.raw_violation,
            blend_violation: round.blend_violation,
        });
    };
    Ok(trace.finish(termination, start, cuts))
}

struct Round {
    cuts: Vec<Cut>,
    point: SeparationPoint,
    raw_violation: Option<f64>,
    blend_violation: Option<f64>,
}

fn separate_sparse(separator: &Separator, z: &EVector, mode: CutMode) -> Result<Separation> {
    match mode {
        CutMode::Ednn => separator.separate_ednn(z, true),
        _ => separator.separate_epsd(z),
    }
}

fn separate_round(
    z_lp: &EVector,
    mode: CutMode,
    separator: &Separator,
    blend_target: Option<&EVector>,
    alpha: f64,
    options: &DriverOptions,
    space: &Arc<SupportSet>,
) -> Result<Round> {
    if mode == CutMode::Dense {
        let y = embed_from_e(z_lp);
        let cuts = dense_eigen_cuts_on(&y, options.tol_eigen, space);
        let violation = cuts
            .iter()
            .map(|c| c.violation)
            .fold(f64::INFINITY, f64::min);
        return Ok(Round {
            cuts,
            point: SeparationPoint::Raw,
            raw_violation: violation.is_finite().then_some(violation),
            blend_violation: None,
        });
    }
    let Some(target) = blend_target else {
        let sep = separate_sparse(separator, z_lp, mode)?;
        let raw = sep.objective();
        return Ok(Round {
            cuts: sep.into_cut().into_iter().collect(),
            point: SeparationPoint::Raw,
            raw_violation: Some(raw),
            blend_violation: None,
        });
    };

    let z_alpha = blend_point(z_lp, target, alpha)?;
    let (blend, raw) = if options.audit_blend {
        let (b, r) = std::thread::scope(|s| {
            let h = s.spawn(|| separate_sparse(separator, &z_alpha, mode));
            let r = separate_sparse(separator, z_lp, mode);
            (h.join().expect("separation thread panicked"), r)
        });
        (b?, Some(r?))
    } else {
        (separate_sparse(separator, &z_alpha, mode)?, None)
    };
    let blend_violation = Some(blend.objective());
    if blend.is_violated() {
        let raw_violation = raw.as_ref().map(Separation::objective);
        return Ok(Round {
            cuts: blend.into_cut().into_iter().collect(),
            point: SeparationPoint::Blend,
            raw_violation,
            blend_violation,
        });
    }
    // no violation near the SDP optimum: fall back to the LP point itself
    log::info!("blended point has no violated cut; separating the LP point");
    let raw = match raw {
        Some(r) => r,
        None => separate_sparse(separator, z_lp, mode)?,
    };
    let raw_violation = Some(raw.objective());
    Ok(Round {
        cuts: raw.into_cut().into_iter().collect(),
        point: SeparationPoint::Fallback,
        raw_violation,
        blend_violation,
    })
}

/// Drops cuts whose slack at the final LP optimum exceeds `slack_tol`,
/// keeping the original list if the reduced LP bound moves by more than
/// `1e-7` relative.
pub fn drop_slack_cuts(
    instance: &QcqpInstance,
    cuts: &[Cut],
    mccormick: McCormickMode,
    backend: &dyn ConicBackend,
    slack_tol: f64,
) -> Result<Vec<Cut>> {
    if cuts.is_empty() {
        return Ok(Vec::new());
    }
    let space = cuts[0].coeffs.support().clone();
    let limits = SolveLimits::default();
    let full = solve_lp(
        &build_lp(instance, &space, cuts, mccormick)?,
        &space,
        backend,
        &limits,
    )?;
    let kept: Vec<Cut> = cuts
        .iter()
        .filter(|c| {
            c.evaluate(&full.point)
                .map(|a| a <= slack_tol)
                .unwrap_or(true)
        })
        .cloned()
        .collect();
    if kept.len() == cuts.len() {
        return Ok(kept);
    }
    let reduced = solve_lp(
        &build_lp(instance, &space, &kept, mccormick)?,
        &space,
        backend,
        &limits,
    )?;
    if (full.value - reduced.value).abs() <= 1e-7 * full.value.abs().max(1.0) {
        Ok(kept)
    } else {
        Ok(cuts.to_vec())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gap_closed_arithmetic() {
        assert_eq!(gap_closed(-4.0, -10.0, -2.0).unwrap(), 0.75);
        assert_eq!(gap_closed(-10.0, -10.0, -2.0).unwrap(), 0.0);
        assert_eq!(gap_closed(-2.0, -10.0, -2.0).unwrap(), 1.0);
        assert!(matches!(
            gap_closed(0.0, 1.0, 1.0),
            Err(Error::DegenerateGap { .. })
        ));
    }

    #[test]
    fn strategy_names_parse() {
        for kind in StrategyKind::ALL {
            assert_eq!(kind.as_str().parse::<StrategyKind>().unwrap(), kind);
            assert_eq!(kind.label().parse::<StrategyKind>().unwrap(), kind);
        }
        assert!("bogus".parse::<StrategyKind>().is_err());
    }
}
