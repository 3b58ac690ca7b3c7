use std::time::Instant;

use serde::Serialize;

use super::{ReferenceBounds, Strategy, StrategyKind};
use crate::error::Result;
use crate::separation::{Cut, CutMode};

/// Which point produced the cut of a round.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SeparationPoint {
    /// The initial LP, before any separation.
    None,
    Raw,
    Blend,
    /// `Ẑ_α` had no violation; `Ẑ_LP` was separated instead.
    Fallback,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IterationRecord {
    pub iter: usize,
    pub z_lp: f64,
    /// `None` when the instance has no SDP gap.
    pub gc: Option<f64>,
    pub num_cuts: usize,
    pub t_separation: f64,
    pub t_lp: f64,
    pub point: SeparationPoint,
    /// Separation objective at `Ẑ_LP`, when it was evaluated.
    pub raw_violation: Option<f64>,
    /// Separation objective at `Ẑ_α`, when it was evaluated.
    pub blend_violation: Option<f64>,
}

impl IterationRecord {
    pub(super) fn initial(z_lp: f64, gc: Option<f64>, t_lp: f64) -> Self {
        Self {
            iter: 0,
            z_lp,
            gc,
            num_cuts: 0,
            t_separation: 0.0,
            t_lp,
            point: SeparationPoint::None,
            raw_violation: None,
            blend_violation: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Termination {
    GapClosed,
    NoViolatedCut,
    IterationLimit,
    TimeLimit,
    BackendFailure(String),
}

impl Termination {
    pub fn as_str(&self) -> &str {
        match self {
            Termination::GapClosed => "gap_closed",
            Termination::NoViolatedCut => "no_violated_cut",
            Termination::IterationLimit => "iteration_limit",
            Termination::TimeLimit => "time_limit",
            Termination::BackendFailure(_) => "backend_failure",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceSummary {
    pub z_mcc: f64,
    /// Reference bound: `z^SDP`, or `z^DNN` when E-DNN cuts were used.
    pub z_sdp: f64,
    pub final_z: f64,
    pub final_gc: Option<f64>,
    pub total_time: f64,
    pub t_sdp: Option<f64>,
    pub t_lastlp: f64,
    pub termination: Termination,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trace {
    pub instance: String,
    pub strategy: StrategyKind,
    pub mode: CutMode,
    /// Coordinates of every LP in the run.
    pub num_columns: usize,
    pub records: Vec<IterationRecord>,
    pub summary: TraceSummary,
    #[serde(skip)]
    pub cuts: Vec<Cut>,
}

impl Trace {
    pub(super) fn new(
        instance: &str,
        strategy: &Strategy,
        mode: CutMode,
        reference: &ReferenceBounds,
        z_ref: f64,
        num_columns: usize,
    ) -> Self {
        let t_sdp = match strategy.kind {
            StrategyKind::SdpPlusSparseCuts => Some(reference.time(mode == CutMode::Ednn)),
            _ => None,
        };
        Self {
            instance: instance.to_string(),
            strategy: strategy.kind,
            mode,
            num_columns,
            records: Vec::new(),
            summary: TraceSummary {
                z_mcc: reference.z_mcc,
                z_sdp: z_ref,
                final_z: f64::NAN,
                final_gc: None,
                total_time: 0.0,
                t_sdp,
                t_lastlp: f64::NAN,
                termination: Termination::NoViolatedCut,
            },
            cuts: Vec::new(),
        }
    }

    pub(super) fn push(&mut self, record: IterationRecord) {
        self.records.push(record);
    }

    pub(super) fn finish(
        mut self,
        termination: Termination,
        start: Instant,
        cuts: Vec<Cut>,
    ) -> Self {
        if let Some(last) = self.records.last() {
            self.summary.final_z = last.z_lp;
            self.summary.final_gc = last.gc;
            self.summary.t_lastlp = last.t_lp;
        }
        self.summary.total_time = start.elapsed().as_secs_f64();
        self.summary.termination = termination;
        self.cuts = cuts;
        self
    }

    /// Separation rounds performed.
    pub fn iterations(&self) -> usize {
        self.records.len().saturating_sub(1)
    }

    pub fn num_cuts(&self) -> usize {
        self.cuts.len()
    }

    /// First iteration whose gap closed reaches `target`.
    pub fn iterations_to(&self, target: f64) -> Option<usize> {
        self.records
            .iter()
            .find(|r| r.gc.is_some_and(|g| g >= target))
            .map(|r| r.iter)
    }

    /// Per-iteration CSV: `iter,cuts,GC,t_lastlp,t_SDP`.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["iter", "cuts", "GC", "t_lastlp", "t_SDP"])?;
        let t_sdp = self.summary.t_sdp.map(fmt_time).unwrap_or_default();
        for r in &self.records {
            w.write_record([
                r.iter.to_string(),
                r.num_cuts.to_string(),
                r.gc.map(fmt_gc).unwrap_or_default(),
                fmt_time(r.t_lp),
                t_sdp.clone(),
            ])?;
        }
        Ok(
            String::from_utf8(w.into_inner().map_err(|e| e.into_error())?)
                .expect("csv output is utf-8"),
        )
    }
}

pub(crate) fn fmt_gc(gc: f64) -> String {
    format!("{gc:.6}")
}

pub(crate) fn fmt_time(t: f64) -> String {
    format!("{t:.4}")
}
