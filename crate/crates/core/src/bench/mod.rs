//! Experiment harness: strategy comparison, global-solve runs, CSV reports
//! and a bound-progression chart.

mod svg;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

pub use svg::trace_svg;

use crate::backend::ConicBackend;
use crate::bnb::{solve_global, BnbOptions, BnbResult};
use crate::cutplane::trace::{fmt_gc, fmt_time};
use crate::cutplane::{
    compute_reference, drop_slack_cuts, run_cutting_plane, ConeMode, DriverOptions, Limits,
    ReferenceBounds, Strategy, StrategyKind, Trace,
};
use crate::error::{Error, Result};
use crate::instances::{generate_boxqcqp, parse_qplib_subset, read_json, GeneratorConfig};
use crate::model::QcqpInstance;
use crate::relax::McCormickMode;

#[derive(Debug, Clone, PartialEq)]
pub enum InstanceSource {
    Generate {
        n: usize,
        density: f64,
        num_qc: usize,
        indices: Vec<u32>,
    },
    File(PathBuf),
    Directory(PathBuf),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub source: InstanceSource,
    pub strategies: Vec<StrategyKind>,
    pub limits: Limits,
    pub cone: ConeMode,
    pub alpha: f64,
    pub mccormick: Option<McCormickMode>,
    pub output: PathBuf,
}

impl ExperimentConfig {
    pub fn new(source: InstanceSource, output: impl Into<PathBuf>) -> Self {
        Self {
            source,
            strategies: StrategyKind::ALL.to_vec(),
            limits: Limits::default(),
            cone: ConeMode::Epsd,
            alpha: crate::separation::DEFAULT_ALPHA,
            mccormick: None,
            output: output.into(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.strategies.is_empty() {
            return Err(Error::Config("at least one strategy is required".into()));
        }
        let l = &self.limits;
        if l.time.is_nan()
            || l.time <= 0.0
            || l.max_iters == 0
            || l.gc_target.is_nan()
            || l.gc_target <= 0.0
        {
            return Err(Error::Config("limits must be positive".into()));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidAlpha(self.alpha));
        }
        Ok(())
    }

    pub fn strategy(&self, kind: StrategyKind) -> Strategy {
        let mut s = Strategy::new(kind)
            .with_cone(self.cone)
            .with_alpha(self.alpha);
        s.mccormick = self.mccormick;
        s
    }

    pub fn load_instances(&self) -> Result<Vec<QcqpInstance>> {
        match &self.source {
            InstanceSource::Generate {
                n,
                density,
                num_qc,
                indices,
            } => indices
                .iter()
                .map(|&i| generate_boxqcqp(&GeneratorConfig::new(*n, *density, *num_qc, i)))
                .collect(),
            InstanceSource::File(path) => Ok(vec![load_instance(path)?]),
            InstanceSource::Directory(dir) => {
                let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)?
                    .filter_map(|e| e.ok().map(|e| e.path()))
                    .filter(|p| {
                        matches!(
                            p.extension().and_then(|e| e.to_str()),
                            Some("json" | "qplib")
                        )
                    })
                    .collect();
                paths.sort();
                paths.iter().map(|p| load_instance(p)).collect()
            }
        }
    }
}

/// Reads a JSON instance, or a QPLIB file when the extension is `.qplib`.
pub fn load_instance(path: &Path) -> Result<QcqpInstance> {
    let text = std::fs::read_to_string(path)?;
    match path.extension().and_then(|e| e.to_str()) {
        Some("qplib") => parse_qplib_subset(&text),
        _ => read_json(&text),
    }
}

#[derive(Debug, Clone)]
pub struct CompareOutcome {
    pub instance: String,
    pub reference: ReferenceBounds,
    /// One trace per strategy, in [`StrategyKind`] order.
    pub traces: Vec<Trace>,
}

/// Runs every configured strategy on one instance. Strategies run on their
/// own threads and share only the reference bounds.
pub fn compare_instance(
    instance: &QcqpInstance,
    config: &ExperimentConfig,
    backend: &dyn ConicBackend,
) -> Result<CompareOutcome> {
    config.validate()?;
    let reference = compute_reference(instance, backend, config.cone == ConeMode::EdnnIfNonneg)?;
    let mut kinds = config.strategies.clone();
    kinds.sort();
    kinds.dedup();
    let options = DriverOptions::default();
    let results: Vec<Result<Trace>> = std::thread::scope(|s| {
        let handles: Vec<_> = kinds
            .iter()
            .map(|&k| {
                let (reference, strategy) = (&reference, config.strategy(k));
                s.spawn(move || {
                    run_cutting_plane(
                        instance,
                        &strategy,
                        &config.limits,
                        reference,
                        backend,
                        &options,
                    )
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("strategy thread panicked"))
            .collect()
    });
    let traces = results.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(CompareOutcome {
        instance: instance.name().to_string(),
        reference,
        traces,
    })
}

pub const COMPARE_HEADER: [&str; 7] = [
    "instance", "strategy", "iter", "cuts", "GC", "t_lastlp", "t_SDP",
];
/// Columns of the compare CSV that depend on wall-clock time.
pub const COMPARE_TIMING: [&str; 2] = ["t_lastlp", "t_SDP"];

fn clamp_gc(gc: Option<f64>) -> String {
    gc.map(|g| fmt_gc(g.clamp(0.0, 1.0))).unwrap_or_default()
}

pub fn compare_csv(outcomes: &[CompareOutcome]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(COMPARE_HEADER)?;
    for o in outcomes {
        for t in &o.traces {
            w.write_record([
                o.instance.clone(),
                t.strategy.as_str().to_string(),
                t.iterations().to_string(),
                t.num_cuts().to_string(),
                clamp_gc(t.summary.final_gc),
                fmt_time(t.summary.t_lastlp),
                t.summary.t_sdp.map(fmt_time).unwrap_or_default(),
            ])?;
        }
    }
    into_string(w)
}

fn into_string(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Blanks the timing columns of a compare or bnb CSV.
pub fn strip_timing(csv_text: &str) -> Result<String> {
    let mut r = csv::Reader::from_reader(csv_text.as_bytes());
    let header = r.headers()?.clone();
    let timing: Vec<bool> = header
        .iter()
        .map(|h| h.starts_with("t_") || h == "t")
        .collect();
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&header)?;
    for rec in r.records() {
        let rec = rec?;
        w.write_record(
            rec.iter()
                .zip(&timing)
                .map(|(v, t)| if *t { "" } else { v }),
        )?;
    }
    into_string(w)
}

/// Table-style summary: per strategy, the averages of `iter`, `cuts`, `GC`,
/// `t_lastlp` and `t_SDP` over every row of the given compare CSVs.
pub fn report(csv_texts: &[String]) -> Result<String> {
    #[derive(Default)]
    struct Acc {
        rows: usize,
        sums: [f64; 5],
        counts: [usize; 5],
    }
    let mut acc: BTreeMap<StrategyKind, Acc> = BTreeMap::new();
    for text in csv_texts {
        let mut r = csv::Reader::from_reader(text.as_bytes());
        let header = r.headers()?.clone();
        if header.iter().collect::<Vec<_>>() != COMPARE_HEADER {
            return Err(Error::Schema(format!(
                "unexpected compare header `{}`",
                header.iter().collect::<Vec<_>>().join(",")
            )));
        }
        for rec in r.records() {
            let rec = rec?;
            let kind: StrategyKind = rec[1].parse()?;
            let a = acc.entry(kind).or_default();
            a.rows += 1;
            for (slot, col) in [2, 3, 4, 5, 6].into_iter().enumerate() {
                if rec[col].is_empty() {
                    continue;
                }
                let v: f64 = rec[col]
                    .parse()
                    .map_err(|_| Error::Schema(format!("non-numeric value `{}`", &rec[col])))?;
                a.sums[slot] += v;
                a.counts[slot] += 1;
            }
        }
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "strategy",
        "instances",
        "iter",
        "cuts",
        "GC",
        "t_lastlp",
        "t_SDP",
    ])?;
    for (kind, a) in &acc {
        let avg = |k: usize, digits: usize| {
            if a.counts[k] == 0 {
                String::new()
            } else {
                format!("{:.*}", digits, a.sums[k] / a.counts[k] as f64)
            }
        };
        w.write_record([
            kind.as_str().to_string(),
            a.rows.to_string(),
            avg(0, 1),
            avg(1, 1),
            avg(2, 4),
            avg(3, 4),
            avg(4, 4),
        ])?;
    }
    into_string(w)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BnbConfig {
    NoCuts,
    WithCuts,
}

impl BnbConfig {
    pub fn as_str(self) -> &'static str {
        match self {
            BnbConfig::NoCuts => "no-cuts",
            BnbConfig::WithCuts => "with-cuts",
        }
    }
}

#[derive(Debug, Clone)]
pub struct BnbRun {
    pub config: BnbConfig,
    pub result: BnbResult,
    /// Cut-generation trace (with-cuts runs).
    pub trace: Option<Trace>,
}

#[derive(Debug, Clone)]
pub struct BnbOutcome {
    pub instance: String,
    pub reference: ReferenceBounds,
    pub runs: Vec<BnbRun>,
}

impl BnbOutcome {
    /// Best objective found over all runs.
    pub fn z_qp(&self) -> f64 {
        self.runs
            .iter()
            .map(|r| r.result.z_best)
            .fold(f64::INFINITY, f64::min)
    }

    /// `(z - z_mcc) / (z_qp - z_mcc)`; `None` when the denominator vanishes.
    pub fn gap_closed(&self, z: f64) -> Option<f64> {
        let (z_mcc, z_qp) = (self.reference.z_mcc, self.z_qp());
        let den = z_qp - z_mcc;
        (z_qp.is_finite() && den > 1e-9 * z_qp.abs().max(1.0)).then(|| (z - z_mcc) / den)
    }
}

/// Global solves without and/or with sparse cuts generated by the
/// accelerated strategy (slack cuts dropped before the solve).
pub fn bnb_instance(
    instance: &QcqpInstance,
    configs: &[BnbConfig],
    experiment: &ExperimentConfig,
    options: &BnbOptions,
    backend: &dyn ConicBackend,
) -> Result<BnbOutcome> {
    let reference =
        compute_reference(instance, backend, experiment.cone == ConeMode::EdnnIfNonneg)?;
    let mut runs = Vec::new();
    for &config in configs {
        let (cuts, trace) = match config {
            BnbConfig::NoCuts => (Vec::new(), None),
            BnbConfig::WithCuts => {
                let strategy = experiment.strategy(StrategyKind::SdpPlusSparseCuts);
                let trace = run_cutting_plane(
                    instance,
                    &strategy,
                    &experiment.limits,
                    &reference,
                    backend,
                    &DriverOptions::default(),
                )?;
                let cuts =
                    drop_slack_cuts(instance, &trace.cuts, strategy.mccormick(), backend, 1e-6)?;
                (cuts, Some(trace))
            }
        };
        let result = solve_global(instance, &cuts, options, backend)?;
        runs.push(BnbRun {
            config,
            result,
            trace,
        });
    }
    Ok(BnbOutcome {
        instance: instance.name().to_string(),
        reference,
        runs,
    })
}

pub const BNB_HEADER: [&str; 13] = [
    "instance", "config", "status", "z", "GC_ro", "nodes", "GC", "t", "t_SDP", "GC_sdp", "t_cuts",
    "cuts", "GC_cuts",
];

pub fn bnb_csv(outcomes: &[BnbOutcome]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(BNB_HEADER)?;
    let gc = |o: &BnbOutcome, z: f64| o.gap_closed(z).map(fmt_gc).unwrap_or_default();
    for o in outcomes {
        for run in &o.runs {
            let r = &run.result;
            let mut row = vec![
                o.instance.clone(),
                run.config.as_str().to_string(),
                r.status.as_str().to_string(),
                format!("{:.6}", r.z_best),
                gc(o, r.root_bound),
                r.nodes.to_string(),
                gc(o, r.bound),
                fmt_time(r.time),
            ];
            match &run.trace {
                Some(t) => row.extend([
                    fmt_time(o.reference.t_sdp),
                    gc(o, o.reference.z_sdp),
                    fmt_time(t.summary.total_time),
                    t.num_cuts().to_string(),
                    gc(o, t.summary.final_z),
                ]),
                None => row.extend(std::iter::repeat(String::new()).take(5)),
            }
            w.write_record(&row)?;
        }
    }
    into_string(w)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn report_averages_by_strategy() {
        let a = "instance,strategy,iter,cuts,GC,t_lastlp,t_SDP\n\
                 i1,SparseCuts,4,4,0.990000,0.0100,\n\
                 i1,SdpPlusSparseCuts,2,2,1.000000,0.0200,0.5000\n";
        let b = "instance,strategy,iter,cuts,GC,t_lastlp,t_SDP\n\
                 i2,SparseCuts,6,6,0.994000,0.0300,\n";
        let out = report(&[a.to_string(), b.to_string()]).unwrap();
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines[0], "strategy,instances,iter,cuts,GC,t_lastlp,t_SDP");
        assert_eq!(lines[1], "SparseCuts,2,5.0,5.0,0.9920,0.0200,");
        assert_eq!(lines[2], "SdpPlusSparseCuts,1,2.0,2.0,1.0000,0.0200,0.5000");
    }

    #[test]
    fn report_rejects_foreign_csv() {
        assert!(matches!(
            report(&["a,b\n1,2\n".to_string()]),
            Err(Error::Schema(_))
        ));
    }

    #[test]
    fn strip_timing_blanks_time_columns() {
        let text = "instance,strategy,iter,cuts,GC,t_lastlp,t_SDP\ni,SparseCuts,1,1,0.5,0.1,0.2\n";
        assert_eq!(
            strip_timing(text).unwrap(),
            "instance,strategy,iter,cuts,GC,t_lastlp,t_SDP\ni,SparseCuts,1,1,0.5,,\n"
        );
    }

    #[test]
    fn config_validation() {
        let mut c = ExperimentConfig::new(InstanceSource::File("x.json".into()), "out");
        c.validate().unwrap();
        c.strategies.clear();
        assert!(c.validate().is_err());
    }
}
