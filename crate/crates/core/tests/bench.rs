use sparsecut::backend::default_backend;
use sparsecut::bench::{
    compare_csv, compare_instance, report, strip_timing, trace_svg, ExperimentConfig,
    InstanceSource,
};

fn config() -> ExperimentConfig {
    ExperimentConfig::new(
        InstanceSource::Generate {
            n: 5,
            density: 0.5,
            num_qc: 1,
            indices: vec![1, 2, 3],
        },
        "out",
    )
}

#[test]
fn compare_rows_have_gap_closed_in_unit_interval() {
    let backend = default_backend();
    let cfg = config();
    cfg.validate().unwrap();
    let outcomes: Vec<_> = cfg
        .load_instances()
        .unwrap()
        .iter()
        .map(|i| compare_instance(i, &cfg, backend.as_ref()).unwrap())
        .collect();
    let csv = compare_csv(&outcomes).unwrap();
    let mut reader = csv::Reader::from_reader(csv.as_bytes());
    let headers = reader.headers().unwrap().clone();
    assert_eq!(
        headers.iter().collect::<Vec<_>>(),
        ["instance", "strategy", "iter", "cuts", "GC", "t_lastlp", "t_SDP"]
    );
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 12);
    assert!(rows.iter().filter(|r| !r[4].is_empty()).count() >= 8);
    for row in &rows {
        // blank when the McCormick and SDP bounds coincide
        if !row[4].is_empty() {
            let gc: f64 = row[4].parse().unwrap();
            assert!((0.0..=1.0).contains(&gc));
        }
    }

    let stripped = strip_timing(&csv).unwrap();
    assert!(stripped.lines().skip(1).all(|l| l.ends_with(",,")));
    let summary = report(&[csv]).unwrap();
    assert_eq!(summary.lines().count(), 5);
    assert!(trace_svg(&outcomes[0].instance, &outcomes[0].traces).starts_with("<svg"));
}

#[test]
fn invalid_configs_are_rejected() {
    let mut cfg = config();
    cfg.alpha = 1.0;
    assert!(cfg.validate().is_err());
    let mut cfg = config();
    cfg.strategies.clear();
    assert!(cfg.validate().is_err());
}
