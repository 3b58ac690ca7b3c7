mod common;

use common::generated;
use sparsecut::instances::{
    generate_boxqcqp, parse_qplib_subset, read_json, write_json, GeneratorConfig,
};
use sparsecut::model::{build_support_set, QcqpInstance, QuadraticFunction, SparseSym};
use sparsecut::Error;

const ONE_VAR: &str = "\
tiny
QCB
minimize
1
1
1 1 2.0
0.0
0
0.0
1.0E+30
0.0
0
1.0
0
";

#[test]
fn two_variable_constraint_is_active_at_the_center() {
    let inst = generated(2, 1.0, 1, 1);
    assert_eq!(inst.m(), 1);
    assert_eq!(inst.constraints()[0].eval(&[0.5, 0.5]), 0.0);
}

#[test]
fn no_constraints_gives_a_box_qp() {
    let inst = generated(6, 0.5, 0, 0);
    assert_eq!(inst.m(), 0);
    assert!(inst.nonneg());
}

#[test]
fn constraints_reuse_the_objective_support() {
    for cd in [1.0, 0.5] {
        let mut cfg = GeneratorConfig::new(12, 0.3, 4, 2);
        cfg.constraint_density = cd;
        let inst = generate_boxqcqp(&cfg).unwrap();
        let objective_only = QcqpInstance::new(
            "o",
            inst.objective().clone(),
            vec![],
            inst.lower().to_vec(),
            inst.upper().to_vec(),
        )
        .unwrap();
        assert_eq!(build_support_set(&inst), build_support_set(&objective_only));
        for g in inst.constraints() {
            assert!(g.eval(&[0.5; 12]).abs() <= 1e-9);
        }
    }
}

#[test]
fn generation_is_deterministic_and_named() {
    let cfg = GeneratorConfig::new(20, 0.1, 5, 3);
    assert_eq!(cfg.name(), "spar020-010-3_5qc");
    assert_eq!(
        write_json(&generate_boxqcqp(&cfg).unwrap()),
        write_json(&generate_boxqcqp(&cfg).unwrap())
    );
    assert!(generate_boxqcqp(&GeneratorConfig::new(5, 0.0, 0, 0)).is_err());
}

#[test]
fn json_round_trips() {
    let f = QuadraticFunction::new(
        SparseSym::from_symmetric_entries([(0, 1, 0.1)]),
        vec![1.0 / 3.0, -2.5],
        1e-300,
    );
    let empty = QcqpInstance::new("empty", f, vec![], vec![-1.0, 0.0], vec![1.0, 2.0]).unwrap();
    assert_eq!(read_json(&write_json(&empty)).unwrap(), empty);
    let inst = generated(9, 0.4, 3, 1);
    assert_eq!(read_json(&write_json(&inst)).unwrap(), inst);
}

#[test]
fn nan_coefficient_is_a_schema_violation() {
    let mut doc: serde_json::Value =
        serde_json::from_str(&write_json(&generated(3, 1.0, 0, 0))).unwrap();
    doc["objective"]["d"] = "NaN".into();
    let text = doc.to_string();
    assert!(matches!(read_json(&text), Err(Error::Schema(_))));
    assert!(matches!(read_json("{"), Err(Error::Json(_))));
}

#[test]
fn qplib_subset() {
    let inst = parse_qplib_subset(ONE_VAR).unwrap();
    assert_eq!((inst.n(), inst.m()), (1, 0));
    assert_eq!(inst.objective().q.entries(), &[(0, 0, 1.0)]);
    assert_eq!(read_json(&write_json(&inst)).unwrap(), inst);

    let unbounded = ONE_VAR.replacen("1.0\n0\n", "1.0E+30\n0\n", 1);
    assert!(
        matches!(parse_qplib_subset(&unbounded), Err(Error::UnsupportedFeature(f)) if f.contains("unbounded"))
    );
}
