mod common;

use common::{generated, square};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sparsecut::backend::{
    default_backend, ClarabelBackend, ConicBackend, DualClarabelBackend, SolveLimits, SolveStatus,
};
use sparsecut::model::build_support_set;
use sparsecut::relax::{
    build_e_lp, build_shor_sdp, mccormick_rows, ConicProblem, McCormickMode, PsdBlock, PsdEntry,
    RowKind, RowSense, ShorOptions, VariableSpace,
};

fn value(problem: &ConicProblem) -> f64 {
    default_backend()
        .solve(problem, &SolveLimits::default())
        .optimal_value()
        .unwrap()
}

#[test]
fn tiny_lp_and_sdp() {
    let mut lp = ConicProblem::new(VariableSpace::Auxiliary, 1);
    lp.objective[0] = 1.0;
    lp.add_row(vec![(0, 1.0)], RowSense::Ge, 3.0, RowKind::Other);
    assert!((value(&lp) - 3.0).abs() < 1e-8);

    // min t  s.t.  [[t, 1], [1, t]] PSD
    let mut sdp = ConicProblem::new(VariableSpace::Auxiliary, 1);
    sdp.objective[0] = 1.0;
    let t = |r, c| PsdEntry {
        row: r,
        col: c,
        terms: vec![(0, 1.0)],
        constant: 0.0,
    };
    let one = PsdEntry {
        row: 0,
        col: 1,
        terms: vec![],
        constant: 1.0,
    };
    sdp.blocks.push(PsdBlock {
        dim: 2,
        entries: vec![t(0, 0), one, t(1, 1)],
    });
    assert!((value(&sdp) - 1.0).abs() < 1e-7);
}

#[test]
fn shor_on_one_variable() {
    assert!(value(&build_shor_sdp(&square(1.0), ShorOptions::default())).abs() < 1e-7);
    let concave = build_shor_sdp(
        &square(-1.0),
        ShorOptions {
            mccormick: McCormickMode::Support,
            dnn: false,
        },
    );
    assert!((value(&concave) + 1.0).abs() < 1e-7);
}

#[test]
fn e_lp_needs_mccormick_to_be_bounded() {
    let inst = square(-1.0);
    let bare = build_e_lp(&inst, &[], McCormickMode::Off).unwrap();
    assert_eq!(bare.num_vars(), build_support_set(&inst).len());
    let status = default_backend()
        .solve(&bare, &SolveLimits::default())
        .status;
    assert_ne!(status, SolveStatus::Optimal);
    let with = build_e_lp(&inst, &[], McCormickMode::Support).unwrap();
    assert!(with.is_linear());
    assert!((value(&with) + 1.0).abs() < 1e-7);
}

#[test]
fn envelope_rows() {
    let rows = |i, j| {
        mccormick_rows(i, j, (0.0, 1.0), (0.0, 1.0))
            .rows
            .iter()
            .map(|r| (r.slope_i, r.slope_j, r.intercept, r.upper))
            .collect::<Vec<_>>()
    };
    let clean = |v: Vec<(f64, f64, f64, bool)>| {
        v.into_iter()
            .map(|(a, b, c, u)| (a + 0.0, b + 0.0, c + 0.0, u))
            .collect::<Vec<_>>()
    };
    assert_eq!(
        clean(rows(1, 2)),
        vec![
            (0.0, 0.0, 0.0, false),
            (1.0, 1.0, -1.0, false),
            (1.0, 0.0, 0.0, true),
            (0.0, 1.0, 0.0, true)
        ]
    );
    // X >= 0, X >= 2x - 1, X <= x
    assert_eq!(
        clean(rows(1, 1)),
        vec![
            (0.0, 0.0, 0.0, false),
            (1.0, 1.0, -1.0, false),
            (1.0, 0.0, 0.0, true)
        ]
    );
}

#[test]
fn envelopes_hold_on_random_boxes() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..20 {
        let l: (f64, f64) = (rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0));
        let bi = (l.0, l.0 + rng.gen_range(0.0..4.0));
        let bj = (l.1, l.1 + rng.gen_range(0.0..4.0));
        let row = mccormick_rows(1, 2, bi, bj);
        for _ in 0..10_000 {
            let (x, y) = (rng.gen_range(bi.0..=bi.1), rng.gen_range(bj.0..=bj.1));
            assert!(row.rows.iter().all(|r| r.slack(x, y, x * y) >= -1e-12));
        }
    }
}

#[test]
fn shor_bound_agrees_across_backends() {
    for index in 0..3 {
        let inst = generated(5, 0.6, 1, index);
        let p = build_shor_sdp(&inst, ShorOptions::default());
        let primal = ClarabelBackend
            .solve(&p, &SolveLimits::default())
            .optimal_value()
            .unwrap();
        let dual = DualClarabelBackend
            .solve(&p, &SolveLimits::default())
            .optimal_value()
            .unwrap();
        assert!(
            (primal - dual).abs() <= 1e-6 * primal.abs().max(1.0),
            "{primal} vs {dual}"
        );
    }
}

#[test]
fn dnn_bound_dominates_shor() {
    let inst = generated(6, 0.5, 1, 4);
    let sdp = value(&build_shor_sdp(&inst, ShorOptions::default()));
    let dnn = value(&build_shor_sdp(
        &inst,
        ShorOptions {
            dnn: true,
            ..ShorOptions::default()
        },
    ));
    assert!(dnn >= sdp - 1e-6 * sdp.abs().max(1.0));
}
