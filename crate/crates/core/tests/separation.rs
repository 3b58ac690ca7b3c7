mod common;

use std::sync::Arc;

use common::{all_ones, evector, example_support};
use proptest::prelude::*;
use sparsecut::backend::{complete_to_psd, default_backend, eigendecomp, SolveLimits};
use sparsecut::model::{embed_from_e, evec_inner, project_to_e, EVector, SupportSet, SymMatrix};
use sparsecut::separation::{
    blend_point, dense_eigen_cuts, projection_problem, CutMode, Separator,
};
use sparsecut::Error;

fn sorted_spectrum(m: &SymMatrix) -> Vec<f64> {
    let mut v: Vec<f64> = eigendecomp(m).iter().map(|p| p.value).collect();
    v.sort_by(f64::total_cmp);
    v
}

fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
}

#[test]
fn spectra_of_the_small_example() {
    assert!(close(
        &sorted_spectrum(&SymMatrix::identity(4)),
        &[1.0; 4],
        1e-12
    ));
    assert!(close(
        &sorted_spectrum(&all_ones()),
        &[0.0, 0.0, 3.0],
        1e-12
    ));
    let zbar = embed_from_e(&project_to_e(&all_ones(), &example_support()).unwrap());
    assert!(close(
        &sorted_spectrum(&zbar),
        &[1.0 - 2f64.sqrt(), 1.0, 1.0 + 2f64.sqrt()],
        1e-12
    ));
}

#[test]
fn completion_examples() {
    let backend = default_backend();
    let z = project_to_e(&all_ones(), &example_support()).unwrap();
    let y = complete_to_psd(&z, backend.as_ref())
        .unwrap()
        .expect("a completion exists");
    assert!(sorted_spectrum(&y)[0] >= -1e-7);
    assert!((y.get(0, 1) - 1.0).abs() < 1e-4);

    let e = Arc::new(SupportSet::mandatory(3));
    let neg = evector(&e, &[((0, 0), 1.0), ((1, 1), -1.0), ((2, 2), 1.0)]);
    assert!(complete_to_psd(&neg, backend.as_ref()).unwrap().is_none());
}

#[test]
fn dense_cut_examples() {
    assert!(dense_eigen_cuts(&SymMatrix::identity(3), 1e-6).is_empty());
    assert_eq!(
        dense_eigen_cuts(&SymMatrix::identity(3).scaled(-1.0), 1e-6).len(),
        3
    );
    let zbar = embed_from_e(&project_to_e(&all_ones(), &example_support()).unwrap());
    let cuts = dense_eigen_cuts(&zbar, 1e-6);
    assert_eq!(cuts.len(), 1);
    let full = project_to_e(&zbar, cuts[0].coeffs.support()).unwrap();
    assert!((evec_inner(&cuts[0].coeffs, &full).unwrap() - (1.0 - 2f64.sqrt())).abs() < 1e-9);
}

#[test]
fn epsd_examples() {
    let backend = default_backend();
    let sep = Separator::new(backend.as_ref());
    let e = example_support();
    assert!(!sep
        .separate_epsd(&project_to_e(&all_ones(), &e).unwrap())
        .unwrap()
        .is_violated());
    let zbar = embed_from_e(&project_to_e(&all_ones(), &e).unwrap());
    assert!(!sep
        .separate_epsd(&project_to_e(&zbar, &e).unwrap())
        .unwrap()
        .is_violated());

    let m = Arc::new(SupportSet::mandatory(3));
    let z = evector(&m, &[((0, 0), 1.0), ((1, 1), -1.0), ((2, 2), 1.0)]);
    let out = sep.separate_epsd(&z).unwrap();
    assert!((out.objective() + 1.0).abs() < 1e-6);
    let c = &out.cut().unwrap().coeffs;
    assert!(
        (c.get(1, 1) - 1.0).abs() < 1e-4 && c.get(0, 0).abs() < 1e-4 && c.get(2, 2).abs() < 1e-4
    );
}

#[test]
fn ednn_examples() {
    let backend = default_backend();
    let sep = Separator::new(backend.as_ref());
    let e = Arc::new(SupportSet::lifted(4, [(1, 2)]));
    let dnn = SymMatrix::from_fn(4, |i, j| {
        1.0 + (i * j) as f64 * 0.1 + if i == j { 0.5 } else { 0.0 }
    });
    let z = project_to_e(&dnn, &e).unwrap();
    assert!(!sep.separate_ednn(&z, true).unwrap().is_violated());
    assert!(matches!(
        sep.separate_ednn(&z, false),
        Err(Error::ModeViolation)
    ));

    // nonnegative point whose only obstruction needs negative off-E entries
    let z = EVector::from_fn(e.clone(), |i, j| match (i, j) {
        (0, 0) => 1.0,
        (0, _) => 0.5,
        (1, 2) => 0.0,
        _ => 0.3,
    });
    let psd = sep.separate_epsd(&z).unwrap().objective();
    let dnn = sep.separate_ednn(&z, true).unwrap().objective();
    assert!(dnn <= psd + 1e-7, "{dnn} > {psd}");
}

#[test]
fn blend_examples() {
    let e = Arc::new(SupportSet::mandatory(2));
    let a = evector(&e, &[((1, 1), 0.0)]);
    let b = evector(&e, &[((1, 1), 2.0)]);
    assert_eq!(blend_point(&a, &b, 0.5).unwrap().get(1, 1), 1.0);
    assert_eq!(blend_point(&b, &b, 0.3).unwrap(), b);
    assert!(matches!(
        blend_point(&a, &b, 0.0),
        Err(Error::InvalidAlpha(_))
    ));
}

fn point() -> impl Strategy<Value = (Arc<SupportSet>, EVector, SymMatrix)> {
    (3usize..7, any::<u64>()).prop_map(|(dim, seed)| {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let extra: Vec<(usize, usize)> = (1..dim)
            .flat_map(|i| (i + 1..dim).map(move |j| (i, j)))
            .filter(|_| rng.gen_bool(0.4))
            .collect();
        let e = Arc::new(SupportSet::lifted(dim, extra));
        let z = EVector::from_fn(e.clone(), |_, _| rng.gen_range(-1.0..1.0));
        let b: Vec<Vec<f64>> = (0..dim)
            .map(|_| (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect())
            .collect();
        let y = SymMatrix::from_fn(dim, |i, j| b[i].iter().zip(&b[j]).map(|(x, y)| x * y).sum());
        (e, z, y)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    /// Every separated cut is valid for every PSD matrix.
    #[test]
    fn cuts_are_valid_for_psd_points((e, z, y) in point()) {
        let backend = default_backend();
        let sep = Separator::new(backend.as_ref());
        let y_e = project_to_e(&y, &e).unwrap();
        if let Some(cut) = sep.separate_epsd(&z).unwrap().into_cut() {
            prop_assert!(cut.evaluate(&y_e).unwrap() >= -1e-9);
            prop_assert!(cut.evaluate(&z).unwrap() < 0.0);
        }
        let zn = EVector::from_fn(e.clone(), |i, j| z.get(i, j).abs());
        let yn = SymMatrix::from_fn(y.dim(), |i, j| y.get(i, j).abs() + if i == j { y.dim() as f64 } else { 0.0 });
        if let Some(cut) = sep.separate_ednn(&zn, true).unwrap().into_cut() {
            prop_assert_eq!(cut.mode, CutMode::Ednn);
            prop_assert!(cut.evaluate(&project_to_e(&yn, &e).unwrap()).unwrap() >= -1e-9);
        }
    }

    /// The E-DNN model relaxes the E-PSD model.
    #[test]
    fn ednn_objective_is_at_most_epsd((e, z, _) in point()) {
        let backend = default_backend();
        let zn = EVector::from_fn(e, |i, j| z.get(i, j).abs());
        let solve = |mode| backend.solve(&projection_problem(&zn, mode).0, &SolveLimits::default()).optimal_value().unwrap();
        prop_assert!(solve(CutMode::Ednn) <= solve(CutMode::Epsd) + 1e-7);
    }
}
