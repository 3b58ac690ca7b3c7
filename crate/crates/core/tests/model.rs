mod common;

use std::sync::Arc;

use common::{all_ones, evector, example_support, generated};
use proptest::prelude::*;
use sparsecut::model::{
    build_support_set, embed_from_e, evec_inner, project_to_e, EVector, QcqpInstance,
    QuadraticFunction, SparseSym, SupportSet, SymMatrix,
};

fn two_var(q: &[(usize, usize, f64)]) -> QcqpInstance {
    let f = QuadraticFunction::new(
        SparseSym::from_symmetric_entries(q.iter().copied()),
        vec![0.0; 2],
        0.0,
    );
    QcqpInstance::new("t", f, vec![], vec![0.0; 2], vec![1.0; 2]).unwrap()
}

#[test]
fn diagonal_data_gives_only_mandatory_pairs() {
    let e = build_support_set(&two_var(&[(0, 0, 1.0), (1, 1, -2.0)]));
    assert_eq!(e.pairs(), &[(0, 0), (0, 1), (0, 2), (1, 1), (2, 2)]);
}

#[test]
fn off_diagonal_nonzero_adds_its_pair() {
    let e = build_support_set(&two_var(&[(0, 1, 3.0)]));
    assert_eq!(e.pairs(), &[(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)]);
    assert!(e.contains(2, 1) && e.contains(1, 2));
}

#[test]
fn generated_support_size_matches_a_direct_scan() {
    let inst = generated(20, 0.25, 3, 7);
    let n = inst.n();
    let mut off = std::collections::BTreeSet::new();
    for f in inst.functions() {
        for &(i, j, v) in f.q.entries() {
            if i != j && v != 0.0 {
                off.insert((i.min(j), i.max(j)));
            }
        }
    }
    assert_eq!(build_support_set(&inst).len(), 1 + n + n + off.len());
}

#[test]
fn inner_product_examples() {
    let e = Arc::new(SupportSet::lifted(3, [(1, 2)]));
    let d = evector(&e, &[((1, 1), 1.0)]);
    assert_eq!(evec_inner(&d, &d).unwrap(), 1.0);
    let c = evector(&e, &[((1, 2), 1.0)]);
    let z = evector(&e, &[((1, 2), 3.0)]);
    assert_eq!(evec_inner(&c, &z).unwrap(), 6.0);
    let other = Arc::new(SupportSet::lifted(3, []));
    assert!(evec_inner(&c, &EVector::zeros(other)).is_err());
}

#[test]
fn projection_examples() {
    let e = example_support();
    let z = project_to_e(&SymMatrix::identity(3), &e).unwrap();
    for ((i, j), v) in z.iter() {
        assert_eq!(v, if i == j { 1.0 } else { 0.0 });
    }
    let z = project_to_e(&all_ones(), &e).unwrap();
    assert!(z.values().iter().all(|&v| v == 1.0));
    let zbar = embed_from_e(&z);
    assert_eq!(
        zbar,
        SymMatrix::from_row_major(3, &[1.0, 0.0, 1.0, 0.0, 1.0, 1.0, 1.0, 1.0, 1.0])
    );

    let diag = Arc::new(SupportSet::from_pairs(4, (0..4).map(|i| (i, i))));
    let unit = EVector::from_fn(diag, |_, _| 1.0);
    assert_eq!(embed_from_e(&unit), SymMatrix::identity(4));
}

fn support_and_matrix() -> impl Strategy<Value = (Arc<SupportSet>, SymMatrix, SymMatrix)> {
    (2usize..7).prop_flat_map(|dim| {
        let m = dim * (dim + 1) / 2;
        (
            proptest::collection::vec(any::<bool>(), m),
            proptest::collection::vec(-5.0f64..5.0, m),
            proptest::collection::vec(-5.0f64..5.0, m),
        )
            .prop_map(move |(mask, a, b)| {
                let pairs: Vec<(usize, usize)> = (0..dim)
                    .flat_map(|j| (0..=j).map(move |i| (i, j)))
                    .collect();
                let extra = pairs
                    .iter()
                    .zip(&mask)
                    .filter(|(_, &keep)| keep)
                    .map(|(p, _)| *p);
                let e = Arc::new(SupportSet::lifted(dim, extra));
                let fill = |v: &[f64]| {
                    let mut s = SymMatrix::zeros(dim);
                    for (&(i, j), &x) in pairs.iter().zip(v) {
                        s.set(i, j, x);
                    }
                    s
                };
                (e, fill(&a), fill(&b))
            })
    })
}

proptest! {
    #[test]
    fn symmetric_storage((_, a, _) in support_and_matrix()) {
        for i in 0..a.dim() {
            for j in 0..a.dim() {
                prop_assert_eq!(a.get(i, j), a.get(j, i));
            }
        }
    }

    #[test]
    fn inner_product_is_the_trace_product_of_embeddings((e, a, b) in support_and_matrix()) {
        let (c, z) = (project_to_e(&a, &e).unwrap(), project_to_e(&b, &e).unwrap());
        let direct = evec_inner(&c, &z).unwrap();
        let dense = embed_from_e(&c).trace_inner(&embed_from_e(&z));
        prop_assert!((direct - dense).abs() <= 1e-9 * (1.0 + dense.abs()));
    }

    #[test]
    fn projection_round_trip_is_idempotent((e, a, _) in support_and_matrix()) {
        let z = project_to_e(&a, &e).unwrap();
        prop_assert_eq!(project_to_e(&embed_from_e(&z), &e).unwrap(), z);
    }
}
