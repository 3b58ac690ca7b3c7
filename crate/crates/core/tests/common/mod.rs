#![allow(dead_code)]

use std::sync::Arc;

use sparsecut::instances::{generate_boxqcqp, GeneratorConfig};
use sparsecut::model::{
    EVector, QcqpInstance, QuadraticFunction, SparseSym, SupportSet, SymMatrix,
};

pub fn generated(n: usize, rho: f64, qc: usize, index: u32) -> QcqpInstance {
    generate_boxqcqp(&GeneratorConfig::new(n, rho, qc, index)).unwrap()
}

/// `min sign * x^2` on `[0, 1]`.
pub fn square(sign: f64) -> QcqpInstance {
    let f = QuadraticFunction::new(
        SparseSym::from_symmetric_entries([(0, 0, sign)]),
        vec![0.0],
        0.0,
    );
    QcqpInstance::new("square", f, vec![], vec![0.0], vec![1.0]).unwrap()
}

pub fn all_ones() -> SymMatrix {
    SymMatrix::from_fn(3, |_, _| 1.0)
}

/// The seven-entry support of the 3x3 example (upper representatives).
pub fn example_support() -> Arc<SupportSet> {
    Arc::new(SupportSet::from_pairs(
        3,
        [(0, 0), (0, 2), (1, 1), (1, 2), (2, 2)],
    ))
}

pub fn evector(support: &Arc<SupportSet>, entries: &[((usize, usize), f64)]) -> EVector {
    let mut z = EVector::zeros(support.clone());
    for &((i, j), v) in entries {
        z.set(i, j, v).unwrap();
    }
    z
}
