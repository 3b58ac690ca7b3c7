//! Problem data, the support set `E`, and vectors indexed by it.

mod evector;
mod instance;
mod support;
mod symmat;

pub use evector::{embed_from_e, evec_inner, project_to_e, EVector};
pub use instance::{QcqpInstance, QuadraticFunction, SparseSym};
pub use support::{build_support_set, SupportSet};
pub use symmat::SymMatrix;

use std::sync::Arc;

/// `Q^k_E` for every function of the instance (objective first).
pub fn lifted_coefficients(instance: &QcqpInstance, support: &Arc<SupportSet>) -> Vec<EVector> {
    instance
        .functions()
        .map(|f| {
            let mut v = EVector::zeros(support.clone());
            for (i, j, c) in f.lifted_entries() {
                let k = support
                    .position(i, j)
                    .expect("support must cover the instance's nonzeros");
                v.values_mut()[k] += c;
            }
            v
        })
        .collect()
}
