use nalgebra::SymmetricEigen;

use crate::model::SymMatrix;

#[derive(Debug, Clone, PartialEq)]
pub struct Eigenpair {
    pub value: f64,
    /// Unit-norm eigenvector.
    pub vector: Vec<f64>,
}

/// Full spectrum of a symmetric matrix, eigenvalues in descending order.
pub fn eigendecomp(m: &SymMatrix) -> Vec<Eigenpair> {
    if m.dim() == 0 {
        return Vec::new();
    }
    let eig = SymmetricEigen::new(m.to_dmatrix());
    let mut pairs: Vec<Eigenpair> = (0..m.dim())
        .map(|k| Eigenpair {
            value: eig.eigenvalues[k],
            vector: eig.eigenvectors.column(k).iter().copied().collect(),
        })
        .collect();
    pairs.sort_by(|a, b| b.value.total_cmp(&a.value));
    pairs
}

pub fn min_eigenvalue(m: &SymMatrix) -> f64 {
    eigendecomp(m).last().map_or(0.0, |p| p.value)
}
