use std::sync::Arc;

use super::support::SupportSet;
use super::symmat::SymMatrix;
use crate::error::{Error, Result};

/// A real value for every canonical pair of a [`SupportSet`].
#[derive(Debug, Clone, PartialEq)]
pub struct EVector {
    support: Arc<SupportSet>,
    values: Vec<f64>,
}

impl EVector {
    pub fn zeros(support: Arc<SupportSet>) -> Self {
        let len = support.len();
        Self {
            support,
            values: vec![0.0; len],
        }
    }

    pub fn from_values(support: Arc<SupportSet>, values: Vec<f64>) -> Result<Self> {
        if values.len() != support.len() {
            return Err(Error::DimensionMismatch {
                expected: support.len(),
                got: values.len(),
            });
        }
        Ok(Self { support, values })
    }

    pub fn from_fn(support: Arc<SupportSet>, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let values = support.pairs().iter().map(|&(i, j)| f(i, j)).collect();
        Self { support, values }
    }

    pub fn support(&self) -> &Arc<SupportSet> {
        &self.support
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Value at `(i, j)`; zero for pairs outside the support.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.support.position(i, j).map_or(0.0, |k| self.values[k])
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) -> Result<()> {
        let k = self.support.position(i, j).ok_or(Error::SupportMismatch)?;
        self.values[k] = v;
        Ok(())
    }

    /// Iterates `((i, j), value)` over canonical pairs.
    pub fn iter(&self) -> impl Iterator<Item = ((usize, usize), f64)> + '_ {
        self.support
            .pairs()
            .iter()
            .copied()
            .zip(self.values.iter().copied())
    }

    pub fn same_support(&self, other: &EVector) -> bool {
        Arc::ptr_eq(&self.support, &other.support) || self.support == other.support
    }

    /// Inner-product weight of coordinate `k`: 2 off the diagonal, 1 on it.
    #[inline]
    pub fn weight(pair: (usize, usize)) -> f64 {
        if pair.0 == pair.1 {
            1.0
        } else {
            2.0
        }
    }
}

/// `<C, Z>` summed over the full symmetric set `E`.
pub fn evec_inner(c: &EVector, z: &EVector) -> Result<f64> {
    if !c.same_support(z) {
        return Err(Error::SupportMismatch);
    }
    Ok(c.iter()
        .zip(z.values())
        .map(|((p, cv), zv)| EVector::weight(p) * cv * zv)
        .sum())
}

/// Restriction `Y_E`.
pub fn project_to_e(y: &SymMatrix, support: &Arc<SupportSet>) -> Result<EVector> {
    if y.dim() != support.dim() {
        return Err(Error::DimensionMismatch {
            expected: support.dim(),
            got: y.dim(),
        });
    }
    Ok(EVector::from_fn(support.clone(), |i, j| y.get(i, j)))
}

/// Zero-fill embedding `Z̄` with `Z̄_E = Z` and zeros elsewhere.
pub fn embed_from_e(z: &EVector) -> SymMatrix {
    let mut m = SymMatrix::zeros(z.support().dim());
    for ((i, j), v) in z.iter() {
        m.set(i, j, v);
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example_support() -> Arc<SupportSet> {
        Arc::new(SupportSet::from_pairs(
            3,
            [(0, 0), (2, 0), (0, 2), (1, 1), (2, 1), (1, 2), (2, 2)],
        ))
    }

    #[test]
    fn diagonal_indicator_inner_product() {
        let e = Arc::new(SupportSet::mandatory(3));
        let mut c = EVector::zeros(e.clone());
        c.set(1, 1, 1.0).unwrap();
        assert_eq!(evec_inner(&c, &c).unwrap(), 1.0);
    }

    #[test]
    fn off_diagonal_counted_twice() {
        let e = Arc::new(SupportSet::lifted(3, [(1, 2)]));
        let mut c = EVector::zeros(e.clone());
        let mut z = EVector::zeros(e);
        c.set(1, 2, 1.0).unwrap();
        z.set(2, 1, 3.0).unwrap();
        assert_eq!(evec_inner(&c, &z).unwrap(), 6.0);
    }

    #[test]
    fn mismatched_supports_are_rejected() {
        let a = EVector::zeros(Arc::new(SupportSet::mandatory(3)));
        let b = EVector::zeros(Arc::new(SupportSet::full(3)));
        assert!(matches!(evec_inner(&a, &b), Err(Error::SupportMismatch)));
    }

    #[test]
    fn identity_projects_to_unit_diagonal() {
        let e = Arc::new(SupportSet::full(4));
        let z = project_to_e(&SymMatrix::identity(4), &e).unwrap();
        for ((i, j), v) in z.iter() {
            assert_eq!(v, if i == j { 1.0 } else { 0.0 });
        }
    }

    #[test]
    fn all_ones_under_seven_pair_support() {
        let e = example_support();
        let ones = SymMatrix::from_fn(3, |_, _| 1.0);
        let z = project_to_e(&ones, &e).unwrap();
        assert!(z.values().iter().all(|&v| v == 1.0));
        assert_eq!(z.len(), 5);
        let expected = SymMatrix::from_row_major(3, &[1., 0., 1., 0., 1., 1., 1., 1., 1.]);
        assert_eq!(embed_from_e(&z), expected);
    }

    #[test]
    fn dimension_mismatch_on_projection() {
        let e = Arc::new(SupportSet::mandatory(3));
        assert!(project_to_e(&SymMatrix::identity(4), &e).is_err());
    }

    #[test]
    fn unit_diagonal_embeds_to_identity() {
        let e = Arc::new(SupportSet::mandatory(4));
        let z = EVector::from_fn(e, |i, j| if i == j { 1.0 } else { 0.0 });
        assert_eq!(embed_from_e(&z), SymMatrix::identity(4));
    }
}
