use std::fmt;

use super::instance::QcqpInstance;

/// The index set `E` of a lifted matrix of dimension `n + 1`.
///
/// Pairs are stored once, as canonical upper-triangular representatives
/// `(i, j)` with `i <= j`, in lexicographic order. Sets built from an
/// instance (or with [`SupportSet::lifted`]) always contain the first row
/// and the diagonal; [`SupportSet::from_pairs`] accepts any pattern.
#[derive(Clone, PartialEq, Eq)]
pub struct SupportSet {
    dim: usize,
    pairs: Vec<(usize, usize)>,
    // dim x dim lookup into `pairs`, u32::MAX when absent
    lookup: Vec<u32>,
}

const ABSENT: u32 = u32::MAX;

impl SupportSet {
    /// Exactly the given pairs (either orientation accepted).
    pub fn from_pairs(dim: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Self {
        assert!(dim >= 1);
        let mut pairs: Vec<(usize, usize)> = pairs
            .into_iter()
            .map(|(i, j)| {
                assert!(i < dim && j < dim, "pair ({i},{j}) outside dimension {dim}");
                if i <= j {
                    (i, j)
                } else {
                    (j, i)
                }
            })
            .collect();
        pairs.sort_unstable();
        pairs.dedup();
        let mut lookup = vec![ABSENT; dim * dim];
        for (k, &(i, j)) in pairs.iter().enumerate() {
            lookup[i * dim + j] = k as u32;
            lookup[j * dim + i] = k as u32;
        }
        Self { dim, pairs, lookup }
    }

    /// First row, diagonal, and `extra`.
    pub fn lifted(dim: usize, extra: impl IntoIterator<Item = (usize, usize)>) -> Self {
        Self::from_pairs(
            dim,
            (0..dim)
                .map(|j| (0, j))
                .chain((1..dim).map(|j| (j, j)))
                .chain(extra),
        )
    }

    /// Every pair of the `dim x dim` matrix.
    pub fn full(dim: usize) -> Self {
        Self::from_pairs(dim, (0..dim).flat_map(|i| (i..dim).map(move |j| (i, j))))
    }

    /// Only the first row/column and the diagonal.
    pub fn mandatory(dim: usize) -> Self {
        Self::lifted(dim, std::iter::empty())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.position(i, j).is_some()
    }

    /// Coordinate index of `(i, j)` (or `(j, i)`).
    #[inline]
    pub fn position(&self, i: usize, j: usize) -> Option<usize> {
        if i >= self.dim || j >= self.dim {
            return None;
        }
        match self.lookup[i * self.dim + j] {
            ABSENT => None,
            k => Some(k as usize),
        }
    }

    /// Canonical pairs of the matrix that are *not* in the set.
    pub fn complement(&self) -> Vec<(usize, usize)> {
        (0..self.dim)
            .flat_map(|i| (i..self.dim).map(move |j| (i, j)))
            .filter(|&(i, j)| !self.contains(i, j))
            .collect()
    }

    /// True when the first row and the diagonal are present.
    pub fn has_lifted_pattern(&self) -> bool {
        (0..self.dim).all(|j| self.contains(0, j) && self.contains(j, j))
    }

    pub fn is_full(&self) -> bool {
        self.len() == self.dim * (self.dim + 1) / 2
    }

    /// Off-diagonal pairs between original variables (`1 <= i < j`).
    pub fn bilinear_pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.pairs.iter().copied().filter(|&(i, j)| i >= 1 && i < j)
    }
}

impl fmt::Debug for SupportSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SupportSet")
            .field("dim", &self.dim)
            .field("pairs", &self.pairs)
            .finish()
    }
}

/// The support `E` of an instance: first row, diagonal, and every position
/// where some `Q_k` (objective or constraint) has a nonzero.
pub fn build_support_set(instance: &QcqpInstance) -> SupportSet {
    let extra: Vec<(usize, usize)> = instance
        .functions()
        .flat_map(|f| f.q.entries().iter().map(|&(i, j, _)| (i + 1, j + 1)))
        .collect();
    SupportSet::lifted(instance.n() + 1, extra)
}
