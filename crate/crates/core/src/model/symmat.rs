use nalgebra::DMatrix;

/// Dense symmetric matrix with a single storage cell per unordered pair.
///
/// Entries are packed row by row over the upper triangle, so `get(i, j)` and
/// `get(j, i)` read the same `f64`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    dim: usize,
    data: Vec<f64>,
}

#[inline]
pub(crate) fn packed_index(dim: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    // rows 0..i hold dim + (dim-1) + ... + (dim-i+1) cells
    i * dim - i * i.saturating_sub(1) / 2 + (j - i)
}

impl SymMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![0.0; dim * (dim + 1) / 2],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.set(i, i, 1.0);
        }
        m
    }

    /// Builds a matrix from a closure evaluated on the upper triangle.
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in i..dim {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    /// Rank-one lifting `Y(x, xxᵀ)` with the homogenizing row/column 0.
    pub fn lifted(x: &[f64]) -> Self {
        let dim = x.len() + 1;
        Self::from_fn(dim, |i, j| {
            let a = if i == 0 { 1.0 } else { x[i - 1] };
            let b = if j == 0 { 1.0 } else { x[j - 1] };
            a * b
        })
    }

    /// Symmetric matrix from a row-major dense slice. Only the upper triangle is read.
    pub fn from_row_major(dim: usize, values: &[f64]) -> Self {
        assert_eq!(values.len(), dim * dim, "expected {dim}x{dim} values");
        Self::from_fn(dim, |i, j| values[i * dim + j])
    }

    pub fn from_dmatrix(m: &DMatrix<f64>) -> Self {
        assert!(m.is_square());
        Self::from_fn(m.nrows(), |i, j| 0.5 * (m[(i, j)] + m[(j, i)]))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[packed_index(self.dim, i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let k = packed_index(self.dim, i, j);
        self.data[k] = v;
    }

    pub fn to_dmatrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.dim, self.dim, |i, j| self.get(i, j))
    }

    /// Trace inner product `A • B`.
    pub fn trace_inner(&self, other: &SymMatrix) -> f64 {
        assert_eq!(self.dim, other.dim);
        let mut s = 0.0;
        for i in 0..self.dim {
            s += self.get(i, i) * other.get(i, i);
            for j in i + 1..self.dim {
                s += 2.0 * self.get(i, j) * other.get(i, j);
            }
        }
        s
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `vᵀ M v`
    pub fn quad_form(&self, v: &[f64]) -> f64 {
        assert_eq!(v.len(), self.dim);
        let mut s = 0.0;
        for i in 0..self.dim {
            s += self.get(i, i) * v[i] * v[i];
            for j in i + 1..self.dim {
                s += 2.0 * self.get(i, j) * v[i] * v[j];
            }
        }
        s
    }

    pub fn scaled(&self, a: f64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|v| a * v).collect(),
        }
    }

    pub fn add(&self, other: &SymMatrix) -> Self {
        assert_eq!(self.dim, other.dim);
        Self {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}
