use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sparse symmetric matrix stored as canonical upper-triangular triplets.
///
/// An entry `(i, j, v)` with `i < j` stands for both `Q[i][j]` and `Q[j][i]`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SparseSym {
    entries: Vec<(usize, usize, f64)>,
}

impl SparseSym {
    pub fn new() -> Self {
        Self::default()
    }

    /// Entries addressing cells of a symmetric matrix. `(i, j)` and `(j, i)`
    /// name the same cell; repeated cells are summed and zeros dropped.
    pub fn from_symmetric_entries(entries: impl IntoIterator<Item = (usize, usize, f64)>) -> Self {
        let mut v: Vec<(usize, usize, f64)> = entries
            .into_iter()
            .map(|(i, j, x)| if i <= j { (i, j, x) } else { (j, i, x) })
            .collect();
        v.sort_by_key(|a| (a.0, a.1));
        let mut out: Vec<(usize, usize, f64)> = Vec::with_capacity(v.len());
        for (i, j, x) in v {
            match out.last_mut() {
                Some(last) if last.0 == i && last.1 == j => last.2 += x,
                _ => out.push((i, j, x)),
            }
        }
        out.retain(|e| e.2 != 0.0);
        Self { entries: out }
    }

    /// Entries of a possibly nonsymmetric matrix `A`; stores `(A + Aᵀ)/2`,
    /// which defines the same quadratic form.
    pub fn from_general_entries(entries: impl IntoIterator<Item = (usize, usize, f64)>) -> Self {
        Self::from_symmetric_entries(entries.into_iter().map(|(i, j, x)| {
            if i == j {
                (i, j, x)
            } else {
                (i, j, 0.5 * x)
            }
        }))
    }

    pub fn entries(&self) -> &[(usize, usize, f64)] {
        &self.entries
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let key = if i <= j { (i, j) } else { (j, i) };
        self.entries
            .binary_search_by(|e| (e.0, e.1).cmp(&key))
            .map(|k| self.entries[k].2)
            .unwrap_or(0.0)
    }

    /// `xᵀ Q x`
    pub fn quad_form(&self, x: &[f64]) -> f64 {
        self.entries
            .iter()
            .map(|&(i, j, v)| {
                if i == j {
                    v * x[i] * x[i]
                } else {
                    2.0 * v * x[i] * x[j]
                }
            })
            .sum()
    }

    pub fn scaled(&self, a: f64) -> Self {
        Self::from_symmetric_entries(self.entries.iter().map(|&(i, j, v)| (i, j, a * v)))
    }
}

/// `xᵀ Q x + cᵀ x + d`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadraticFunction {
    pub q: SparseSym,
    pub c: Vec<f64>,
    pub d: f64,
}

impl QuadraticFunction {
    pub fn new(q: SparseSym, c: Vec<f64>, d: f64) -> Self {
        Self { q, c, d }
    }

    pub fn zero(n: usize) -> Self {
        Self {
            q: SparseSym::new(),
            c: vec![0.0; n],
            d: 0.0,
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.q.quad_form(x) + self.c.iter().zip(x).map(|(c, x)| c * x).sum::<f64>() + self.d
    }

    pub fn negated(&self) -> Self {
        Self {
            q: self.q.scaled(-1.0),
            c: self.c.iter().map(|v| -v).collect(),
            d: -self.d,
        }
    }

    /// Coefficients of the lifted form `Q • Y` on the `(n+1)`-dimensional
    /// matrix: `(0,0) = d`, `(0,j) = c_j / 2`, `(i,j) = Q_ij`, indices shifted by one.
    pub fn lifted_entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        std::iter::once((0, 0, self.d))
            .chain(self.c.iter().enumerate().map(|(j, &c)| (0, j + 1, 0.5 * c)))
            .chain(self.q.entries().iter().map(|&(i, j, v)| (i + 1, j + 1, v)))
            .filter(|e| e.2 != 0.0)
    }
}

/// A box-constrained QCQP
///
/// ```text
/// min  f_0(x)   s.t.  f_k(x) <= 0  (k = 1..m),   lower <= x <= upper
/// ```
/// with `f_k(x) = xᵀ Q_k x + c_kᵀ x + d_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct QcqpInstance {
    name: String,
    n: usize,
    objective: QuadraticFunction,
    constraints: Vec<QuadraticFunction>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    nonneg: bool,
}

impl QcqpInstance {
    pub fn new(
        name: impl Into<String>,
        objective: QuadraticFunction,
        constraints: Vec<QuadraticFunction>,
        lower: Vec<f64>,
        upper: Vec<f64>,
    ) -> Result<Self> {
        let n = lower.len();
        let bad = |msg: String| Err(Error::InvalidInstance(msg));
        if n == 0 {
            return bad("instance has no variables".into());
        }
        if upper.len() != n {
            return bad(format!("upper bound length {} != {n}", upper.len()));
        }
        for i in 0..n {
            if !lower[i].is_finite() || !upper[i].is_finite() {
                return bad(format!("variable {i} has an unbounded or non-finite bound"));
            }
            if lower[i] > upper[i] {
                return bad(format!(
                    "variable {i} has lower bound {} > upper bound {}",
                    lower[i], upper[i]
                ));
            }
        }
        for (k, f) in std::iter::once(&objective).chain(&constraints).enumerate() {
            if f.c.len() != n {
                return bad(format!(
                    "function {k}: linear part has length {} != {n}",
                    f.c.len()
                ));
            }
            if !f.d.is_finite() || f.c.iter().any(|v| !v.is_finite()) {
                return bad(format!("function {k}: non-finite coefficient"));
            }
            for &(i, j, v) in f.q.entries() {
                if j >= n {
                    return bad(format!(
                        "function {k}: quadratic index ({i},{j}) out of range"
                    ));
                }
                if !v.is_finite() {
                    return bad(format!("function {k}: non-finite coefficient at ({i},{j})"));
                }
            }
        }
        let nonneg = lower.iter().all(|&l| l >= 0.0);
        Ok(Self {
            name: name.into(),
            n,
            objective,
            constraints,
            lower,
            upper,
            nonneg,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.constraints.len()
    }

    pub fn objective(&self) -> &QuadraticFunction {
        &self.objective
    }

    pub fn constraints(&self) -> &[QuadraticFunction] {
        &self.constraints
    }

    /// Objective followed by the constraints (`k = 0..=m`).
    pub fn functions(&self) -> impl Iterator<Item = &QuadraticFunction> {
        std::iter::once(&self.objective).chain(&self.constraints)
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    /// True iff every lower bound is nonnegative.
    pub fn nonneg(&self) -> bool {
        self.nonneg
    }

    pub fn with_bounds(&self, lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        Self::new(
            self.name.clone(),
            self.objective.clone(),
            self.constraints.clone(),
            lower,
            upper,
        )
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.objective.eval(x)
    }

    /// Largest constraint value `max_k f_k(x)`, or `-inf` without constraints.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        self.constraints
            .iter()
            .map(|f| f.eval(x))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn in_box(&self, x: &[f64]) -> bool {
        x.iter()
            .zip(&self.lower)
            .zip(&self.upper)
            .all(|((x, l), u)| *l <= *x && *x <= *u)
    }

    pub fn is_feasible(&self, x: &[f64], tol: f64) -> bool {
        self.in_box(x) && self.max_violation(x) <= tol
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_var(q: f64) -> QcqpInstance {
        QcqpInstance::new(
            "t",
            QuadraticFunction::new(
                SparseSym::from_symmetric_entries([(0, 0, q)]),
                vec![0.0],
                0.0,
            ),
            vec![],
            vec![0.0],
            vec![1.0],
        )
        .unwrap()
    }

    #[test]
    fn symmetric_entries_merge_mirrored_cells() {
        let q = SparseSym::from_symmetric_entries([(1, 0, 2.0), (0, 1, 1.0), (2, 2, 0.0)]);
        assert_eq!(q.entries(), &[(0, 1, 3.0)]);
        assert_eq!(q.get(1, 0), 3.0);
    }

    #[test]
    fn general_entries_are_symmetrized() {
        let q = SparseSym::from_general_entries([(0, 1, 4.0), (1, 0, 2.0)]);
        assert_eq!(q.get(0, 1), 3.0);
        let x = [1.5, -2.0];
        // xᵀAx with A = [[0,4],[2,0]]
        assert_eq!(q.quad_form(&x), 6.0 * 1.5 * -2.0);
    }

    #[test]
    fn rejects_unbounded_and_inverted_bounds() {
        let f = QuadraticFunction::zero(1);
        assert!(QcqpInstance::new("a", f.clone(), vec![], vec![0.0], vec![f64::INFINITY]).is_err());
        assert!(QcqpInstance::new("b", f, vec![], vec![1.0], vec![0.0]).is_err());
    }

    #[test]
    fn nonneg_flag_follows_lower_bounds() {
        assert!(one_var(1.0).nonneg());
        let f = QuadraticFunction::zero(1);
        let inst = QcqpInstance::new("c", f, vec![], vec![-1.0], vec![1.0]).unwrap();
        assert!(!inst.nonneg());
    }

    #[test]
    fn lifted_entries_reproduce_function_value() {
        let f = QuadraticFunction::new(
            SparseSym::from_symmetric_entries([(0, 0, 2.0), (0, 1, -3.0)]),
            vec![1.0, 5.0],
            -0.5,
        );
        let x = [0.3, 0.7];
        let y = crate::model::SymMatrix::lifted(&x);
        let lifted: f64 = f
            .lifted_entries()
            .map(|(i, j, v)| {
                if i == j {
                    v * y.get(i, j)
                } else {
                    2.0 * v * y.get(i, j)
                }
            })
            .sum();
        assert!((lifted - f.eval(&x)).abs() < 1e-14);
    }
}
