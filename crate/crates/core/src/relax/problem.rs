use std::fmt::Write as _;
use std::sync::Arc;

use crate::model::SupportSet;

/// What the coordinates of a [`ConicProblem`] stand for.
#[derive(Debug, Clone, PartialEq)]
pub enum VariableSpace {
    /// One coordinate per canonical pair of the support, in the support's order.
    /// A full support set gives the dense `(n+1)(n+2)/2`-coordinate space.
    Pairs(Arc<SupportSet>),
    /// Problem-specific coordinates (separation and completion models).
    Auxiliary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowSense {
    Le,
    Eq,
    Ge,
}

/// What produced a row; used for diagnostics, export, and cut bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowKind {
    Homogenization,
    Box,
    Quadratic(usize),
    McCormick,
    Cut(usize),
    Normalization,
    Other,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearRow {
    pub terms: Vec<(usize, f64)>,
    pub sense: RowSense,
    pub rhs: f64,
    pub kind: RowKind,
}

impl LinearRow {
    pub fn activity(&self, x: &[f64]) -> f64 {
        self.terms.iter().map(|&(k, a)| a * x[k]).sum()
    }

    /// Amount by which `x` violates the row (0 when satisfied).
    pub fn violation(&self, x: &[f64]) -> f64 {
        let a = self.activity(x);
        match self.sense {
            RowSense::Le => (a - self.rhs).max(0.0),
            RowSense::Ge => (self.rhs - a).max(0.0),
            RowSense::Eq => (a - self.rhs).abs(),
        }
    }
}

/// One entry `M[row][col] = constant + Σ coeff·x[var]` of a PSD block.
#[derive(Debug, Clone, PartialEq)]
pub struct PsdEntry {
    pub row: usize,
    pub col: usize,
    pub terms: Vec<(usize, f64)>,
    pub constant: f64,
}

/// A symmetric matrix, affine in the variables, constrained to be PSD.
/// Entries not listed are zero; `row <= col` is expected.
#[derive(Debug, Clone, PartialEq)]
pub struct PsdBlock {
    pub dim: usize,
    pub entries: Vec<PsdEntry>,
}

impl PsdBlock {
    /// Block whose `(i, j)` entry is the variable at `coordinate(i, j)`, or zero.
    pub fn from_coordinates(
        dim: usize,
        coordinate: impl Fn(usize, usize) -> Option<usize>,
    ) -> Self {
        let mut entries = Vec::new();
        for j in 0..dim {
            for i in 0..=j {
                if let Some(k) = coordinate(i, j) {
                    entries.push(PsdEntry {
                        row: i,
                        col: j,
                        terms: vec![(k, 1.0)],
                        constant: 0.0,
                    });
                }
            }
        }
        Self { dim, entries }
    }

    /// Evaluates the block at `x` as a dense symmetric matrix.
    pub fn evaluate(&self, x: &[f64]) -> crate::model::SymMatrix {
        let mut m = crate::model::SymMatrix::zeros(self.dim);
        for e in &self.entries {
            let v = e.constant + e.terms.iter().map(|&(k, a)| a * x[k]).sum::<f64>();
            m.set(e.row, e.col, m.get(e.row, e.col) + v);
        }
        m
    }
}

/// Backend-neutral conic program: minimize `objectiveᵀ x + offset` subject to
/// linear rows, per-coordinate bounds, and PSD blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct ConicProblem {
    pub space: VariableSpace,
    pub objective: Vec<f64>,
    pub objective_offset: f64,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub rows: Vec<LinearRow>,
    pub blocks: Vec<PsdBlock>,
}

impl ConicProblem {
    pub fn new(space: VariableSpace, num_vars: usize) -> Self {
        Self {
            space,
            objective: vec![0.0; num_vars],
            objective_offset: 0.0,
            lower: vec![f64::NEG_INFINITY; num_vars],
            upper: vec![f64::INFINITY; num_vars],
            rows: Vec::new(),
            blocks: Vec::new(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn add_var(&mut self, cost: f64, lower: f64, upper: f64) -> usize {
        self.objective.push(cost);
        self.lower.push(lower);
        self.upper.push(upper);
        self.objective.len() - 1
    }

    pub fn add_row(&mut self, terms: Vec<(usize, f64)>, sense: RowSense, rhs: f64, kind: RowKind) {
        self.rows.push(LinearRow {
            terms,
            sense,
            rhs,
            kind,
        });
    }

    pub fn is_linear(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.objective
            .iter()
            .zip(x)
            .map(|(c, x)| c * x)
            .sum::<f64>()
            + self.objective_offset
    }

    /// Checks the structural invariants: every reference in range, blocks
    /// upper-triangular, bounds ordered.
    pub fn validate(&self) -> Result<(), String> {
        let n = self.num_vars();
        if self.lower.len() != n || self.upper.len() != n {
            return Err("bound vectors do not match the variable count".into());
        }
        if let VariableSpace::Pairs(s) = &self.space {
            if s.len() != n {
                return Err(format!(
                    "space has {} pairs but problem has {n} variables",
                    s.len()
                ));
            }
        }
        for (k, (l, u)) in self.lower.iter().zip(&self.upper).enumerate() {
            if l > u || l.is_nan() || u.is_nan() {
                return Err(format!("variable {k} has bounds [{l}, {u}]"));
            }
        }
        for (r, row) in self.rows.iter().enumerate() {
            if let Some(&(k, _)) = row.terms.iter().find(|t| t.0 >= n) {
                return Err(format!("row {r} references variable {k}"));
            }
            if !row.rhs.is_finite() || row.terms.iter().any(|t| !t.1.is_finite()) {
                return Err(format!("row {r} has a non-finite coefficient"));
            }
        }
        for (b, block) in self.blocks.iter().enumerate() {
            for e in &block.entries {
                if e.row > e.col || e.col >= block.dim {
                    return Err(format!(
                        "block {b} entry ({}, {}) is not upper-triangular in range",
                        e.row, e.col
                    ));
                }
                if e.terms.iter().any(|t| t.0 >= n) {
                    return Err(format!("block {b} references an undeclared variable"));
                }
            }
        }
        Ok(())
    }

    /// Largest row or bound violation at `x`.
    pub fn max_row_violation(&self, x: &[f64]) -> f64 {
        let rows = self.rows.iter().map(|r| r.violation(x)).fold(0.0, f64::max);
        let bounds = x
            .iter()
            .zip(self.lower.iter().zip(&self.upper))
            .map(|(x, (l, u))| (l - x).max(x - u).max(0.0))
            .fold(0.0, f64::max);
        rows.max(bounds)
    }

    /// Plain-text dump of the problem.
    ///
    /// ```text
    /// conic v1
    /// vars <n>
    /// obj <offset> <c_0> ... <c_{n-1}>
    /// bound <k> <lower> <upper>          (only finite bounds)
    /// row <le|eq|ge> <rhs> <k>:<a> ...
    /// psd <dim>
    /// entry <i> <j> <constant> <k>:<a> ...
    /// end
    /// ```
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "conic v1");
        let _ = writeln!(s, "vars {}", self.num_vars());
        let _ = write!(s, "obj {}", self.objective_offset);
        for c in &self.objective {
            let _ = write!(s, " {c}");
        }
        s.push('\n');
        for (k, (l, u)) in self.lower.iter().zip(&self.upper).enumerate() {
            if l.is_finite() || u.is_finite() {
                let _ = writeln!(s, "bound {k} {l} {u}");
            }
        }
        for row in &self.rows {
            let sense = match row.sense {
                RowSense::Le => "le",
                RowSense::Eq => "eq",
                RowSense::Ge => "ge",
            };
            let _ = write!(s, "row {sense} {}", row.rhs);
            for (k, a) in &row.terms {
                let _ = write!(s, " {k}:{a}");
            }
            s.push('\n');
        }
        for block in &self.blocks {
            let _ = writeln!(s, "psd {}", block.dim);
            for e in &block.entries {
                let _ = write!(s, "entry {} {} {}", e.row, e.col, e.constant);
                for (k, a) in &e.terms {
                    let _ = write!(s, " {k}:{a}");
                }
                s.push('\n');
            }
            let _ = writeln!(s, "end");
        }
        s
    }
}
