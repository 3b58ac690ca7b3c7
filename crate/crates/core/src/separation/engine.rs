use std::sync::Arc;

use super::cut::{Certificate, Cut, CutMode};
use crate::backend::{eigendecomp, min_eigenvalue, ConicBackend, SolveLimits};
use crate::error::{Error, Result};
use crate::model::{EVector, SupportSet, SymMatrix};
use crate::relax::{ConicProblem, PsdBlock, RowKind, RowSense, VariableSpace};

/// Default threshold on the normalized separation objective.
pub const TOL_VIOLATION: f64 = 1e-6;
/// Default relative threshold for eigenvector cuts.
pub const TOL_EIGEN: f64 = 1e-6;
/// Default blend weight for the accelerated scheme.
pub const DEFAULT_ALPHA: f64 = 0.001;

/// Result of one projection-SDP solve.
#[derive(Debug, Clone, PartialEq)]
pub enum Separation {
    Violated { cut: Cut, objective: f64 },
    NoViolation { objective: f64 },
}

impl Separation {
    pub fn objective(&self) -> f64 {
        match self {
            Separation::Violated { objective, .. } | Separation::NoViolation { objective } => {
                *objective
            }
        }
    }

    pub fn cut(&self) -> Option<&Cut> {
        match self {
            Separation::Violated { cut, .. } => Some(cut),
            Separation::NoViolation { .. } => None,
        }
    }

    pub fn into_cut(self) -> Option<Cut> {
        match self {
            Separation::Violated { cut, .. } => Some(cut),
            Separation::NoViolation { .. } => None,
        }
    }

    pub fn is_violated(&self) -> bool {
        matches!(self, Separation::Violated { .. })
    }
}

/// Sparse cut generator for points on a fixed support `E`.
#[derive(Clone, Copy)]
pub struct Separator<'a> {
    backend: &'a dyn ConicBackend,
    limits: SolveLimits,
    tol_violation: f64,
}

impl<'a> Separator<'a> {
    pub fn new(backend: &'a dyn ConicBackend) -> Self {
        Self {
            backend,
            limits: SolveLimits::default(),
            tol_violation: TOL_VIOLATION,
        }
    }

    pub fn with_tolerance(mut self, tol_violation: f64) -> Self {
        self.tol_violation = tol_violation;
        self
    }

    pub fn with_limits(mut self, limits: SolveLimits) -> Self {
        self.limits = limits;
        self
    }

    pub fn tolerance(&self) -> f64 {
        self.tol_violation
    }

    /// Most violated E-PSD cut: `min <C_E, Ẑ>` over `C ⪰ 0` supported on `E`
    /// with `tr C <= 1`.
    pub fn separate_epsd(&self, z_hat: &EVector) -> Result<Separation> {
        self.separate(z_hat, CutMode::Epsd)
    }

    /// Most violated E-DNN cut: as [`Self::separate_epsd`] but entries off `E`
    /// may be nonpositive instead of zero. Only valid for nonnegative instances.
    pub fn separate_ednn(&self, z_hat: &EVector, nonneg: bool) -> Result<Separation> {
        if !nonneg {
            return Err(Error::ModeViolation);
        }
        self.separate(z_hat, CutMode::Ednn)
    }

    fn separate(&self, z_hat: &EVector, mode: CutMode) -> Result<Separation> {
        let support = z_hat.support();
        let (problem, off_e) = projection_problem(z_hat, mode);
        let result = self.backend.solve(&problem, &self.limits);
        result.optimal_value()?;

        // C̄: solution on E, plus the nonpositive off-E part in DNN mode
        let mut cbar = SymMatrix::zeros(support.dim());
        for (k, &(i, j)) in support.pairs().iter().enumerate() {
            cbar.set(i, j, result.primal[k]);
        }
        for (k, &(i, j)) in off_e.iter().enumerate() {
            cbar.set(i, j, result.primal[support.len() + k].min(0.0));
        }
        // shift by the (tiny) negative eigenvalue left by the interior-point
        // tolerance so that the certificate is PSD and the cut strictly valid
        let lam = min_eigenvalue(&cbar);
        if lam < 0.0 {
            for i in 0..support.dim() {
                if support.contains(i, i) {
                    cbar.set(i, i, cbar.get(i, i) - lam);
                }
            }
        }
        let trace = cbar.trace();
        if trace > 1.0 {
            cbar = cbar.scaled(1.0 / trace);
        }
        let coeffs = EVector::from_fn(support.clone(), |i, j| cbar.get(i, j));
        let objective = crate::model::evec_inner(&coeffs, z_hat)?;
        if objective < -self.tol_violation {
            let cut = Cut {
                coeffs,
                mode,
                violation: objective,
                certificate: Certificate::Matrix(cbar),
            };
            Ok(Separation::Violated { cut, objective })
        } else {
            Ok(Separation::NoViolation { objective })
        }
    }
}

/// The projection SDP for `Ẑ`. Variables are the `E` coordinates of `C`
/// followed (DNN mode) by the off-`E` pairs, which are bounded above by zero.
pub fn projection_problem(z_hat: &EVector, mode: CutMode) -> (ConicProblem, Vec<(usize, usize)>) {
    let support = z_hat.support();
    let off_e = if mode == CutMode::Ednn {
        support.complement()
    } else {
        Vec::new()
    };
    let mut problem = ConicProblem::new(VariableSpace::Auxiliary, support.len());
    for (k, (p, v)) in z_hat.iter().enumerate() {
        problem.objective[k] = EVector::weight(p) * v;
    }
    for _ in &off_e {
        problem.add_var(0.0, f64::NEG_INFINITY, 0.0);
    }
    let diag: Vec<(usize, f64)> = support
        .pairs()
        .iter()
        .enumerate()
        .filter(|(_, p)| p.0 == p.1)
        .map(|(k, _)| (k, 1.0))
        .collect();
    problem.add_row(diag, RowSense::Le, 1.0, RowKind::Normalization);
    let n_e = support.len();
    problem
        .blocks
        .push(PsdBlock::from_coordinates(support.dim(), |i, j| {
            support
                .position(i, j)
                .or_else(|| off_e.binary_search(&(i, j)).ok().map(|k| n_e + k))
        }));
    (problem, off_e)
}

/// Optimal value of the two-matrix DNN separation model
///
/// ```text
/// min <A_E, Ẑ>  s.t.  A >= C (elementwise), C ⪰ 0, A_ij = 0 off E, tr A <= 1
/// ```
///
/// which is equivalent to the single-matrix E-DNN model when `Ẑ >= 0`.
pub fn ednn_two_matrix_value(z_hat: &EVector, backend: &dyn ConicBackend) -> Result<f64> {
    let support = z_hat.support();
    let dim = support.dim();
    let full = SupportSet::full(dim);
    let n_e = support.len();
    let mut problem = ConicProblem::new(VariableSpace::Auxiliary, n_e + full.len());
    for (k, (p, v)) in z_hat.iter().enumerate() {
        problem.objective[k] = EVector::weight(p) * v;
    }
    for (c, &(i, j)) in full.pairs().iter().enumerate() {
        let mut terms = vec![(n_e + c, -1.0)];
        if let Some(a) = support.position(i, j) {
            terms.push((a, 1.0));
        }
        problem.add_row(terms, RowSense::Ge, 0.0, RowKind::Other);
    }
    let diag: Vec<(usize, f64)> = support
        .pairs()
        .iter()
        .enumerate()
        .filter(|(_, p)| p.0 == p.1)
        .map(|(k, _)| (k, 1.0))
        .collect();
    problem.add_row(diag, RowSense::Le, 1.0, RowKind::Normalization);
    problem.blocks.push(PsdBlock::from_coordinates(dim, |i, j| {
        full.position(i, j).map(|c| n_e + c)
    }));
    backend
        .solve(&problem, &SolveLimits::default())
        .optimal_value()
}

/// One `vvᵀ` cut per eigenvalue of `Ŷ` below `-tol·‖Ŷ‖₂`.
pub fn dense_eigen_cuts(y_hat: &SymMatrix, tol: f64) -> Vec<Cut> {
    dense_eigen_cuts_on(y_hat, tol, &Arc::new(SupportSet::full(y_hat.dim())))
}

/// As [`dense_eigen_cuts`], with cut coefficients on the given full support.
pub fn dense_eigen_cuts_on(y_hat: &SymMatrix, tol: f64, full: &Arc<SupportSet>) -> Vec<Cut> {
    assert!(full.is_full() && full.dim() == y_hat.dim());
    let pairs = eigendecomp(y_hat);
    let norm = pairs.iter().map(|p| p.value.abs()).fold(0.0, f64::max);
    let threshold = -tol * norm;
    pairs
        .into_iter()
        .filter(|p| p.value < threshold)
        .map(|p| {
            let v = p.vector;
            let coeffs = EVector::from_fn(full.clone(), |i, j| v[i] * v[j]);
            Cut {
                coeffs,
                mode: CutMode::Dense,
                violation: p.value,
                certificate: Certificate::Eigenvector(v),
            }
        })
        .collect()
}

/// `α Ẑ_LP + (1 - α) (Y*)_E`
pub fn blend_point(z_lp: &EVector, y_sdp_e: &EVector, alpha: f64) -> Result<EVector> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidAlpha(alpha));
    }
    if !z_lp.same_support(y_sdp_e) {
        return Err(Error::SupportMismatch);
    }
    let values = z_lp
        .values()
        .iter()
        .zip(y_sdp_e.values())
        .map(|(a, b)| alpha * a + (1.0 - alpha) * b)
        .collect();
    EVector::from_values(z_lp.support().clone(), values)
}
