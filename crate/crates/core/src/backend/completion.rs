use super::{ConicBackend, SolveLimits};
use crate::error::{Error, Result};
use crate::model::{EVector, SymMatrix};
use crate::relax::{ConicProblem, PsdBlock, PsdEntry, VariableSpace};

/// Outcome of `min s  s.t.  Y + sI ⪰ 0, Y_E = Z`.
#[derive(Debug, Clone, PartialEq)]
pub struct CompletionGap {
    /// Optimal shift `s*`; a PSD completion exists iff `s* <= 0` (up to tolerance).
    pub shift: f64,
    /// The minimizing `Y`.
    pub matrix: SymMatrix,
}

/// Threshold on `s*` below which a completion is declared to exist.
pub const COMPLETION_TOL: f64 = 1e-8;

/// Solves the shifted completion problem. The shift is bounded below by `-1`
/// so that supports with missing diagonal entries stay bounded.
pub fn completion_gap(
    z: &EVector,
    backend: &dyn ConicBackend,
    limits: &SolveLimits,
) -> Result<CompletionGap> {
    let support = z.support();
    let dim = support.dim();
    let free = support.complement();
    let mut problem = ConicProblem::new(VariableSpace::Auxiliary, free.len());
    let shift = problem.add_var(1.0, -1.0, f64::INFINITY);

    let mut entries = Vec::with_capacity(dim * (dim + 1) / 2);
    for ((i, j), v) in z.iter() {
        let terms = if i == j {
            vec![(shift, 1.0)]
        } else {
            Vec::new()
        };
        entries.push(PsdEntry {
            row: i,
            col: j,
            terms,
            constant: v,
        });
    }
    for (k, &(i, j)) in free.iter().enumerate() {
        let mut terms = vec![(k, 1.0)];
        if i == j {
            terms.push((shift, 1.0));
        }
        entries.push(PsdEntry {
            row: i,
            col: j,
            terms,
            constant: 0.0,
        });
    }
    problem.blocks.push(PsdBlock { dim, entries });

    let result = backend.solve(&problem, limits);
    let s = result.optimal_value()?;
    let mut y = SymMatrix::zeros(dim);
    for ((i, j), v) in z.iter() {
        y.set(i, j, v);
    }
    for (k, &(i, j)) in free.iter().enumerate() {
        y.set(i, j, result.primal[k]);
    }
    if !s.is_finite() {
        return Err(Error::Solver {
            status: "numerical_error".into(),
            detail: "non-finite shift".into(),
        });
    }
    Ok(CompletionGap {
        shift: s,
        matrix: y,
    })
}

/// A PSD matrix `Y` with `Y_E = Z`, if one exists.
pub fn complete_to_psd(z: &EVector, backend: &dyn ConicBackend) -> Result<Option<SymMatrix>> {
    let gap = completion_gap(z, backend, &SolveLimits::default())?;
    Ok((gap.shift <= COMPLETION_TOL).then_some(gap.matrix))
}
