use std::sync::Arc;

use super::mccormick::mccormick_rows;
use super::problem::{ConicProblem, PsdBlock, RowKind, RowSense, VariableSpace};
use crate::error::{Error, Result};
use crate::model::{build_support_set, lifted_coefficients, EVector, QcqpInstance, SupportSet};
use crate::separation::Cut;

/// Which pairs receive McCormick envelopes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum McCormickMode {
    Off,
    /// Pairs `(i, j)` of the support `E` with `1 <= i <= j`.
    #[default]
    Support,
    /// Every pair `1 <= i <= j <= n`.
    Full,
}

impl McCormickMode {
    pub fn pairs(self, instance: &QcqpInstance, support: &SupportSet) -> Vec<(usize, usize)> {
        let dim = instance.n() + 1;
        match self {
            McCormickMode::Off => Vec::new(),
            McCormickMode::Support => support
                .pairs()
                .iter()
                .copied()
                .filter(|p| p.0 >= 1)
                .collect(),
            McCormickMode::Full => (1..dim)
                .flat_map(|i| (i..dim).map(move |j| (i, j)))
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ShorOptions {
    pub mccormick: McCormickMode,
    /// Elementwise nonnegativity of `Y` (the doubly nonnegative variant).
    pub dnn: bool,
}

/// Rows shared by every relaxation: `Y_00 = 1`, box rows on `Y_0i`, the
/// lifted constraints `<Q^k, Y> <= 0`, and McCormick envelopes.
fn add_common_rows(
    problem: &mut ConicProblem,
    instance: &QcqpInstance,
    space: &Arc<SupportSet>,
    mccormick: McCormickMode,
    instance_support: &Arc<SupportSet>,
) -> Result<()> {
    let pos = |i: usize, j: usize| space.position(i, j).ok_or(Error::SupportMismatch);
    problem.add_row(
        vec![(pos(0, 0)?, 1.0)],
        RowSense::Eq,
        1.0,
        RowKind::Homogenization,
    );
    for i in 0..instance.n() {
        let k = pos(0, i + 1)?;
        problem.add_row(
            vec![(k, 1.0)],
            RowSense::Ge,
            instance.lower()[i],
            RowKind::Box,
        );
        problem.add_row(
            vec![(k, 1.0)],
            RowSense::Le,
            instance.upper()[i],
            RowKind::Box,
        );
    }

    let coeffs = lifted_coefficients(instance, instance_support);
    for (p, c) in coeffs[0].iter() {
        if p == (0, 0) {
            problem.objective_offset += c;
        } else if c != 0.0 {
            problem.objective[pos(p.0, p.1)?] += EVector::weight(p) * c;
        }
    }
    for (k, q) in coeffs.iter().enumerate().skip(1) {
        let mut terms = Vec::new();
        let mut rhs = 0.0;
        for (p, c) in q.iter() {
            if c == 0.0 {
                continue;
            }
            if p == (0, 0) {
                // Y_00 = 1, so the constant moves to the right-hand side
                rhs -= c;
            } else {
                terms.push((pos(p.0, p.1)?, EVector::weight(p) * c));
            }
        }
        problem.add_row(terms, RowSense::Le, rhs, RowKind::Quadratic(k));
    }
    let (lo, up) = (instance.lower(), instance.upper());
    for (i, j) in mccormick.pairs(instance, instance_support) {
        let env = mccormick_rows(i, j, (lo[i - 1], up[i - 1]), (lo[j - 1], up[j - 1]));
        let (xi, xj, x) = (pos(0, i)?, pos(0, j)?, pos(i, j)?);
        for r in env.rows {
            // X - a x_i - b x_j (>= | <=) c
            let mut terms = vec![(x, 1.0)];
            if xi == xj {
                terms.push((xi, -(r.slope_i + r.slope_j)));
            } else {
                terms.push((xi, -r.slope_i));
                terms.push((xj, -r.slope_j));
            }
            terms.retain(|t| t.1 != 0.0);
            let sense = if r.upper { RowSense::Le } else { RowSense::Ge };
            problem.add_row(terms, sense, r.intercept, RowKind::McCormick);
        }
    }
    Ok(())
}

/// Shor SDP relaxation over the full `(n+1) x (n+1)` matrix.
pub fn build_shor_sdp(instance: &QcqpInstance, options: ShorOptions) -> ConicProblem {
    let dim = instance.n() + 1;
    let space = Arc::new(SupportSet::full(dim));
    let e = Arc::new(build_support_set(instance));
    let mut problem = ConicProblem::new(VariableSpace::Pairs(space.clone()), space.len());
    add_common_rows(&mut problem, instance, &space, options.mccormick, &e)
        .expect("full space covers every pair");
    if options.dnn {
        problem.lower.iter_mut().for_each(|l| *l = 0.0);
    }
    problem
        .blocks
        .push(PsdBlock::from_coordinates(dim, |i, j| space.position(i, j)));
    problem
}

/// LP relaxation over the coordinates of `space` with the given cuts.
///
/// `space` is either the instance's `E` (sparse strategies) or the full pair
/// set (dense strategies). Every cut must live on `space`.
pub fn build_lp(
    instance: &QcqpInstance,
    space: &Arc<SupportSet>,
    cuts: &[Cut],
    mccormick: McCormickMode,
) -> Result<ConicProblem> {
    let e = Arc::new(build_support_set(instance));
    if space.dim() != e.dim() || e.pairs().iter().any(|&(i, j)| !space.contains(i, j)) {
        return Err(Error::SupportMismatch);
    }
    let mut problem = ConicProblem::new(VariableSpace::Pairs(space.clone()), space.len());
    add_common_rows(&mut problem, instance, space, mccormick, &e)?;
    for (c, cut) in cuts.iter().enumerate() {
        if cut.coeffs.support().as_ref() != space.as_ref() {
            return Err(Error::SupportMismatch);
        }
        let terms: Vec<(usize, f64)> = cut
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, (_, v))| *v != 0.0)
            .map(|(k, (p, v))| (k, EVector::weight(p) * v))
            .collect();
        problem.add_row(terms, RowSense::Ge, 0.0, RowKind::Cut(c));
    }
    Ok(problem)
}

/// LP relaxation in `E`-space: exactly `|E|` coordinates.
pub fn build_e_lp(
    instance: &QcqpInstance,
    cuts: &[Cut],
    mccormick: McCormickMode,
) -> Result<ConicProblem> {
    let e = Arc::new(build_support_set(instance));
    build_e_lp_on(instance, &e, cuts, mccormick)
}

/// As [`build_e_lp`] with a caller-held support (so cut supports compare by pointer).
pub fn build_e_lp_on(
    instance: &QcqpInstance,
    e: &Arc<SupportSet>,
    cuts: &[Cut],
    mccormick: McCormickMode,
) -> Result<ConicProblem> {
    if *e.as_ref() != build_support_set(instance) {
        return Err(Error::SupportMismatch);
    }
    build_lp(instance, e, cuts, mccormick)
}
