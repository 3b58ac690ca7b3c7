use std::sync::Arc;

use crate::backend::{ConicBackend, SolveLimits};
use crate::error::{Error, Result};
use crate::model::{build_support_set, embed_from_e, EVector, QcqpInstance, SupportSet, SymMatrix};
use crate::relax::{build_lp, build_shor_sdp, McCormickMode, ShorOptions};

/// Bounds a gap-closed value is measured against.
///
/// `z_mcc` is the `E`-space LP with McCormick rows on `E` and no cuts. The
/// SDP (and DNN) bounds carry the same McCormick rows.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceBounds {
    pub z_mcc: f64,
    pub z_sdp: f64,
    pub y_sdp: SymMatrix,
    pub t_sdp: f64,
    pub z_dnn: Option<f64>,
    pub y_dnn: Option<SymMatrix>,
    pub t_dnn: Option<f64>,
}

impl ReferenceBounds {
    /// `(z, Y*)` for the PSD (`dnn = false`) or DNN relaxation.
    pub fn target(&self, dnn: bool) -> Result<(f64, &SymMatrix)> {
        if !dnn {
            return Ok((self.z_sdp, &self.y_sdp));
        }
        match (self.z_dnn, self.y_dnn.as_ref()) {
            (Some(z), Some(y)) => Ok((z, y)),
            _ => Err(Error::Config("DNN reference bound was not computed".into())),
        }
    }

    pub fn time(&self, dnn: bool) -> f64 {
        if dnn {
            self.t_dnn.unwrap_or(f64::NAN)
        } else {
            self.t_sdp
        }
    }
}

fn solve_sdp(
    instance: &QcqpInstance,
    dnn: bool,
    backend: &dyn ConicBackend,
) -> Result<(f64, SymMatrix, f64)> {
    let problem = build_shor_sdp(
        instance,
        ShorOptions {
            mccormick: McCormickMode::Support,
            dnn,
        },
    );
    let result = backend.solve(&problem, &SolveLimits::default());
    let z = result.optimal_value()?;
    let full = Arc::new(SupportSet::full(instance.n() + 1));
    let y = embed_from_e(&EVector::from_values(full, result.primal)?);
    Ok((z, y, result.solve_time))
}

/// McCormick LP and Shor SDP bounds, plus the DNN bound when `with_dnn` is
/// set and the instance is nonnegative.
pub fn compute_reference(
    instance: &QcqpInstance,
    backend: &dyn ConicBackend,
    with_dnn: bool,
) -> Result<ReferenceBounds> {
    let e = Arc::new(build_support_set(instance));
    let lp = build_lp(instance, &e, &[], McCormickMode::Support)?;
    let z_mcc = backend
        .solve(&lp, &SolveLimits::default())
        .optimal_value()?;
    let (z_sdp, y_sdp, t_sdp) = solve_sdp(instance, false, backend)?;
    let (z_dnn, y_dnn, t_dnn) = if with_dnn && instance.nonneg() {
        let (z, y, t) = solve_sdp(instance, true, backend)?;
        (Some(z), Some(y), Some(t))
    } else {
        (None, None, None)
    };
    Ok(ReferenceBounds {
        z_mcc,
        z_sdp,
        y_sdp,
        t_sdp,
        z_dnn,
        y_dnn,
        t_dnn,
    })
}
