use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::cut::{Certificate, Cut, CutMode};
use crate::error::{Error, Result};
use crate::model::{EVector, SupportSet};

/// Serialized form of one cut: nonzero coefficients by canonical pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CutRecord {
    pub mode: CutMode,
    pub pairs: Vec<(usize, usize)>,
    pub values: Vec<f64>,
    pub violation: f64,
}

impl From<&Cut> for CutRecord {
    fn from(cut: &Cut) -> Self {
        let (pairs, values) = cut.coeffs.iter().filter(|(_, v)| *v != 0.0).unzip();
        CutRecord {
            mode: cut.mode,
            pairs,
            values,
            violation: cut.violation,
        }
    }
}

pub fn write_cut_pool(cuts: &[Cut]) -> Result<String> {
    let records: Vec<CutRecord> = cuts.iter().map(CutRecord::from).collect();
    Ok(serde_json::to_string_pretty(&records)?)
}

/// Loads cuts onto `support`; every listed pair must belong to it.
pub fn read_cut_pool(text: &str, support: &Arc<SupportSet>) -> Result<Vec<Cut>> {
    let records: Vec<CutRecord> = serde_json::from_str(text)?;
    records
        .into_iter()
        .enumerate()
        .map(|(r, rec)| {
            if rec.pairs.len() != rec.values.len() {
                return Err(Error::Schema(format!(
                    "cut {r}: {} pairs but {} values",
                    rec.pairs.len(),
                    rec.values.len()
                )));
            }
            let mut coeffs = EVector::zeros(support.clone());
            for (&(i, j), &v) in rec.pairs.iter().zip(&rec.values) {
                if !v.is_finite() {
                    return Err(Error::Schema(format!("cut {r}: non-finite coefficient")));
                }
                coeffs.set(i, j, v).map_err(|_| {
                    Error::Schema(format!("cut {r}: pair ({i},{j}) is outside the support"))
                })?;
            }
            Ok(Cut {
                coeffs,
                mode: rec.mode,
                violation: rec.violation,
                certificate: Certificate::None,
            })
        })
        .collect()
}
