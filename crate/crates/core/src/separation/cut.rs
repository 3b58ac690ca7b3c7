use serde::{Deserialize, Serialize};

use crate::model::{EVector, SymMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum CutMode {
    Epsd,
    Ednn,
    Dense,
}

impl CutMode {
    pub fn as_str(self) -> &'static str {
        match self {
            CutMode::Epsd => "EPSD",
            CutMode::Ednn => "EDNN",
            CutMode::Dense => "DENSE",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Certificate {
    /// Optimal matrix of the projection SDP (`C̄`).
    Matrix(SymMatrix),
    /// Unit eigenvector `v` of a negative eigenvalue; the cut is `vvᵀ`.
    Eigenvector(Vec<f64>),
    /// Loaded from a cut file; nothing to check against.
    None,
}

/// A linear inequality `<C, Z> >= 0` valid for the PSD (or DNN) cone.
#[derive(Debug, Clone, PartialEq)]
pub struct Cut {
    pub coeffs: EVector,
    pub mode: CutMode,
    /// `<C, Ẑ>` at the separated point.
    pub violation: f64,
    pub certificate: Certificate,
}

impl Cut {
    /// `<C, Z>`; `z` must live on the cut's support.
    pub fn evaluate(&self, z: &EVector) -> crate::Result<f64> {
        crate::model::evec_inner(&self.coeffs, z)
    }
}
