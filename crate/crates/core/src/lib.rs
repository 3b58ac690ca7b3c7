//! Sparse linear outer approximations of the PSD and doubly nonnegative cones
//! for QCQP relaxations.
//!
//! The crate lifts a QCQP `min f_0(x) s.t. f_k(x) <= 0, l <= x <= u` to the
//! matrix `Y = [1 xᵀ; x X]`, builds the Shor SDP relaxation, and replaces the
//! PSD constraint by linear cuts `<C, Z> >= 0` whose coefficients live only on
//! the support `E` of the problem data. Cuts come from a small "projection"
//! SDP; iterating LP solve and separation recovers the SDP bound with an LP
//! that has only `|E|` columns.
//!
//! ```
//! use std::sync::Arc;
//! use sparsecut::model::{embed_from_e, project_to_e, SupportSet, SymMatrix};
//! use sparsecut::backend::{default_backend, eigendecomp};
//! use sparsecut::separation::Separator;
//!
//! let ones = SymMatrix::from_fn(3, |_, _| 1.0);
//! let e = Arc::new(SupportSet::from_pairs(3, [(0, 0), (0, 2), (1, 1), (1, 2), (2, 2)]));
//! let z = project_to_e(&ones, &e).unwrap();
//!
//! // the zero-filled matrix is indefinite ...
//! let lowest = eigendecomp(&embed_from_e(&z)).last().unwrap().value;
//! assert!(lowest < -0.4);
//!
//! // ... but Z itself has a PSD completion, so no E-PSD cut separates it
//! let backend = default_backend();
//! let sep = Separator::new(backend.as_ref()).separate_epsd(&z).unwrap();
//! assert!(!sep.is_violated());
//! ```

extern crate openblas_src;

pub mod backend;
pub mod bench;
pub mod bnb;
pub mod cutplane;
mod error;
pub mod instances;
pub mod model;
pub mod relax;
pub mod separation;

pub use error::{Error, Result};
