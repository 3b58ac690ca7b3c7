//! Relaxations of a QCQP: the Shor SDP, its doubly nonnegative variant, and
//! LP outer approximations over a chosen coordinate space.

mod builder;
mod mccormick;
mod problem;

pub use builder::{
    build_e_lp, build_e_lp_on, build_lp, build_shor_sdp, McCormickMode, ShorOptions,
};
pub use mccormick::{mccormick_rows, EnvelopeRow, McCormickRow};
pub use problem::{ConicProblem, LinearRow, PsdBlock, PsdEntry, RowKind, RowSense, VariableSpace};
