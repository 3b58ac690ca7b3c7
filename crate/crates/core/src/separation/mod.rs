//! Cut generation: dense eigenvector cuts, sparse E-PSD and E-DNN cuts from
//! the projection SDP, and the blended separation point.

mod cut;
mod engine;
mod pool;

pub use cut::{Certificate, Cut, CutMode};
pub use engine::{
    blend_point, dense_eigen_cuts, dense_eigen_cuts_on, ednn_two_matrix_value, projection_problem,
    Separation, Separator, DEFAULT_ALPHA, TOL_EIGEN, TOL_VIOLATION,
};
pub use pool::{read_cut_pool, write_cut_pool, CutRecord};
