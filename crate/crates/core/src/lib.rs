//! Numerical analytics for heterogeneous, nonlinear, high-dimensional and
//! distributed sensing data.
//!
//! * [`copula`]: Gaussian-copula joint densities and likelihood-ratio fusion.
//! * [`kernel`]: kernels, Gram matrices and kernel ridge classification.
//! * [`lowrank`]: PCA denoising, robust PCA and masked completion.
//! * [`consensus`]: fusion-center and one-hop decentralized consensus ADMM.
//! * [`scenario`], [`metrics`], [`io`], [`report`]: seeded workloads,
//!   evaluation and file formats used by the command-line tool.

pub mod consensus;
pub mod copula;
pub mod error;
pub mod io;
pub mod kernel;
pub mod lowrank;
pub mod matrix;
pub mod metrics;
pub mod report;
pub mod scenario;

pub use error::{Error, Result};
pub use matrix::{
    elementwise_l1, frobenius, nuclear_norm, project_mask, shrink, svd, svt, Mask, Matrix, SvdResult,
};
