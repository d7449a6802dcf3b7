//! Heterogeneous sensor fusion with Gaussian copulas.
//!
//! Marginals are fitted per sensor ([`fit_empirical_marginal`] or a
//! parametric Gaussian), coupled by a [`CopulaModel`], and compared with a
//! likelihood-ratio test in [`fuse_detect`].

mod fusion;
mod gaussian;
mod marginal;
pub mod normal;

pub use fusion::{fuse_detect, joint_pdf, FusionDecision, Hypothesis, JointModel};
pub use gaussian::{copula_density, fit_gaussian_copula, CopulaModel, LOADING_STEPS, MIN_EIGENVALUE};
pub use marginal::{fit_empirical_marginal, Bandwidth, EmpiricalMarginal, MarginalModel};
