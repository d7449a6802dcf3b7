//! Low-rank recovery: PCA denoising, robust PCA and masked completion with
//! sparse corruption.
//!
//! The constrained problems are solved in augmented-Lagrangian form. The
//! noise level never needs to be specified; the relative-residual stopping
//! tolerance plays its role. Robust PCA and the masked variant share one
//! engine, [`solve_ialm`].

mod ialm;

pub use ialm::solve_ialm;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{svt, Mask, Matrix};

/// Singular values above this fraction of σ₁ count towards the rank estimate.
pub const RANK_REL_TOL: f64 = 1e-8;
/// Entries of the sparse component above this magnitude count as anomalies.
pub const SPARSITY_THRESHOLD: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Initial penalty; `None` uses `1.25 / σ₁(P_Ω(Y))`.
    pub mu0: Option<f64>,
    /// Penalty growth factor per iteration, > 1.
    pub rho: f64,
    /// Penalty cap; `None` uses `1e7 · mu0`.
    pub mu_max: Option<f64>,
    /// Relative residual at which iteration stops.
    pub tol: f64,
    pub max_iters: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            mu0: None,
            rho: 1.5,
            mu_max: None,
            tol: 1e-7,
            max_iters: 1000,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidArgument(msg));
        if let Some(mu0) = self.mu0 {
            if !(mu0 > 0.0) || !mu0.is_finite() {
                return bad(format!("mu0 must be positive, got {mu0}"));
            }
        }
        if let Some(mu_max) = self.mu_max {
            if !(mu_max > 0.0) {
                return bad(format!("mu_max must be positive, got {mu_max}"));
            }
            if let Some(mu0) = self.mu0 {
                if mu0 > mu_max {
                    return bad(format!("mu0 ({mu0}) exceeds mu_max ({mu_max})"));
                }
            }
        }
        if !(self.rho > 1.0) || !self.rho.is_finite() {
            return bad(format!("rho must exceed 1, got {}", self.rho));
        }
        if !(self.tol >= 0.0 && self.tol < 1.0) {
            return bad(format!("tol must lie in [0, 1), got {}", self.tol));
        }
        if self.max_iters == 0 {
            return bad("max_iters must be positive".into());
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct RecoveryProblem {
    pub y: Matrix,
    /// Observed entries; `None` means fully observed.
    pub mask: Option<Mask>,
    /// Sparsity weight; `None` uses [`default_lambda`].
    pub lambda: Option<f64>,
    pub config: SolverConfig,
}

impl RecoveryProblem {
    pub fn new(y: Matrix) -> Self {
        Self {
            y,
            mask: None,
            lambda: None,
            config: SolverConfig::default(),
        }
    }

    pub fn with_mask(mut self, mask: Mask) -> Self {
        self.mask = Some(mask);
        self
    }

    pub fn with_lambda(mut self, lambda: f64) -> Self {
        self.lambda = Some(lambda);
        self
    }

    pub fn with_config(mut self, config: SolverConfig) -> Self {
        self.config = config;
        self
    }

    pub fn resolved_lambda(&self) -> Result<f64> {
        match self.lambda {
            None => Ok(default_lambda(self.y.rows(), self.y.cols())),
            Some(l) if l > 0.0 && !l.is_nan() => Ok(l),
            Some(l) => Err(Error::InvalidArgument(format!("lambda must be positive, got {l}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RecoveryResult {
    /// Low-rank estimate.
    pub x: Matrix,
    /// Sparse estimate, zero outside the observed set.
    pub a: Matrix,
    pub iterations: usize,
    /// Stopping-criterion value at exit.
    pub final_residual: f64,
    pub residual_history: Vec<f64>,
    pub converged: bool,
    pub rank_estimate: usize,
    pub sparsity_estimate: usize,
    pub lambda: f64,
}

impl RecoveryResult {
    /// `‖X‖_* + λ‖A‖₁` at the returned point.
    pub fn objective(&self) -> Result<f64> {
        Ok(self.x.nuclear_norm()? + self.lambda * self.a.elementwise_l1())
    }
}

/// `λ = 1/√max(M, N)`.
pub fn default_lambda(rows: usize, cols: usize) -> f64 {
    1.0 / (rows.max(cols) as f64).sqrt()
}

/// Minimizer of `‖X‖_* + (1/2τ)‖Y − X‖_F²`, i.e. `svt(Y, τ)`.
pub fn pca_denoise(y: &Matrix, tau: f64) -> Result<Matrix> {
    if !(tau > 0.0) {
        return Err(Error::InvalidArgument(format!("tau must be positive, got {tau}")));
    }
    svt(y, tau)
}

/// Low-rank plus sparse decomposition of a fully observed matrix.
pub fn rpca(problem: &RecoveryProblem) -> Result<RecoveryResult> {
    if problem.mask.is_some() {
        return Err(Error::InvalidArgument("rpca expects a fully observed problem; use masked_rpca".into()));
    }
    solve_ialm(problem)
}

/// Joint completion and sparse recovery from the entries in the mask.
pub fn masked_rpca(problem: &RecoveryProblem) -> Result<RecoveryResult> {
    match &problem.mask {
        None => Err(Error::InvalidArgument("masked_rpca needs a mask".into())),
        Some(m) if m.is_empty() => Err(Error::InvalidArgument("mask has no observed entries".into())),
        Some(_) => solve_ialm(problem),
    }
}
