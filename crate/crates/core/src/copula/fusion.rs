//! Joint densities via Sklar factorization and likelihood-ratio fusion.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use super::gaussian::{fit_gaussian_copula, CopulaModel};
use super::marginal::{fit_empirical_marginal, Bandwidth, MarginalModel};
use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Marginals coupled by a Gaussian copula:
/// `f(z) = Π f_n(z_n) · c(F_1(z_1), …, F_N(z_N))`.
#[derive(Clone, Debug)]
pub struct JointModel {
    marginals: Vec<MarginalModel>,
    copula: CopulaModel,
}

impl JointModel {
    pub fn new(marginals: Vec<MarginalModel>, copula: CopulaModel) -> Result<Self> {
        if marginals.len() != copula.dim() {
            return Err(Error::dims(
                format!("{} marginals", copula.dim()),
                format!("{} marginals", marginals.len()),
            ));
        }
        Ok(Self { marginals, copula })
    }

    /// Product model: the same marginals under the independence copula.
    pub fn product(marginals: Vec<MarginalModel>) -> Self {
        let copula = CopulaModel::independence(marginals.len());
        Self { marginals, copula }
    }

    /// Fits empirical marginals per column of a K × N sample matrix and a
    /// Gaussian copula on the resulting rank scores.
    pub fn fit(samples: &Matrix, bandwidth: Bandwidth) -> Result<Self> {
        let (k, n) = samples.shape();
        let mut marginals = Vec::with_capacity(n);
        let mut scores = Vec::with_capacity(k * n);
        for j in 0..n {
            let column: Vec<f64> = (0..k).map(|i| samples[(i, j)]).collect();
            marginals.push(fit_empirical_marginal(&column, bandwidth)?);
        }
        for i in 0..k {
            for (j, m) in marginals.iter().enumerate() {
                scores.push(m.cdf(samples[(i, j)]));
            }
        }
        let uniform = Matrix::from_row_major(k, n, &scores)?;
        let copula = fit_gaussian_copula(&uniform)?;
        Self::new(marginals, copula)
    }

    pub fn dim(&self) -> usize {
        self.copula.dim()
    }

    pub fn marginals(&self) -> &[MarginalModel] {
        &self.marginals
    }

    pub fn copula(&self) -> &CopulaModel {
        &self.copula
    }

    pub fn pdf(&self, z: &[f64]) -> Result<f64> {
        joint_pdf(&self.marginals, &self.copula, z)
    }

    /// `ln f(z)`, `-∞` where some marginal density vanishes.
    pub fn ln_pdf(&self, z: &[f64]) -> Result<f64> {
        self.check_dim(z)?;
        let ln_product: f64 = self.marginals.iter().zip(z).map(|(m, &x)| m.ln_pdf(x)).sum();
        if ln_product == f64::NEG_INFINITY {
            return Ok(ln_product);
        }
        Ok(ln_product + self.ln_copula(z))
    }

    fn ln_copula(&self, z: &[f64]) -> f64 {
        let q = DVector::from_iterator(z.len(), self.marginals.iter().zip(z).map(|(m, &x)| m.normal_score(x)));
        self.copula.ln_density_scores(&q)
    }

    fn check_dim(&self, z: &[f64]) -> Result<()> {
        if z.len() != self.dim() {
            return Err(Error::dims(self.dim(), z.len()));
        }
        Ok(())
    }
}

/// `f(z) = f_p(z) · c(F(z))` for explicit marginals and copula.
pub fn joint_pdf(marginals: &[MarginalModel], copula: &CopulaModel, z: &[f64]) -> Result<f64> {
    if marginals.len() != copula.dim() || z.len() != copula.dim() {
        return Err(Error::dims(
            copula.dim(),
            format!("{} marginals / {} values", marginals.len(), z.len()),
        ));
    }
    let mut product = 1.0;
    for (m, &x) in marginals.iter().zip(z) {
        product *= m.pdf(x);
    }
    if product == 0.0 {
        return Ok(0.0);
    }
    let q = DVector::from_iterator(z.len(), marginals.iter().zip(z).map(|(m, &x)| m.normal_score(x)));
    Ok(product * copula.ln_density_scores(&q).exp())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Hypothesis {
    H0,
    H1,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FusionDecision {
    pub log_likelihood_ratio: f64,
    pub decision: Hypothesis,
}

/// Likelihood-ratio test between two joint models. Decides H1 iff
/// `ln f₁(z) − ln f₀(z) > threshold`; ties go to H0.
pub fn fuse_detect(h0: &JointModel, h1: &JointModel, z: &[f64], threshold: f64) -> Result<FusionDecision> {
    if h0.dim() != h1.dim() {
        return Err(Error::dims(h0.dim(), h1.dim()));
    }
    let l0 = h0.ln_pdf(z)?;
    let l1 = h1.ln_pdf(z)?;
    if l0 == f64::NEG_INFINITY && l1 == f64::NEG_INFINITY {
        return Err(Error::Undecidable);
    }
    let llr = l1 - l0;
    let decision = if llr > threshold { Hypothesis::H1 } else { Hypothesis::H0 };
    Ok(FusionDecision {
        log_likelihood_ratio: llr,
        decision,
    })
}
