use nalgebra::{Cholesky, DVector};
use serde::{Deserialize, Serialize};

use super::{check_dims, gram, KernelSpec};
use crate::error::{Error, Result};

/// Dual-form kernel ridge model: `score(x) = Σ αᵢ k(xᵢ, x)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelModel {
    pub spec: KernelSpec,
    pub support_points: Vec<Vec<f64>>,
    pub coefficients: Vec<f64>,
    pub ridge: f64,
    /// Set when the Cholesky factorization failed and a least-squares solve was used.
    pub used_fallback: bool,
    /// `‖(G + ridge·I)α − labels‖` at training time.
    pub residual: f64,
}

impl KernelModel {
    pub fn predict(&self, x: &[f64]) -> Result<f64> {
        krr_predict(self, x)
    }

    /// Fraction of points whose score sign matches the label (zero counts as −1).
    pub fn accuracy(&self, points: &[Vec<f64>], labels: &[f64]) -> Result<f64> {
        let mut correct = 0usize;
        for (p, &y) in points.iter().zip(labels) {
            let s = self.predict(p)?;
            let predicted = if s > 0.0 { 1.0 } else { -1.0 };
            if predicted == y {
                correct += 1;
            }
        }
        Ok(correct as f64 / points.len() as f64)
    }
}

/// Kernel ridge regression on ±1 labels: solves `(G + ridge·I)α = labels`.
pub fn krr_train(spec: &KernelSpec, points: &[Vec<f64>], labels: &[f64], ridge: f64) -> Result<KernelModel> {
    if points.len() != labels.len() {
        return Err(Error::dims(format!("{} labels", points.len()), labels.len()));
    }
    if let Some(bad) = labels.iter().find(|&&y| y != 1.0 && y != -1.0) {
        return Err(Error::InvalidArgument(format!("labels must be +1 or -1, got {bad}")));
    }
    if !(ridge > 0.0) || !ridge.is_finite() {
        return Err(Error::InvalidArgument(format!("ridge must be positive, got {ridge}")));
    }
    let g = gram(spec, points)?;
    let n = points.len();
    let mut system = g.matrix().as_dmatrix().clone();
    for i in 0..n {
        system[(i, i)] += ridge;
    }
    let rhs = DVector::from_column_slice(labels);

    let (alpha, used_fallback) = match Cholesky::new(system.clone()) {
        Some(chol) => (chol.solve(&rhs), false),
        None => {
            let svd = system.clone().svd(true, true);
            let alpha = svd
                .solve(&rhs, f64::EPSILON * n as f64)
                .map_err(|e| Error::Solver(e.to_string()))?;
            (alpha, true)
        }
    };
    if alpha.iter().any(|a| !a.is_finite()) {
        return Err(Error::Solver("non-finite dual coefficients".into()));
    }
    let residual = (&system * &alpha - &rhs).norm();
    Ok(KernelModel {
        spec: *spec,
        support_points: points.to_vec(),
        coefficients: alpha.iter().copied().collect(),
        ridge,
        used_fallback,
        residual,
    })
}

pub fn krr_predict(model: &KernelModel, x: &[f64]) -> Result<f64> {
    let dim = check_dims(&model.support_points)?;
    if x.len() != dim {
        return Err(Error::dims(dim, x.len()));
    }
    Ok(model
        .support_points
        .iter()
        .zip(&model.coefficients)
        .map(|(p, a)| a * model.spec.eval_unchecked(p, x))
        .sum())
}
