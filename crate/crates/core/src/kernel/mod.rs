//! Kernel evaluation, Gram matrices and kernel ridge classification.

mod gram;
mod krr;
pub mod linear;

pub use gram::{gram, GramMatrix};
pub use krr::{krr_predict, krr_train, KernelModel};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Kernel family. Projective kernels (`Linear`, `Polynomial`) depend on
/// `x·y`; the radial `Gaussian` kernel depends on `‖x − y‖`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum KernelSpec {
    Linear,
    /// `(x·y + offset)^degree`
    Polynomial { degree: u32, offset: f64 },
    /// `exp(−‖x − y‖² / (2σ²))`
    Gaussian { bandwidth: f64 },
}

impl KernelSpec {
    pub fn polynomial(degree: u32, offset: f64) -> Result<Self> {
        if degree < 1 || !(offset >= 0.0) || !offset.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "polynomial kernel needs degree >= 1 and offset >= 0, got ({degree}, {offset})"
            )));
        }
        Ok(KernelSpec::Polynomial { degree, offset })
    }

    pub fn gaussian(bandwidth: f64) -> Result<Self> {
        if !(bandwidth > 0.0) || !bandwidth.is_finite() {
            return Err(Error::InvalidArgument(format!("gaussian bandwidth must be positive, got {bandwidth}")));
        }
        Ok(KernelSpec::Gaussian { bandwidth })
    }

    /// Gaussian kernel with the median pairwise distance as bandwidth.
    pub fn gaussian_median(points: &[Vec<f64>]) -> Result<Self> {
        Self::gaussian(median_pairwise_distance(points)?)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            KernelSpec::Linear => Ok(()),
            KernelSpec::Polynomial { degree, offset } => Self::polynomial(degree, offset).map(|_| ()),
            KernelSpec::Gaussian { bandwidth } => Self::gaussian(bandwidth).map(|_| ()),
        }
    }

    #[inline]
    pub(crate) fn eval_unchecked(&self, x: &[f64], y: &[f64]) -> f64 {
        match *self {
            KernelSpec::Linear => dot(x, y),
            KernelSpec::Polynomial { degree, offset } => (dot(x, y) + offset).powi(degree as i32),
            KernelSpec::Gaussian { bandwidth } => {
                let d2: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
                (-d2 / (2.0 * bandwidth * bandwidth)).exp()
            }
        }
    }
}

/// `k(x, y)` for the given kernel.
pub fn kernel_eval(spec: &KernelSpec, x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::dims(x.len(), y.len()));
    }
    spec.validate()?;
    Ok(spec.eval_unchecked(x, y))
}

/// Explicit degree-2 monomial map `(x₁², √2·x₁x₂, x₂²)`, for which
/// `⟨Φ(x), Φ(y)⟩ = (x·y)²`.
pub fn feature_map_deg2(x: &[f64]) -> Result<[f64; 3]> {
    match *x {
        [a, b] => Ok([a * a, std::f64::consts::SQRT_2 * a * b, b * b]),
        _ => Err(Error::dims(2, x.len())),
    }
}

pub fn median_pairwise_distance(points: &[Vec<f64>]) -> Result<f64> {
    if points.len() < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            got: points.len(),
        });
    }
    check_dims(points)?;
    let mut d = Vec::with_capacity(points.len() * (points.len() - 1) / 2);
    for i in 0..points.len() {
        for j in 0..i {
            d.push(dot_diff(&points[i], &points[j]).sqrt());
        }
    }
    d.sort_by(f64::total_cmp);
    let mid = d.len() / 2;
    let median = if d.len() % 2 == 0 { 0.5 * (d[mid - 1] + d[mid]) } else { d[mid] };
    if median > 0.0 {
        Ok(median)
    } else {
        Err(Error::InvalidArgument("median pairwise distance is zero".into()))
    }
}

pub(crate) fn check_dims(points: &[Vec<f64>]) -> Result<usize> {
    let dim = points.first().map(Vec::len).ok_or_else(|| Error::InvalidArgument("no points".into()))?;
    for p in points {
        if p.len() != dim {
            return Err(Error::dims(dim, p.len()));
        }
    }
    Ok(dim)
}

#[inline]
fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

fn dot_diff(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum()
}
