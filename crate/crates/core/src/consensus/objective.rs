use nalgebra::{Cholesky, DMatrix, DVector};

use crate::error::{Error, Result};
use crate::matrix::{soft_threshold, Matrix};

/// Local term `f_i` of a consensus problem.
pub trait LocalObjective: Send + Sync {
    fn dim(&self) -> usize;

    fn value(&self, x: &[f64]) -> f64;

    /// `argmin_x f(x) + yᵀ(x − z) + (μ/2)‖x − z‖²`.
    fn step(&self, y: &[f64], z: &[f64], mu: f64) -> Result<Vec<f64>>;
}

/// `f(x) = w‖x − a‖²`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadraticObjective {
    pub target: Vec<f64>,
    pub weight: f64,
}

pub fn quadratic_objective(a: &[f64], w: f64) -> Result<QuadraticObjective> {
    if !(w > 0.0) || !w.is_finite() {
        return Err(Error::InvalidArgument(format!("quadratic weight must be positive, got {w}")));
    }
    if a.is_empty() || a.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("quadratic target must be a nonempty finite vector".into()));
    }
    Ok(QuadraticObjective {
        target: a.to_vec(),
        weight: w,
    })
}

impl LocalObjective for QuadraticObjective {
    fn dim(&self) -> usize {
        self.target.len()
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.weight * x.iter().zip(&self.target).map(|(v, a)| (v - a) * (v - a)).sum::<f64>()
    }

    fn step(&self, y: &[f64], z: &[f64], mu: f64) -> Result<Vec<f64>> {
        check_step_dims(self.dim(), y, z)?;
        let w = self.weight;
        let denom = 2.0 * w + mu;
        Ok(self
            .target
            .iter()
            .zip(y.iter().zip(z))
            .map(|(a, (yv, zv))| (2.0 * w * a + mu * zv - yv) / denom)
            .collect())
    }
}

/// `f(x) = ½‖Ax − b‖²`.
#[derive(Clone, Debug)]
pub struct LeastSquaresObjective {
    design: Matrix,
    response: Vec<f64>,
}

impl LeastSquaresObjective {
    pub fn new(design: Matrix, response: Vec<f64>) -> Result<Self> {
        if design.rows() != response.len() {
            return Err(Error::dims(design.rows(), response.len()));
        }
        Ok(Self { design, response })
    }
}

impl LocalObjective for LeastSquaresObjective {
    fn dim(&self) -> usize {
        self.design.cols()
    }

    fn value(&self, x: &[f64]) -> f64 {
        let r = self.design.as_dmatrix() * DVector::from_column_slice(x) - DVector::from_column_slice(&self.response);
        0.5 * r.norm_squared()
    }

    fn step(&self, y: &[f64], z: &[f64], mu: f64) -> Result<Vec<f64>> {
        check_step_dims(self.dim(), y, z)?;
        let a = self.design.as_dmatrix();
        let n = a.ncols();
        let system = a.transpose() * a + DMatrix::identity(n, n) * mu;
        let rhs = a.transpose() * DVector::from_column_slice(&self.response) - DVector::from_column_slice(y)
            + DVector::from_column_slice(z) * mu;
        let chol = Cholesky::new(system).ok_or_else(|| Error::Solver("normal equations not positive definite".into()))?;
        Ok(chol.solve(&rhs).iter().copied().collect())
    }
}

/// `f(x) = γ‖x‖₁`.
#[derive(Clone, Debug, PartialEq)]
pub struct L1Objective {
    pub weight: f64,
    pub dim: usize,
}

impl LocalObjective for L1Objective {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.weight * x.iter().map(|v| v.abs()).sum::<f64>()
    }

    fn step(&self, y: &[f64], z: &[f64], mu: f64) -> Result<Vec<f64>> {
        check_step_dims(self.dim, y, z)?;
        Ok(z.iter()
            .zip(y)
            .map(|(zv, yv)| soft_threshold(zv - yv / mu, self.weight / mu))
            .collect())
    }
}

fn check_step_dims(dim: usize, y: &[f64], z: &[f64]) -> Result<()> {
    if y.len() != dim || z.len() != dim {
        return Err(Error::dims(dim, format!("y: {}, z: {}", y.len(), z.len())));
    }
    Ok(())
}
