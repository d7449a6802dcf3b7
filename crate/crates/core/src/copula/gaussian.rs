//! Gaussian copula: fitting from uniform scores and closed-form density.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn, SymmetricEigen};

use super::normal;
use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Minimum eigenvalue a correlation matrix must exceed to be accepted.
pub const MIN_EIGENVALUE: f64 = 1e-10;

/// Diagonal loadings tried, in order, when the estimate is not positive definite.
pub const LOADING_STEPS: [f64; 4] = [1e-8, 1e-6, 1e-4, 1e-2];

#[derive(Clone, Debug)]
pub struct CopulaModel {
    correlation: Matrix,
    cholesky: Cholesky<f64, Dyn>,
    ln_det: f64,
    /// Diagonal loading applied during fitting (0 when none was needed).
    loading: f64,
}

impl CopulaModel {
    /// Wraps a correlation matrix, which must be symmetric with unit
    /// diagonal and minimum eigenvalue above [`MIN_EIGENVALUE`].
    pub fn new(correlation: Matrix) -> Result<Self> {
        let r = correlation.as_dmatrix();
        let n = r.nrows();
        if r.ncols() != n {
            return Err(Error::dims("square correlation", format!("{}x{}", n, r.ncols())));
        }
        for i in 0..n {
            if r[(i, i)] != 1.0 {
                return Err(Error::InvalidArgument(format!("correlation diagonal entry {i} is {}", r[(i, i)])));
            }
            for j in 0..i {
                if r[(i, j)] != r[(j, i)] {
                    return Err(Error::InvalidArgument("correlation matrix is not symmetric".into()));
                }
            }
        }
        let min_eig = min_eigenvalue(r);
        if !(min_eig > MIN_EIGENVALUE) {
            return Err(Error::InvalidArgument(format!(
                "correlation matrix not positive definite (min eigenvalue {min_eig:e})"
            )));
        }
        Self::from_checked(correlation, 0.0)
    }

    pub fn independence(dim: usize) -> Self {
        Self::new(Matrix::identity(dim)).expect("identity is a valid correlation")
    }

    /// Two-dimensional model with off-diagonal correlation `rho`.
    pub fn bivariate(rho: f64) -> Result<Self> {
        Self::new(Matrix::from_rows(&[[1.0, rho], [rho, 1.0]])?)
    }

    fn from_checked(correlation: Matrix, loading: f64) -> Result<Self> {
        let cholesky = Cholesky::new(correlation.as_dmatrix().clone())
            .ok_or_else(|| Error::Solver("cholesky of correlation matrix failed".into()))?;
        let ln_det = 2.0 * cholesky.l_dirty().diagonal().iter().map(|d| d.ln()).sum::<f64>();
        Ok(Self {
            correlation,
            cholesky,
            ln_det,
            loading,
        })
    }

    pub fn dim(&self) -> usize {
        self.correlation.rows()
    }

    pub fn correlation(&self) -> &Matrix {
        &self.correlation
    }

    pub fn loading(&self) -> f64 {
        self.loading
    }

    pub fn determinant(&self) -> f64 {
        self.ln_det.exp()
    }

    /// `ln c(u)`; errors unless every coordinate lies strictly inside (0, 1).
    pub fn ln_density(&self, u: &[f64]) -> Result<f64> {
        if u.len() != self.dim() {
            return Err(Error::dims(self.dim(), u.len()));
        }
        let mut q = DVector::zeros(u.len());
        for (k, &v) in u.iter().enumerate() {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::Domain { value: v });
            }
            q[k] = normal::quantile(v);
        }
        Ok(self.ln_density_scores(&q))
    }

    /// `ln c` at normal scores `q = Φ⁻¹(u)`.
    pub(crate) fn ln_density_scores(&self, q: &DVector<f64>) -> f64 {
        let mut w = q.clone();
        self.cholesky.l_dirty().solve_lower_triangular_mut(&mut w);
        // qᵀR⁻¹q = ‖L⁻¹q‖²
        let quad = w.norm_squared() - q.norm_squared();
        -0.5 * self.ln_det - 0.5 * quad
    }

    pub fn density(&self, u: &[f64]) -> Result<f64> {
        Ok(self.ln_density(u)?.exp())
    }
}

/// Gaussian-copula density `c(u) = |R|^(-1/2) exp(-½ qᵀ(R⁻¹ − I)q)`.
pub fn copula_density(model: &CopulaModel, u: &[f64]) -> Result<f64> {
    model.density(u)
}

/// Fits a Gaussian copula from a K × N matrix of uniform scores by taking
/// the Pearson correlation of the normal scores Φ⁻¹(u).
///
/// A non-positive-definite estimate is repaired by `R ← (R + δI)/(1 + δ)`
/// with the smallest δ from [`LOADING_STEPS`] that clears [`MIN_EIGENVALUE`].
/// Columns with zero variance are treated as uncorrelated with the rest.
pub fn fit_gaussian_copula(uniform_scores: &Matrix) -> Result<CopulaModel> {
    let (k, n) = uniform_scores.shape();
    if k < 3 {
        return Err(Error::InsufficientData { needed: 3, got: k });
    }
    let mut scores = DMatrix::zeros(k, n);
    for j in 0..n {
        for i in 0..k {
            let u = uniform_scores[(i, j)];
            if !(u > 0.0 && u < 1.0) {
                return Err(Error::Domain { value: u });
            }
            scores[(i, j)] = normal::quantile(u);
        }
    }
    let raw = pearson_correlation(&scores);
    fit_from_raw(raw)
}

fn fit_from_raw(raw: DMatrix<f64>) -> Result<CopulaModel> {
    let n = raw.nrows();
    if min_eigenvalue(&raw) > MIN_EIGENVALUE {
        return CopulaModel::from_checked(Matrix::from_dmatrix(raw)?, 0.0);
    }
    for delta in LOADING_STEPS {
        let mut loaded = (&raw + DMatrix::identity(n, n) * delta) / (1.0 + delta);
        for i in 0..n {
            loaded[(i, i)] = 1.0;
        }
        if min_eigenvalue(&loaded) > MIN_EIGENVALUE {
            return CopulaModel::from_checked(Matrix::from_dmatrix(loaded)?, delta);
        }
    }
    Err(Error::Solver("correlation matrix could not be repaired by diagonal loading".into()))
}

/// Pearson correlation matrix of the columns, unit diagonal, clamped to [-1, 1].
pub(crate) fn pearson_correlation(data: &DMatrix<f64>) -> DMatrix<f64> {
    let (k, n) = data.shape();
    let mut centered = data.clone();
    let mut sd = vec![0.0; n];
    for j in 0..n {
        let mean = data.column(j).sum() / k as f64;
        for i in 0..k {
            centered[(i, j)] -= mean;
        }
        sd[j] = centered.column(j).norm_squared().sqrt();
    }
    let mut r = DMatrix::identity(n, n);
    for a in 0..n {
        for b in 0..a {
            let rho = if sd[a] > 0.0 && sd[b] > 0.0 {
                (centered.column(a).dot(&centered.column(b)) / (sd[a] * sd[b])).clamp(-1.0, 1.0)
            } else {
                0.0
            };
            r[(a, b)] = rho;
            r[(b, a)] = rho;
        }
    }
    r
}

pub(crate) fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    SymmetricEigen::new(m.clone())
        .eigenvalues
        .iter()
        .fold(f64::INFINITY, |a, &b| a.min(b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_distr::{Distribution, StandardNormal};

    #[test]
    fn one_dimensional_fit_is_trivial() {
        let u = Matrix::from_rows(&[[0.2], [0.5], [0.9], [0.4]]).unwrap();
        let m = fit_gaussian_copula(&u).unwrap();
        assert_eq!(m.correlation(), &Matrix::identity(1));
    }

    #[test]
    fn identical_columns_are_repaired() {
        let rows: Vec<[f64; 2]> = (1..=20).map(|i| [i as f64 / 21.0, i as f64 / 21.0]).collect();
        let u = Matrix::from_rows(&rows).unwrap();

        let mut scores = DMatrix::zeros(20, 2);
        for i in 0..20 {
            for j in 0..2 {
                scores[(i, j)] = normal::quantile(u[(i, j)]);
            }
        }
        assert_eq!(pearson_correlation(&scores)[(0, 1)], 1.0);

        let m = fit_gaussian_copula(&u).unwrap();
        let rho = m.correlation()[(0, 1)];
        assert!((0.999..1.0).contains(&rho), "rho = {rho}");
        assert!(m.loading() > 0.0);
        assert!(min_eigenvalue(m.correlation().as_dmatrix()) > MIN_EIGENVALUE);
    }

    #[test]
    fn independent_columns_have_small_correlation() {
        let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(77);
        let k = 10_000;
        let mut data = Vec::with_capacity(2 * k);
        for _ in 0..k {
            let a: f64 = StandardNormal.sample(&mut rng);
            let b: f64 = StandardNormal.sample(&mut rng);
            data.push(normal::cdf(a));
            data.push(normal::cdf(b));
        }
        let u = Matrix::from_row_major(k, 2, &data).unwrap();
        let m = fit_gaussian_copula(&u).unwrap();
        assert!(m.correlation()[(0, 1)].abs() < 0.05);
    }

    #[test]
    fn density_examples() {
        let ind = CopulaModel::independence(3);
        for u in [[0.1, 0.5, 0.9], [0.01, 0.99, 0.3]] {
            assert_eq!(copula_density(&ind, &u).unwrap(), 1.0);
        }
        let m = CopulaModel::bivariate(0.5).unwrap();
        let c = copula_density(&m, &[0.5, 0.5]).unwrap();
        assert!((c - 1.0 / 0.75f64.sqrt()).abs() < 1e-12);
        assert!((c - 1.154_701).abs() < 1e-6);

        let r = Matrix::from_rows(&[[1.0, 0.2, -0.3], [0.2, 1.0, 0.4], [-0.3, 0.4, 1.0]]).unwrap();
        let det = r.as_dmatrix().determinant();
        let m = CopulaModel::new(r).unwrap();
        assert!((copula_density(&m, &[0.5; 3]).unwrap() - det.powf(-0.5)).abs() < 1e-12);
    }

    #[test]
    fn density_rejects_boundary() {
        let m = CopulaModel::bivariate(0.3).unwrap();
        for u in [[0.0, 0.5], [0.5, 1.0], [-0.1, 0.5], [0.5, f64::NAN]] {
            assert!(matches!(copula_density(&m, &u), Err(Error::Domain { .. })));
        }
        assert!(copula_density(&m, &[0.5]).is_err());
    }

    #[test]
    fn rejects_invalid_correlation() {
        assert!(CopulaModel::bivariate(1.0).is_err());
        assert!(CopulaModel::new(Matrix::from_rows(&[[1.0, 0.2], [0.3, 1.0]]).unwrap()).is_err());
        assert!(CopulaModel::new(Matrix::from_rows(&[[2.0, 0.0], [0.0, 1.0]]).unwrap()).is_err());
        let u = Matrix::from_rows(&[[0.5, 1.0], [0.2, 0.3], [0.1, 0.6]]).unwrap();
        assert!(matches!(fit_gaussian_copula(&u), Err(Error::Domain { .. })));
        let short = Matrix::from_rows(&[[0.5, 0.5], [0.2, 0.3]]).unwrap();
        assert!(matches!(fit_gaussian_copula(&short), Err(Error::InsufficientData { .. })));
    }

    #[test]
    fn density_integrates_to_one() {
        let n = 400;
        let grid: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect();
        for rho in [0.0, 0.3, 0.6, 0.9] {
            let m = CopulaModel::bivariate(rho).unwrap();
            let mut total = 0.0;
            for &a in &grid {
                for &b in &grid {
                    total += copula_density(&m, &[a, b]).unwrap();
                }
            }
            let integral = total / (n * n) as f64;
            assert!((integral - 1.0).abs() <= 1e-3, "rho {rho}: {integral}");
        }
    }
}
