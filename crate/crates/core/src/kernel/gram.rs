use nalgebra::{DMatrix, SymmetricEigen};

use super::{check_dims, KernelSpec};
use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Pairwise kernel evaluations `G_ij = k(x_i, x_j)`, exactly symmetric.
#[derive(Clone, Debug, PartialEq)]
pub struct GramMatrix(Matrix);

impl GramMatrix {
    pub fn matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn size(&self) -> usize {
        self.0.rows()
    }

    pub fn trace(&self) -> f64 {
        self.0.as_dmatrix().trace()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut e: Vec<f64> = SymmetricEigen::new(self.0.as_dmatrix().clone()).eigenvalues.iter().copied().collect();
        e.sort_by(f64::total_cmp);
        e
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }

    /// Positive semidefinite up to `−1e-8 · trace`.
    pub fn is_psd(&self) -> bool {
        self.min_eigenvalue() >= -1e-8 * self.trace().abs()
    }
}

pub fn gram(spec: &KernelSpec, points: &[Vec<f64>]) -> Result<GramMatrix> {
    if points.is_empty() {
        return Err(Error::InvalidArgument("gram matrix of an empty point set".into()));
    }
    check_dims(points)?;
    spec.validate()?;
    let n = points.len();
    let mut g = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let v = spec.eval_unchecked(&points[i], &points[j]);
            g[(i, j)] = v;
            g[(j, i)] = v;
        }
    }
    Ok(GramMatrix(Matrix::from_dmatrix(g)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn single_point() {
        let g = gram(&KernelSpec::gaussian(2.0).unwrap(), &[vec![1.0, 5.0]]).unwrap();
        assert_eq!(g.matrix(), &Matrix::identity(1));
    }

    #[test]
    fn duplicate_points_give_singular_gram() {
        let pts = vec![vec![0.3, -1.2], vec![0.3, -1.2]];
        for spec in [
            KernelSpec::Linear,
            KernelSpec::polynomial(3, 1.0).unwrap(),
            KernelSpec::gaussian(0.5).unwrap(),
        ] {
            let g = gram(&spec, &pts).unwrap();
            let det = g.matrix().as_dmatrix().determinant();
            assert!(det.abs() <= 1e-10, "{spec:?}: det {det}");
        }
    }

    #[test]
    fn psd_over_seeded_point_sets() {
        let specs = [
            KernelSpec::Linear,
            KernelSpec::polynomial(2, 0.0).unwrap(),
            KernelSpec::polynomial(3, 1.0).unwrap(),
            KernelSpec::gaussian(1.0).unwrap(),
        ];
        let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(99);
        for _ in 0..100 {
            let n = rng.random_range(2..30);
            let pts: Vec<Vec<f64>> = (0..n)
                .map(|_| (0..3).map(|_| rng.random_range(-2.0..2.0)).collect())
                .collect();
            for spec in &specs {
                let g = gram(spec, &pts).unwrap();
                assert!(g.is_psd(), "{spec:?}: min eig {}", g.min_eigenvalue());
                let m = g.matrix();
                for i in 0..n {
                    for j in 0..n {
                        assert_eq!(m[(i, j)], m[(j, i)]);
                    }
                }
            }
        }
    }

    #[test]
    fn fifty_gaussian_points() {
        let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(50);
        let pts: Vec<Vec<f64>> = (0..50)
            .map(|_| vec![rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0)])
            .collect();
        let g = gram(&KernelSpec::gaussian(1.0).unwrap(), &pts).unwrap();
        assert!(g.min_eigenvalue() >= -1e-8 * g.trace());
        assert_eq!(g.trace(), 50.0);
    }

    #[test]
    fn rejects_ragged_input() {
        assert!(gram(&KernelSpec::Linear, &[vec![1.0], vec![1.0, 2.0]]).is_err());
        assert!(gram(&KernelSpec::Linear, &[]).is_err());
    }
}
