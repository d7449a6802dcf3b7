//! Plain linear classifiers, used as the baseline the kernel methods are
//! compared against.

use crate::error::{Error, Result};

/// Affine classifier `sign(w·x + b)`; a zero score is classified as −1.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearClassifier {
    pub weights: Vec<f64>,
    pub bias: f64,
}

impl LinearClassifier {
    pub fn score(&self, x: &[f64]) -> f64 {
        self.weights.iter().zip(x).map(|(w, v)| w * v).sum::<f64>() + self.bias
    }

    pub fn classify(&self, x: &[f64]) -> f64 {
        if self.score(x) > 0.0 {
            1.0
        } else {
            -1.0
        }
    }

    pub fn accuracy(&self, points: &[Vec<f64>], labels: &[f64]) -> f64 {
        let correct = points
            .iter()
            .zip(labels)
            .filter(|(p, &y)| self.classify(p) == y)
            .count();
        correct as f64 / points.len() as f64
    }
}

/// Rosenblatt perceptron with bias, cycling through the data in order until
/// an epoch makes no mistakes or `max_epochs` is reached.
pub fn perceptron(points: &[Vec<f64>], labels: &[f64], max_epochs: usize) -> Result<LinearClassifier> {
    let dim = super::check_dims(points)?;
    if labels.len() != points.len() {
        return Err(Error::dims(points.len(), labels.len()));
    }
    let mut clf = LinearClassifier {
        weights: vec![0.0; dim],
        bias: 0.0,
    };
    for _ in 0..max_epochs {
        let mut mistakes = 0;
        for (p, &y) in points.iter().zip(labels) {
            if y * clf.score(p) <= 0.0 {
                for (w, v) in clf.weights.iter_mut().zip(p) {
                    *w += y * v;
                }
                clf.bias += y;
                mistakes += 1;
            }
        }
        if mistakes == 0 {
            break;
        }
    }
    Ok(clf)
}

/// Best training accuracy of any line in the plane from a grid of
/// `angles × offsets` candidates, both orientations each.
///
/// Normals are spread uniformly over [0, π); offsets span the range of the
/// projected data for each normal, extended by one step on either side.
pub fn best_line_sweep(
    points: &[Vec<f64>],
    labels: &[f64],
    angles: usize,
    offsets: usize,
) -> Result<(f64, LinearClassifier)> {
    if super::check_dims(points)? != 2 {
        return Err(Error::dims(2, points[0].len()));
    }
    if labels.len() != points.len() || angles == 0 || offsets < 3 {
        return Err(Error::InvalidArgument("sweep needs matching labels, angles >= 1, offsets >= 3".into()));
    }
    let mut best = (f64::NEG_INFINITY, LinearClassifier { weights: vec![1.0, 0.0], bias: 0.0 });
    for a in 0..angles {
        let theta = std::f64::consts::PI * a as f64 / angles as f64;
        let normal = [theta.cos(), theta.sin()];
        let proj: Vec<f64> = points.iter().map(|p| normal[0] * p[0] + normal[1] * p[1]).collect();
        let lo = proj.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = proj.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let step = (hi - lo) / (offsets - 2) as f64;
        for o in 0..offsets {
            let c = lo - step + step * o as f64;
            for sign in [1.0, -1.0] {
                let clf = LinearClassifier {
                    weights: vec![sign * normal[0], sign * normal[1]],
                    bias: -sign * c,
                };
                let acc = clf.accuracy(points, labels);
                if acc > best.0 {
                    best = (acc, clf);
                }
            }
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perceptron_separates_separable_data() {
        let pts = vec![vec![0.0, 0.0], vec![1.0, 0.2], vec![3.0, 3.0], vec![4.0, 2.5]];
        let labels = [-1.0, -1.0, 1.0, 1.0];
        let clf = perceptron(&pts, &labels, 1000).unwrap();
        assert_eq!(clf.accuracy(&pts, &labels), 1.0);
    }

    #[test]
    fn sweep_finds_a_separating_line() {
        let pts = vec![vec![-1.0, 5.0], vec![-2.0, -3.0], vec![1.0, 4.0], vec![2.0, -1.0]];
        let labels = [-1.0, -1.0, 1.0, 1.0];
        let (acc, clf) = best_line_sweep(&pts, &labels, 8, 10).unwrap();
        assert_eq!(acc, 1.0);
        assert_eq!(clf.accuracy(&pts, &labels), 1.0);
    }

    #[test]
    fn xor_is_not_linearly_separable() {
        let pts = vec![vec![1.0, 1.0], vec![-1.0, -1.0], vec![1.0, -1.0], vec![-1.0, 1.0]];
        let labels = [1.0, 1.0, -1.0, -1.0];
        let (acc, _) = best_line_sweep(&pts, &labels, 180, 50).unwrap();
        assert_eq!(acc, 0.75);
    }
}
