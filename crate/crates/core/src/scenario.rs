//! Seeded synthetic workloads: the traffic-matrix scenario, the
//! circle-versus-annulus classification set, the correlated-sensor fusion
//! experiment and consensus targets.
//!
//! All randomness comes from ChaCha20 keyed with `seed_from_u64(seed)`.
//! Each role draws from its own ChaCha stream (see [`Stream`]), so changing
//! e.g. the missing fraction never perturbs the anomaly draws.

use nalgebra::DMatrix;
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Normal, StandardNormal, Uniform};
use serde::{Deserialize, Serialize};

use crate::copula::{fuse_detect, Bandwidth, JointModel};
use crate::error::{Error, Result};
use crate::matrix::{project_mask, Mask, Matrix};
use crate::metrics::auc;

/// ChaCha stream ids, one per random role.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Factors = 1,
    Anomalies = 2,
    Noise = 3,
    Mask = 4,
    Points = 5,
    FusionTrain = 6,
    FusionTrials = 7,
    Targets = 8,
    Agents = 9,
}

pub fn rng_for(seed: u64, stream: Stream) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream as u64);
    rng
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub rows: usize,
    pub cols: usize,
    pub rank: usize,
    pub anomaly_frac: f64,
    pub noise_sigma: f64,
    pub missing_frac: f64,
    /// Anomaly magnitudes are uniform on `[0.1, anomaly_scale]`.
    pub anomaly_scale: f64,
    pub seed: u64,
}

impl Default for ScenarioSpec {
    fn default() -> Self {
        Self {
            rows: 100,
            cols: 100,
            rank: 5,
            anomaly_frac: 0.05,
            noise_sigma: 0.0,
            missing_frac: 0.0,
            anomaly_scale: 10.0,
            seed: 0,
        }
    }
}

impl ScenarioSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidArgument(msg));
        if self.rows == 0 || self.cols == 0 {
            return bad(format!("shape must be positive, got {}x{}", self.rows, self.cols));
        }
        if self.rank == 0 || self.rank > self.rows.min(self.cols) {
            return bad(format!(
                "rank {} infeasible for a {}x{} matrix",
                self.rank, self.rows, self.cols
            ));
        }
        for (name, v) in [("anomaly_frac", self.anomaly_frac), ("missing_frac", self.missing_frac)] {
            if !(0.0..1.0).contains(&v) {
                return bad(format!("{name} must lie in [0, 1), got {v}"));
            }
        }
        if !(self.noise_sigma >= 0.0) || !self.noise_sigma.is_finite() {
            return bad(format!("noise_sigma must be nonnegative, got {}", self.noise_sigma));
        }
        if !(self.anomaly_scale >= 0.1) || !self.anomaly_scale.is_finite() {
            return bad(format!("anomaly_scale must be at least 0.1, got {}", self.anomaly_scale));
        }
        Ok(())
    }

    pub fn anomaly_count(&self) -> usize {
        ((self.rows * self.cols) as f64 * self.anomaly_frac).floor() as usize
    }

    pub fn missing_count(&self) -> usize {
        ((self.rows * self.cols) as f64 * self.missing_frac).floor() as usize
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    /// `P_Ω(X + A + V)`; unobserved entries hold 0.
    pub observed: Matrix,
    pub mask: Mask,
    pub ground_truth_x: Matrix,
    pub ground_truth_a: Matrix,
    pub spec: ScenarioSpec,
}

/// Traffic-matrix scenario: `X = L·Rᵀ` from Gaussian factors scaled to unit
/// spectral norm, sparse anomalies `±U(0.1, scale)` at uniformly chosen
/// entries, Gaussian noise, and a uniformly chosen set of dropped entries.
pub fn generate_traffic(spec: &ScenarioSpec) -> Result<Dataset> {
    spec.validate()?;
    let (m, n, r) = (spec.rows, spec.cols, spec.rank);

    let mut rng = rng_for(spec.seed, Stream::Factors);
    let mut gauss = |rows, cols| {
        let data: Vec<f64> = (0..rows * cols).map(|_| StandardNormal.sample(&mut rng)).collect();
        DMatrix::from_row_slice(rows, cols, &data)
    };
    let left = gauss(m, r);
    let right = gauss(n, r);
    let raw = Matrix::from_dmatrix(left * right.transpose())?;
    let sigma1 = raw.svd()?.singular_values[0];
    let x = &raw * (1.0 / sigma1);

    let mut a = DMatrix::zeros(m, n);
    let count = spec.anomaly_count();
    if count > 0 {
        let mut rng = rng_for(spec.seed, Stream::Anomalies);
        let positions = index::sample(&mut rng, m * n, count);
        let magnitude = Uniform::new_inclusive(0.1, spec.anomaly_scale).expect("validated range");
        for k in positions.iter() {
            let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            a[(k / n, k % n)] = sign * magnitude.sample(&mut rng);
        }
    }
    let a = Matrix::from_dmatrix(a)?;

    let mut v = DMatrix::zeros(m, n);
    if spec.noise_sigma > 0.0 {
        let mut rng = rng_for(spec.seed, Stream::Noise);
        let noise = Normal::new(0.0, spec.noise_sigma).expect("validated sigma");
        for i in 0..m {
            for j in 0..n {
                v[(i, j)] = noise.sample(&mut rng);
            }
        }
    }

    let mut observed_bits = vec![true; m * n];
    let dropped = spec.missing_count();
    if dropped > 0 {
        let mut rng = rng_for(spec.seed, Stream::Mask);
        for k in index::sample(&mut rng, m * n, dropped).iter() {
            observed_bits[k] = false;
        }
    }
    let mask = Mask::from_bitmap(m, n, observed_bits)?;

    let full = Matrix::from_dmatrix(x.as_dmatrix() + a.as_dmatrix() + v)?;
    let observed = project_mask(&full, &mask)?;
    Ok(Dataset {
        observed,
        mask,
        ground_truth_x: x,
        ground_truth_a: a,
        spec: *spec,
    })
}

/// Two-class planar data: label +1 uniform in the unit disk, −1 uniform in
/// the annulus `2 ≤ r < 3`. Returns `per_class` points of each class,
/// interleaved.
pub fn circle_annulus(per_class: usize, seed: u64) -> (Vec<Vec<f64>>, Vec<f64>) {
    let mut rng = rng_for(seed, Stream::Points);
    let mut points = Vec::with_capacity(2 * per_class);
    let mut labels = Vec::with_capacity(2 * per_class);
    for _ in 0..per_class {
        for (label, r2_lo, r2_hi) in [(1.0, 0.0, 1.0), (-1.0, 4.0, 9.0)] {
            let r = rng.random_range::<f64, _>(r2_lo..r2_hi).sqrt();
            let theta = rng.random_range(0.0..std::f64::consts::TAU);
            points.push(vec![r * theta.cos(), r * theta.sin()]);
            labels.push(label);
        }
    }
    (points, labels)
}

/// Two sensors with heterogeneous marginals and Gaussian dependence: sensor
/// 0 reads the latent `g₀` directly, sensor 1 reads `exp(g₁/2)`. Under H1
/// the latent mean moves by `shift`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FusionScenario {
    pub rho: f64,
    pub shift: [f64; 2],
    pub train_size: usize,
    pub trials: usize,
    pub seed: u64,
}

impl Default for FusionScenario {
    fn default() -> Self {
        Self {
            rho: 0.8,
            shift: [1.0, 0.2],
            train_size: 2000,
            trials: 2000,
            seed: 0,
        }
    }
}

impl FusionScenario {
    fn draw(&self, rng: &mut ChaCha20Rng, alternative: bool) -> [f64; 2] {
        let e0: f64 = StandardNormal.sample(rng);
        let e1: f64 = StandardNormal.sample(rng);
        let mut g = [e0, self.rho * e0 + (1.0 - self.rho * self.rho).sqrt() * e1];
        if alternative {
            g[0] += self.shift[0];
            g[1] += self.shift[1];
        }
        [g[0], (0.5 * g[1]).exp()]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FusionOutcome {
    pub auc_copula: f64,
    pub auc_product: f64,
    pub accuracy_copula: f64,
    pub accuracy_product: f64,
    pub fitted_rho_h0: f64,
    pub fitted_rho_h1: f64,
}

/// Fits copula and product joint models for both hypotheses from seeded
/// training data, then scores `trials` fresh samples (alternating H0, H1)
/// with the likelihood-ratio detector of each.
pub fn fusion_experiment(sc: &FusionScenario) -> Result<FusionOutcome> {
    if !(sc.rho.abs() < 1.0) || sc.train_size < 3 || sc.trials < 2 {
        return Err(Error::InvalidArgument(
            "fusion scenario needs |rho| < 1, train_size >= 3, trials >= 2".into(),
        ));
    }
    let mut rng = rng_for(sc.seed, Stream::FusionTrain);
    let mut fit = |alternative: bool| -> Result<JointModel> {
        let data: Vec<f64> = (0..sc.train_size).flat_map(|_| sc.draw(&mut rng, alternative)).collect();
        JointModel::fit(&Matrix::from_row_major(sc.train_size, 2, &data)?, Bandwidth::Auto)
    };
    let h0 = fit(false)?;
    let h1 = fit(true)?;
    let h0_product = JointModel::product(h0.marginals().to_vec());
    let h1_product = JointModel::product(h1.marginals().to_vec());

    let mut rng = rng_for(sc.seed, Stream::FusionTrials);
    let mut truth = Vec::with_capacity(sc.trials);
    let mut copula_scores = Vec::with_capacity(sc.trials);
    let mut product_scores = Vec::with_capacity(sc.trials);
    let (mut hits_copula, mut hits_product) = (0usize, 0usize);
    for t in 0..sc.trials {
        let alternative = t % 2 == 1;
        let z = sc.draw(&mut rng, alternative);
        let c = fuse_detect(&h0, &h1, &z, 0.0)?;
        let p = fuse_detect(&h0_product, &h1_product, &z, 0.0)?;
        let is_h1 = |d: crate::copula::Hypothesis| d == crate::copula::Hypothesis::H1;
        hits_copula += usize::from(is_h1(c.decision) == alternative);
        hits_product += usize::from(is_h1(p.decision) == alternative);
        truth.push(alternative);
        copula_scores.push(c.log_likelihood_ratio);
        product_scores.push(p.log_likelihood_ratio);
    }
    Ok(FusionOutcome {
        auc_copula: auc(&copula_scores, &truth)?,
        auc_product: auc(&product_scores, &truth)?,
        accuracy_copula: hits_copula as f64 / sc.trials as f64,
        accuracy_product: hits_product as f64 / sc.trials as f64,
        fitted_rho_h0: h0.copula().correlation()[(0, 1)],
        fitted_rho_h1: h1.copula().correlation()[(0, 1)],
    })
}

/// `count` target vectors with entries uniform on [-10, 10).
pub fn consensus_targets(count: usize, dim: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = rng_for(seed, Stream::Targets);
    (0..count)
        .map(|_| (0..dim).map(|_| rng.random_range(-10.0..10.0)).collect())
        .collect()
}

/// Per-agent least-squares data `(B_i, b_i)` with `rows` observations of a
/// shared `dim`-dimensional parameter drawn uniformly on [-1, 1), plus
/// unit Gaussian noise.
pub fn least_squares_agents(count: usize, dim: usize, rows: usize, seed: u64) -> Result<Vec<(Matrix, Vec<f64>)>> {
    if count == 0 || dim == 0 || rows == 0 {
        return Err(Error::InvalidArgument("least-squares agents need positive count, dim and rows".into()));
    }
    let mut rng = rng_for(seed, Stream::Agents);
    let theta: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
    (0..count)
        .map(|_| {
            let design: Vec<f64> = (0..rows * dim).map(|_| StandardNormal.sample(&mut rng)).collect();
            let response = (0..rows)
                .map(|i| {
                    let signal: f64 = (0..dim).map(|k| design[i * dim + k] * theta[k]).sum();
                    let noise: f64 = StandardNormal.sample(&mut rng);
                    signal + noise
                })
                .collect();
            Ok((Matrix::from_row_major(rows, dim, &design)?, response))
        })
        .collect()
}
