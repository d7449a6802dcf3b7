//! One-dimensional marginal models `F_n`, `f_n`.

use serde::{Deserialize, Serialize};

use super::normal;
use crate::error::{Error, Result};

/// Smallest and largest cdf values handed out, so that Φ⁻¹ stays finite.
const CDF_FLOOR: f64 = f64::MIN_POSITIVE;
const CDF_CEIL: f64 = 1.0 - f64::EPSILON / 2.0;

/// Kernel window half-width in bandwidths; φ underflows beyond it.
const KDE_WINDOW: f64 = 38.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Bandwidth {
    /// Silverman's rule of thumb.
    Auto,
    Fixed(f64),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum MarginalModel {
    Empirical(EmpiricalMarginal),
    Gaussian { mean: f64, std_dev: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalMarginal {
    sorted: Vec<f64>,
    bandwidth: f64,
}

/// Fits an empirical marginal: rank/(K+1) cdf with linear interpolation
/// between order statistics and a Gaussian-kernel density estimate.
pub fn fit_empirical_marginal(samples: &[f64], bandwidth: Bandwidth) -> Result<MarginalModel> {
    if samples.len() < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            got: samples.len(),
        });
    }
    if let Some(bad) = samples.iter().find(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument(format!("non-finite sample {bad}")));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let bandwidth = match bandwidth {
        Bandwidth::Fixed(h) if h > 0.0 && h.is_finite() => h,
        Bandwidth::Fixed(h) => {
            return Err(Error::InvalidArgument(format!("bandwidth must be positive, got {h}")))
        }
        Bandwidth::Auto => silverman_bandwidth(&sorted),
    };
    Ok(MarginalModel::Empirical(EmpiricalMarginal { sorted, bandwidth }))
}

impl MarginalModel {
    pub fn gaussian(mean: f64, std_dev: f64) -> Result<Self> {
        if !(std_dev > 0.0) || !std_dev.is_finite() || !mean.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "gaussian marginal needs finite mean and positive std, got ({mean}, {std_dev})"
            )));
        }
        Ok(MarginalModel::Gaussian { mean, std_dev })
    }

    /// Marginal cdf, strictly inside (0, 1) for finite input.
    pub fn cdf(&self, x: f64) -> f64 {
        match self {
            MarginalModel::Gaussian { mean, std_dev } => {
                normal::cdf((x - mean) / std_dev).clamp(CDF_FLOOR, CDF_CEIL)
            }
            MarginalModel::Empirical(e) => e.cdf(x),
        }
    }

    pub fn pdf(&self, x: f64) -> f64 {
        match self {
            MarginalModel::Gaussian { mean, std_dev } => normal::pdf((x - mean) / std_dev) / std_dev,
            MarginalModel::Empirical(e) => e.pdf(x),
        }
    }

    /// `ln f(x)`, `-∞` where the density vanishes.
    pub fn ln_pdf(&self, x: f64) -> f64 {
        match self {
            MarginalModel::Gaussian { mean, std_dev } => {
                normal::ln_pdf((x - mean) / std_dev) - std_dev.ln()
            }
            MarginalModel::Empirical(e) => e.pdf(x).ln(),
        }
    }

    /// Normal score Φ⁻¹(F(x)).
    pub fn normal_score(&self, x: f64) -> f64 {
        normal::quantile(self.cdf(x))
    }
}

impl EmpiricalMarginal {
    pub fn samples(&self) -> &[f64] {
        &self.sorted
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    fn cdf(&self, x: f64) -> f64 {
        let s = &self.sorted;
        let k = s.len();
        let denom = (k + 1) as f64;
        // number of order statistics ≤ x
        let at_or_below = s.partition_point(|&v| v <= x);
        let value = if at_or_below == 0 {
            // exponential lower tail anchored at (x_(1), 1/(K+1))
            (1.0 / denom) * ((x - s[0]) / self.bandwidth).exp()
        } else if at_or_below == k {
            if x == s[k - 1] {
                k as f64 / denom
            } else {
                1.0 - (1.0 / denom) * (-(x - s[k - 1]) / self.bandwidth).exp()
            }
        } else {
            let lo = s[at_or_below - 1];
            let hi = s[at_or_below];
            (at_or_below as f64 + (x - lo) / (hi - lo)) / denom
        };
        value.clamp(CDF_FLOOR, CDF_CEIL)
    }

    fn pdf(&self, x: f64) -> f64 {
        let h = self.bandwidth;
        let lo = self.sorted.partition_point(|&v| v < x - KDE_WINDOW * h);
        let hi = self.sorted.partition_point(|&v| v <= x + KDE_WINDOW * h);
        let sum: f64 = self.sorted[lo..hi].iter().map(|&v| normal::pdf((x - v) / h)).sum();
        sum / (self.sorted.len() as f64 * h)
    }
}

/// `0.9 · min(σ̂, IQR/1.34) · K^(-1/5)`, falling back to whichever spread
/// estimate is positive, and to 1 for constant samples.
fn silverman_bandwidth(sorted: &[f64]) -> f64 {
    let k = sorted.len() as f64;
    let mean = sorted.iter().sum::<f64>() / k;
    let var = sorted.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1.0);
    let sd = var.sqrt();
    let iqr = quantile_sorted(sorted, 0.75) - quantile_sorted(sorted, 0.25);
    let spread = match (sd > 0.0, iqr > 0.0) {
        (true, true) => sd.min(iqr / 1.34),
        (true, false) => sd,
        (false, true) => iqr / 1.34,
        (false, false) => 1.0,
    };
    0.9 * spread * k.powf(-0.2)
}

fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let i = pos.floor() as usize;
    let frac = pos - i as f64;
    if i + 1 < sorted.len() {
        sorted[i] + frac * (sorted[i + 1] - sorted[i])
    } else {
        sorted[i]
    }
}
