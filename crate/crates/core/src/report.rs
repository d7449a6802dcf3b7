//! Machine-readable run reports.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

pub const LIBRARY_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Headline metrics. Fields that do not apply to a command are `null`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub relative_error: Option<f64>,
    pub anomaly_f1: Option<f64>,
    pub iterations: Option<usize>,
    pub residual: Option<f64>,
    /// Wall-clock duration; the only field that is not reproducible.
    pub wall_time_ms: f64,
    /// Command-specific scalar metrics.
    #[serde(default)]
    pub extra: BTreeMap<String, f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub command: String,
    pub parameters: BTreeMap<String, Value>,
    pub metrics: Metrics,
    pub converged: bool,
    pub seed: Option<u64>,
    pub library_version: String,
    /// Per-iteration series such as residual histories.
    #[serde(default)]
    pub histories: BTreeMap<String, Vec<f64>>,
}

impl RunReport {
    pub fn new(command: impl Into<String>, seed: Option<u64>) -> Self {
        Self {
            command: command.into(),
            parameters: BTreeMap::new(),
            metrics: Metrics::default(),
            converged: true,
            seed,
            library_version: LIBRARY_VERSION.to_string(),
            histories: BTreeMap::new(),
        }
    }

    pub fn param(mut self, key: &str, value: impl Serialize) -> Self {
        self.parameters
            .insert(key.to_string(), serde_json::to_value(value).unwrap_or(Value::Null));
        self
    }

    /// Every metric and history value must be finite.
    pub fn validate(&self) -> Result<()> {
        let m = &self.metrics;
        let scalars = [m.relative_error, m.anomaly_f1, m.residual, Some(m.wall_time_ms)];
        let all = scalars
            .iter()
            .flatten()
            .chain(m.extra.values())
            .chain(self.histories.values().flatten());
        if all.into_iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!("report for {} carries a non-finite metric", self.command)));
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        self.validate()?;
        serde_json::to_string_pretty(self).map_err(|e| Error::Io(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            reason: e.to_string(),
        })
    }
}
