//! Global-consensus ADMM over a set of agents.
//!
//! Each synchronous round runs three phases with barriers between them:
//!
//! ```text
//! x_i ← argmin f_i(x) + y_iᵀ(x − z_i) + (μ/2)‖x − z_i‖²
//! z_i ← (1/|N_i|) Σ_{j ∈ N_i} (x_j + y_j/μ)
//! y_i ← y_i + μ(x_i − z_i)
//! ```
//!
//! The fusion-center variant uses a single `z` averaged over every agent;
//! the decentralized variant averages over the self-inclusive one-hop
//! neighborhood `N_i`. On a complete graph both produce the same iterates,
//! bit for bit, because they share the averaging routine and agent order.

mod objective;
mod topology;

pub use objective::{quadratic_objective, L1Objective, LeastSquaresObjective, LocalObjective, QuadraticObjective};
pub use topology::Topology;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AgentState {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConsensusConfig {
    pub mu: f64,
    pub max_rounds: usize,
    pub tol: f64,
}

impl Default for ConsensusConfig {
    fn default() -> Self {
        Self {
            mu: 1.0,
            max_rounds: 1000,
            tol: 1e-9,
        }
    }
}

impl ConsensusConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.mu > 0.0) || !self.mu.is_finite() {
            return Err(Error::InvalidArgument(format!("mu must be positive, got {}", self.mu)));
        }
        if self.max_rounds == 0 {
            return Err(Error::InvalidArgument("max_rounds must be positive".into()));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidArgument(format!("tol must be positive, got {}", self.tol)));
        }
        Ok(())
    }
}

/// Final consensus variable(s).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Estimate {
    Central(Vec<f64>),
    PerAgent(Vec<Vec<f64>>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConsensusResult {
    pub z: Estimate,
    pub agents: Vec<AgentState>,
    pub rounds: usize,
    pub primal_residual_history: Vec<f64>,
    pub dual_residual_history: Vec<f64>,
    pub converged: bool,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RoundResiduals {
    pub primal: f64,
    pub dual: f64,
}

/// `primal = max_i ‖x_i − z‖`, `dual = μ‖z_curr − z_prev‖`.
pub fn residuals(states: &[AgentState], z_prev: &[f64], z_curr: &[f64], mu: f64) -> RoundResiduals {
    let primal = states.iter().map(|s| dist(&s.x, z_curr)).fold(0.0, f64::max);
    RoundResiduals {
        primal,
        dual: mu * dist(z_curr, z_prev),
    }
}

enum Coordination {
    FusionCenter,
    Neighborhoods(Vec<Vec<usize>>),
}

/// Round-by-round ADMM driver. [`admm_central`] and [`admm_decentralized`]
/// run it to completion; stepping it manually exposes every iterate.
pub struct ConsensusEngine<'a> {
    objectives: &'a [Box<dyn LocalObjective>],
    coordination: Coordination,
    mu: f64,
    states: Vec<AgentState>,
    // one entry for the fusion center, one per agent otherwise
    z: Vec<Vec<f64>>,
    round: usize,
}

impl<'a> ConsensusEngine<'a> {
    pub fn central(objectives: &'a [Box<dyn LocalObjective>], dim: usize, mu: f64) -> Result<Self> {
        Self::build(objectives, dim, mu, Coordination::FusionCenter, 1)
    }

    pub fn decentralized(
        objectives: &'a [Box<dyn LocalObjective>],
        topology: &Topology,
        dim: usize,
        mu: f64,
    ) -> Result<Self> {
        if topology.agent_count() != objectives.len() {
            return Err(Error::dims(
                format!("{} agents", objectives.len()),
                format!("topology with {} agents", topology.agent_count()),
            ));
        }
        let hoods = (0..objectives.len()).map(|i| topology.neighborhood(i)).collect();
        Self::build(objectives, dim, mu, Coordination::Neighborhoods(hoods), objectives.len())
    }

    fn build(
        objectives: &'a [Box<dyn LocalObjective>],
        dim: usize,
        mu: f64,
        coordination: Coordination,
        z_count: usize,
    ) -> Result<Self> {
        if objectives.is_empty() {
            return Err(Error::InvalidArgument("consensus needs at least one agent".into()));
        }
        if dim == 0 {
            return Err(Error::InvalidArgument("consensus dimension must be positive".into()));
        }
        if !(mu > 0.0) || !mu.is_finite() {
            return Err(Error::InvalidArgument(format!("mu must be positive, got {mu}")));
        }
        for (i, obj) in objectives.iter().enumerate() {
            if obj.dim() != dim {
                return Err(Error::AgentStep {
                    agent: i,
                    reason: format!("objective has dimension {}, expected {dim}", obj.dim()),
                });
            }
        }
        let zero = vec![0.0; dim];
        Ok(Self {
            objectives,
            coordination,
            mu,
            states: vec![
                AgentState {
                    x: zero.clone(),
                    y: zero.clone()
                };
                objectives.len()
            ],
            z: vec![zero; z_count],
            round: 0,
        })
    }

    /// Overrides the all-zero starting point. `z` is applied to every copy
    /// of the consensus variable.
    pub fn with_initial(mut self, states: Vec<AgentState>, z: Vec<f64>) -> Result<Self> {
        let dim = self.dim();
        if states.len() != self.states.len()
            || z.len() != dim
            || states.iter().any(|s| s.x.len() != dim || s.y.len() != dim)
        {
            return Err(Error::InvalidArgument("initial state has the wrong shape".into()));
        }
        self.states = states;
        for zi in &mut self.z {
            zi.clone_from(&z);
        }
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.z[0].len()
    }

    pub fn round(&self) -> usize {
        self.round
    }

    pub fn states(&self) -> &[AgentState] {
        &self.states
    }

    /// The consensus variable seen by `agent`.
    pub fn z_of(&self, agent: usize) -> &[f64] {
        match self.coordination {
            Coordination::FusionCenter => &self.z[0],
            Coordination::Neighborhoods(_) => &self.z[agent],
        }
    }

    pub fn estimate(&self) -> Estimate {
        match self.coordination {
            Coordination::FusionCenter => Estimate::Central(self.z[0].clone()),
            Coordination::Neighborhoods(_) => Estimate::PerAgent(self.z.clone()),
        }
    }

    /// One synchronous round; returns the residuals measured after it.
    pub fn step(&mut self) -> Result<RoundResiduals> {
        let n = self.states.len();
        let mu = self.mu;

        let mut new_x = Vec::with_capacity(n);
        for (i, obj) in self.objectives.iter().enumerate() {
            let x = obj
                .step(&self.states[i].y, self.z_of(i), mu)
                .map_err(|e| Error::AgentStep {
                    agent: i,
                    reason: e.to_string(),
                })?;
            if x.len() != self.dim() || x.iter().any(|v| !v.is_finite()) {
                return Err(Error::AgentStep {
                    agent: i,
                    reason: "local step returned a malformed or non-finite vector".into(),
                });
            }
            new_x.push(x);
        }
        for (s, x) in self.states.iter_mut().zip(new_x) {
            s.x = x;
        }

        let new_z: Vec<Vec<f64>> = match &self.coordination {
            Coordination::FusionCenter => {
                let all: Vec<usize> = (0..n).collect();
                vec![average(&self.states, &all, mu)]
            }
            Coordination::Neighborhoods(hoods) => hoods.iter().map(|h| average(&self.states, h, mu)).collect(),
        };
        let old_z = std::mem::replace(&mut self.z, new_z);

        for i in 0..n {
            let z = match self.coordination {
                Coordination::FusionCenter => &self.z[0],
                Coordination::Neighborhoods(_) => &self.z[i],
            };
            let s = &mut self.states[i];
            for ((y, x), zv) in s.y.iter_mut().zip(&s.x).zip(z) {
                *y += mu * (x - zv);
            }
        }
        self.round += 1;

        let mut primal: f64 = 0.0;
        for (i, s) in self.states.iter().enumerate() {
            primal = primal.max(dist(&s.x, self.z_of(i)));
        }
        let dual = self
            .z
            .iter()
            .zip(&old_z)
            .map(|(a, b)| mu * dist(a, b))
            .fold(0.0, f64::max);
        Ok(RoundResiduals { primal, dual })
    }

    /// Runs rounds until both residuals fall to `tol` or `max_rounds` is hit.
    pub fn run(mut self, max_rounds: usize, tol: f64) -> Result<ConsensusResult> {
        let mut primal_hist = Vec::new();
        let mut dual_hist = Vec::new();
        let mut converged = false;
        while self.round < max_rounds {
            let r = self.step()?;
            primal_hist.push(r.primal);
            dual_hist.push(r.dual);
            if r.primal <= tol && r.dual <= tol {
                converged = true;
                break;
            }
        }
        Ok(ConsensusResult {
            z: self.estimate(),
            rounds: primal_hist.len(),
            agents: self.states,
            primal_residual_history: primal_hist,
            dual_residual_history: dual_hist,
            converged,
        })
    }
}

/// `(1/|S|) Σ_{j ∈ S} (x_j + y_j/μ)`, summed in the order of `members`.
fn average(states: &[AgentState], members: &[usize], mu: f64) -> Vec<f64> {
    let dim = states[0].x.len();
    let mut acc = vec![0.0; dim];
    for &j in members {
        let s = &states[j];
        for ((a, x), y) in acc.iter_mut().zip(&s.x).zip(&s.y) {
            *a += x + y / mu;
        }
    }
    let count = members.len() as f64;
    for a in &mut acc {
        *a /= count;
    }
    acc
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| (u - v) * (u - v)).sum::<f64>().sqrt()
}

/// Fusion-center consensus ADMM from the all-zero start.
pub fn admm_central(objectives: &[Box<dyn LocalObjective>], dim: usize, cfg: &ConsensusConfig) -> Result<ConsensusResult> {
    cfg.validate()?;
    ConsensusEngine::central(objectives, dim, cfg.mu)?.run(cfg.max_rounds, cfg.tol)
}

/// One-hop decentralized consensus ADMM from the all-zero start.
pub fn admm_decentralized(
    objectives: &[Box<dyn LocalObjective>],
    topology: &Topology,
    dim: usize,
    cfg: &ConsensusConfig,
) -> Result<ConsensusResult> {
    cfg.validate()?;
    ConsensusEngine::decentralized(objectives, topology, dim, cfg.mu)?.run(cfg.max_rounds, cfg.tol)
}
