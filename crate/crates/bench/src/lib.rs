//! Seeded fixtures shared by the benchmarks.

use iotsense::consensus::{quadratic_objective, LocalObjective};
use iotsense::scenario::{consensus_targets, generate_traffic, Dataset, ScenarioSpec};

pub fn traffic(size: usize, rank: usize, missing_frac: f64) -> Dataset {
    generate_traffic(&ScenarioSpec {
        rows: size,
        cols: size,
        rank,
        missing_frac,
        seed: 1,
        ..ScenarioSpec::default()
    })
    .expect("valid scenario")
}

pub fn quadratic_agents(count: usize, dim: usize) -> Vec<Box<dyn LocalObjective>> {
    consensus_targets(count, dim, 3)
        .iter()
        .map(|a| Box::new(quadratic_objective(a, 1.0).expect("finite target")) as Box<dyn LocalObjective>)
        .collect()
}

/// Ring over `count` agents.
pub fn ring(count: usize) -> Vec<(usize, usize)> {
    (0..count).map(|i| (i, (i + 1) % count)).collect()
}
