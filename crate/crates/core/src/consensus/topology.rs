use std::collections::BTreeSet;

use crate::error::{Error, Result};

/// Undirected agent graph. Self-loops are never stored; neighborhoods
/// returned by [`Topology::neighborhood`] always include the agent itself.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Topology {
    agent_count: usize,
    edges: BTreeSet<(usize, usize)>,
}

impl Topology {
    /// Edges are normalized to `(min, max)`; self-loops are dropped.
    pub fn new(agent_count: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if agent_count == 0 {
            return Err(Error::InvalidArgument("topology needs at least one agent".into()));
        }
        let mut set = BTreeSet::new();
        for &(i, j) in edges {
            if i >= agent_count || j >= agent_count {
                return Err(Error::InvalidArgument(format!(
                    "edge ({i}, {j}) references an agent outside 0..{agent_count}"
                )));
            }
            if i != j {
                set.insert((i.min(j), i.max(j)));
            }
        }
        Ok(Self { agent_count, edges: set })
    }

    pub fn complete(agent_count: usize) -> Result<Self> {
        let edges: Vec<_> = (0..agent_count)
            .flat_map(|i| (i + 1..agent_count).map(move |j| (i, j)))
            .collect();
        Self::new(agent_count, &edges)
    }

    pub fn ring(agent_count: usize) -> Result<Self> {
        let edges: Vec<_> = (0..agent_count).map(|i| (i, (i + 1) % agent_count)).collect();
        Self::new(agent_count, &edges)
    }

    /// Parses `i j` pairs, one per line, 0-based and whitespace separated.
    /// Blank lines and `#` comments are ignored. Without an explicit count
    /// the agent count is one past the largest index seen.
    pub fn from_edge_list(text: &str, agent_count: Option<usize>) -> Result<Self> {
        let mut edges = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let parse = |s: &str| {
                s.parse::<usize>().map_err(|e| Error::Parse {
                    line: lineno + 1,
                    reason: format!("bad agent index {s:?}: {e}"),
                })
            };
            match fields.as_slice() {
                [a, b] => edges.push((parse(a)?, parse(b)?)),
                _ => {
                    return Err(Error::Parse {
                        line: lineno + 1,
                        reason: format!("expected two indices, found {}", fields.len()),
                    })
                }
            }
        }
        let count = match agent_count {
            Some(n) => n,
            None => edges.iter().map(|&(i, j)| i.max(j) + 1).max().unwrap_or(0),
        };
        Self::new(count, &edges)
    }

    pub fn to_edge_list(&self) -> String {
        self.edges.iter().map(|(i, j)| format!("{i} {j}\n")).collect()
    }

    pub fn agent_count(&self) -> usize {
        self.agent_count
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    /// `N_i = {i} ∪ {j : (i, j) ∈ edges}`, sorted ascending.
    pub fn neighborhood(&self, agent: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .edges
            .iter()
            .filter_map(|&(a, b)| {
                if a == agent {
                    Some(b)
                } else if b == agent {
                    Some(a)
                } else {
                    None
                }
            })
            .collect();
        out.push(agent);
        out.sort_unstable();
        out
    }

    /// Connected components, each sorted, ordered by smallest member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut label = vec![usize::MAX; self.agent_count];
        let mut comps = Vec::new();
        for start in 0..self.agent_count {
            if label[start] != usize::MAX {
                continue;
            }
            let id = comps.len();
            let mut stack = vec![start];
            let mut members = Vec::new();
            label[start] = id;
            while let Some(v) = stack.pop() {
                members.push(v);
                for u in self.neighborhood(v) {
                    if label[u] == usize::MAX {
                        label[u] = id;
                        stack.push(u);
                    }
                }
            }
            members.sort_unstable();
            comps.push(members);
        }
        comps
    }
}
