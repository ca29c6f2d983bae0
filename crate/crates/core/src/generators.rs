//! Seeded reference graphs: Erdős–Rényi, Watts–Strogatz and Barabási–Albert.
//!
//! All randomness comes from ChaCha8 (`rand_chacha::ChaCha8Rng`) seeded with
//! `seed_from_u64`, so a `(spec, seed)` pair always yields the same edge set.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::GraphSnapshot;

#[derive(Debug, Error, PartialEq)]
pub enum GeneratorError {
    #[error("invalid generator spec: {0}")]
    InvalidSpec(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GeneratorSpec {
    ErdosRenyi { n: usize, p: f64 },
    WattsStrogatz { n: usize, k: usize, p: f64 },
    BarabasiAlbert { n: usize, m: usize },
}

impl GeneratorSpec {
    pub fn node_count(&self) -> usize {
        match *self {
            GeneratorSpec::ErdosRenyi { n, .. }
            | GeneratorSpec::WattsStrogatz { n, .. }
            | GeneratorSpec::BarabasiAlbert { n, .. } => n,
        }
    }

    pub fn validate(&self) -> Result<(), GeneratorError> {
        let invalid = |msg: String| Err(GeneratorError::InvalidSpec(msg));
        let n = self.node_count();
        if n < 3 {
            return invalid(format!("n = {n}, need n >= 3"));
        }
        match *self {
            GeneratorSpec::ErdosRenyi { p, .. } | GeneratorSpec::WattsStrogatz { p, .. }
                if !(0.0..=1.0).contains(&p) =>
            {
                invalid(format!("p = {p} outside [0, 1]"))
            }
            GeneratorSpec::WattsStrogatz { k, .. } if k % 2 != 0 || k >= n => {
                invalid(format!("k = {k} must be even and below n = {n}"))
            }
            GeneratorSpec::BarabasiAlbert { m, .. } if m < 1 || m >= n => {
                invalid(format!("m = {m} must satisfy 1 <= m < n = {n}"))
            }
            _ => Ok(()),
        }
    }

    pub fn generate(&self, seed: u64) -> Result<GraphSnapshot, GeneratorError> {
        match *self {
            GeneratorSpec::ErdosRenyi { n, p } => erdos_renyi(n, p, seed),
            GeneratorSpec::WattsStrogatz { n, k, p } => watts_strogatz(n, k, p, seed),
            GeneratorSpec::BarabasiAlbert { n, m } => barabasi_albert(n, m, seed),
        }
    }
}

impl fmt::Display for GeneratorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeneratorSpec::ErdosRenyi { n, p } => write!(f, "erdos_renyi(n={n}, p={p})"),
            GeneratorSpec::WattsStrogatz { n, k, p } => {
                write!(f, "watts_strogatz(n={n}, k={k}, p={p})")
            }
            GeneratorSpec::BarabasiAlbert { n, m } => write!(f, "barabasi_albert(n={n}, m={m})"),
        }
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn build(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> GraphSnapshot {
    GraphSnapshot::from_index_edges(n, edges).expect("generators emit simple graphs")
}

/// G(n, p): each unordered pair independently with probability `p`.
pub fn erdos_renyi(n: usize, p: f64, seed: u64) -> Result<GraphSnapshot, GeneratorError> {
    GeneratorSpec::ErdosRenyi { n, p }.validate()?;
    let mut rng = rng(seed);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.random::<f64>() < p {
                edges.push((i, j));
            }
        }
    }
    Ok(build(n, edges))
}

/// Watts–Strogatz graph plus the number of rewires abandoned because the
/// source node was already adjacent to every other node.
#[derive(Debug, Clone, PartialEq)]
pub struct WattsStrogatzGraph {
    pub graph: GraphSnapshot,
    pub skipped_rewires: usize,
}

/// Ring lattice of even degree `k`; each lattice edge `(u, u + j)` has its far
/// end moved to a uniformly chosen node with probability `p`, avoiding
/// self-loops and duplicates. Edge count stays `n k / 2`.
pub fn watts_strogatz(
    n: usize,
    k: usize,
    p: f64,
    seed: u64,
) -> Result<GraphSnapshot, GeneratorError> {
    watts_strogatz_with_stats(n, k, p, seed).map(|ws| ws.graph)
}

pub fn watts_strogatz_with_stats(
    n: usize,
    k: usize,
    p: f64,
    seed: u64,
) -> Result<WattsStrogatzGraph, GeneratorError> {
    GeneratorSpec::WattsStrogatz { n, k, p }.validate()?;
    let mut rng = rng(seed);
    let mut adjacency: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    for u in 0..n {
        for j in 1..=k / 2 {
            let v = (u + j) % n;
            adjacency[u].insert(v);
            adjacency[v].insert(u);
        }
    }
    let max_attempts = 16 * n;
    let mut skipped = 0;
    for j in 1..=k / 2 {
        for u in 0..n {
            if rng.random::<f64>() >= p {
                continue;
            }
            let v = (u + j) % n;
            if !adjacency[u].contains(&v) {
                continue; // already rewired away from this side
            }
            if adjacency[u].len() >= n - 1 {
                skipped += 1;
                continue;
            }
            let mut target = None;
            for _ in 0..max_attempts {
                let w = rng.random_range(0..n);
                if w != u && !adjacency[u].contains(&w) {
                    target = Some(w);
                    break;
                }
            }
            let Some(w) = target else {
                skipped += 1;
                continue;
            };
            adjacency[u].remove(&v);
            adjacency[v].remove(&u);
            adjacency[u].insert(w);
            adjacency[w].insert(u);
        }
    }
    let edges: Vec<(usize, usize)> = adjacency
        .iter()
        .enumerate()
        .flat_map(|(u, set)| set.iter().filter(move |&&w| w > u).map(move |&w| (u, w)))
        .collect();
    Ok(WattsStrogatzGraph {
        graph: build(n, edges),
        skipped_rewires: skipped,
    })
}

/// Preferential attachment from a complete seed graph on `m + 1` nodes. Each
/// new node picks `m` distinct targets with probability proportional to
/// degree. Final edge count is `m (m + 1) / 2 + m (n - m - 1)`.
pub fn barabasi_albert(n: usize, m: usize, seed: u64) -> Result<GraphSnapshot, GeneratorError> {
    GeneratorSpec::BarabasiAlbert { n, m }.validate()?;
    let mut rng = rng(seed);
    let mut edges = Vec::with_capacity(m * (m + 1) / 2 + m * (n - m - 1));
    // every node appears here once per unit of degree
    let mut stubs: Vec<usize> = Vec::with_capacity(2 * edges.capacity());
    for i in 0..=m {
        for j in i + 1..=m {
            edges.push((i, j));
            stubs.push(i);
            stubs.push(j);
        }
    }
    let mut chosen = HashSet::with_capacity(m);
    let mut picks = Vec::with_capacity(m);
    for v in m + 1..n {
        chosen.clear();
        picks.clear();
        while picks.len() < m {
            let t = stubs[rng.random_range(0..stubs.len())];
            if chosen.insert(t) {
                picks.push(t);
            }
        }
        for &t in &picks {
            edges.push((t, v));
            stubs.push(t);
            stubs.push(v);
        }
    }
    Ok(build(n, edges))
}
