//! Community assignments that maximize modularity.
//!
//! [`detect_communities`] is a greedy agglomerative search: every node starts
//! in its own community and the pair of adjacent communities with the largest
//! modularity gain is merged until no merge gains anything. Gains are compared
//! as exact integers (`2m e_ab - d_a d_b`), and ties go to the pair with the
//! lowest community ids, so the result is reproducible.
//!
//! [`exhaustive_best_partition`] enumerates every set partition of a small
//! graph and is used as an oracle for the greedy search.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::GraphSnapshot;
use crate::metrics;

/// Largest graph the exhaustive search accepts (Bell(12) = 4 213 597
/// partitions).
pub const EXHAUSTIVE_LIMIT: usize = 12;

pub const GREEDY_TAG: &str = "greedy-agglomerative";
pub const EXHAUSTIVE_TAG: &str = "exhaustive";

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CommunityError {
    #[error("graph has no edges")]
    NoEdges,
    #[error("exhaustive search refused: {nodes} nodes exceeds the limit of {limit}")]
    TooLarge { nodes: usize, limit: usize },
    #[error("restart count must be at least 1")]
    NoRestarts,
}

/// Node-to-community map `g_i` and its modularity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommunityAssignment {
    /// Community id per node index; ids are numbered `0..` in order of each
    /// community's lowest node index.
    pub labels: Vec<usize>,
    pub achieved_q: f64,
    pub method: String,
    pub seed: u64,
}

impl CommunityAssignment {
    pub fn community_count(&self) -> usize {
        self.labels.iter().max().map_or(0, |&m| m + 1)
    }

    /// Members of each community, as node indices.
    pub fn communities(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.community_count()];
        for (i, &c) in self.labels.iter().enumerate() {
            out[c].push(i);
        }
        out
    }

    /// `node_id,community_id` CSV with header.
    pub fn to_csv(&self, g: &GraphSnapshot) -> String {
        let mut out = String::from("node_id,community_id\n");
        for (i, &c) in self.labels.iter().enumerate() {
            out.push_str(g.id(i));
            out.push(',');
            out.push_str(&c.to_string());
            out.push('\n');
        }
        out
    }
}

/// Greedy agglomerative modularity maximization with a single pass.
pub fn detect_communities(
    g: &GraphSnapshot,
    seed: u64,
) -> Result<CommunityAssignment, CommunityError> {
    detect_communities_with_restarts(g, seed, 1)
}

/// Greedy search repeated `restarts` times. The first pass uses node order
/// as the initial community numbering; later passes use seeded random
/// numberings, which only changes how ties resolve. The best `Q` wins, the
/// earliest pass on equal `Q`.
pub fn detect_communities_with_restarts(
    g: &GraphSnapshot,
    seed: u64,
    restarts: usize,
) -> Result<CommunityAssignment, CommunityError> {
    if restarts == 0 {
        return Err(CommunityError::NoRestarts);
    }
    if g.edge_count() == 0 {
        return Err(CommunityError::NoEdges);
    }
    let n = g.node_count();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<(Vec<usize>, f64)> = None;
    for pass in 0..restarts {
        let mut numbering: Vec<usize> = (0..n).collect();
        if pass > 0 {
            numbering.shuffle(&mut rng);
        }
        let labels = canonical(&greedy_pass(g, &numbering));
        let q = metrics::modularity(g, &labels).expect("full assignment on a graph with edges");
        if best.as_ref().is_none_or(|(_, bq)| q > *bq) {
            best = Some((labels, q));
        }
    }
    let (labels, achieved_q) = best.expect("at least one pass");
    Ok(CommunityAssignment {
        labels,
        achieved_q,
        method: GREEDY_TAG.to_string(),
        seed,
    })
}

/// One greedy run; node `i` starts in community `numbering[i]`.
fn greedy_pass(g: &GraphSnapshot, numbering: &[usize]) -> Vec<usize> {
    let n = g.node_count();
    let two_m = 2 * g.edge_count() as i64;
    let mut links: Vec<BTreeMap<usize, i64>> = vec![BTreeMap::new(); n];
    let mut degree = vec![0i64; n];
    for i in 0..n {
        degree[numbering[i]] = g.degree(i) as i64;
    }
    for (a, b) in g.edges() {
        let (ca, cb) = (numbering[a], numbering[b]);
        *links[ca].entry(cb).or_insert(0) += 1;
        *links[cb].entry(ca).or_insert(0) += 1;
    }
    let mut owner: Vec<usize> = (0..n).collect();

    loop {
        let mut best: Option<(i64, usize, usize)> = None;
        for a in 0..n {
            for (&b, &e_ab) in links[a].range(a + 1..) {
                let gain = two_m * e_ab - degree[a] * degree[b];
                if gain > 0 && best.is_none_or(|(g0, _, _)| gain > g0) {
                    best = Some((gain, a, b));
                }
            }
        }
        let Some((_, a, b)) = best else { break };

        let absorbed = std::mem::take(&mut links[b]);
        for (c, e) in absorbed {
            if c == a {
                continue;
            }
            let back = links[c].remove(&b).expect("symmetric link table");
            *links[c].entry(a).or_insert(0) += back;
            *links[a].entry(c).or_insert(0) += e;
        }
        links[a].remove(&b);
        degree[a] += degree[b];
        degree[b] = 0;
        for o in owner.iter_mut() {
            if *o == b {
                *o = a;
            }
        }
    }
    (0..n).map(|i| owner[numbering[i]]).collect()
}

/// Renumber labels `0..` by first appearance in node order.
fn canonical(labels: &[usize]) -> Vec<usize> {
    let mut map = BTreeMap::new();
    labels
        .iter()
        .map(|&l| {
            let next = map.len();
            *map.entry(l).or_insert(next)
        })
        .collect()
}

/// Best modularity partition by full enumeration of set partitions. Among
/// equally good partitions the first in restricted-growth order wins, so the
/// single community is preferred when nothing beats `Q = 0`.
pub fn exhaustive_best_partition(g: &GraphSnapshot) -> Result<CommunityAssignment, CommunityError> {
    let n = g.node_count();
    if n > EXHAUSTIVE_LIMIT {
        return Err(CommunityError::TooLarge {
            nodes: n,
            limit: EXHAUSTIVE_LIMIT,
        });
    }
    if g.edge_count() == 0 {
        return Err(CommunityError::NoEdges);
    }
    let mut search = Exhaustive {
        g,
        m: g.edge_count() as i64,
        labels: vec![0; n],
        internal: vec![0; n],
        degree: vec![0; n],
        best_score: i64::MIN,
        best: vec![0; n],
    };
    search.descend(0, 0);
    let labels = search.best;
    let achieved_q = metrics::modularity(g, &labels).expect("full assignment");
    Ok(CommunityAssignment {
        labels,
        achieved_q,
        method: EXHAUSTIVE_TAG.to_string(),
        seed: 0,
    })
}

struct Exhaustive<'a> {
    g: &'a GraphSnapshot,
    m: i64,
    labels: Vec<usize>,
    internal: Vec<i64>,
    degree: Vec<i64>,
    best_score: i64,
    best: Vec<usize>,
}

impl Exhaustive<'_> {
    fn descend(&mut self, node: usize, used: usize) {
        if node == self.labels.len() {
            let score: i64 = (0..used)
                .map(|c| 4 * self.m * self.internal[c] - self.degree[c] * self.degree[c])
                .sum();
            if score > self.best_score {
                self.best_score = score;
                self.best.clone_from(&self.labels);
            }
            return;
        }
        let k = self.g.degree(node) as i64;
        for c in 0..=used.min(self.labels.len() - 1) {
            let inside = self
                .g
                .neighbors(node)
                .iter()
                .filter(|&&j| j < node && self.labels[j] == c)
                .count() as i64;
            self.labels[node] = c;
            self.internal[c] += inside;
            self.degree[c] += k;
            self.descend(node + 1, used.max(c + 1));
            self.internal[c] -= inside;
            self.degree[c] -= k;
        }
    }
}
