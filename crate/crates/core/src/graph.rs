//! Immutable simple undirected graphs and the traversal primitives the metric
//! suite is built on.

use std::collections::{HashMap, VecDeque};
use std::fmt::Write as _;

use thiserror::Error;

use crate::grid_log::{TemporalGridLog, Year};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("node index {index} out of range for graph with {nodes} nodes")]
    InvalidNode { index: usize, nodes: usize },
    #[error("self-loop on node {0}")]
    SelfLoop(usize),
    #[error("duplicate edge {0}-{1}")]
    DuplicateEdge(usize, usize),
    #[error("duplicate node id `{0}`")]
    DuplicateId(String),
    #[error("edge list line {line}: {message}")]
    EdgeList { line: usize, message: String },
}

/// A simple undirected graph for one year (or a generated reference graph).
///
/// Neighbour lists are sorted, so the adjacency matrix `A_ij` is answered by
/// binary search and iteration order is deterministic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphSnapshot {
    year: Option<Year>,
    ids: Vec<String>,
    adjacency: Vec<Vec<usize>>,
    edge_count: usize,
}

impl GraphSnapshot {
    /// Build from node ids and index pairs. Self-loops and repeated pairs are
    /// rejected.
    pub fn from_edges<I>(ids: Vec<String>, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let n = ids.len();
        let mut seen = HashMap::with_capacity(n);
        for id in &ids {
            if seen.insert(id.as_str(), ()).is_some() {
                return Err(GraphError::DuplicateId(id.clone()));
            }
        }
        let mut adjacency = vec![Vec::new(); n];
        let mut edge_count = 0;
        for (a, b) in edges {
            for index in [a, b] {
                if index >= n {
                    return Err(GraphError::InvalidNode { index, nodes: n });
                }
            }
            if a == b {
                return Err(GraphError::SelfLoop(a));
            }
            adjacency[a].push(b);
            adjacency[b].push(a);
            edge_count += 1;
        }
        for (i, list) in adjacency.iter_mut().enumerate() {
            list.sort_unstable();
            if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
                return Err(GraphError::DuplicateEdge(i.min(w[0]), i.max(w[0])));
            }
        }
        Ok(GraphSnapshot {
            year: None,
            ids,
            adjacency,
            edge_count,
        })
    }

    /// Graph on `n` nodes labelled `"0"`, `"1"`, ... by index.
    pub fn from_index_edges<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        Self::from_edges((0..n).map(|i| i.to_string()).collect(), edges)
    }

    /// Snapshot of the elements active in `year`, nodes indexed in sorted id
    /// order.
    pub fn from_log(log: &TemporalGridLog, year: Year) -> Self {
        let active = log.active_elements(year);
        let ids: Vec<String> = active.nodes.into_iter().collect();
        let index: HashMap<&str, usize> = ids
            .iter()
            .enumerate()
            .map(|(i, id)| (id.as_str(), i))
            .collect();
        let pairs: Vec<(usize, usize)> = log
            .edges()
            .iter()
            .filter(|e| active.edges.contains(&e.id))
            .map(|e| (index[e.node_a.as_str()], index[e.node_b.as_str()]))
            .collect();
        let mut snapshot = Self::from_edges(ids, pairs)
            .expect("a validated log yields a simple graph in every year");
        snapshot.year = Some(year);
        snapshot
    }

    /// Parse the `id_a id_b` per-line edge-list format. A line holding a
    /// single id declares an isolated node. Blank lines and lines starting
    /// with `#` are skipped. Nodes are indexed in sorted id order.
    pub fn from_edge_list(text: &str) -> Result<Self, GraphError> {
        let mut pairs = Vec::new();
        let mut lone = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split_whitespace();
            match (parts.next(), parts.next(), parts.next()) {
                (Some(a), Some(b), None) => pairs.push((a.to_string(), b.to_string())),
                (Some(a), None, None) => lone.push(a.to_string()),
                _ => {
                    return Err(GraphError::EdgeList {
                        line: i + 1,
                        message: format!("expected two ids, found `{line}`"),
                    })
                }
            }
        }
        let mut ids: Vec<String> = pairs
            .iter()
            .flat_map(|(a, b)| [a.clone(), b.clone()])
            .chain(lone)
            .collect();
        ids.sort();
        ids.dedup();
        let index: HashMap<&str, usize> = ids
            .iter()
            .enumerate()
            .map(|(i, id)| (id.as_str(), i))
            .collect();
        let edges: Vec<(usize, usize)> = pairs
            .iter()
            .map(|(a, b)| (index[a.as_str()], index[b.as_str()]))
            .collect();
        Self::from_edges(ids, edges)
    }

    pub fn with_year(mut self, year: Year) -> Self {
        self.year = Some(year);
        self
    }

    pub fn year(&self) -> Option<Year> {
        self.year
    }

    pub fn node_count(&self) -> usize {
        self.ids.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn id(&self, index: usize) -> &str {
        &self.ids[index]
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.ids.iter().position(|x| x == id)
    }

    pub fn neighbors(&self, index: usize) -> &[usize] {
        &self.adjacency[index]
    }

    pub fn degree(&self, index: usize) -> usize {
        self.adjacency[index].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adjacency.iter().map(Vec::len).collect()
    }

    /// `A_ij` as a boolean.
    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adjacency[a].binary_search(&b).is_ok()
    }

    /// Each edge once, as `(low, high)` index pairs in ascending order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(i, list)| list.iter().filter(move |&&j| j > i).map(move |&j| (i, j)))
    }

    /// Debug export: one `id_a id_b` line per edge, `id_a < id_b`, lines
    /// sorted, then one line per isolated node.
    pub fn to_edge_list(&self) -> String {
        let mut lines: Vec<(&str, &str)> = self
            .edges()
            .map(|(a, b)| {
                let (x, y) = (self.id(a), self.id(b));
                if x <= y {
                    (x, y)
                } else {
                    (y, x)
                }
            })
            .collect();
        lines.sort_unstable();
        let mut out = String::new();
        for (a, b) in lines {
            let _ = writeln!(out, "{a} {b}");
        }
        for i in (0..self.node_count()).filter(|&i| self.degree(i) == 0) {
            let _ = writeln!(out, "{}", self.id(i));
        }
        out
    }

    /// Hop distances from `source`; `None` marks unreachable nodes.
    pub fn shortest_path_lengths(&self, source: usize) -> Result<Vec<Option<u32>>, GraphError> {
        if source >= self.node_count() {
            return Err(GraphError::InvalidNode {
                index: source,
                nodes: self.node_count(),
            });
        }
        let mut dist = vec![UNREACHED; self.node_count()];
        let mut queue = VecDeque::new();
        self.bfs_into(source, &mut dist, &mut queue);
        Ok(dist
            .into_iter()
            .map(|d| (d != UNREACHED).then_some(d))
            .collect())
    }

    /// BFS into caller-owned buffers. `dist` must be filled with
    /// [`UNREACHED`] on entry.
    pub(crate) fn bfs_into(&self, source: usize, dist: &mut [u32], queue: &mut VecDeque<usize>) {
        queue.clear();
        dist[source] = 0;
        queue.push_back(source);
        while let Some(u) = queue.pop_front() {
            let next = dist[u] + 1;
            for &v in &self.adjacency[u] {
                if dist[v] == UNREACHED {
                    dist[v] = next;
                    queue.push_back(v);
                }
            }
        }
    }

    pub fn connected_components(&self) -> ComponentPartition {
        let n = self.node_count();
        let mut component_of = vec![usize::MAX; n];
        let mut sizes = Vec::new();
        let mut min_id: Vec<usize> = Vec::new();
        let mut stack = Vec::new();
        for start in 0..n {
            if component_of[start] != usize::MAX {
                continue;
            }
            let c = sizes.len();
            component_of[start] = c;
            stack.push(start);
            let mut size = 0;
            let mut smallest = start;
            while let Some(u) = stack.pop() {
                size += 1;
                if self.ids[u] < self.ids[smallest] {
                    smallest = u;
                }
                for &v in &self.adjacency[u] {
                    if component_of[v] == usize::MAX {
                        component_of[v] = c;
                        stack.push(v);
                    }
                }
            }
            sizes.push(size);
            min_id.push(smallest);
        }
        let largest = (0..sizes.len()).min_by(|&a, &b| {
            sizes[b]
                .cmp(&sizes[a])
                .then_with(|| self.ids[min_id[a]].cmp(&self.ids[min_id[b]]))
        });
        ComponentPartition {
            component_of,
            sizes,
            largest,
        }
    }
}

pub(crate) const UNREACHED: u32 = u32::MAX;

/// Connected components of a snapshot.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentPartition {
    component_of: Vec<usize>,
    sizes: Vec<usize>,
    largest: Option<usize>,
}

impl ComponentPartition {
    pub fn count(&self) -> usize {
        self.sizes.len()
    }

    pub fn component_of(&self, node: usize) -> usize {
        self.component_of[node]
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    /// Largest component id; equal sizes go to the component holding the
    /// smallest node id.
    pub fn largest(&self) -> Option<usize> {
        self.largest
    }

    pub fn largest_size(&self) -> usize {
        self.largest.map_or(0, |c| self.sizes[c])
    }

    pub fn largest_nodes(&self) -> Vec<usize> {
        match self.largest {
            None => Vec::new(),
            Some(c) => self.members(c),
        }
    }

    pub fn members(&self, component: usize) -> Vec<usize> {
        self.component_of
            .iter()
            .enumerate()
            .filter(|&(_, &c)| c == component)
            .map(|(i, _)| i)
            .collect()
    }
}
