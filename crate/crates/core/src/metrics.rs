//! Per-snapshot metric suite: degree statistics, average path length,
//! diameter, clustering, the random-graph baselines, the small-world
//! coefficient and modularity.
//!
//! Path-based metrics are taken over the largest connected component; the
//! number of components and the size of the largest one are reported next to
//! them in [`MetricsRecord`].

use std::collections::{HashMap, VecDeque};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{GraphSnapshot, UNREACHED};
use crate::grid_log::Year;

/// Euler–Mascheroni constant to the four decimals used by the random-graph
/// path-length approximation.
pub const EULER_GAMMA_TRUNCATED: f64 = 0.5772;

#[derive(Debug, Error, PartialEq)]
pub enum MetricError {
    #[error("no nodes")]
    NoNodes,
    #[error("no edges")]
    NoEdges,
    #[error("largest connected component has {0} node(s); at least 2 required")]
    ComponentTooSmall(usize),
    #[error("random baseline undefined: {0}")]
    RandomBaselineUndefined(String),
    #[error("small-world coefficient undefined: {0}")]
    SigmaUndefined(String),
    #[error("assignment covers {found} nodes, graph has {expected}")]
    PartialAssignment { expected: usize, found: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NodeLocalStats {
    /// `k_i`
    pub degree: usize,
    /// `E_i`, edges among the neighbours of `i`.
    pub neighbor_edge_count: usize,
    /// `2E_i / (k_i (k_i - 1))`, or 0 when `k_i < 2`.
    pub local_clustering: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DegreeStats {
    pub degrees: Vec<usize>,
    pub average: f64,
    /// `histogram[k]` = number of nodes of degree `k`, for `k = 0..=max`.
    pub histogram: Vec<usize>,
}

/// `<k> = 2E / N`.
pub fn average_degree(nodes: usize, edges: usize) -> Result<f64, MetricError> {
    if nodes == 0 {
        return Err(MetricError::NoNodes);
    }
    Ok(2.0 * edges as f64 / nodes as f64)
}

pub fn degree_stats(g: &GraphSnapshot) -> Result<DegreeStats, MetricError> {
    let average = average_degree(g.node_count(), g.edge_count())?;
    let degrees = g.degrees();
    let max = degrees.iter().copied().max().unwrap_or(0);
    let mut histogram = vec![0; max + 1];
    for &k in &degrees {
        histogram[k] += 1;
    }
    Ok(DegreeStats {
        degrees,
        average,
        histogram,
    })
}

/// Mean local clustering over all nodes, with the per-node breakdown.
pub fn clustering_coefficient(
    g: &GraphSnapshot,
) -> Result<(f64, Vec<NodeLocalStats>), MetricError> {
    let n = g.node_count();
    if n == 0 {
        return Err(MetricError::NoNodes);
    }
    let mut mark = vec![false; n];
    let mut locals = Vec::with_capacity(n);
    for i in 0..n {
        let neigh = g.neighbors(i);
        for &u in neigh {
            mark[u] = true;
        }
        // each neighbour pair counted once, from its lower endpoint
        let mut links = 0;
        for &u in neigh {
            links += g.neighbors(u).iter().filter(|&&w| w > u && mark[w]).count();
        }
        for &u in neigh {
            mark[u] = false;
        }
        let k = neigh.len();
        let local_clustering = if k < 2 {
            0.0
        } else {
            2.0 * links as f64 / (k * (k - 1)) as f64
        };
        locals.push(NodeLocalStats {
            degree: k,
            neighbor_edge_count: links,
            local_clustering,
        });
    }
    let c = locals.iter().map(|s| s.local_clustering).sum::<f64>() / n as f64;
    Ok((c, locals))
}

/// Distance statistics of the largest connected component.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathStats {
    pub average: f64,
    pub diameter: u32,
    pub component_size: usize,
    /// Sum of `d(i, j)` over ordered pairs.
    pub distance_sum: u64,
}

pub fn path_stats(g: &GraphSnapshot) -> Result<PathStats, MetricError> {
    let parts = g.connected_components();
    let members = parts.largest_nodes();
    let size = members.len();
    if size < 2 {
        return Err(MetricError::ComponentTooSmall(size));
    }
    let n = g.node_count();
    let (distance_sum, diameter) = members
        .par_iter()
        .map_init(
            || (vec![UNREACHED; n], VecDeque::new()),
            |(dist, queue), &source| {
                dist.fill(UNREACHED);
                g.bfs_into(source, dist, queue);
                let mut sum = 0u64;
                let mut far = 0u32;
                for &v in &members {
                    let d = dist[v];
                    sum += u64::from(d);
                    far = far.max(d);
                }
                (sum, far)
            },
        )
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1.max(b.1)));
    let pairs = (size * (size - 1)) as f64;
    Ok(PathStats {
        average: distance_sum as f64 / pairs,
        diameter,
        component_size: size,
        distance_sum,
    })
}

/// `L`: mean hop distance over ordered pairs of the largest component.
pub fn average_path_length(g: &GraphSnapshot) -> Result<f64, MetricError> {
    path_stats(g).map(|p| p.average)
}

/// `d`: longest shortest path within the largest component.
pub fn diameter(g: &GraphSnapshot) -> Result<u32, MetricError> {
    path_stats(g).map(|p| p.diameter)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RandomBaselines {
    /// `L_r = (ln N - 0.5772) / ln<k> + 0.5`
    pub path_length: f64,
    /// `C_r = <k> / N`
    pub clustering: f64,
}

pub fn random_baselines(nodes: usize, avg_degree: f64) -> Result<RandomBaselines, MetricError> {
    if nodes < 2 {
        return Err(MetricError::RandomBaselineUndefined(format!(
            "N = {nodes} < 2"
        )));
    }
    if avg_degree.is_nan() || avg_degree <= 1.0 {
        return Err(MetricError::RandomBaselineUndefined(format!(
            "<k> = {avg_degree} <= 1"
        )));
    }
    let n = nodes as f64;
    Ok(RandomBaselines {
        path_length: (n.ln() - EULER_GAMMA_TRUNCATED) / avg_degree.ln() + 0.5,
        clustering: avg_degree / n,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmallWorld {
    pub sigma: f64,
    pub is_small_world: bool,
}

/// `sigma = (C / C_r) / (L / L_r)`; small-world when `sigma > 1`.
pub fn small_world_sigma(
    clustering: f64,
    random_clustering: f64,
    path_length: f64,
    random_path_length: f64,
) -> Result<SmallWorld, MetricError> {
    let checks = [
        ("C_r", random_clustering),
        ("L", path_length),
        ("L_r", random_path_length),
    ];
    for (name, value) in checks {
        if value <= 0.0 || !value.is_finite() {
            return Err(MetricError::SigmaUndefined(format!("{name} = {value}")));
        }
    }
    if clustering < 0.0 || !clustering.is_finite() {
        return Err(MetricError::SigmaUndefined(format!("C = {clustering}")));
    }
    let sigma = (clustering / random_clustering) / (path_length / random_path_length);
    Ok(SmallWorld {
        sigma,
        is_small_world: sigma > 1.0,
    })
}

/// Modularity `Q` of a labelling. Labels are arbitrary community ids, one per
/// node.
///
/// Evaluated through per-community sums: with `m = E`, `l_c` internal edges
/// and `d_c` the degree total of community `c`,
/// `Q = sum_c (4 m l_c - d_c^2) / (4 m^2)`, which is the pairwise definition
/// regrouped. The numerator is exact integer arithmetic, so the
/// single-community partition gives exactly 0.
pub fn modularity(g: &GraphSnapshot, labels: &[usize]) -> Result<f64, MetricError> {
    if labels.len() != g.node_count() {
        return Err(MetricError::PartialAssignment {
            expected: g.node_count(),
            found: labels.len(),
        });
    }
    let m = g.edge_count() as i128;
    if m == 0 {
        return Err(MetricError::NoEdges);
    }
    let mut sums: HashMap<usize, (i128, i128)> = HashMap::new();
    for (i, &c) in labels.iter().enumerate() {
        sums.entry(c).or_default().1 += g.degree(i) as i128;
    }
    for (a, b) in g.edges() {
        if labels[a] == labels[b] {
            sums.get_mut(&labels[a]).expect("label seen").0 += 1;
        }
    }
    let numerator: i128 = sums.values().map(|&(l, d)| 4 * m * l - d * d).sum();
    Ok(numerator as f64 / (4 * m * m) as f64)
}

/// One year's metric row. Metrics that are undefined for the snapshot are
/// `None` and the reason is kept in `notes`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRecord {
    pub year: Option<Year>,
    pub nodes: usize,
    pub edges: usize,
    pub avg_degree: Option<f64>,
    pub diameter: Option<u32>,
    pub avg_path_length: Option<f64>,
    pub clustering: Option<f64>,
    pub random_path_length: Option<f64>,
    pub random_clustering: Option<f64>,
    pub sigma: Option<f64>,
    pub modularity: Option<f64>,
    pub component_count: usize,
    pub largest_component_size: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

pub const CSV_COLUMNS: [&str; 13] = [
    "year",
    "N",
    "E",
    "avg_degree",
    "diameter",
    "L",
    "C",
    "L_r",
    "C_r",
    "sigma",
    "Q",
    "components",
    "lcc_size",
];

/// Marker written in place of an undefined metric.
pub const ABSENT: &str = "NA";

impl MetricsRecord {
    pub fn csv_header() -> String {
        CSV_COLUMNS.join(",")
    }

    /// Fields in [`CSV_COLUMNS`] order, floats to 6 significant digits.
    pub fn csv_fields(&self) -> Vec<String> {
        fn float(x: Option<f64>) -> String {
            x.map_or_else(|| ABSENT.to_string(), format_sig6)
        }
        vec![
            self.year
                .map_or_else(|| ABSENT.to_string(), |y| y.to_string()),
            self.nodes.to_string(),
            self.edges.to_string(),
            float(self.avg_degree),
            self.diameter
                .map_or_else(|| ABSENT.to_string(), |d| d.to_string()),
            float(self.avg_path_length),
            float(self.clustering),
            float(self.random_path_length),
            float(self.random_clustering),
            float(self.sigma),
            float(self.modularity),
            self.component_count.to_string(),
            self.largest_component_size.to_string(),
        ]
    }

    pub fn csv_row(&self) -> String {
        self.csv_fields().join(",")
    }

    pub fn is_small_world(&self) -> Option<bool> {
        self.sigma.map(|s| s > 1.0)
    }
}

/// Format like C's `%.6g`: six significant digits, trailing zeros dropped,
/// exponent form outside `1e-4 <= |x| < 1e6`.
pub fn format_sig6(x: f64) -> String {
    const DIGITS: i32 = 6;
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..DIGITS).contains(&exp) {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (DIGITS - 1 - exp) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}
