//! Year-by-year analysis of a grid log and the statistics run on the
//! resulting series.

use std::fmt;
use std::ops::RangeInclusive;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::communities::detect_communities;
use crate::graph::GraphSnapshot;
use crate::grid_log::{TemporalGridLog, Year};
use crate::metrics::{
    self, clustering_coefficient, path_stats, random_baselines, small_world_sigma, MetricsRecord,
};

#[derive(Debug, Error, PartialEq)]
pub enum EvolutionError {
    #[error("year range is empty")]
    EmptyRange,
    #[error("series lengths differ ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("need at least 2 paired values, found {0}")]
    TooShort(usize),
    #[error("undefined correlation: constant series")]
    ConstantSeries,
    #[error("series maximum {0} is not positive")]
    NonPositiveMax(f64),
    #[error("empty series")]
    EmptySeries,
}

/// Full metric row for one snapshot. Communities are detected with `seed`.
pub fn analyze_snapshot(g: &GraphSnapshot, seed: u64) -> MetricsRecord {
    let parts = g.connected_components();
    let mut notes = Vec::new();
    let n = g.node_count();
    let e = g.edge_count();

    let avg_degree = note(&mut notes, "avg_degree", metrics::average_degree(n, e));
    let clustering = note(&mut notes, "C", clustering_coefficient(g).map(|(c, _)| c));
    let paths = note(&mut notes, "L", path_stats(g));
    let baselines = avg_degree.and_then(|k| note(&mut notes, "baselines", random_baselines(n, k)));
    let sigma = match (clustering, baselines, paths) {
        (Some(c), Some(b), Some(p)) => note(
            &mut notes,
            "sigma",
            small_world_sigma(c, b.clustering, p.average, b.path_length),
        )
        .map(|s| s.sigma),
        _ => None,
    };
    let modularity = note(
        &mut notes,
        "Q",
        detect_communities(g, seed).map(|a| a.achieved_q),
    );

    MetricsRecord {
        year: g.year(),
        nodes: n,
        edges: e,
        avg_degree,
        diameter: paths.map(|p| p.diameter),
        avg_path_length: paths.map(|p| p.average),
        clustering,
        random_path_length: baselines.map(|b| b.path_length),
        random_clustering: baselines.map(|b| b.clustering),
        sigma,
        modularity,
        component_count: parts.count(),
        largest_component_size: parts.largest_size(),
        notes,
    }
}

fn note<T, E: fmt::Display>(notes: &mut Vec<String>, what: &str, r: Result<T, E>) -> Option<T> {
    match r {
        Ok(v) => Some(v),
        Err(err) => {
            notes.push(format!("{what}: {err}"));
            None
        }
    }
}

/// Snapshot of `year` run through [`analyze_snapshot`].
pub fn analyze_year(log: &TemporalGridLog, year: Year, seed: u64) -> MetricsRecord {
    analyze_snapshot(&GraphSnapshot::from_log(log, year), seed)
}

/// Selectable metric column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Nodes,
    Edges,
    AvgDegree,
    Diameter,
    PathLength,
    Clustering,
    RandomPathLength,
    RandomClustering,
    Sigma,
    Modularity,
    Components,
    LargestComponent,
}

impl Metric {
    pub fn column(self) -> &'static str {
        match self {
            Metric::Nodes => "N",
            Metric::Edges => "E",
            Metric::AvgDegree => "avg_degree",
            Metric::Diameter => "diameter",
            Metric::PathLength => "L",
            Metric::Clustering => "C",
            Metric::RandomPathLength => "L_r",
            Metric::RandomClustering => "C_r",
            Metric::Sigma => "sigma",
            Metric::Modularity => "Q",
            Metric::Components => "components",
            Metric::LargestComponent => "lcc_size",
        }
    }

    pub fn value(self, r: &MetricsRecord) -> Option<f64> {
        match self {
            Metric::Nodes => Some(r.nodes as f64),
            Metric::Edges => Some(r.edges as f64),
            Metric::AvgDegree => r.avg_degree,
            Metric::Diameter => r.diameter.map(f64::from),
            Metric::PathLength => r.avg_path_length,
            Metric::Clustering => r.clustering,
            Metric::RandomPathLength => r.random_path_length,
            Metric::RandomClustering => r.random_clustering,
            Metric::Sigma => r.sigma,
            Metric::Modularity => r.modularity,
            Metric::Components => Some(r.component_count as f64),
            Metric::LargestComponent => Some(r.largest_component_size as f64),
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.column())
    }
}

impl FromStr for Metric {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "N" | "nodes" => Metric::Nodes,
            "E" | "edges" => Metric::Edges,
            "avg_degree" | "k" => Metric::AvgDegree,
            "diameter" | "d" => Metric::Diameter,
            "L" | "path_length" => Metric::PathLength,
            "C" | "clustering" => Metric::Clustering,
            "L_r" => Metric::RandomPathLength,
            "C_r" => Metric::RandomClustering,
            "sigma" => Metric::Sigma,
            "Q" | "modularity" => Metric::Modularity,
            "components" => Metric::Components,
            "lcc_size" => Metric::LargestComponent,
            other => return Err(format!("unknown metric `{other}`")),
        })
    }
}

/// One [`MetricsRecord`] per year, years strictly increasing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricTimeSeries {
    records: Vec<MetricsRecord>,
}

impl MetricTimeSeries {
    pub fn records(&self) -> &[MetricsRecord] {
        &self.records
    }

    pub fn years(&self) -> Vec<Year> {
        self.records.iter().filter_map(|r| r.year).collect()
    }

    pub fn metric(&self, metric: Metric) -> Vec<Option<f64>> {
        self.records.iter().map(|r| metric.value(r)).collect()
    }

    pub fn get(&self, year: Year) -> Option<&MetricsRecord> {
        self.records.iter().find(|r| r.year == Some(year))
    }

    pub fn to_csv(&self) -> String {
        let mut out = MetricsRecord::csv_header();
        out.push('\n');
        for r in &self.records {
            out.push_str(&r.csv_row());
            out.push('\n');
        }
        out
    }
}

/// Metrics for every year of `years`. Years are analysed in parallel and
/// collected in order.
pub fn compute_timeseries(
    log: &TemporalGridLog,
    years: RangeInclusive<Year>,
    seed: u64,
) -> Result<MetricTimeSeries, EvolutionError> {
    if years.is_empty() {
        return Err(EvolutionError::EmptyRange);
    }
    let years: Vec<Year> = years.collect();
    let records = years
        .par_iter()
        .map(|&y| analyze_year(log, y, seed))
        .collect();
    Ok(MetricTimeSeries { records })
}

/// Sample Pearson correlation coefficient.
pub fn pearson(a: &[f64], b: &[f64]) -> Result<f64, EvolutionError> {
    if a.len() != b.len() {
        return Err(EvolutionError::LengthMismatch(a.len(), b.len()));
    }
    if a.len() < 2 {
        return Err(EvolutionError::TooShort(a.len()));
    }
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let mut sab = 0.0;
    let mut saa = 0.0;
    let mut sbb = 0.0;
    for (x, y) in a.iter().zip(b) {
        let (dx, dy) = (x - ma, y - mb);
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    if saa == 0.0 || sbb == 0.0 {
        return Err(EvolutionError::ConstantSeries);
    }
    Ok((sab / (saa.sqrt() * sbb.sqrt())).clamp(-1.0, 1.0))
}

/// Divide by the series maximum.
pub fn normalize_to_max(series: &[f64]) -> Result<Vec<f64>, EvolutionError> {
    let max = series
        .iter()
        .copied()
        .reduce(f64::max)
        .ok_or(EvolutionError::EmptySeries)?;
    if max.is_nan() || max <= 0.0 {
        return Err(EvolutionError::NonPositiveMax(max));
    }
    Ok(series.iter().map(|x| x / max).collect())
}

/// Correlation over the years where both series are defined.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationReport {
    pub r: f64,
    pub pairs: usize,
    pub dropped_years: Vec<Year>,
}

pub fn correlate(
    years: &[Year],
    a: &[Option<f64>],
    b: &[Option<f64>],
) -> Result<CorrelationReport, EvolutionError> {
    if a.len() != b.len() || years.len() != a.len() {
        return Err(EvolutionError::LengthMismatch(a.len(), b.len()));
    }
    let mut xs = Vec::with_capacity(a.len());
    let mut ys = Vec::with_capacity(a.len());
    let mut dropped_years = Vec::new();
    for ((&year, x), y) in years.iter().zip(a).zip(b) {
        match (x, y) {
            (Some(x), Some(y)) => {
                xs.push(*x);
                ys.push(*y);
            }
            _ => dropped_years.push(year),
        }
    }
    let r = pearson(&xs, &ys)?;
    Ok(CorrelationReport {
        r,
        pairs: xs.len(),
        dropped_years,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CrossingDirection {
    /// sigma rose above 1
    Up,
    /// sigma fell back to 1 or below, or became undefined
    Down,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Crossing {
    pub year: Year,
    pub direction: CrossingDirection,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SmallWorldTransition {
    /// First year with `sigma > 1`; `None` means never.
    pub first: Option<Year>,
    pub crossings: Vec<Crossing>,
}

/// Scan `(year, sigma)` pairs for threshold crossings. An undefined sigma
/// counts as not small-world.
pub fn sigma_crossings(points: &[(Year, Option<f64>)]) -> SmallWorldTransition {
    let mut above = false;
    let mut crossings = Vec::new();
    for &(year, sigma) in points {
        let now = sigma.is_some_and(|s| s > 1.0);
        if now != above {
            crossings.push(Crossing {
                year,
                direction: if now {
                    CrossingDirection::Up
                } else {
                    CrossingDirection::Down
                },
            });
            above = now;
        }
    }
    let first = crossings
        .iter()
        .find(|c| c.direction == CrossingDirection::Up)
        .map(|c| c.year);
    SmallWorldTransition { first, crossings }
}

pub fn small_world_transition(series: &MetricTimeSeries) -> SmallWorldTransition {
    let points: Vec<(Year, Option<f64>)> = series
        .records
        .iter()
        .filter_map(|r| r.year.map(|y| (y, r.sigma)))
        .collect();
    sigma_crossings(&points)
}
