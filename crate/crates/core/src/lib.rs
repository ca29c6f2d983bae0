//! Temporal complex-network analytics for infrastructure grids.
//!
//! The pipeline reads a commission/decommission log of grid elements
//! ([`grid_log`]), materializes one simple undirected graph per year
//! ([`graph`]), and evaluates the small-world metric suite on each snapshot
//! ([`metrics`], [`communities`]). Degree distributions are fitted with
//! power-law and exponential models ([`degree_fit`]), yearly rows are
//! assembled into series and correlated with line counts ([`evolution`]), and
//! seeded reference graphs serve as oracles ([`generators`]).
//!
//! ```
//! use gridnet::{GraphSnapshot, metrics};
//!
//! // two triangles joined by a bridge
//! let g = GraphSnapshot::from_index_edges(
//!     6,
//!     [(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (4, 5), (3, 5)],
//! )
//! .unwrap();
//! let (c, _) = metrics::clustering_coefficient(&g).unwrap();
//! assert!((c - 7.0 / 9.0).abs() < 1e-12);
//! ```

pub mod communities;
pub mod degree_fit;
pub mod evolution;
pub mod generators;
pub mod graph;
pub mod grid_log;
pub mod metrics;

pub use communities::{detect_communities, exhaustive_best_partition, CommunityAssignment};
pub use degree_fit::{compare_fits, fit_model, Ccdf, FitComparison, FitResult, ModelKind};
pub use evolution::{compute_timeseries, pearson, MetricTimeSeries};
pub use graph::{ComponentPartition, GraphSnapshot};
pub use grid_log::{TemporalGridLog, Year};
pub use metrics::MetricsRecord;

/// Snapshot of the elements active in `year`.
pub fn build_snapshot(log: &TemporalGridLog, year: Year) -> GraphSnapshot {
    GraphSnapshot::from_log(log, year)
}

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/event-log.md")]
    mod event_log {}
    #[doc = include_str!("../../../book/src/small-world.md")]
    mod small_world {}
    #[doc = include_str!("../../../book/src/modularity.md")]
    mod modularity {}
    #[doc = include_str!("../../../book/src/degree-fits.md")]
    mod degree_fits {}
    #[doc = include_str!("../../../book/src/evolution.md")]
    mod evolution {}
    #[doc = include_str!("../../../book/src/generators.md")]
    mod generators {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
