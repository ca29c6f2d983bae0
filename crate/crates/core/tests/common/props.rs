//! Invariant checks shared by `properties.rs` (proptest macros) and the
//! acceptance harness (programmatic `TestRunner`).

#![allow(dead_code)]

use std::collections::BTreeSet;

use gridnet::communities::{detect_communities, exhaustive_best_partition};
use gridnet::degree_fit::{fit_points, Ccdf, ModelKind};
use gridnet::evolution::{compute_timeseries, normalize_to_max, pearson};
use gridnet::generators::{barabasi_albert, erdos_renyi, GeneratorSpec};
use gridnet::grid_log::{EdgeRecord, Lifetime, NodeKind, NodeRecord, TemporalGridLog};
use gridnet::{build_snapshot, metrics, GraphSnapshot};
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

use super::{clique_union, relabel};

pub type PropResult = Result<(), TestCaseError>;

// ---- strategies ----------------------------------------------------------

/// Edge set on `n` nodes from a bit mask over the upper triangle.
pub fn graph_strategy(max_n: usize) -> impl Strategy<Value = GraphSnapshot> {
    (1..=max_n).prop_flat_map(|n| {
        let pairs = n * (n - 1) / 2;
        proptest::collection::vec(any::<bool>(), pairs).prop_map(move |bits| {
            let mut edges = Vec::new();
            let mut idx = 0;
            for i in 0..n {
                for j in i + 1..n {
                    if bits[idx] {
                        edges.push((i, j));
                    }
                    idx += 1;
                }
            }
            GraphSnapshot::from_index_edges(n, edges).unwrap()
        })
    })
}

pub fn graph_with_perm(max_n: usize) -> impl Strategy<Value = (GraphSnapshot, Vec<usize>)> {
    graph_strategy(max_n).prop_flat_map(|g| {
        let n = g.node_count();
        (Just(g), Just((0..n).collect::<Vec<_>>()).prop_shuffle())
    })
}

pub fn graph_with_labels(max_n: usize) -> impl Strategy<Value = (GraphSnapshot, Vec<usize>)> {
    graph_strategy(max_n).prop_flat_map(|g| {
        let n = g.node_count();
        (Just(g), proptest::collection::vec(0..n.max(1), n))
    })
}

#[derive(Debug, Clone)]
pub struct RawLog {
    pub nodes: Vec<NodeRecord>,
    pub edges: Vec<EdgeRecord>,
}

fn node_strategy() -> impl Strategy<Value = (i32, Option<i32>, bool)> {
    (1950..1965i32, proptest::option::of(0..15i32), any::<bool>())
        .prop_map(|(c, len, dom)| (c, len.map(|l| c + l), dom))
}

/// Small random logs whose edges always live inside their endpoints'
/// lifetimes; parallel circuits are likely.
pub fn log_strategy() -> impl Strategy<Value = RawLog> {
    proptest::collection::vec(node_strategy(), 2..8).prop_flat_map(|nodes| {
        let n = nodes.len();
        let edge = (
            0..n,
            0..n,
            0..3usize,
            0..10i32,
            proptest::option::of(0..10i32),
            any::<bool>(),
        );
        (Just(nodes), proptest::collection::vec(edge, 0..14)).prop_map(|(nodes, raw_edges)| {
            let node_recs: Vec<NodeRecord> = nodes
                .iter()
                .enumerate()
                .map(|(i, &(c, d, dom))| NodeRecord {
                    id: format!("n{i}"),
                    name: format!("node {i}"),
                    kind: NodeKind::Substation,
                    lifetime: Lifetime::new(c, d),
                    domestic: dom,
                })
                .collect();
            let mut edges = Vec::new();
            for (j, (a, b, v, off, len, dom)) in raw_edges.into_iter().enumerate() {
                if a == b {
                    continue;
                }
                let (la, lb) = (node_recs[a].lifetime, node_recs[b].lifetime);
                let start = la.commissioned.max(lb.commissioned) + off;
                let end = match (la.decommissioned, lb.decommissioned) {
                    (Some(x), Some(y)) => Some(x.min(y)),
                    (x, y) => x.or(y),
                };
                if end.is_some_and(|e| start >= e) {
                    continue;
                }
                let mut stop = len.map(|l| start + 1 + l);
                if let Some(e) = end {
                    stop = Some(stop.map_or(e, |s| s.min(e)));
                }
                edges.push(EdgeRecord {
                    id: format!("e{j:02}"),
                    node_a: node_recs[a].id.clone(),
                    node_b: node_recs[b].id.clone(),
                    voltage_kv: [120, 220, 400][v],
                    lifetime: Lifetime::new(start, stop),
                    domestic: dom,
                });
            }
            RawLog {
                nodes: node_recs,
                edges,
            }
        })
    })
}

pub fn series_strategy() -> impl Strategy<Value = Vec<(f64, f64)>> {
    proptest::collection::vec((-100.0..100.0f64, -100.0..100.0f64), 3..30)
}

// ---- grid_log ------------------------------------------------------------

pub fn prop_active_edges_have_active_endpoints(raw: &RawLog) -> PropResult {
    let log = TemporalGridLog::from_records(raw.nodes.clone(), raw.edges.clone()).unwrap();
    for year in 1948..1990 {
        let active = log.active_elements(year);
        for e in log.edges().iter().filter(|e| active.edges.contains(&e.id)) {
            prop_assert!(active.nodes.contains(&e.node_a));
            prop_assert!(active.nodes.contains(&e.node_b));
        }
        // no two active edges on one endpoint pair
        let mut pairs = BTreeSet::new();
        for e in log.edges().iter().filter(|e| active.edges.contains(&e.id)) {
            prop_assert!(pairs.insert(e.endpoints()));
        }
    }
    Ok(())
}

pub fn prop_extension_is_monotone(raw: &RawLog) -> PropResult {
    // Drop one node (and its edges) to get a sub-log; everything active in
    // the sub-log stays active in the full log.
    if raw.nodes.len() < 3 {
        return Ok(());
    }
    let dropped = &raw.nodes[raw.nodes.len() - 1].id;
    let nodes = raw.nodes[..raw.nodes.len() - 1].to_vec();
    let edges: Vec<_> = raw
        .edges
        .iter()
        .filter(|e| &e.node_a != dropped && &e.node_b != dropped)
        .cloned()
        .collect();
    let small = TemporalGridLog::from_records(nodes, edges).unwrap();
    let full = TemporalGridLog::from_records(raw.nodes.clone(), raw.edges.clone()).unwrap();
    for year in 1948..1990 {
        let a = small.active_elements(year);
        let b = full.active_elements(year);
        prop_assert!(a.nodes.is_subset(&b.nodes));
        // merging may rename the surviving edge, so compare endpoint pairs
        let pairs = |log: &TemporalGridLog, ids: &BTreeSet<String>| -> BTreeSet<(String, String)> {
            log.edges()
                .iter()
                .filter(|e| ids.contains(&e.id))
                .map(|e| {
                    let (x, y) = e.endpoints();
                    (x.to_string(), y.to_string())
                })
                .collect()
        };
        prop_assert!(pairs(&small, &a.edges).is_subset(&pairs(&full, &b.edges)));
    }
    Ok(())
}

pub fn prop_merge_is_idempotent(raw: &RawLog) -> PropResult {
    let log = TemporalGridLog::from_records(raw.nodes.clone(), raw.edges.clone()).unwrap();
    let again = TemporalGridLog::parse_str(&log.nodes_csv(), &log.edges_csv()).unwrap();
    prop_assert_eq!(again.nodes(), log.nodes());
    prop_assert_eq!(again.edges(), log.edges());
    prop_assert!(again.merges().is_empty());
    Ok(())
}

pub fn prop_snapshot_is_pure(raw: &RawLog) -> PropResult {
    let log = TemporalGridLog::from_records(raw.nodes.clone(), raw.edges.clone()).unwrap();
    for year in 1950..1980 {
        let a = build_snapshot(&log, year);
        prop_assert_eq!(&a, &build_snapshot(&log, year));
        let mut ids = a.ids().to_vec();
        ids.sort();
        prop_assert_eq!(ids.as_slice(), a.ids());
    }
    Ok(())
}

// ---- graph ---------------------------------------------------------------

pub fn prop_degree_sum_and_bfs_bound(g: &GraphSnapshot) -> PropResult {
    prop_assert_eq!(g.degrees().iter().sum::<usize>(), 2 * g.edge_count());
    for s in 0..g.node_count() {
        for d in g.shortest_path_lengths(s).unwrap().into_iter().flatten() {
            prop_assert!((d as usize) < g.node_count());
        }
    }
    for (a, b) in g.edges() {
        prop_assert!(g.has_edge(b, a));
        prop_assert!(a != b);
    }
    Ok(())
}

pub fn prop_triangle_inequality(g: &GraphSnapshot) -> PropResult {
    let n = g.node_count();
    let d: Vec<Vec<Option<u32>>> = (0..n)
        .map(|s| g.shortest_path_lengths(s).unwrap())
        .collect();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                if let (Some(ik), Some(ij), Some(jk)) = (d[i][k], d[i][j], d[j][k]) {
                    prop_assert!(ik <= ij + jk);
                }
            }
        }
    }
    Ok(())
}

// ---- metrics -------------------------------------------------------------

pub fn prop_intra_edge_never_lowers_q(g: &GraphSnapshot, labels: &[usize]) -> PropResult {
    if g.edge_count() == 0 {
        return Ok(());
    }
    let q = metrics::modularity(g, labels).unwrap();
    let n = g.node_count();
    for i in 0..n {
        for j in i + 1..n {
            if labels[i] == labels[j] && !g.has_edge(i, j) {
                let mut edges: Vec<_> = g.edges().collect();
                edges.push((i, j));
                let bigger = GraphSnapshot::from_index_edges(n, edges).unwrap();
                let q2 = metrics::modularity(&bigger, labels).unwrap();
                prop_assert!(q2 >= q - 1e-12, "{} -> {} adding {}-{}", q, q2, i, j);
            }
        }
    }
    Ok(())
}

pub fn prop_q_bounds(g: &GraphSnapshot, labels: &[usize]) -> PropResult {
    if g.edge_count() == 0 {
        return Ok(());
    }
    prop_assert!(metrics::modularity(g, labels).unwrap() < 1.0);
    prop_assert_eq!(
        metrics::modularity(g, &vec![3; g.node_count()]).unwrap(),
        0.0
    );
    Ok(())
}

pub fn prop_relabel_invariance(g: &GraphSnapshot, perm: &[usize]) -> PropResult {
    let h = relabel(g, perm);
    let (c1, _) = metrics::clustering_coefficient(g).unwrap();
    let (c2, _) = metrics::clustering_coefficient(&h).unwrap();
    prop_assert!((c1 - c2).abs() < 1e-12);
    // with tied largest components the smallest-id rule depends on labels
    let sizes = g.connected_components().sizes().to_vec();
    let max = sizes.iter().copied().max().unwrap_or(0);
    if sizes.iter().filter(|&&s| s == max).count() > 1 {
        return Ok(());
    }
    match (metrics::path_stats(g), metrics::path_stats(&h)) {
        (Ok(a), Ok(b)) => {
            prop_assert_eq!(a.distance_sum, b.distance_sum);
            prop_assert_eq!(a.diameter, b.diameter);
            prop_assert_eq!(a.component_size, b.component_size);
        }
        (Err(_), Err(_)) => {}
        _ => prop_assert!(false, "path stats defined for only one labelling"),
    }
    Ok(())
}

pub fn prop_sigma_scale(c: f64, cr: f64, l: f64, lr: f64, factor: f64) -> PropResult {
    let a = metrics::small_world_sigma(c, cr, l, lr).unwrap().sigma;
    let b = metrics::small_world_sigma(c * factor, cr * factor, l, lr)
        .unwrap()
        .sigma;
    prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
    Ok(())
}

/// `n >= 3`; in K_2 every node has degree 1 and local clustering is 0.
pub fn prop_complete_graph(n: usize) -> PropResult {
    let g = clique_union(1, n);
    prop_assert_eq!(metrics::clustering_coefficient(&g).unwrap().0, 1.0);
    prop_assert_eq!(metrics::average_path_length(&g).unwrap(), 1.0);
    prop_assert_eq!(metrics::diameter(&g).unwrap(), 1);
    Ok(())
}

// ---- communities ---------------------------------------------------------

pub fn prop_greedy_deterministic_and_bounded(g: &GraphSnapshot, seed: u64) -> PropResult {
    if g.edge_count() == 0 {
        return Ok(());
    }
    let a = detect_communities(g, seed).unwrap();
    prop_assert_eq!(&a, &detect_communities(g, seed).unwrap());
    prop_assert_eq!(a.achieved_q, metrics::modularity(g, &a.labels).unwrap());
    if g.node_count() <= 8 {
        let best = exhaustive_best_partition(g).unwrap().achieved_q;
        prop_assert!(a.achieved_q <= best + 1e-12);
        prop_assert!(a.achieved_q >= best.min(0.0));
    }
    Ok(())
}

pub fn prop_clique_union_recovered(count: usize, size: usize) -> PropResult {
    let g = clique_union(count, size);
    let a = detect_communities(&g, 0).unwrap();
    let expected: Vec<usize> = (0..count * size).map(|i| i / size).collect();
    prop_assert_eq!(a.labels, expected);
    Ok(())
}

// ---- degree_fit ----------------------------------------------------------

pub fn prop_ccdf_shape(degrees: &[usize]) -> PropResult {
    let Ok(ccdf) = Ccdf::from_degrees(degrees) else {
        prop_assert!(degrees.iter().all(|&d| d == 0));
        return Ok(());
    };
    let pts = ccdf.points();
    prop_assert_eq!(pts[0].p, 1.0);
    for w in pts.windows(2) {
        prop_assert!(w[1].p < w[0].p && w[1].k > w[0].k);
    }
    prop_assert!(pts.iter().all(|p| p.p > 0.0 && p.p <= 1.0));
    let hist = ccdf.histogram().unwrap();
    for (k, &count) in hist.iter().enumerate().skip(1) {
        prop_assert_eq!(count, degrees.iter().filter(|&&d| d == k).count());
    }
    Ok(())
}

pub fn prop_noiseless_recovery(model: ModelKind, a: f64, s: f64) -> PropResult {
    let pts: Vec<(f64, f64)> = (1..=10)
        .map(|k| (k as f64, model.eval(a, s, k as f64)))
        .collect();
    let fit = fit_points(&pts, model).unwrap();
    prop_assert!(fit.sse < 1e-20, "sse {}", fit.sse);
    prop_assert!((fit.scale - s).abs() < 1e-6 * s.max(1.0));
    prop_assert!((fit.prefactor - a).abs() < 1e-6);
    Ok(())
}

pub fn prop_fit_order_invariant(pts: &[(f64, f64)], shuffled: &[(f64, f64)]) -> PropResult {
    for model in ModelKind::ALL {
        match (fit_points(pts, model), fit_points(shuffled, model)) {
            (Ok(a), Ok(b)) => prop_assert_eq!(a, b),
            (Err(_), Err(_)) => {}
            _ => prop_assert!(false, "order changed fit outcome"),
        }
    }
    Ok(())
}

// ---- evolution -----------------------------------------------------------

pub fn prop_pearson_symmetry_affine(pairs: &[(f64, f64)], scale: f64, shift: f64) -> PropResult {
    let a: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let b: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    let Ok(r) = pearson(&a, &b) else {
        return Ok(());
    };
    prop_assert!((-1.0..=1.0).contains(&r));
    prop_assert_eq!(r, pearson(&b, &a).unwrap());
    let a2: Vec<f64> = a.iter().map(|x| scale * x + shift).collect();
    prop_assert!((pearson(&a2, &b).unwrap() - r).abs() < 1e-9);
    Ok(())
}

pub fn prop_normalize_idempotent(values: &[f64]) -> PropResult {
    let Ok(once) = normalize_to_max(values) else {
        return Ok(());
    };
    prop_assert!(once.contains(&1.0));
    prop_assert_eq!(normalize_to_max(&once).unwrap(), once);
    Ok(())
}

pub fn prop_subrange_is_slice(raw: &RawLog, from: i32, len: i32) -> PropResult {
    let log = TemporalGridLog::from_records(raw.nodes.clone(), raw.edges.clone()).unwrap();
    let full = compute_timeseries(&log, 1950..=1975, 42).unwrap();
    let sub = compute_timeseries(&log, from..=from + len, 42).unwrap();
    let offset = (from - 1950) as usize;
    prop_assert_eq!(
        sub.records(),
        &full.records()[offset..offset + len as usize + 1]
    );
    Ok(())
}

// ---- generators ----------------------------------------------------------

pub fn prop_generator_deterministic(spec: GeneratorSpec, seed: u64) -> PropResult {
    let a = spec.generate(seed).unwrap();
    let b = spec.generate(seed).unwrap();
    prop_assert_eq!(&a, &b);
    prop_assert_eq!(a.degrees().iter().sum::<usize>(), 2 * a.edge_count());
    // from_index_edges rejects loops and duplicates, so rebuilding validates
    prop_assert!(GraphSnapshot::from_index_edges(a.node_count(), a.edges()).is_ok());
    if let GeneratorSpec::WattsStrogatz { n, k, .. } = spec {
        prop_assert_eq!(a.edge_count(), n * k / 2);
    }
    if let GeneratorSpec::BarabasiAlbert { n, m } = spec {
        prop_assert_eq!(a.edge_count(), m * (m + 1) / 2 + m * (n - m - 1));
        prop_assert!(a.degrees().iter().all(|&d| d >= m));
    }
    Ok(())
}

pub fn generator_strategy() -> impl Strategy<Value = GeneratorSpec> {
    prop_oneof![
        (3..60usize, 0.0..=1.0f64).prop_map(|(n, p)| GeneratorSpec::ErdosRenyi { n, p }),
        (5..60usize, 1..3usize, 0.0..=1.0f64).prop_map(|(n, h, p)| GeneratorSpec::WattsStrogatz {
            n,
            k: 2 * h,
            p
        }),
        (4..80usize, 1..4usize).prop_map(|(n, m)| GeneratorSpec::BarabasiAlbert { n, m }),
    ]
}

/// Mean ER edge count over 100 seeds lies within 3 standard errors of the
/// binomial mean.
pub fn check_er_edge_count() -> PropResult {
    let (n, p) = (200usize, 0.05);
    let pairs = (n * (n - 1) / 2) as f64;
    let mean = pairs * p;
    let sd = (pairs * p * (1.0 - p)).sqrt();
    let runs = 100;
    let total: usize = (0..runs)
        .map(|seed| erdos_renyi(n, p, seed).unwrap().edge_count())
        .sum();
    let observed = total as f64 / runs as f64;
    prop_assert!((observed - mean).abs() < 3.0 * sd / (runs as f64).sqrt());
    Ok(())
}

/// ER at n = 1000, <k> ~ 10 has C within a factor 2 of the random baseline.
pub fn check_er_clustering() -> PropResult {
    let g = erdos_renyi(1000, 0.01, 11).unwrap();
    let k = metrics::average_degree(g.node_count(), g.edge_count()).unwrap();
    let (c, _) = metrics::clustering_coefficient(&g).unwrap();
    let cr = metrics::random_baselines(g.node_count(), k)
        .unwrap()
        .clustering;
    prop_assert!(c > cr / 2.0 && c < cr * 2.0, "C {} vs C_r {}", c, cr);
    Ok(())
}

/// BA at n = 5000, m = 2 has a hub above 10m for each of 20 seeds.
pub fn check_ba_hubs() -> PropResult {
    let m = 2;
    for seed in 0..20 {
        let g = barabasi_albert(5000, m, seed).unwrap();
        prop_assert!(
            g.degrees().into_iter().max().unwrap() > 10 * m,
            "seed {}",
            seed
        );
    }
    Ok(())
}
