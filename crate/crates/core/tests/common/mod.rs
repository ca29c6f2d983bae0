//! Brute-force oracles shared by the integration suites. Nothing here calls
//! into the traversal or metric code it is used to check.

#![allow(dead_code)]

pub mod props;

use std::path::PathBuf;

use gridnet::GraphSnapshot;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/grid")
}

pub fn fixture_file(name: &str) -> String {
    std::fs::read_to_string(fixture_dir().join(name)).expect("fixture file")
}

/// Random simple graph on `n` nodes built in test code (no generator module).
pub fn random_graph(seed: u64, n: usize, p: f64) -> GraphSnapshot {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.random::<f64>() < p {
                edges.push((i, j));
            }
        }
    }
    GraphSnapshot::from_index_edges(n, edges).unwrap()
}

/// Dense 0/1 adjacency matrix from the edge iterator.
pub fn adjacency_matrix(g: &GraphSnapshot) -> Vec<Vec<u8>> {
    let n = g.node_count();
    let mut a = vec![vec![0u8; n]; n];
    for (i, j) in g.edges() {
        a[i][j] = 1;
        a[j][i] = 1;
    }
    a
}

/// All-pairs hop distances by Floyd–Warshall relaxation; `None` = unreachable.
pub fn floyd_warshall(g: &GraphSnapshot) -> Vec<Vec<Option<u32>>> {
    let a = adjacency_matrix(g);
    let n = a.len();
    let inf = u32::MAX / 4;
    let mut d = vec![vec![inf; n]; n];
    for i in 0..n {
        d[i][i] = 0;
        for j in 0..n {
            if a[i][j] == 1 {
                d[i][j] = 1;
            }
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i][k] + d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    d.into_iter()
        .map(|row| row.into_iter().map(|x| (x < inf).then_some(x)).collect())
        .collect()
}

/// Union-find component representative per node.
pub fn union_find_roots(g: &GraphSnapshot) -> Vec<usize> {
    fn find(parent: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while parent[r] != r {
            r = parent[r];
        }
        let mut y = x;
        while parent[y] != r {
            let next = parent[y];
            parent[y] = r;
            y = next;
        }
        r
    }
    let n = g.node_count();
    let mut parent: Vec<usize> = (0..n).collect();
    for (a, b) in g.edges() {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            parent[ra.max(rb)] = ra.min(rb);
        }
    }
    (0..n).map(|i| find(&mut parent, i)).collect()
}

/// Largest component by the union-find oracle (ties: smallest node id).
pub fn oracle_largest_component(g: &GraphSnapshot) -> Vec<usize> {
    let roots = union_find_roots(g);
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for (i, r) in roots.into_iter().enumerate() {
        groups.entry(r).or_default().push(i);
    }
    groups
        .into_values()
        .min_by(|a, b| {
            b.len().cmp(&a.len()).then_with(|| {
                let ma = a.iter().map(|&i| g.id(i)).min().unwrap();
                let mb = b.iter().map(|&i| g.id(i)).min().unwrap();
                ma.cmp(mb)
            })
        })
        .unwrap_or_default()
}

/// Mean distance and diameter over ordered pairs of the oracle's largest
/// component.
pub fn oracle_path_stats(g: &GraphSnapshot) -> Option<(f64, u32)> {
    let lcc = oracle_largest_component(g);
    if lcc.len() < 2 {
        return None;
    }
    let d = floyd_warshall(g);
    let mut sum = 0u64;
    let mut max = 0;
    for &i in &lcc {
        for &j in &lcc {
            if i != j {
                let x = d[i][j].unwrap();
                sum += x as u64;
                max = max.max(x);
            }
        }
    }
    Some((sum as f64 / (lcc.len() * (lcc.len() - 1)) as f64, max))
}

/// Modularity straight from the double sum over ordered node pairs:
/// `Q = 1/(2m) sum_ij (A_ij - k_i k_j / (2m)) delta(g_i, g_j)`.
pub fn modularity_double_loop(g: &GraphSnapshot, labels: &[usize]) -> f64 {
    let a = adjacency_matrix(g);
    let n = a.len();
    let k: Vec<f64> = a
        .iter()
        .map(|row| row.iter().map(|&x| x as f64).sum())
        .collect();
    let two_m: f64 = k.iter().sum();
    let mut q = 0.0;
    for i in 0..n {
        for j in 0..n {
            if labels[i] == labels[j] {
                q += a[i][j] as f64 - k[i] * k[j] / two_m;
            }
        }
    }
    q / two_m
}

/// Local clustering by checking every neighbour pair against the matrix.
pub fn clustering_by_pairs(g: &GraphSnapshot) -> f64 {
    let a = adjacency_matrix(g);
    let n = a.len();
    let mut total = 0.0;
    for i in 0..n {
        let neigh: Vec<usize> = (0..n).filter(|&j| a[i][j] == 1).collect();
        let k = neigh.len();
        if k < 2 {
            continue;
        }
        let mut links = 0;
        for x in 0..k {
            for y in x + 1..k {
                links += a[neigh[x]][neigh[y]] as usize;
            }
        }
        total += 2.0 * links as f64 / (k * (k - 1)) as f64;
    }
    total / n as f64
}

/// Every set partition of `0..n` as a restricted-growth label vector.
pub fn all_partitions(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = vec![0; n];
    fn rec(i: usize, used: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i == cur.len() {
            out.push(cur.clone());
            return;
        }
        for c in 0..=used {
            cur[i] = c;
            rec(i + 1, used.max(c + 1), cur, out);
        }
    }
    if n == 0 {
        return vec![vec![]];
    }
    rec(0, 0, &mut cur, &mut out);
    out
}

/// Disjoint union of `count` cliques of `size` nodes each.
pub fn clique_union(count: usize, size: usize) -> GraphSnapshot {
    let mut edges = Vec::new();
    for c in 0..count {
        let base = c * size;
        for i in 0..size {
            for j in i + 1..size {
                edges.push((base + i, base + j));
            }
        }
    }
    GraphSnapshot::from_index_edges(count * size, edges).unwrap()
}

/// Same graph with node indices permuted by `perm` (node `i` becomes
/// `perm[i]`).
pub fn relabel(g: &GraphSnapshot, perm: &[usize]) -> GraphSnapshot {
    GraphSnapshot::from_index_edges(g.node_count(), g.edges().map(|(a, b)| (perm[a], perm[b])))
        .unwrap()
}
