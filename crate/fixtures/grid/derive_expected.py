#!/usr/bin/env python3
"""Independent oracle for the bundled fixture.

Regenerates expected_metrics.csv and active_membership.csv from nodes.csv and
edges.csv using networkx for paths, components and clustering. The modularity
column replays the greedy agglomerative merge rule (largest integer gain
2m*e_ab - d_a*d_b, lowest community pair wins ties) and is cross-checked
against networkx's own modularity() for the resulting partition.

Usage: python3 derive_expected.py  (writes next to this file)
"""
import csv
import math
import os

import networkx as nx

HERE = os.path.dirname(os.path.abspath(__file__))
FIRST, LAST = 1950, 1980


def load():
    with open(os.path.join(HERE, "nodes.csv")) as f:
        nodes = list(csv.DictReader(f))
    with open(os.path.join(HERE, "edges.csv")) as f:
        edges = list(csv.DictReader(f))
    return nodes, edges


def active(rec, year):
    start = int(rec["commissioned"])
    end = int(rec["decommissioned"]) if rec["decommissioned"] else None
    return start <= year and (end is None or year < end)


def snapshot(nodes, edges, year):
    g = nx.Graph()
    live = {n["id"] for n in nodes if active(n, year)}
    g.add_nodes_from(sorted(live))
    eids = set()
    for e in edges:
        if active(e, year) and e["node_a"] in live and e["node_b"] in live:
            g.add_edge(e["node_a"], e["node_b"])  # parallel rows collapse
            eids.add(e["id"])
    return g, live, eids


def greedy_q(g):
    order = sorted(g.nodes())
    idx = {v: i for i, v in enumerate(order)}
    m = g.number_of_edges()
    comm = {i: {i} for i in range(len(order))}
    deg = {i: g.degree(order[i]) for i in range(len(order))}
    while True:
        best = None
        ids = sorted(comm)
        for ai, a in enumerate(ids):
            for b in ids[ai + 1:]:
                e_ab = sum(
                    1
                    for u in comm[a]
                    for v in comm[b]
                    if g.has_edge(order[u], order[v])
                )
                if e_ab == 0:
                    continue
                gain = 2 * m * e_ab - deg[a] * deg[b]
                if gain > 0 and (best is None or gain > best[0]):
                    best = (gain, a, b)
        if best is None:
            break
        _, a, b = best
        comm[a] |= comm.pop(b)
        deg[a] += deg.pop(b)
    parts = [{order[i] for i in c} for c in comm.values()]
    q_nx = nx.algorithms.community.modularity(g, parts)
    # modularity by community sums, same as the reference closed form
    q = 0.0
    for c in parts:
        lc = g.subgraph(c).number_of_edges()
        dc = sum(d for _, d in g.degree(c))
        q += lc / m - (dc / (2 * m)) ** 2
    assert abs(q - q_nx) < 1e-12, (q, q_nx)
    return q


def fmt(x):
    return "NA" if x is None else "%.6g" % x


def metrics(g):
    n = g.number_of_nodes()
    e = g.number_of_edges()
    comps = sorted(nx.connected_components(g), key=lambda c: (-len(c), min(c)))
    ncomp = len(comps)
    lcc = len(comps[0]) if comps else 0
    k = 2 * e / n if n else None
    c = nx.average_clustering(g) if n else None
    if lcc >= 2:
        sub = g.subgraph(comps[0])
        l = nx.average_shortest_path_length(sub)
        d = nx.diameter(sub)
    else:
        l = d = None
    lr = cr = None
    if n >= 2 and k is not None and k > 1:
        lr = (math.log(n) - 0.5772) / math.log(k) + 0.5
        cr = k / n
    sigma = None
    if None not in (c, cr, l, lr) and l > 0:
        sigma = (c / cr) / (l / lr)
    q = greedy_q(g) if e else None
    return [n, e, fmt(k), "NA" if d is None else d, fmt(l), fmt(c), fmt(lr),
            fmt(cr), fmt(sigma), fmt(q), ncomp, lcc]


def main():
    nodes, edges = load()
    with open(os.path.join(HERE, "expected_metrics.csv"), "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["year", "N", "E", "avg_degree", "diameter", "L", "C", "L_r",
                    "C_r", "sigma", "Q", "components", "lcc_size"])
        for year in range(FIRST, LAST + 1):
            g, _, _ = snapshot(nodes, edges, year)
            w.writerow([year] + metrics(g))
    with open(os.path.join(HERE, "active_membership.csv"), "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["year", "nodes", "edges"])
        for year in range(1950, 1956):
            _, live, eids = snapshot(nodes, edges, year)
            w.writerow([year, " ".join(sorted(live)), " ".join(sorted(eids))])


if __name__ == "__main__":
    main()
