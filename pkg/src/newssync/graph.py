"""Weighted undirected graphs and the analytics run on them.

Edge weights are similarities (or synchrony values shifted positive), so
"heavier" means "closer": betweenness uses edge length 1/weight and the
disparity backbone keeps edges whose share of a node's strength is unlikely
under uniform random splitting.
"""

from __future__ import annotations

import csv
import heapq
import logging
from collections.abc import Iterable
from dataclasses import dataclass, field

import numpy as np

from .similarity import ScoredPair

logger = logging.getLogger(__name__)


@dataclass
class WeightedGraph:
    """Undirected graph; edge keys are (u, v) tuples with u < v, weights > 0."""

    nodes: set
    edges: dict[tuple, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for (u, v), w in self.edges.items():
            if u == v:
                raise ValueError(f"self-loop on {u!r}")
            if not (u < v):
                raise ValueError(f"edge key not canonical: ({u!r}, {v!r})")
            if not (w > 0 and np.isfinite(w)):
                raise ValueError(f"edge ({u!r}, {v!r}) weight must be positive and finite, got {w}")
            if u not in self.nodes or v not in self.nodes:
                raise ValueError(f"edge ({u!r}, {v!r}) references unknown node")

    def __len__(self) -> int:
        return len(self.nodes)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def adjacency(self) -> dict:
        adj: dict = {u: {} for u in self.nodes}
        for (u, v), w in self.edges.items():
            adj[u][v] = w
            adj[v][u] = w
        return adj

    def strength(self) -> dict:
        s: dict = {u: 0.0 for u in self.nodes}
        for (u, v), w in self.edges.items():
            s[u] += w
            s[v] += w
        return s

    def degree(self) -> dict:
        d: dict = {u: 0 for u in self.nodes}
        for u, v in self.edges:
            d[u] += 1
            d[v] += 1
        return d


def edge_key(u, v) -> tuple:
    return (u, v) if u < v else (v, u)


def build_graph(scored: Iterable[ScoredPair], min_weight: float) -> WeightedGraph:
    """Keep every scored pair with similarity >= min_weight as an edge.

    Nodes are the endpoints of retained edges. A pair seen twice with
    different similarities means the upstream scoring is corrupt.
    """
    if not min_weight > 0:
        raise ValueError(f"min_weight must be positive, got {min_weight}")
    edges: dict[tuple, float] = {}
    nodes: set = set()
    for pair in scored:
        if pair.similarity < min_weight:
            continue
        key = edge_key(pair.id_a, pair.id_b)
        if key in edges and edges[key] != pair.similarity:
            raise ValueError(
                f"conflicting weights for pair {key}: {edges[key]} vs {pair.similarity}"
            )
        edges[key] = pair.similarity
        nodes.add(pair.id_a)
        nodes.add(pair.id_b)
    return WeightedGraph(nodes=nodes, edges=edges)


def pagerank(
    g: WeightedGraph, damping: float = 0.85, tol: float = 1e-9, max_iter: int = 10_000
) -> dict:
    """Weighted PageRank by power iteration until the L1 change drops below tol.

    The undirected graph is treated as bidirectional with weight-proportional
    transitions; nodes without edges get pure teleport mass. Scores sum to 1.
    """
    if len(g) == 0:
        raise ValueError("pagerank of an empty graph")
    order = sorted(g.nodes)
    idx = {u: i for i, u in enumerate(order)}
    n = len(order)

    rows, cols, vals = [], [], []
    strength = np.zeros(n)
    for (u, v), w in g.edges.items():
        iu, iv = idx[u], idx[v]
        rows.append(iu)
        cols.append(iv)
        vals.append(w)
        rows.append(iv)
        cols.append(iu)
        vals.append(w)
        strength[iu] += w
        strength[iv] += w

    weight = np.zeros((n, n))
    if vals:
        weight[rows, cols] = vals
    dangling = strength == 0.0
    safe_strength = np.where(dangling, 1.0, strength)
    transition = weight / safe_strength[:, None]  # row-stochastic on non-dangling rows

    x = np.full(n, 1.0 / n)
    teleport = (1.0 - damping) / n
    for _ in range(max_iter):
        dangling_mass = float(x[dangling].sum())
        x_new = teleport + damping * (transition.T @ x + dangling_mass / n)
        if float(np.abs(x_new - x).sum()) < tol:
            x = x_new
            break
        x = x_new
    return {u: float(x[idx[u]]) for u in order}


def betweenness(g: WeightedGraph, length_eps: float = 1e-12) -> dict:
    """Shortest-path betweenness with edge length 1/weight (Brandes accumulation).

    Each unordered node pair is counted once; endpoints accrue nothing.
    """
    if len(g) == 0:
        raise ValueError("betweenness of an empty graph")
    adj = g.adjacency()
    centrality = {u: 0.0 for u in g.nodes}

    for s in sorted(g.nodes):
        dist = {u: np.inf for u in g.nodes}
        sigma = {u: 0.0 for u in g.nodes}
        preds: dict = {u: [] for u in g.nodes}
        order: list = []
        dist[s] = 0.0
        sigma[s] = 1.0
        seen: set = set()
        heap: list = [(0.0, 0, s)]
        counter = 1
        while heap:
            d, _, v = heapq.heappop(heap)
            if v in seen:
                continue
            seen.add(v)
            order.append(v)
            for w_node, weight in adj[v].items():
                nd = d + 1.0 / weight
                if nd < dist[w_node] - length_eps:
                    dist[w_node] = nd
                    sigma[w_node] = sigma[v]
                    preds[w_node] = [v]
                    heapq.heappush(heap, (nd, counter, w_node))
                    counter += 1
                elif abs(nd - dist[w_node]) <= length_eps:
                    sigma[w_node] += sigma[v]
                    preds[w_node].append(v)

        delta = {u: 0.0 for u in g.nodes}
        for v in reversed(order):
            for p in preds[v]:
                delta[p] += sigma[p] / sigma[v] * (1.0 + delta[v])
            if v != s:
                centrality[v] += delta[v]
    # undirected: every pair was visited from both endpoints
    return {u: c / 2.0 for u, c in centrality.items()}


def disparity_backbone(
    g: WeightedGraph,
    alpha: float = 0.05,
    keep_degree_one: bool = True,
    rule: str = "either",
) -> WeightedGraph:
    """Extract the multiscale backbone of a weighted graph.

    For a node of degree k >= 2, an incident edge carrying the fraction
    p = w / strength of the node's total weight has significance
    (1 - p)**(k - 1): the probability that a uniformly random split would
    concentrate at least that much weight on one edge. An edge survives when
    its significance falls below `alpha` at either endpoint ("either", the
    common convention) or at both ("both"). Degree-1 nodes keep their single
    edge by convention unless `keep_degree_one` is False.

    The output node set is the endpoints of retained edges; nodes isolated by
    the pruning are dropped.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    if rule not in ("either", "both"):
        raise ValueError(f"rule must be 'either' or 'both', got {rule!r}")

    strength = g.strength()
    degree = g.degree()

    def significant(node, w: float) -> bool | None:
        """None when the node's test does not apply (degree < 2)."""
        k = degree[node]
        if k < 2:
            return None
        p = w / strength[node]
        return (1.0 - p) ** (k - 1) < alpha

    kept: dict[tuple, float] = {}
    for (u, v), w in g.edges.items():
        su = significant(u, w)
        sv = significant(v, w)
        if keep_degree_one and (su is None or sv is None):
            kept[(u, v)] = w
            continue
        tests = [t for t in (su, sv) if t is not None]
        if not tests:
            continue
        ok = any(tests) if rule == "either" else all(tests)
        if ok:
            kept[(u, v)] = w
    nodes: set = set()
    for u, v in kept:
        nodes.add(u)
        nodes.add(v)
    return WeightedGraph(nodes=nodes, edges=kept)


def write_edge_csv(g: WeightedGraph, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["u", "v", "weight"])
        for (u, v), w in sorted(g.edges.items()):
            writer.writerow([u, v, repr(w)])


def read_edge_csv(path) -> WeightedGraph:
    edges: dict[tuple, float] = {}
    nodes: set = set()
    with open(path, encoding="utf-8", newline="") as fh:
        for row in csv.reader(fh):
            if not row or row[0] == "u":
                continue
            u, v, w = row[0], row[1], float(row[2])
            edges[edge_key(u, v)] = w
            nodes.add(u)
            nodes.add(v)
    return WeightedGraph(nodes=nodes, edges=edges)
