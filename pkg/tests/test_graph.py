import itertools

import numpy as np
import pytest

from newssync.graph import (
    WeightedGraph,
    betweenness,
    build_graph,
    disparity_backbone,
    edge_key,
    pagerank,
    read_edge_csv,
    write_edge_csv,
)
from newssync.similarity import ScoredPair

from helpers import random_weighted_graph


def sp(a, b, s):
    return ScoredPair(id_a=a, id_b=b, similarity=s)


class TestWeightedGraph:
    def test_rejects_self_loop(self):
        with pytest.raises(ValueError):
            WeightedGraph(nodes={"a"}, edges={("a", "a"): 1.0})

    def test_rejects_nonpositive_weight(self):
        with pytest.raises(ValueError):
            WeightedGraph(nodes={"a", "b"}, edges={("a", "b"): 0.0})

    def test_rejects_non_canonical_key(self):
        with pytest.raises(ValueError):
            WeightedGraph(nodes={"a", "b"}, edges={("b", "a"): 1.0})

    def test_edge_csv_round_trip(self, tmp_path):
        g = WeightedGraph(nodes={"a", "b", "c"}, edges={("a", "b"): 0.5, ("b", "c"): 0.25})
        path = tmp_path / "g.csv"
        write_edge_csv(g, path)
        back = read_edge_csv(path)
        assert back.edges == g.edges


class TestBuildGraph:
    def test_all_below_threshold(self):
        g = build_graph([sp("a", "b", 0.1)], min_weight=0.5)
        assert len(g) == 0 and g.n_edges == 0

    def test_direct_construction(self):
        g = build_graph(
            [sp("a", "b", 0.9), sp("b", "c", 0.8), sp("c", "d", 0.7), sp("a", "d", 0.2)],
            min_weight=0.5,
        )
        assert g.n_edges == 3 and len(g) == 4

    def test_threshold_inclusive(self):
        g = build_graph([sp("a", "b", 0.5)], min_weight=0.5)
        assert g.n_edges == 1

    def test_conflicting_duplicate_fatal(self):
        with pytest.raises(ValueError, match="conflicting"):
            build_graph([sp("a", "b", 0.9), sp("b", "a", 0.8)], min_weight=0.5)

    def test_matches_filter_then_dedupe_oracle(self):
        rng = np.random.default_rng(31)
        names = [f"n{i}" for i in range(30)]
        seen = set()
        scored = []
        for _ in range(200):
            i, j = rng.choice(30, size=2, replace=False)
            key = edge_key(names[int(i)], names[int(j)])
            if key in seen:
                continue
            seen.add(key)
            scored.append(sp(key[0], key[1], float(rng.uniform(-0.2, 1.0))))
        g = build_graph(scored, min_weight=0.4)
        expected = {edge_key(s.id_a, s.id_b): s.similarity for s in scored if s.similarity >= 0.4}
        assert g.edges == expected


def pagerank_dense_solve(g: WeightedGraph, damping=0.85) -> dict:
    """Direct linear-system solution of the PageRank equations."""
    order = sorted(g.nodes)
    n = len(order)
    idx = {u: i for i, u in enumerate(order)}
    P = np.zeros((n, n))
    strength = np.zeros(n)
    for (u, v), w in g.edges.items():
        strength[idx[u]] += w
        strength[idx[v]] += w
    for (u, v), w in g.edges.items():
        P[idx[u], idx[v]] = w / strength[idx[u]]
        P[idx[v], idx[u]] = w / strength[idx[v]]
    for i in range(n):
        if strength[i] == 0:
            P[i, :] = 1.0 / n
    x = np.linalg.solve(np.eye(n) - damping * P.T, np.full(n, (1 - damping) / n))
    return {u: float(x[idx[u]]) for u in order}


class TestPagerank:
    def test_two_nodes(self):
        g = WeightedGraph(nodes={"a", "b"}, edges={("a", "b"): 0.7})
        ranks = pagerank(g)
        assert ranks["a"] == pytest.approx(0.5, abs=1e-9)
        assert ranks["b"] == pytest.approx(0.5, abs=1e-9)

    def test_symmetric_cycle(self):
        edges = {("a", "b"): 1.0, ("b", "c"): 1.0, ("c", "d"): 1.0, ("a", "d"): 1.0}
        ranks = pagerank(WeightedGraph(nodes={"a", "b", "c", "d"}, edges=edges))
        for v in ranks.values():
            assert v == pytest.approx(0.25, abs=1e-9)

    def test_empty_graph_rejected(self):
        with pytest.raises(ValueError):
            pagerank(WeightedGraph(nodes=set(), edges={}))

    def test_sums_to_one_and_nonnegative(self):
        rng = np.random.default_rng(7)
        for _ in range(5):
            g = random_weighted_graph(rng, 40, p=0.15)
            ranks = pagerank(g)
            assert abs(sum(ranks.values()) - 1.0) < 1e-9
            assert all(v >= 0 for v in ranks.values())

    def test_matches_dense_solve(self):
        rng = np.random.default_rng(19)
        for trial in range(5):
            g = random_weighted_graph(rng, 30 + 4 * trial, p=0.2)
            ranks = pagerank(g)
            oracle = pagerank_dense_solve(g)
            for u in g.nodes:
                assert abs(ranks[u] - oracle[u]) < 1e-6

    def test_isolated_nodes_get_teleport_mass(self):
        g = WeightedGraph(nodes={"a", "b", "iso"}, edges={("a", "b"): 1.0})
        ranks = pagerank(g)
        assert ranks["iso"] > 0
        assert abs(sum(ranks.values()) - 1.0) < 1e-9


def betweenness_path_enumeration(g: WeightedGraph, eps=1e-12) -> dict:
    """Exhaustive all-simple-paths oracle, feasible for tiny graphs."""
    adj = g.adjacency()
    nodes = sorted(g.nodes)
    centrality = {u: 0.0 for u in nodes}

    def all_paths(s, t):
        paths = []

        def extend(path, length):
            last = path[-1]
            if last == t:
                paths.append((length, tuple(path)))
                return
            for nxt, w in adj[last].items():
                if nxt not in path:
                    extend([*path, nxt], length + 1.0 / w)

        extend([s], 0.0)
        return paths

    for s, t in itertools.combinations(nodes, 2):
        paths = all_paths(s, t)
        if not paths:
            continue
        best = min(length for length, _ in paths)
        shortest = [p for length, p in paths if length <= best + eps]
        for p in shortest:
            for v in p[1:-1]:
                centrality[v] += 1.0 / len(shortest)
    return centrality


class TestBetweenness:
    def test_path_graph(self):
        g = WeightedGraph(nodes={"a", "b", "c"}, edges={("a", "b"): 1.0, ("b", "c"): 1.0})
        result = betweenness(g)
        assert result["b"] == pytest.approx(1.0)
        assert result["a"] == 0.0 and result["c"] == 0.0

    def test_complete_graph_zero(self):
        nodes = ["a", "b", "c", "d"]
        edges = {edge_key(u, v): 1.0 for u, v in itertools.combinations(nodes, 2)}
        result = betweenness(WeightedGraph(nodes=set(nodes), edges=edges))
        assert all(v == pytest.approx(0.0) for v in result.values())

    def test_matches_exhaustive_oracle(self):
        rng = np.random.default_rng(37)
        for trial in range(6):
            g = random_weighted_graph(rng, 7, p=0.45, w_lo=0.2, w_hi=1.0)
            got = betweenness(g)
            oracle = betweenness_path_enumeration(g)
            for u in g.nodes:
                assert got[u] == pytest.approx(oracle[u], abs=1e-9)

    def test_scale_invariance(self):
        rng = np.random.default_rng(43)
        g = random_weighted_graph(rng, 10, p=0.4)
        scaled = WeightedGraph(
            nodes=set(g.nodes), edges={k: w * 7.3 for k, w in g.edges.items()}
        )
        a = betweenness(g)
        b = betweenness(scaled)
        for u in g.nodes:
            assert a[u] == pytest.approx(b[u], abs=1e-9)


def backbone_oracle(g: WeightedGraph, alpha: float) -> set:
    """Per-edge direct alpha_ij = (1-p)^(k-1) evaluation with the same
    either-endpoint and degree-1 conventions."""
    strength: dict = {}
    degree: dict = {}
    for (u, v), w in g.edges.items():
        strength[u] = strength.get(u, 0.0) + w
        strength[v] = strength.get(v, 0.0) + w
        degree[u] = degree.get(u, 0) + 1
        degree[v] = degree.get(v, 0) + 1
    kept = set()
    for (u, v), w in g.edges.items():
        if degree[u] == 1 or degree[v] == 1:
            kept.add((u, v))
            continue
        a_u = (1.0 - w / strength[u]) ** (degree[u] - 1)
        a_v = (1.0 - w / strength[v]) ** (degree[v] - 1)
        if a_u < alpha or a_v < alpha:
            kept.add((u, v))
    return kept


class TestDisparityBackbone:
    def test_dominant_edge_retained(self):
        # one edge carries nearly all of b's strength: alpha ~ 0 -> retained
        g = WeightedGraph(
            nodes={"a", "b", "c"}, edges={("a", "b"): 1.0, ("b", "c"): 1e-9}
        )
        backbone = disparity_backbone(g, alpha=0.05, keep_degree_one=False)
        assert ("a", "b") in backbone.edges

    def test_equal_star_pruned_at_hub_kept_by_leaves(self):
        edges = {(f"l{i}", "z_hub") if f"l{i}" < "z_hub" else ("z_hub", f"l{i}"): 1.0 for i in range(10)}
        g = WeightedGraph(nodes={"z_hub", *{f"l{i}" for i in range(10)}}, edges=edges)
        # hub test alone prunes everything: p=0.1, (0.9)^9 ~ 0.387 > 0.05
        assert (0.9**9) > 0.05
        no_leaf_convention = disparity_backbone(g, alpha=0.05, keep_degree_one=False)
        assert no_leaf_convention.n_edges == 0
        with_convention = disparity_backbone(g, alpha=0.05, keep_degree_one=True)
        assert with_convention.n_edges == 10

    def test_matches_formula_oracle(self):
        rng = np.random.default_rng(53)
        for trial in range(8):
            g = random_weighted_graph(rng, 40, p=0.15, w_lo=0.05, w_hi=1.0)
            backbone = disparity_backbone(g, alpha=0.05)
            assert set(backbone.edges) == backbone_oracle(g, 0.05)

    def test_subset_and_scale_invariance(self):
        rng = np.random.default_rng(59)
        g = random_weighted_graph(rng, 50, p=0.2, w_lo=0.01, w_hi=1.0)
        backbone = disparity_backbone(g, alpha=0.1)
        assert set(backbone.edges) <= set(g.edges)
        scaled = WeightedGraph(
            nodes=set(g.nodes), edges={k: w * 123.4 for k, w in g.edges.items()}
        )
        assert set(disparity_backbone(scaled, alpha=0.1).edges) == set(backbone.edges)

    def test_isolated_nodes_dropped(self):
        edges = {(f"l{i}", "z_hub") if f"l{i}" < "z_hub" else ("z_hub", f"l{i}"): 1.0 for i in range(10)}
        g = WeightedGraph(nodes={"z_hub", *{f"l{i}" for i in range(10)}}, edges=edges)
        backbone = disparity_backbone(g, alpha=0.05, keep_degree_one=False)
        assert backbone.nodes == set()

    def test_alpha_domain(self):
        g = WeightedGraph(nodes={"a", "b"}, edges={("a", "b"): 1.0})
        with pytest.raises(ValueError):
            disparity_backbone(g, alpha=0.0)
        with pytest.raises(ValueError):
            disparity_backbone(g, alpha=1.0)

    def test_both_rule_stricter(self):
        rng = np.random.default_rng(61)
        g = random_weighted_graph(rng, 40, p=0.2, w_lo=0.05, w_hi=1.0)
        either = disparity_backbone(g, alpha=0.1, rule="either", keep_degree_one=False)
        both = disparity_backbone(g, alpha=0.1, rule="both", keep_degree_one=False)
        assert set(both.edges) <= set(either.edges)
