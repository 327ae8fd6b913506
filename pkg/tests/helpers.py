"""Shared builders for synthetic corpora and graphs used across the suite."""

from __future__ import annotations

from datetime import date, timedelta

import numpy as np

from newssync.corpus import Article, Corpus
from newssync.graph import WeightedGraph, edge_key


def art(
    article_id: str,
    country: str = "US",
    language: str = "en",
    day: str = "2020-01-01",
    entities: tuple[str, ...] = ("e1", "e2"),
    word_count: int = 200,
    **kwargs,
) -> Article:
    return Article(
        id=article_id,
        country=country,
        language=language,
        publish_date=date.fromisoformat(day),
        entities=frozenset(entities),
        word_count=word_count,
        **kwargs,
    )


def random_corpus(
    rng: np.random.Generator,
    n: int,
    n_entities: int = 40,
    max_entities_per_article: int = 12,
    day_span: int = 30,
    countries: tuple[str, ...] = ("US", "DE", "FR"),
    languages: tuple[str, ...] = ("en", "de", "fr"),
) -> Corpus:
    articles = []
    for i in range(n):
        k = int(rng.integers(3, max_entities_per_article + 1))
        picks = rng.choice(n_entities, size=k, replace=False)
        ci = int(rng.integers(0, len(countries)))
        articles.append(
            Article(
                id=f"r{i:05d}",
                country=countries[ci],
                language=languages[ci],
                publish_date=date(2020, 1, 1) + timedelta(days=int(rng.integers(0, day_span))),
                entities=frozenset(f"e{int(j)}" for j in picks),
                word_count=int(rng.integers(50, 500)),
            )
        )
    return Corpus(articles=tuple(articles))


def clique_graph(blocks: list[list[str]], cross: list[tuple[str, str, float]] = ()) -> WeightedGraph:
    """Disjoint cliques of weight 1.0 plus optional weak cross edges."""
    edges: dict[tuple, float] = {}
    nodes: set = set()
    for block in blocks:
        nodes.update(block)
        for i in range(len(block)):
            for j in range(i + 1, len(block)):
                edges[edge_key(block[i], block[j])] = 1.0
    for u, v, w in cross:
        edges[edge_key(u, v)] = w
        nodes.update((u, v))
    return WeightedGraph(nodes=nodes, edges=edges)


def random_weighted_graph(
    rng: np.random.Generator, n: int, p: float = 0.2, w_lo: float = 0.1, w_hi: float = 1.0
) -> WeightedGraph:
    nodes = {f"n{i:03d}" for i in range(n)}
    edges: dict[tuple, float] = {}
    names = sorted(nodes)
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < p:
                edges[(names[i], names[j])] = float(rng.uniform(w_lo, w_hi))
    return WeightedGraph(nodes=nodes, edges=edges)
