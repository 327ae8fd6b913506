"""Country-level news diversity and cross-country news synchrony.

Each country gets a distribution of its articles over the detected event
clusters (an article in several clusters contributes one count to each;
articles outside every cluster are excluded). Diversity is the Shannon
entropy of that distribution in bits; synchrony between two countries is the
negative Jensen-Shannon divergence of their distributions, so it lives in
[-1, 0] with 0 meaning identical coverage. Base-2 logs throughout keep both
measures on the [0, 1]-per-comparison scale.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass

import numpy as np

from .corpus import Corpus
from .events import ClusterSet
from .graph import WeightedGraph
from .similarity import ScoredPair

logger = logging.getLogger(__name__)


@dataclass
class CountryEventDistribution:
    country: str
    probs: dict[int, float]
    support_size: int

    def __post_init__(self) -> None:
        total = sum(self.probs.values())
        if self.probs and abs(total - 1.0) > 1e-9:
            raise ValueError(f"probabilities sum to {total}, not 1")
        if any(p < 0 for p in self.probs.values()):
            raise ValueError("negative probability")
        if self.support_size != sum(1 for p in self.probs.values() if p > 0):
            raise ValueError("support_size inconsistent with probs")


def event_distribution(cs: ClusterSet, corpus: Corpus, country: str) -> CountryEventDistribution:
    """Share of the country's cluster memberships falling on each event.

    Raises when the country has no clustered articles at all (its coverage of
    the identified events is empty, so no distribution exists).
    """
    membership = cs.membership()
    counts: dict[int, int] = {}
    total = 0
    for article in corpus.articles:
        if article.country != country:
            continue
        for cluster_id in membership.get(article.id, ()):
            counts[cluster_id] = counts.get(cluster_id, 0) + 1
            total += 1
    if total == 0:
        raise ValueError(f"country {country!r} has no articles in any event cluster")
    probs = {cid: c / total for cid, c in sorted(counts.items())}
    return CountryEventDistribution(
        country=country, probs=probs, support_size=sum(1 for p in probs.values() if p > 0)
    )


def _probs(dist) -> Mapping[int, float]:
    return dist.probs if isinstance(dist, CountryEventDistribution) else dist


def shannon_entropy(dist) -> float:
    """-sum p log2 p over the positive-probability events, in bits."""
    probs = _probs(dist)
    return float(-sum(p * math.log2(p) for p in probs.values() if p > 0))


def jsd(p, q) -> float:
    """Jensen-Shannon divergence with base-2 logs, so the value lies in [0, 1].

    JSD(p, q) = KL(p || m)/2 + KL(q || m)/2 with m = (p + q)/2; ids missing
    from one distribution count as probability zero there.
    """
    pp = _probs(p)
    qq = _probs(q)
    total = 0.0
    for key in set(pp) | set(qq):
        a = pp.get(key, 0.0)
        b = qq.get(key, 0.0)
        m = 0.5 * (a + b)
        if a > 0:
            total += 0.5 * a * math.log2(a / m)
        if b > 0:
            total += 0.5 * b * math.log2(b / m)
    return min(max(total, 0.0), 1.0)


def synchrony(p, q) -> float:
    """Negative Jensen-Shannon divergence: 0 for identical coverage, -1 for disjoint."""
    return -jsd(p, q)


@dataclass
class SynchronyMatrix:
    countries: list[str]
    values: np.ndarray  # symmetric, diagonal 0, entries in [-1, 0]

    def __post_init__(self) -> None:
        n = len(self.countries)
        if self.values.shape != (n, n):
            raise ValueError("matrix shape does not match country list")
        if not np.allclose(self.values, self.values.T, atol=0):
            raise ValueError("matrix must be exactly symmetric")
        if not np.all(np.diag(self.values) == 0.0):
            raise ValueError("diagonal must be zero (a country is maximally synchronized with itself)")
        if np.any(self.values < -1.0) or np.any(self.values > 0.0):
            raise ValueError("synchrony values must lie in [-1, 0]")

    def pair(self, a: str, b: str) -> float:
        i, j = self.countries.index(a), self.countries.index(b)
        return float(self.values[i, j])


def synchrony_matrix(cs: ClusterSet, corpus: Corpus, countries: Sequence[str] | None = None) -> SynchronyMatrix:
    """Pairwise synchrony over the given countries (default: every country
    with at least one clustered article, sorted)."""
    if countries is None:
        membership = cs.membership()
        present = sorted(
            {a.country for a in corpus.articles if membership.get(a.id)}
        )
    else:
        present = list(countries)
    dists = {c: event_distribution(cs, corpus, c) for c in present}
    n = len(present)
    values = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            s = synchrony(dists[present[i]], dists[present[j]])
            values[i, j] = s
            values[j, i] = s
    return SynchronyMatrix(countries=present, values=values)


def equal_weight_subsample(corpus: Corpus, per_country: int, rng_seed: int = 0) -> Corpus:
    """Sample the same number of articles from every country, without replacement.

    Countries with fewer than `per_country` articles are excluded with a
    warning so the remaining countries stay comparable. Deterministic given
    the seed.
    """
    if per_country <= 0:
        raise ValueError(f"per_country must be positive, got {per_country}")
    rng = np.random.default_rng(rng_seed)
    by_country: dict[str, list] = {}
    for a in corpus.articles:
        by_country.setdefault(a.country, []).append(a)
    sampled = []
    for country in sorted(by_country):
        pool = sorted(by_country[country], key=lambda a: a.id)
        if len(pool) < per_country:
            logger.warning(
                "country %s has %d articles (< %d); excluded from subsample",
                country,
                len(pool),
                per_country,
            )
            continue
        picks = rng.choice(len(pool), size=per_country, replace=False)
        sampled.extend(pool[int(i)] for i in sorted(picks))
    return Corpus(
        articles=tuple(sampled),
        language_length_factors=dict(corpus.language_length_factors),
    )


def baseline_diversity(scored: Sequence[ScoredPair], corpus: Corpus, country: str) -> float:
    """Mean scored similarity of article pairs within one country.

    A similarity: higher values mean *less* diverse coverage. Raises when the
    country has no scored within-country pair.
    """
    by_id = corpus.by_id
    sims = [
        s.similarity
        for s in scored
        if by_id[s.id_a].country == country and by_id[s.id_b].country == country
    ]
    if not sims:
        raise ValueError(f"no scored within-country pairs for {country!r}")
    return float(sum(sims) / len(sims))


def baseline_synchrony(scored: Sequence[ScoredPair], corpus: Corpus, a: str, b: str) -> float:
    """Mean scored similarity of article pairs spanning the two countries."""
    by_id = corpus.by_id
    sims = [
        s.similarity
        for s in scored
        if {by_id[s.id_a].country, by_id[s.id_b].country} == {a, b}
    ]
    if not sims:
        raise ValueError(f"no scored cross-country pairs for ({a!r}, {b!r})")
    return float(sum(sims) / len(sims))


def synchrony_graph(
    matrix: SynchronyMatrix,
    populations: Mapping[str, float],
    top_by_population: int = 100,
) -> WeightedGraph:
    """Country graph with edge weight 1 + synchrony, over the most populous
    countries.

    The shift moves synchrony from [-1, 0] to [0, 1] without reordering
    edges; zero-weight edges (fully disjoint coverage) cannot be represented
    and are dropped. Countries lacking a population value are skipped with a
    warning.
    """
    with_pop = []
    for c in matrix.countries:
        if c in populations:
            with_pop.append(c)
        else:
            logger.warning("no population value for %s; skipped in synchrony graph", c)
    with_pop.sort(key=lambda c: (-populations[c], c))
    selected = sorted(with_pop[:top_by_population])

    edges: dict[tuple, float] = {}
    for i, a in enumerate(selected):
        for b in selected[i + 1 :]:
            w = 1.0 + matrix.pair(a, b)
            if w > 0:
                edges[(a, b)] = w
    return WeightedGraph(nodes=set(selected), edges=edges)
