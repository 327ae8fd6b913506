"""Candidate article-pair generation via an entity inverted index.

Two articles form a candidate pair when the Jaccard similarity of their
entity sets strictly exceeds a threshold and their publication dates lie
within a day window (inclusive). Enumeration goes through per-entity
postings instead of the full O(n^2) double loop; the result set is defined
to be identical to the double loop's.
"""

from __future__ import annotations

import json
import logging
from collections.abc import Iterable, Iterator, Set
from dataclasses import dataclass

from .corpus import Article, Corpus

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CandidatePair:
    """Canonically ordered pair of article ids with its Jaccard value."""

    id_a: str
    id_b: str
    jaccard: float
    date_gap_days: int

    def __post_init__(self) -> None:
        if self.id_a >= self.id_b:
            raise ValueError(f"pair not in canonical order: {self.id_a!r} >= {self.id_b!r}")


@dataclass
class InvertedIndex:
    """Entity id -> sorted, deduplicated list of article ids containing it."""

    postings: dict[str, list[str]]

    def __len__(self) -> int:
        return len(self.postings)


def jaccard(set_a: Set[str], set_b: Set[str]) -> float:
    """|A n B| / |A u B|, taken as 0 when both sets are empty."""
    if not set_a and not set_b:
        return 0.0
    inter = len(set_a & set_b)
    if inter == 0:
        return 0.0
    return inter / (len(set_a) + len(set_b) - inter)


def build_inverted_index(corpus: Corpus) -> InvertedIndex:
    postings: dict[str, set[str]] = {}
    for article in corpus.articles:
        for entity in article.entities:
            postings.setdefault(entity, set()).add(article.id)
    return InvertedIndex(postings={e: sorted(ids) for e, ids in postings.items()})


def _pair_of(a: Article, b: Article, jaccard_min: float, window_days: int) -> CandidatePair | None:
    gap = abs((a.publish_date - b.publish_date).days)
    if gap > window_days:
        return None
    j = jaccard(a.entities, b.entities)
    if j <= jaccard_min:
        return None
    id_a, id_b = (a.id, b.id) if a.id < b.id else (b.id, a.id)
    return CandidatePair(id_a=id_a, id_b=id_b, jaccard=j, date_gap_days=gap)


def generate_candidates(
    corpus: Corpus,
    jaccard_min: float = 0.25,
    window_days: int = 5,
    entity_freq_cap: float | None = 0.1,
) -> Iterator[CandidatePair]:
    """Yield every candidate pair exactly once, in canonical (id_a, id_b) order.

    Entities held by more than `entity_freq_cap` of the corpus are skipped when
    seeding partners (they would force a near-quadratic scan), but the Jaccard
    check always uses the full entity sets. Pass None to disable the cap; with
    the cap disabled the output equals the brute-force double loop.
    """
    if not 0.0 <= jaccard_min < 1.0:
        raise ValueError(f"jaccard_min must be in [0, 1), got {jaccard_min}")
    if window_days < 0:
        raise ValueError(f"window_days must be >= 0, got {window_days}")

    index = build_inverted_index(corpus)
    n = len(corpus)
    capped: set[str] = set()
    if entity_freq_cap is not None and n > 0:
        limit = entity_freq_cap * n
        capped = {e for e, ids in index.postings.items() if len(ids) > limit}
        if capped:
            logger.info("skipping %d ubiquitous entities during candidate seeding", len(capped))

    by_id = corpus.by_id
    results: list[CandidatePair] = []
    for article in corpus.articles:
        partners: set[str] = set()
        for entity in article.entities:
            if entity in capped:
                continue
            partners.update(index.postings.get(entity, ()))
        for other_id in partners:
            if other_id <= article.id:
                continue
            pair = _pair_of(article, by_id[other_id], jaccard_min, window_days)
            if pair is not None:
                results.append(pair)
    results.sort(key=lambda p: (p.id_a, p.id_b))
    yield from results


def write_pairs_jsonl(pairs: Iterable[CandidatePair], path) -> int:
    count = 0
    with open(path, "w", encoding="utf-8") as fh:
        for p in pairs:
            fh.write(
                json.dumps(
                    {"a": p.id_a, "b": p.id_b, "jaccard": p.jaccard, "gap_days": p.date_gap_days}
                )
                + "\n"
            )
            count += 1
    return count


def read_pairs_jsonl(path) -> list[CandidatePair]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            rec = json.loads(line)
            out.append(
                CandidatePair(
                    id_a=rec["a"], id_b=rec["b"], jaccard=rec["jaccard"], date_gap_days=rec["gap_days"]
                )
            )
    return out
