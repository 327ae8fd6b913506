"""Article corpus loading, validation, filtering, and summary statistics.

The corpus is a JSON Lines file, one article per line:

    {"id": str, "country": str, "language": str, "date": "YYYY-MM-DD",
     "entities": [str], "word_count": int, "embedding_id": str?,
     "title": str?, "url": str?}

Malformed lines are skipped with a warning so that large crawls with sparse
corruption remain usable; duplicate ids abort the load.
"""

from __future__ import annotations

import csv
import json
import logging
from collections import Counter
from dataclasses import dataclass, field
from datetime import date
from pathlib import Path

logger = logging.getLogger(__name__)

REQUIRED_FIELDS = ("id", "country", "language", "date", "entities", "word_count")


@dataclass(frozen=True)
class Article:
    """One news item; entities are language-agnostic identifiers."""

    id: str
    country: str
    language: str
    publish_date: date
    entities: frozenset[str]
    word_count: int
    embedding_id: str | None = None
    title: str | None = None
    url: str | None = None


@dataclass
class Corpus:
    articles: tuple[Article, ...]
    language_length_factors: dict[str, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for lang, factor in self.language_length_factors.items():
            if not factor > 0:
                raise ValueError(f"length factor for {lang!r} must be positive, got {factor}")
        if len({a.id for a in self.articles}) != len(self.articles):
            raise ValueError("article ids must be unique within a corpus")

    def __len__(self) -> int:
        return len(self.articles)

    @property
    def by_id(self) -> dict[str, Article]:
        cached = getattr(self, "_by_id", None)
        if cached is None or len(cached) != len(self.articles):
            cached = {a.id: a for a in self.articles}
            object.__setattr__(self, "_by_id", cached)
        return cached


@dataclass
class CorpusStats:
    by_country: dict[str, int]
    by_language: dict[str, int]
    date_min: date | None
    date_max: date | None


def _parse_record(raw: dict) -> Article:
    missing = [f for f in REQUIRED_FIELDS if f not in raw]
    if missing:
        raise ValueError(f"missing fields: {missing}")
    article_id = str(raw["id"])
    if not article_id:
        raise ValueError("empty id")
    word_count = int(raw["word_count"])
    if word_count < 0:
        raise ValueError(f"negative word_count: {word_count}")
    return Article(
        id=article_id,
        country=str(raw["country"]),
        language=str(raw["language"]),
        publish_date=date.fromisoformat(str(raw["date"])),
        entities=frozenset(str(e) for e in raw["entities"]),
        word_count=word_count,
        embedding_id=raw.get("embedding_id"),
        title=raw.get("title"),
        url=raw.get("url"),
    )


def load_corpus(path: str | Path, length_factors: dict[str, float] | None = None) -> Corpus:
    """Load a JSON Lines corpus, skipping malformed lines with a warning.

    Raises on an unreadable file and on duplicate article ids.
    """
    path = Path(path)
    articles: list[Article] = []
    seen: set[str] = set()
    skipped = 0
    with path.open(encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
                if not isinstance(record, dict):
                    raise ValueError("record is not an object")
                article = _parse_record(record)
            except (ValueError, TypeError, KeyError) as err:
                skipped += 1
                logger.warning("%s:%d: skipping malformed line (%s)", path, line_no, err)
                continue
            if article.id in seen:
                raise ValueError(f"duplicate article id {article.id!r} at {path}:{line_no}")
            seen.add(article.id)
            articles.append(article)
    if skipped:
        logger.warning("%s: skipped %d malformed line(s)", path, skipped)
    return Corpus(articles=tuple(articles), language_length_factors=dict(length_factors or {}))


def load_length_factors(path: str | Path) -> dict[str, float]:
    """Read the two-column `language,factor` CSV of English-equivalent multipliers."""
    factors: dict[str, float] = {}
    with Path(path).open(encoding="utf-8", newline="") as fh:
        for row in csv.reader(fh):
            if not row or row[0].strip().lower() == "language":
                continue
            language, factor = row[0].strip(), float(row[1])
            if factor <= 0:
                raise ValueError(f"length factor for {language!r} must be positive, got {factor}")
            factors[language] = factor
    return factors


def english_equivalent_length(article: Article, factors: dict[str, float]) -> float:
    """word_count scaled by the per-language multiplier (1.0 when unknown)."""
    factor = factors.get(article.language)
    if factor is None:
        logger.warning("no length factor for language %r; using 1.0", article.language)
        factor = 1.0
    return article.word_count * factor


def filter_articles(corpus: Corpus, min_entities: int = 10, min_eq_words: float = 100.0) -> Corpus:
    """Keep articles with enough entities and enough English-equivalent length.

    Both thresholds are inclusive. The input corpus is left untouched.
    """
    if min_entities < 0 or min_eq_words < 0:
        raise ValueError("thresholds must be nonnegative")
    factors = corpus.language_length_factors
    kept = tuple(
        a
        for a in corpus.articles
        if len(a.entities) >= min_entities
        and english_equivalent_length(a, factors) >= min_eq_words
    )
    return Corpus(articles=kept, language_length_factors=dict(factors))


def corpus_stats(corpus: Corpus) -> CorpusStats:
    by_country: Counter[str] = Counter()
    by_language: Counter[str] = Counter()
    dates: list[date] = []
    for a in corpus.articles:
        by_country[a.country] += 1
        by_language[a.language] += 1
        dates.append(a.publish_date)
    return CorpusStats(
        by_country=dict(by_country),
        by_language=dict(by_language),
        date_min=min(dates) if dates else None,
        date_max=max(dates) if dates else None,
    )
