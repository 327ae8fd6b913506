"""Embedding-based pair scoring and the annotation label-space math.

Similarity between two articles is the cosine of their embedding vectors;
the vectors come from any provider honoring the store file contract, so the
pipeline runs on synthetic vectors just as well as on model output.

The label-space helpers (scale mapping, cubic steepening, multi-aspect
integration, head/tail token selection, Pearson evaluation) validate
annotation data and document the training objective of the upstream
similarity model; they are not wired into scoring.
"""

from __future__ import annotations

import json
import logging
import math
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .pairs import CandidatePair

logger = logging.getLogger(__name__)


@dataclass
class EmbeddingStore:
    """Fixed-dimension vector store keyed by embedding id."""

    dimension: int
    vectors: dict[str, np.ndarray]

    def __post_init__(self) -> None:
        for vid, vec in self.vectors.items():
            if vec.shape != (self.dimension,):
                raise ValueError(
                    f"vector {vid!r} has shape {vec.shape}, expected ({self.dimension},)"
                )
            if not np.all(np.isfinite(vec)):
                raise ValueError(f"vector {vid!r} contains non-finite entries")

    def __len__(self) -> int:
        return len(self.vectors)

    def get(self, vid: str) -> np.ndarray | None:
        return self.vectors.get(vid)


def load_embeddings_jsonl(path: str | Path) -> EmbeddingStore:
    """Read a store file: a `dim=<D>` header line, then {"id", "vec"} JSON lines."""
    path = Path(path)
    with path.open(encoding="utf-8") as fh:
        header = fh.readline().strip()
        if not header.startswith("dim="):
            raise ValueError(f"{path}: expected 'dim=<D>' header, got {header!r}")
        dimension = int(header[4:])
        vectors: dict[str, np.ndarray] = {}
        for line_no, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            rec = json.loads(line)
            vectors[str(rec["id"])] = np.asarray(rec["vec"], dtype=np.float64)
    return EmbeddingStore(dimension=dimension, vectors=vectors)


def load_embeddings_binary(matrix_path: str | Path, ids_path: str | Path) -> EmbeddingStore:
    """Read a flat little-endian float32 matrix plus its sidecar id list."""
    ids = [line.strip() for line in Path(ids_path).read_text(encoding="utf-8").splitlines() if line.strip()]
    raw = np.fromfile(str(matrix_path), dtype="<f4")
    if not ids:
        raise ValueError(f"{ids_path}: empty id list")
    if raw.size % len(ids) != 0:
        raise ValueError(
            f"{matrix_path}: {raw.size} floats do not divide evenly over {len(ids)} ids"
        )
    dimension = raw.size // len(ids)
    matrix = raw.astype(np.float64).reshape(len(ids), dimension)
    return EmbeddingStore(dimension=dimension, vectors={vid: matrix[i] for i, vid in enumerate(ids)})


def cosine(u: np.ndarray, v: np.ndarray) -> float:
    """Cosine similarity, clamped to [-1, 1] against rounding."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape:
        raise ValueError(f"dimension mismatch: {u.shape} vs {v.shape}")
    nu = float(np.linalg.norm(u))
    nv = float(np.linalg.norm(v))
    if nu == 0.0 or nv == 0.0:
        raise ValueError("cosine undefined for a zero vector (degenerate embedding)")
    return float(np.clip(np.dot(u, v) / (nu * nv), -1.0, 1.0))


@dataclass(frozen=True)
class ScoredPair:
    id_a: str
    id_b: str
    similarity: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.similarity):
            raise ValueError(f"similarity must be finite, got {self.similarity}")


def score_pairs(
    pairs: Iterable[CandidatePair],
    store: EmbeddingStore,
    id_map: Mapping[str, str | None] | None = None,
) -> tuple[list[ScoredPair], int]:
    """Attach cosine similarity to each candidate pair.

    `id_map` translates article ids to embedding ids (identity by default).
    Pairs with a missing embedding are skipped and counted; the count is the
    second element of the result.
    """
    scored: list[ScoredPair] = []
    skipped = 0

    def resolve(article_id: str) -> np.ndarray | None:
        eid = id_map.get(article_id, article_id) if id_map is not None else article_id
        if eid is None:
            return None
        return store.get(eid)

    for pair in pairs:
        u = resolve(pair.id_a)
        v = resolve(pair.id_b)
        if u is None or v is None:
            skipped += 1
            logger.warning("missing embedding for pair (%s, %s); skipped", pair.id_a, pair.id_b)
            continue
        scored.append(ScoredPair(id_a=pair.id_a, id_b=pair.id_b, similarity=cosine(u, v)))
    if skipped:
        logger.warning("skipped %d pair(s) with missing embeddings", skipped)
    return scored, skipped


def write_scored_jsonl(scored: Iterable[ScoredPair], path) -> int:
    count = 0
    with open(path, "w", encoding="utf-8") as fh:
        for s in scored:
            fh.write(json.dumps({"a": s.id_a, "b": s.id_b, "similarity": s.similarity}) + "\n")
            count += 1
    return count


def read_scored_jsonl(path) -> list[ScoredPair]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                rec = json.loads(line)
                out.append(ScoredPair(id_a=rec["a"], id_b=rec["b"], similarity=rec["similarity"]))
    return out


# --- annotation label space ------------------------------------------------

@dataclass(frozen=True)
class LabelMapping:
    """Linear map t = p*x + q sending the 4-point scale [1, 4] onto [l, r].

    The boundary conditions l = p + q and r = 4p + q give p = (r - l) / 3 and
    q = (-r + 4l) / 3.
    """

    l: float
    r: float

    def __post_init__(self) -> None:
        if not self.r > self.l:
            raise ValueError(f"require r > l, got l={self.l}, r={self.r}")

    @property
    def p(self) -> float:
        return (self.r - self.l) / 3.0

    @property
    def q(self) -> float:
        return (-self.r + 4.0 * self.l) / 3.0


UNSIGNED_MAPPING = LabelMapping(l=0.0, r=1.0)
SIGNED_MAPPING = LabelMapping(l=-1.0, r=1.0)


def map_label(x: float, mapping: LabelMapping) -> float:
    if not 1.0 <= x <= 4.0:
        raise ValueError(f"label must lie in [1, 4], got {x}")
    return mapping.p * x + mapping.q


def cubic_transform(t: float, variant: str = "unsigned") -> float:
    """Steepen a mapped label around the similar/dissimilar decision boundary.

    unsigned        t in [0, 1]  -> t**3
    signed-verbatim t in [-1, 1] -> ((2t - 1)**3) / 2 + 1/2  (as printed; it
                                    escapes [-1, 1] for t < 0)
    signed-odd      t in [-1, 1] -> t**3  (range-preserving odd alternative)
    """
    if variant == "unsigned":
        if not 0.0 <= t <= 1.0:
            raise ValueError(f"unsigned input must lie in [0, 1], got {t}")
        return t**3
    if variant == "signed-verbatim":
        if not -1.0 <= t <= 1.0:
            raise ValueError(f"signed input must lie in [-1, 1], got {t}")
        return ((2.0 * t - 1.0) ** 3) / 2.0 + 0.5
    if variant == "signed-odd":
        if not -1.0 <= t <= 1.0:
            raise ValueError(f"signed input must lie in [-1, 1], got {t}")
        return t**3
    raise ValueError(f"unknown variant {variant!r}")


@dataclass(frozen=True)
class AspectLabels:
    """Overall similarity rating plus optional per-aspect ratings, all in [1, 4]."""

    overall: float
    geo: float | None = None
    ent: float | None = None
    time: float | None = None
    nar: float | None = None
    style: float | None = None
    tone: float | None = None

    def __post_init__(self) -> None:
        for name in ("overall", "geo", "ent", "time", "nar", "style", "tone"):
            value = getattr(self, name)
            if value is not None and not 1.0 <= value <= 4.0:
                raise ValueError(f"aspect {name!r} must lie in [1, 4], got {value}")


_SCHEME_ASPECTS = {
    "y1": ("ent", "nar"),
    "y2": ("geo", "ent", "time", "nar", "style", "tone"),
}


def integrated_label(labels: AspectLabels, scheme: str = "y1", w: float = 0.8) -> float:
    """Blend the overall rating with the mean of the scheme's aspect ratings:
    w * overall + (1 - w) * mean(aspects)."""
    if scheme not in _SCHEME_ASPECTS:
        raise ValueError(f"unknown scheme {scheme!r}; expected one of {sorted(_SCHEME_ASPECTS)}")
    if not 0.0 <= w <= 1.0:
        raise ValueError(f"weight must lie in [0, 1], got {w}")
    values = []
    for name in _SCHEME_ASPECTS[scheme]:
        value = getattr(labels, name)
        if value is None:
            raise ValueError(f"scheme {scheme!r} requires aspect {name!r}")
        values.append(value)
    return w * labels.overall + (1.0 - w) * (sum(values) / len(values))


def head_tail_select(tokens: Sequence, head: int = 456, tail: int = 56) -> list:
    """Keep the first `head` and last `tail` tokens of an over-long sequence.

    Sequences of at most head + tail tokens pass through unchanged.
    """
    if head < 0 or tail < 0:
        raise ValueError("head and tail must be nonnegative")
    tokens = list(tokens)
    if len(tokens) <= head + tail:
        return tokens
    return tokens[:head] + tokens[len(tokens) - tail :]


def pearson(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Sample Pearson correlation; undefined (an error) for constant input."""
    x = np.asarray(xs, dtype=np.float64)
    y = np.asarray(ys, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("inputs must be one-dimensional and of equal length")
    if x.size < 2:
        raise ValueError("need at least two observations")
    xd = x - x.mean()
    yd = y - y.mean()
    sx = math.sqrt(float(np.dot(xd, xd)))
    sy = math.sqrt(float(np.dot(yd, yd)))
    if sx == 0.0 or sy == 0.0:
        raise ValueError("correlation undefined for constant input")
    return float(np.clip(np.dot(xd, yd) / (sx * sy), -1.0, 1.0))
