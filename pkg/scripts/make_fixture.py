#!/usr/bin/env python3
"""Generate the bundled synthetic fixture: 1000 articles across 6 countries,
5 planted events with orthogonal 8-dim embedding anchors, plus predictor,
trade, and annotation side files. Everything is deterministic, so the
committed fixture can be regenerated byte-for-byte.

Run from the repository root:  python scripts/make_fixture.py
"""

from __future__ import annotations

import json
import math
import sys
from datetime import date, timedelta
from pathlib import Path

import numpy as np

SEED = 20200101
N_EVENTS = 5
DIM = 8
CORE_ENTITIES = 8
EXTRA_ENTITIES = 10
EXTRAS_PER_ARTICLE = 4

COUNTRIES = {
    "US": "en",
    "GB": "en",
    "DE": "de",
    "FR": "fr",
    "ES": "es",
    "CN": "zh",
}

# articles per (country, event); rows sum to each country's article count
PLANTED_COUNTS = {
    "US": [72, 54, 36, 18, 0],
    "GB": [40, 40, 40, 40, 0],
    "DE": [17, 34, 51, 34, 34],
    "FR": [30, 30, 30, 30, 30],
    "ES": [0, 17, 51, 51, 51],
    "CN": [85, 0, 0, 0, 85],
}

LENGTH_FACTORS = {"en": 1.0, "de": 1.1, "fr": 1.05, "es": 0.95, "zh": 2.5}

PREDICTORS = {
    "population": {"US": 331e6, "GB": 67e6, "DE": 83e6, "FR": 65e6, "ES": 47e6, "CN": 1400e6},
    "gini": {"US": 41.5, "GB": 35.1, "DE": 31.7, "FR": 32.4, "ES": 34.3, "CN": 38.2},
    "gdp": {"US": 21e12, "GB": 2.8e12, "DE": 3.8e12, "FR": 0.4e12, "ES": 0.3e12, "CN": 14e12},
    "democracy": {"US": 7.9, "GB": 8.5, "DE": 8.7, "FR": 8.0, "ES": 8.1, "CN": 2.3},
}


def planted_distribution(country: str) -> list[float]:
    counts = PLANTED_COUNTS[country]
    total = sum(counts)
    return [c / total for c in counts]


def entropy_bits(probs: list[float]) -> float:
    return -sum(p * math.log2(p) for p in probs if p > 0)


def main(root: Path) -> None:
    out = root / "fixtures"
    out.mkdir(exist_ok=True)
    rng = np.random.default_rng(SEED)

    anchors = np.zeros((N_EVENTS, DIM))
    for k in range(N_EVENTS):
        anchors[k, k] = 1.0

    event_start = {k: date(2020, 1, 1) + timedelta(days=12 * k) for k in range(N_EVENTS)}
    extras = {
        k: [f"evt{k}_x{i}" for i in range(EXTRA_ENTITIES)] for k in range(N_EVENTS)
    }
    cores = {k: [f"evt{k}_core{i}" for i in range(CORE_ENTITIES)] for k in range(N_EVENTS)}

    articles = []
    embeddings = []
    planted_events: dict[str, int] = {}
    serial = 0
    for country in sorted(COUNTRIES):
        language = COUNTRIES[country]
        for event, count in enumerate(PLANTED_COUNTS[country]):
            for _ in range(count):
                article_id = f"a{serial:04d}"
                serial += 1
                picks = rng.choice(EXTRA_ENTITIES, size=EXTRAS_PER_ARTICLE, replace=False)
                entities = list(cores[event]) + [extras[event][int(i)] for i in sorted(picks)]
                publish = event_start[event] + timedelta(days=int(rng.integers(0, 5)))
                word_count = int(rng.integers(150, 800))
                vec = anchors[event] + 0.03 * rng.standard_normal(DIM)
                vec = vec / np.linalg.norm(vec)
                articles.append(
                    {
                        "id": article_id,
                        "country": country,
                        "language": language,
                        "date": publish.isoformat(),
                        "entities": entities,
                        "word_count": word_count,
                        "embedding_id": article_id,
                    }
                )
                embeddings.append({"id": article_id, "vec": [float(x) for x in vec]})
                planted_events[article_id] = event

    articles.sort(key=lambda a: a["id"])
    embeddings.sort(key=lambda e: e["id"])

    with (out / "articles.jsonl").open("w", encoding="utf-8") as fh:
        for a in articles:
            fh.write(json.dumps(a) + "\n")
    with (out / "embeddings.jsonl").open("w", encoding="utf-8") as fh:
        fh.write(f"dim={DIM}\n")
        for e in embeddings:
            fh.write(json.dumps(e) + "\n")
    with (out / "length_factors.csv").open("w", encoding="utf-8") as fh:
        fh.write("language,factor\n")
        for lang, factor in sorted(LENGTH_FACTORS.items()):
            fh.write(f"{lang},{factor}\n")

    # internet_rate tracks the planted diversity so the regression has signal
    internet = {
        c: round(0.25 + 0.45 * (entropy_bits(planted_distribution(c)) - 1.0) / 1.4, 4)
        for c in sorted(COUNTRIES)
    }
    with (out / "predictors.csv").open("w", encoding="utf-8") as fh:
        fh.write("country,predictor,value\n")
        for c in sorted(COUNTRIES):
            fh.write(f"{c},internet_rate,{internet[c]}\n")
        for name in sorted(PREDICTORS):
            for c in sorted(COUNTRIES):
                fh.write(f"{c},{name},{PREDICTORS[name][c]}\n")

    with (out / "pair_predictors.csv").open("w", encoding="utf-8") as fh:
        fh.write("country_a,country_b,predictor,value\n")
        names = sorted(COUNTRIES)
        for i, a in enumerate(names):
            for b in names[i + 1 :]:
                trade = round(float(rng.uniform(1e9, 5e11)), 2)
                fh.write(f"{a},{b},trade,{trade}\n")

    # ratings: 40 items, 3 raters, high but imperfect agreement over 4 labels
    labels = ["A", "B", "C", "D"]
    with (out / "ratings.csv").open("w", encoding="utf-8") as fh:
        for _ in range(40):
            truth = labels[int(rng.integers(0, 4))]
            row = [truth]
            for _ in range(2):
                if rng.random() < 0.9:
                    row.append(truth)
                else:
                    row.append(labels[int(rng.integers(0, 4))])
            fh.write(",".join(row) + "\n")

    # intrusion task: 40 bundles, three raters with 33/34/36 correct answers
    bundle_ids = [f"b{i:02d}" for i in range(40)]
    intruders = {b: f"intruder_{i:02d}" for i, b in enumerate(bundle_ids)}
    with (out / "intrusion_truth.csv").open("w", encoding="utf-8") as fh:
        fh.write("bundle,intruder\n")
        for b in bundle_ids:
            fh.write(f"{b},{intruders[b]}\n")
    correct_counts = {"r1": 33, "r2": 34, "r3": 36}
    with (out / "intrusion_answers.csv").open("w", encoding="utf-8") as fh:
        fh.write("rater,bundle,chosen\n")
        for rater in sorted(correct_counts):
            wrong = 40 - correct_counts[rater]
            miss_idx = set(int(i) for i in rng.choice(40, size=wrong, replace=False))
            for i, b in enumerate(bundle_ids):
                chosen = f"decoy_{i:02d}" if i in miss_idx else intruders[b]
                fh.write(f"{rater},{b},{chosen}\n")

    config = """\
# synthetic fixture configuration; run `newssync --config fixtures/fixture.cfg all`
paths.corpus = fixtures/articles.jsonl
paths.length_factors = fixtures/length_factors.csv
paths.embeddings = fixtures/embeddings.jsonl
paths.predictors = fixtures/predictors.csv
paths.pair_predictors = fixtures/pair_predictors.csv
paths.ratings = fixtures/ratings.csv
paths.intrusion_answers = fixtures/intrusion_answers.csv
paths.intrusion_truth = fixtures/intrusion_truth.csv
paths.output = out
thresholds.min_edge_weight = 0.5
flags.entity_freq_cap = none
rng_seed = 7
"""
    (out / "fixture.cfg").write_text(config, encoding="utf-8")

    planted = {
        "seed": SEED,
        "events": planted_events,
        "distributions": {c: planted_distribution(c) for c in sorted(COUNTRIES)},
        "event_sizes": [
            sum(PLANTED_COUNTS[c][k] for c in COUNTRIES) for k in range(N_EVENTS)
        ],
        "expected_precision_average": (33 + 34 + 36) / 120.0,
    }
    (out / "planted.json").write_text(json.dumps(planted, indent=1, sort_keys=True), encoding="utf-8")

    print(f"wrote fixture ({len(articles)} articles) to {out}")


if __name__ == "__main__":
    main(Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).resolve().parent.parent)
