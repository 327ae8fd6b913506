"""Inter-rater agreement for the intrusion-task evaluation.

Ratings are nominal labels in an items x raters table. Gwet's AC1 corrects
observed agreement with a chance term built from mean category prevalences;
Krippendorff's alpha (nominal distance) is computed from the coincidence
matrix and tolerates missing entries. Precision on the intrusion task is the
fraction of bundles where a rater picked the planted intruder.
"""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass


@dataclass
class RatingsTable:
    """rows = items, columns = raters; None marks a missing rating."""

    ratings: list[list[str | None]]

    def __post_init__(self) -> None:
        if not self.ratings:
            raise ValueError("need at least one item")
        widths = {len(row) for row in self.ratings}
        if len(widths) != 1:
            raise ValueError("all items must have the same number of rater slots")
        if widths.pop() < 2:
            raise ValueError("need at least two raters")

    @property
    def n_items(self) -> int:
        return len(self.ratings)

    @property
    def n_raters(self) -> int:
        return len(self.ratings[0])

    def categories(self) -> list[str]:
        return sorted({v for row in self.ratings for v in row if v is not None})


def gwet_ac1(table: RatingsTable) -> float:
    """AC1 = (p_a - p_e) / (1 - p_e) with chance agreement
    p_e = sum_q pi_q (1 - pi_q) / (Q - 1), pi_q the mean classification
    probability of category q. Requires complete ratings and at least two
    observed categories.
    """
    for i, row in enumerate(table.ratings):
        if any(v is None for v in row):
            raise ValueError(f"item {i} has missing ratings; AC1 requires complete data")
    cats = table.categories()
    q_count = len(cats)
    if q_count < 2:
        raise ValueError("AC1 undefined with a single observed category")
    r = table.n_raters
    n = table.n_items

    p_a = 0.0
    pi = dict.fromkeys(cats, 0.0)
    for row in table.ratings:
        counts: dict[str, int] = {}
        for v in row:
            counts[v] = counts.get(v, 0) + 1
        p_a += sum(c * (c - 1) for c in counts.values()) / (r * (r - 1))
        for cat, c in counts.items():
            pi[cat] += c / r
    p_a /= n
    for cat in pi:
        pi[cat] /= n
    p_e = sum(p * (1.0 - p) for p in pi.values()) / (q_count - 1)
    return (p_a - p_e) / (1.0 - p_e)


def krippendorff_alpha(table: RatingsTable) -> float:
    """Nominal-distance alpha via the coincidence matrix.

    alpha = 1 - D_o / D_e where D_o sums off-diagonal coincidences and
    D_e = sum_{c != k} n_c n_k / (n - 1). Items with fewer than two ratings
    are unpairable and drop out; fewer than two pairable values overall is an
    error, as is a single observed category (D_e = 0).
    """
    coincidence: dict[tuple[str, str], float] = {}
    totals: dict[str, float] = {}
    n_pairable = 0.0
    for row in table.ratings:
        values = [v for v in row if v is not None]
        m = len(values)
        if m < 2:
            continue
        n_pairable += m
        for i, a in enumerate(values):
            for j, b in enumerate(values):
                if i != j:
                    coincidence[(a, b)] = coincidence.get((a, b), 0.0) + 1.0 / (m - 1)
    if n_pairable < 2:
        raise ValueError("need at least two pairable values")
    for (a, _), v in coincidence.items():
        totals[a] = totals.get(a, 0.0) + v
    n_total = sum(totals.values())
    d_o = sum(v for (a, b), v in coincidence.items() if a != b)
    d_e = (n_total**2 - sum(v**2 for v in totals.values())) / (n_total - 1.0)
    if d_e == 0:
        raise ValueError("expected disagreement is zero (single observed category)")
    return 1.0 - d_o / d_e


def intrusion_precision(answers: Mapping, truth: Mapping) -> float:
    """Fraction of answered bundles where the chosen article is the intruder.

    `answers` maps bundle id -> chosen article id for one rater; every
    answered bundle must have a ground-truth intruder in `truth`.
    """
    unknown = set(answers) - set(truth)
    if unknown:
        raise ValueError(f"answers reference unknown bundle(s): {sorted(map(str, unknown))}")
    if not answers:
        raise ValueError("no answers given")
    correct = sum(1 for bundle, chosen in answers.items() if chosen == truth[bundle])
    return correct / len(answers)


def intrusion_precision_by_rater(
    answers_by_rater: Mapping[str, Mapping], truth: Mapping
) -> tuple[dict[str, float], float]:
    """Per-rater precisions and their unweighted mean."""
    per_rater = {
        rater: intrusion_precision(answers, truth)
        for rater, answers in sorted(answers_by_rater.items())
    }
    if not per_rater:
        raise ValueError("no raters given")
    average = sum(per_rater.values()) / len(per_rater)
    return per_rater, average
