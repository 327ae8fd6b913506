"""Ordinary least squares with the preprocessing and selection used to explain
the diversity and synchrony measures.

Numeric predictors and the dependent variable are rescaled to [0, 1];
categorical predictors become dummy vectors (reference level dropped); for
country pairs, the unordered combination of the two countries' category
levels is itself a categorical predictor. Collinearity is screened with the
variance inflation factor, and models are alternatively chosen by a
bidirectional stepwise search on the Akaike information criterion.
"""

from __future__ import annotations

import csv
import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.linalg import qr as _qr
from scipy.stats import t as _t_dist

logger = logging.getLogger(__name__)


@dataclass
class FeatureTable:
    """Predictor matrix with named columns, a target, and per-column provenance."""

    sample_ids: list[str]
    columns: list[str]
    X: np.ndarray
    y: np.ndarray
    target: str
    provenance: dict[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        n = len(self.sample_ids)
        self.X = np.asarray(self.X, dtype=np.float64)
        self.y = np.asarray(self.y, dtype=np.float64)
        if self.X.shape != (n, len(self.columns)):
            raise ValueError(f"X has shape {self.X.shape}, expected ({n}, {len(self.columns)})")
        if self.y.shape != (n,):
            raise ValueError(f"y has shape {self.y.shape}, expected ({n},)")
        if not np.all(np.isfinite(self.X)) or not np.all(np.isfinite(self.y)):
            raise ValueError("feature table contains non-finite values")
        if len(set(self.columns)) != len(self.columns):
            raise ValueError("duplicate column names")

    @property
    def n(self) -> int:
        return len(self.sample_ids)

    @property
    def k(self) -> int:
        return len(self.columns)

    def select(self, columns: Sequence[str]) -> "FeatureTable":
        idx = [self.columns.index(c) for c in columns]
        return FeatureTable(
            sample_ids=list(self.sample_ids),
            columns=list(columns),
            X=self.X[:, idx].copy(),
            y=self.y.copy(),
            target=self.target,
            provenance={c: self.provenance.get(c, "") for c in columns},
        )


def write_feature_csv(table: FeatureTable, path: str | Path) -> None:
    """Wide-format CSV: first column the sample id, then the target column,
    then one column per predictor."""
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["sample_id", table.target, *table.columns])
        for i, sid in enumerate(table.sample_ids):
            writer.writerow([sid, repr(float(table.y[i])), *(repr(float(v)) for v in table.X[i])])


def read_feature_csv(path: str | Path, target: str | None = None) -> FeatureTable:
    """Read a wide-format feature CSV back into a table.

    The target is the named column, defaulting to the first column after the
    sample id.
    """
    with Path(path).open(encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header or len(header) < 3:
            raise ValueError(f"{path}: expected sample id, target, and predictor columns")
        rows = [row for row in reader if row]
    names = header[1:]
    if target is None:
        target = names[0]
    if target not in names:
        raise ValueError(f"{path}: no column named {target!r}")
    t_idx = names.index(target)
    sample_ids = [row[0] for row in rows]
    values = np.array([[float(v) for v in row[1:]] for row in rows])
    y = values[:, t_idx]
    X = np.delete(values, t_idx, axis=1)
    columns = [n for n in names if n != target]
    return FeatureTable(sample_ids=sample_ids, columns=columns, X=X, y=y, target=target)


def rescale01(column: Sequence[float]) -> np.ndarray:
    """Affine map of a column onto [0, 1]: min -> 0, max -> 1."""
    x = np.asarray(column, dtype=np.float64)
    lo, hi = float(x.min()), float(x.max())
    if hi == lo:
        raise ValueError("cannot rescale a constant column")
    return (x - lo) / (hi - lo)


def dummy_encode(
    column: Sequence[str],
    levels: Sequence[str] | None = None,
    reference: str | None = None,
) -> tuple[list[str], np.ndarray]:
    """One {0,1} column per non-reference level.

    The reference level (default: first of the sorted levels) maps to all
    zeros. Values outside the known levels are an error.
    """
    values = list(column)
    if levels is None:
        levels = sorted(set(values))
    levels = list(levels)
    if len(levels) < 2:
        raise ValueError("need at least two levels to dummy-encode")
    if reference is None:
        reference = levels[0]
    if reference not in levels:
        raise ValueError(f"reference {reference!r} not among levels {levels}")
    unseen = set(values) - set(levels)
    if unseen:
        raise ValueError(f"unseen level(s): {sorted(unseen)}")
    kept = [lv for lv in levels if lv != reference]
    matrix = np.zeros((len(values), len(kept)))
    for i, v in enumerate(values):
        if v != reference:
            matrix[i, kept.index(v)] = 1.0
    return kept, matrix


def pairwise_category(cat_a: str, cat_b: str, levels: Sequence[str] | None = None) -> str:
    """Unordered combination label for a country pair's category levels.

    Symmetric by construction: the two levels are ordered by their rank in
    `levels` when given (e.g. ["low", "high"] makes ("high", "low") ->
    "low-high"), else lexicographically.
    """
    if levels is not None:
        order = {lv: i for i, lv in enumerate(levels)}
        if cat_a not in order or cat_b not in order:
            raise ValueError(f"categories must come from {list(levels)}")
        first, second = sorted((cat_a, cat_b), key=lambda c: order[c])
    else:
        first, second = sorted((cat_a, cat_b))
    return f"{first}-{second}"


@dataclass
class RegressionModel:
    """OLS fit: names excludes the intercept, which is reported separately."""

    names: list[str]
    coefficients: np.ndarray
    intercept: float
    std_errors: np.ndarray  # intercept first, then coefficients
    t_values: np.ndarray
    p_values: np.ndarray
    r_squared: float
    adj_r_squared: float
    n: int
    k: int
    rss: float

    def coef(self, name: str) -> float:
        return float(self.coefficients[self.names.index(name)])

    def rows(self) -> list[tuple[str, float, float, float, float]]:
        """(predictor, coefficient, std_err, t, p) rows, intercept first."""
        out = [("intercept", self.intercept, float(self.std_errors[0]), float(self.t_values[0]), float(self.p_values[0]))]
        for i, name in enumerate(self.names):
            out.append(
                (
                    name,
                    float(self.coefficients[i]),
                    float(self.std_errors[i + 1]),
                    float(self.t_values[i + 1]),
                    float(self.p_values[i + 1]),
                )
            )
        return out


def significance_marker(p: float, strong: float = 0.005, weak: float = 0.01) -> str:
    """'**' below the strong level, '*' below the weak level, else ''."""
    if p < strong:
        return "**"
    if p < weak:
        return "*"
    return ""


def _collinear_columns(design: np.ndarray, names: list[str]) -> list[str]:
    _, r, piv = _qr(design, mode="economic", pivoting=True)
    diag = np.abs(np.diag(r))
    tol = diag.max() * max(design.shape) * np.finfo(float).eps if diag.size else 0.0
    return sorted(names[j] for i, j in enumerate(piv) if i < diag.size and diag[i] <= tol and j > 0)


def ols_fit(table: FeatureTable) -> RegressionModel:
    """Least squares with classical standard errors and two-sided t tests.

    Requires a full-rank design and n > k + 1 so the error variance is
    estimable; collinear columns are named in the failure.
    """
    n, k = table.n, table.k
    if n <= k + 1:
        raise ValueError(f"need n > k + 1 (n={n}, k={k})")
    design = np.column_stack([np.ones(n), table.X])
    rank = np.linalg.matrix_rank(design)
    if rank < k + 1:
        bad = _collinear_columns(design, ["intercept", *table.columns])
        raise ValueError(f"design matrix is rank deficient; collinear columns: {bad}")

    beta, _, _, _ = np.linalg.lstsq(design, table.y, rcond=None)
    fitted = design @ beta
    resid = table.y - fitted
    rss = float(resid @ resid)
    tss = float(np.sum((table.y - table.y.mean()) ** 2))
    if tss == 0:
        raise ValueError("target is constant; regression undefined")
    dof = n - k - 1
    sigma2 = rss / dof
    cov = sigma2 * np.linalg.inv(design.T @ design)
    se = np.sqrt(np.diag(cov))
    with np.errstate(divide="ignore", invalid="ignore"):
        t_values = np.where(se > 0, beta / se, np.inf)
    p_values = 2.0 * _t_dist.sf(np.abs(t_values), dof)
    r2 = 1.0 - rss / tss
    adj = 1.0 - (1.0 - r2) * (n - 1) / dof
    return RegressionModel(
        names=list(table.columns),
        coefficients=beta[1:].copy(),
        intercept=float(beta[0]),
        std_errors=se,
        t_values=t_values,
        p_values=p_values,
        r_squared=r2,
        adj_r_squared=adj,
        n=n,
        k=k,
        rss=rss,
    )


def vif(table: FeatureTable) -> dict[str, float]:
    """1 / (1 - R^2) of each predictor regressed on all the others.

    Perfectly collinear columns come back infinite.
    """
    if table.k < 2:
        raise ValueError("VIF needs at least two predictor columns")
    out: dict[str, float] = {}
    for j, name in enumerate(table.columns):
        target = table.X[:, j]
        others = np.delete(table.X, j, axis=1)
        design = np.column_stack([np.ones(table.n), others])
        beta, _, _, _ = np.linalg.lstsq(design, target, rcond=None)
        resid = target - design @ beta
        rss = float(resid @ resid)
        tss = float(np.sum((target - target.mean()) ** 2))
        if tss == 0:
            out[name] = math.inf
            continue
        r2 = 1.0 - rss / tss
        out[name] = math.inf if r2 >= 1.0 - 1e-12 else 1.0 / (1.0 - r2)
    return out


@dataclass
class SelectionReport:
    method: str
    retained: list[str]
    steps: list[str] = field(default_factory=list)


def vif_select(table: FeatureTable, max_vif: float = 5.0) -> SelectionReport:
    """Iteratively drop the largest-VIF column while any exceeds `max_vif`.

    Name order breaks ties, so the result is deterministic.
    """
    remaining = list(table.columns)
    steps: list[str] = []
    while len(remaining) >= 2:
        values = vif(table.select(remaining))
        worst = max(sorted(values), key=lambda c: values[c])
        if values[worst] > max_vif:
            steps.append(f"drop {worst} (VIF={values[worst]:.4g})")
            remaining.remove(worst)
        else:
            steps.append(
                "stop: max VIF "
                f"{values[worst]:.4g} <= {max_vif:g} over {len(remaining)} columns"
            )
            break
    return SelectionReport(method="VIF", retained=remaining, steps=steps)


def aic(model: RegressionModel) -> float:
    """Gaussian-likelihood OLS form: n*ln(RSS/n) + 2*(k+1), intercept counted."""
    if model.rss <= 0:
        raise ValueError("AIC undefined for a zero-residual (degenerate) fit")
    return model.n * math.log(model.rss / model.n) + 2.0 * (model.k + 1)


def _aic_of(table: FeatureTable, columns: list[str]) -> float | None:
    """AIC of the model on `columns`, or None when it cannot be fit."""
    n = table.n
    if not columns:
        resid = table.y - table.y.mean()
        rss = float(resid @ resid)
        if rss <= 0:
            return None
        return n * math.log(rss / n) + 2.0
    if n <= len(columns) + 1:
        return None
    try:
        return aic(ols_fit(table.select(columns)))
    except ValueError:
        return None


def aic_stepwise_select(table: FeatureTable) -> SelectionReport:
    """Bidirectional greedy stepwise search from the intercept-only model.

    Each step applies the single add-or-remove move with the largest AIC
    decrease; ties break on (move kind, column name). Stops when no move
    improves.
    """
    current: list[str] = []
    current_aic = _aic_of(table, current)
    if current_aic is None:
        raise ValueError("intercept-only model has zero residual; nothing to select")
    steps = [f"start intercept-only (AIC={current_aic:.6g})"]
    while True:
        candidates: list[tuple[float, str, str]] = []
        for name in table.columns:
            if name in current:
                trial = [c for c in current if c != name]
                action = "remove"
            else:
                trial = sorted([*current, name])
                action = "add"
            trial_aic = _aic_of(table, trial)
            if trial_aic is not None:
                candidates.append((trial_aic, action, name))
        if not candidates:
            break
        candidates.sort()
        best_aic, action, name = candidates[0]
        if best_aic < current_aic - 1e-10:
            if action == "add":
                current = sorted([*current, name])
            else:
                current = [c for c in current if c != name]
            current_aic = best_aic
            steps.append(f"{action} {name} (AIC={current_aic:.6g})")
        else:
            steps.append(f"stop (AIC={current_aic:.6g})")
            break
    return SelectionReport(method="AIC", retained=current, steps=steps)
