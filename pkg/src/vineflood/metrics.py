"""Forecast-evaluation statistics: MSE, mean interval score, normalized
Nash-Sutcliffe efficiency, and distance correlation."""

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ValidationError

__all__ = ["EvaluationTable", "dcor", "mis", "mse", "nnse"]


def _pair(observed, predicted):
    x = np.asarray(observed, dtype=float)
    y = np.asarray(predicted, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValidationError(
            f"length mismatch: observed {x.shape} vs predicted {y.shape}"
        )
    return x, y


def mse(observed, predicted) -> float:
    """Mean squared error over the evaluation window."""
    x, y = _pair(observed, predicted)
    if len(x) < 1:
        raise ValidationError("need at least one observation")
    return float(np.mean((x - y) ** 2))


def mis(observed, lower, upper, alpha: float) -> float:
    """Mean interval score at level (1 - alpha).

    Per-point score: (u-l) + (2/alpha)(l-x) if x < l, plus
    (2/alpha)(x-u) if x > u.
    """
    x = np.asarray(observed, dtype=float)
    l = np.asarray(lower, dtype=float)
    u = np.asarray(upper, dtype=float)
    if not (x.shape == l.shape == u.shape) or x.ndim != 1:
        raise ValidationError("observed, lower, upper must be 1-d and equal length")
    if np.any(l > u):
        raise ValidationError("crossed interval: lower > upper")
    if not (0.0 < alpha < 1.0):
        raise ValidationError("alpha must be in (0,1)")
    width = u - l
    below = (l - x) * (x < l)
    above = (x - u) * (x > u)
    return float(np.mean(width + (2.0 / alpha) * (below + above)))


def nnse(observed, predicted) -> float:
    """Normalized Nash-Sutcliffe efficiency: 1/(2 - NSE), in (0, 1]."""
    x, y = _pair(observed, predicted)
    if len(x) < 2:
        raise ValidationError("need at least two observations")
    denom = np.sum((x - np.mean(x)) ** 2)
    if denom == 0.0:
        raise ValidationError("NSE undefined for constant observed series")
    nse = 1.0 - np.sum((y - x) ** 2) / denom
    return float(1.0 / (2.0 - nse))


def dcor(x, y) -> float:
    """Distance correlation in [0,1] (O(n^2) double-centering definition)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValidationError("x and y must be 1-d arrays of equal length")
    n = len(x)
    if n < 4:
        raise ValidationError("need at least 4 observations for dcor")

    def centered(z):
        d = np.abs(z[:, None] - z[None, :])
        return d - d.mean(axis=0, keepdims=True) - d.mean(axis=1, keepdims=True) + d.mean()

    a = centered(x)
    b = centered(y)
    dcov2 = np.mean(a * b)
    dvarx = np.mean(a * a)
    dvary = np.mean(b * b)
    if dvarx <= 0.0 or dvary <= 0.0:
        return 0.0
    return float(np.sqrt(max(dcov2, 0.0) / np.sqrt(dvarx * dvary)))


@dataclass
class EvaluationRow:
    variable: str
    model_label: str
    mse: float
    mis: float
    nnse: float
    dcor: float
    best: list = field(default_factory=list)  # metric names on which this model wins


@dataclass
class EvaluationTable:
    """Per-variable, per-model metric table with best-model flags."""

    rows: list

    METRICS = ("mse", "mis", "nnse", "dcor")
    HIGHER_BETTER = {"nnse", "dcor"}

    def flag_best(self) -> None:
        """Mark, per (variable, metric), the winning model."""
        for row in self.rows:
            row.best = []
        variables = sorted({r.variable for r in self.rows})
        for var in variables:
            group = [r for r in self.rows if r.variable == var]
            for metric in self.METRICS:
                vals = [getattr(r, metric) for r in group]
                pick = int(np.argmax(vals)) if metric in self.HIGHER_BETTER else int(np.argmin(vals))
                group[pick].best.append(metric)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["variable", "model", "mse", "mis", "nnse", "dcor", "best"])
            for r in self.rows:
                w.writerow(
                    [r.variable, r.model_label]
                    + [repr(getattr(r, m)) for m in self.METRICS]
                    + [";".join(r.best)]
                )

    def to_json(self, path=None):
        payload = {
            "version": 1,
            "rows": [
                {
                    "variable": r.variable,
                    "model": r.model_label,
                    **{m: getattr(r, m) for m in self.METRICS},
                    "best": list(r.best),
                }
                for r in self.rows
            ],
        }
        if path is None:
            return payload
        Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
        return payload
