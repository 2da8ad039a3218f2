"""Evaluation metrics against brute-force loop oracles and hand-computed
cases."""

import csv
import json

import numpy as np
import pytest

from vineflood.errors import ValidationError
from vineflood.metrics import EvaluationRow, EvaluationTable, dcor, mis, mse, nnse


# ------------------------------------------------------------------ oracles
def mis_loop(x, lo, hi, alpha):
    total = 0.0
    for xi, li, ui in zip(x, lo, hi):
        s = ui - li
        if xi < li:
            s += (2.0 / alpha) * (li - xi)
        if xi > ui:
            s += (2.0 / alpha) * (xi - ui)
        total += s
    return total / len(x)


def dcor_loop(x, y):
    n = len(x)
    A = np.empty((n, n))
    B = np.empty((n, n))
    for i in range(n):
        for j in range(n):
            A[i, j] = abs(x[i] - x[j])
            B[i, j] = abs(y[i] - y[j])
    for M in (A, B):
        rows = M.mean(axis=1)
        cols = M.mean(axis=0)
        grand = M.mean()
        M -= rows[:, None]
        M -= cols[None, :]
        M += grand
    dcov2 = (A * B).mean()
    dvx = (A * A).mean()
    dvy = (B * B).mean()
    if dvx <= 0 or dvy <= 0:
        return 0.0
    return np.sqrt(max(dcov2, 0.0) / np.sqrt(dvx * dvy))


def test_against_brute_force_oracles():
    rng = np.random.default_rng(0)
    for _ in range(100):
        n = int(rng.integers(5, 40))
        x = rng.normal(size=n)
        y = rng.normal(size=n)
        lo = np.minimum(x, y) - rng.uniform(0.0, 1.0, size=n)
        hi = np.maximum(x, y) + rng.uniform(0.0, 1.0, size=n)
        alpha = float(rng.uniform(0.01, 0.5))
        assert mse(x, y) == pytest.approx(np.mean((x - y) ** 2), abs=1e-10)
        assert mis(x, lo, hi, alpha) == pytest.approx(mis_loop(x, lo, hi, alpha), abs=1e-10)
        assert dcor(x, y) == pytest.approx(dcor_loop(x, y), abs=1e-10)


# ------------------------------------------------------------------ hand cases
def test_mis_hand_cases():
    # alpha=0.05, interval [0,1]: x=1.5 -> 1 + 40*0.5 = 21; x=-0.25 -> 11
    assert mis([1.5], [0.0], [1.0], 0.05) == pytest.approx(21.0)
    assert mis([-0.25], [0.0], [1.0], 0.05) == pytest.approx(11.0)
    assert mis([0.4], [0.0], [1.0], 0.05) == pytest.approx(1.0)


def test_nnse_half_at_mean_prediction():
    x = np.array([1.0, 2.0, 3.0, 6.0])
    pred = np.full(4, x.mean())
    assert nnse(x, pred) == pytest.approx(0.5)
    assert nnse(x, x) == pytest.approx(1.0)


def test_dcor_examples():
    rng = np.random.default_rng(1)
    x = rng.normal(size=300)
    assert dcor(x, x) == pytest.approx(1.0, abs=1e-12)
    # affine invariance
    y = rng.normal(size=300)
    assert dcor(x, y) == pytest.approx(dcor(3.0 * x - 2.0, -0.5 * y + 7.0), abs=1e-12)
    # independent uniforms stay near zero
    u = rng.uniform(size=2000)
    v = rng.uniform(size=2000)
    assert dcor(u, v) < 0.06
    # symmetry
    assert dcor(x, y) == pytest.approx(dcor(y, x), abs=1e-12)


# ------------------------------------------------------------------ validation
def test_error_conditions():
    with pytest.raises(ValidationError):
        nnse(np.ones(10), np.zeros(10))  # constant observed
    with pytest.raises(ValidationError):
        mis([0.5], [1.0], [0.0], 0.05)  # crossed interval
    with pytest.raises(ValidationError):
        mis([0.5], [0.0], [1.0], 1.5)  # alpha out of range
    with pytest.raises(ValidationError):
        mse(np.zeros(3), np.zeros(4))
    with pytest.raises(ValidationError):
        dcor(np.zeros(3), np.zeros(3))  # too short


# ------------------------------------------------------------------ table
def _table():
    rows = [
        EvaluationRow("hs", "independence", 2.0, 9.0, 0.4, 0.1),
        EvaluationRow("hs", "gaussian", 1.5, 8.0, 0.5, 0.2),
        EvaluationRow("hs", "full", 1.0, 8.5, 0.6, 0.3),
        EvaluationRow("wind", "independence", 4.0, 2.0, 0.7, 0.5),
        EvaluationRow("wind", "gaussian", 5.0, 3.0, 0.6, 0.4),
        EvaluationRow("wind", "full", 6.0, 4.0, 0.5, 0.3),
    ]
    return EvaluationTable(rows)


def test_flag_best_per_variable_and_metric():
    t = _table()
    t.flag_best()
    by = {(r.variable, r.model_label): r.best for r in t.rows}
    assert by[("hs", "full")] == ["mse", "nnse", "dcor"]
    assert by[("hs", "gaussian")] == ["mis"]
    assert by[("hs", "independence")] == []
    assert by[("wind", "independence")] == ["mse", "mis", "nnse", "dcor"]


def test_table_csv_json_round_trip(tmp_path):
    t = _table()
    t.flag_best()
    p = tmp_path / "evaluation.csv"
    t.to_csv(p)
    with open(p) as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["variable", "model", "mse", "mis", "nnse", "dcor", "best"]
    assert len(rows) == 7
    assert rows[3][0] == "hs" and rows[3][1] == "full"
    assert float(rows[3][2]) == 1.0

    jp = tmp_path / "evaluation.json"
    payload = t.to_json(jp)
    disk = json.loads(jp.read_text())
    assert disk == payload
    assert disk["version"] == 1
    assert len(disk["rows"]) == 6
