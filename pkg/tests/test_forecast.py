"""One-step-ahead forecasting: analytic point-forecast oracles, interval
behavior, rolling-walk mechanics, and determinism."""

import csv
import datetime as dt

import numpy as np
import pandas as pd
import pytest

from vineflood.copulas import PairCopula
from vineflood.errors import ValidationError
from vineflood.forecast import (
    FittedMarginals,
    ForecastConfig,
    ForecastPoint,
    forecast_one_step,
    rolling_forecast,
)
from vineflood.marginals import ArimaMarginal, MarginalBase, MarginalState, clamp_u
from vineflood.synth import build_vine, three_variable_system
from vineflood.timeseries import TimeSeriesFrame
from vineflood.vine import independence_vine


def true_ar1(phi=0.6, sigma2=1.0):
    return ArimaMarginal.from_dict(
        {
            "kind": "arima", "p": 1, "d": 0, "q": 0, "transform": "none",
            "shift": 0.0, "a": 0.0, "phi": [phi], "theta": [],
            "sigma2": sigma2, "loglik": 0.0, "aic": 0.0, "n": 0,
        }
    )


class IdentityMarginal(MarginalBase):
    """Uniform data with an identity PIT, for analytic forecast oracles."""

    transform = "none"

    def __init__(self):
        pass

    @property
    def kind(self):
        return "identity"

    @property
    def burn_in(self):
        return 0

    def fit(self, y, rng=None):
        return self

    def pit(self, y, rng=None):
        return clamp_u(np.asarray(y, dtype=float))

    def init_state(self, y):
        return MarginalState(t=len(np.asarray(y)))

    def quantile(self, state, u):
        return np.asarray(u, dtype=float)

    def advance(self, state, x_obs):
        new = state.copy()
        new.t += 1
        return new


def two_var_setup(models, u_shape=(200, 2)):
    u = np.random.default_rng(0).uniform(0.01, 0.99, size=u_shape)
    return FittedMarginals(names=("x", "y"), models=tuple(models), u_data=u)


# ------------------------------------------------------------------ one step
def test_point_forecast_matches_analytic_arima_mean():
    m = true_ar1(phi=0.6)
    marginals = two_var_setup([m, true_ar1(phi=0.3)])
    y_hist = np.array([0.0, 1.5])
    states = {"x": m.init_state(y_hist), "y": marginals.models[1].init_state(y_hist)}
    cfg = ForecastConfig(M=100_000, alpha=0.05)
    pts = forecast_one_step(
        marginals, independence_vine(2), states, cfg,
        np.random.default_rng(3), dt.date(2016, 3, 1),
    )
    px = [p for p in pts if p.variable == "x"][0]
    # analytic one-step mean phi * y_T = 0.9; MC se = sigma/sqrt(M)
    assert abs(px.point - 0.6 * 1.5) < 3.0 / np.sqrt(100_000)
    assert px.lower <= px.point <= px.upper


def test_identity_pit_gives_uniform_quantiles():
    models = [IdentityMarginal(), IdentityMarginal()]
    marginals = two_var_setup(models)
    states = {"x": MarginalState(t=5), "y": MarginalState(t=5)}
    cfg = ForecastConfig(M=100_000, alpha=0.05)
    pts = forecast_one_step(
        marginals, independence_vine(2), states, cfg,
        np.random.default_rng(7), dt.date(2016, 3, 1),
    )
    for p in pts:
        assert p.point == pytest.approx(0.5, abs=0.01)
        assert p.lower == pytest.approx(0.025, abs=0.005)
        assert p.upper == pytest.approx(0.975, abs=0.005)


def test_interval_width_monotone_in_alpha():
    m = true_ar1()
    marginals = two_var_setup([m, true_ar1(phi=0.2)])
    states = {"x": m.init_state([0.5, 1.0]), "y": marginals.models[1].init_state([0.5, 1.0])}
    widths = []
    for alpha in (0.01, 0.05, 0.1):
        cfg = ForecastConfig(M=20_000, alpha=alpha)
        pts = forecast_one_step(
            marginals, independence_vine(2), states, cfg,
            np.random.default_rng(9), dt.date(2016, 3, 1),
        )
        widths.append(pts[0].upper - pts[0].lower)
    assert widths[0] > widths[1] > widths[2]


def test_conditional_mode_excludes_conditioning_variable():
    vine = build_vine(2, [((0, 1), (), PairCopula("gaussian", (0.8,)))])
    models = [IdentityMarginal(), IdentityMarginal()]
    marginals = two_var_setup(models)
    states = {"x": MarginalState(t=5), "y": MarginalState(t=5)}
    cfg = ForecastConfig(M=5000, mode=("conditional_on_subset", ("x",)))
    pts = forecast_one_step(
        marginals, vine, states, cfg, np.random.default_rng(1),
        dt.date(2016, 3, 1), observed={"x": 0.9, "y": 0.4},
    )
    assert [p.variable for p in pts] == ["y"]
    # conditioning on a high u under positive dependence pulls y upward
    assert pts[0].point > 0.55
    with pytest.raises(ValidationError):
        forecast_one_step(
            marginals, vine, states, cfg, np.random.default_rng(1),
            dt.date(2016, 3, 1), observed={"y": 0.4},
        )


def test_forecast_point_invariant_and_config_validation():
    with pytest.raises(ValidationError):
        ForecastPoint("x", dt.date(2016, 1, 1), point=2.0, lower=0.0, upper=1.0)
    with pytest.raises(ValidationError):
        ForecastConfig(M=10)
    with pytest.raises(ValidationError):
        ForecastConfig(alpha=1.5)
    with pytest.raises(ValidationError):
        ForecastConfig(refit_policy="sometimes")
    with pytest.raises(ValidationError):
        ForecastConfig(mode=("conditional_on_subset", ()))
    cfg = ForecastConfig(mode=("conditional_on_subset", ("a", "b")))
    assert cfg.conditioning_vars == ("a", "b")


# ------------------------------------------------------------------ rolling
@pytest.fixture(scope="module")
def small_system():
    frame, specs, _, _ = three_variable_system(seed=5, n_train=400, n_holdout=30)
    return frame, specs


def test_rolling_forecast_deterministic(small_system):
    frame, specs = small_system
    cfg = ForecastConfig(M=500)
    a = rolling_forecast(frame, specs, cfg, seed=11, vine="independence")
    b = rolling_forecast(frame, specs, cfg, seed=11, vine="independence")
    assert len(a.points) == 30 * 3
    pd.testing.assert_frame_equal(a.to_frame(), b.to_frame())
    c = rolling_forecast(frame, specs, cfg, seed=12, vine="independence")
    assert not a.to_frame().equals(c.to_frame())


def test_rolling_forecast_empty_holdout(small_system):
    frame, specs = small_system
    cfg = ForecastConfig(M=500, split_date=frame.dates[-1].date())
    track = rolling_forecast(frame, specs, cfg, seed=1, vine="independence")
    assert track.points == [] and track.skipped == []


def test_rolling_forecast_skips_missing_days(small_system):
    frame, specs = small_system
    data = frame.data.copy()
    mask = frame.mask.copy()
    bad_ts = data.index[410]
    data.loc[bad_ts, "B"] = np.nan
    mask.loc[bad_ts, "B"] = True
    holed = TimeSeriesFrame(data, mask)
    cfg = ForecastConfig(M=500)
    with pytest.warns(UserWarning, match="skipping"):
        track = rolling_forecast(holed, specs, cfg, seed=2, vine="independence")
    assert len(track.skipped) == 1
    assert track.skipped[0][0] == bad_ts.date()
    assert all(p.date != bad_ts.date() for p in track.points)
    assert len(track.points) == 29 * 3


def test_rolling_forecast_refit_policy(small_system):
    frame, specs = small_system
    cfg = ForecastConfig(M=500, refit_policy=("refit_every", 15))
    track = rolling_forecast(frame, specs, cfg, seed=3, vine="independence")
    assert len(track.points) == 30 * 3
    dates = sorted({p.date for p in track.points})
    assert dates[0] == dt.date(2016, 2, 16)


def test_rolling_forecast_requires_training_data(small_system):
    frame, specs = small_system
    cfg = ForecastConfig(M=500, split_date=frame.dates[50].date())
    with pytest.raises(ValidationError):
        rolling_forecast(frame, specs, cfg, seed=1, vine="independence")


def test_track_csv_format(small_system, tmp_path):
    frame, specs = small_system
    cfg = ForecastConfig(M=500)
    track = rolling_forecast(frame, specs, cfg, seed=4, vine="independence")
    p = tmp_path / "track.csv"
    track.to_csv(p)
    with open(p) as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["date", "variable", "observed", "point", "lower", "upper"]
    assert len(rows) == 1 + 30 * 3
    first = rows[1]
    assert first[0] == "2016-02-16"
    pt, lo, hi = float(first[3]), float(first[4]), float(first[5])
    assert lo <= pt <= hi
