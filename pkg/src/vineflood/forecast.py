"""One-day-ahead out-of-sample forecasting.

The pipeline follows the two-step estimation design: per-series marginals
are fitted on the training window and their PIT residuals (u-data) bind
through an R-vine. A forecast at T+1 draws M u-vectors from the vine and
maps each coordinate through the marginal's one-step predictive quantile;
the point forecast is the simulation mean and the interval the empirical
alpha/2 and 1-alpha/2 quantiles. Rolling evaluation walks the hold-out
window one day at a time, pushing realized observations through the
marginal filters.
"""

import datetime as dt
import warnings
from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from .copulas import DEFAULT_FAMILIES
from .errors import ValidationError
from .marginals import MarginalBase, clamp_u, marginal_from_dict
from .marginals.base import MarginalState
from .rng import substream
from .timeseries import TimeSeriesFrame
from .vine import RVineCopula, independence_vine

__all__ = [
    "ForecastConfig",
    "ForecastPoint",
    "ForecastTrack",
    "FittedMarginals",
    "fit_marginals",
    "forecast_one_step",
    "rolling_forecast",
]

DEFAULT_SPLIT_DATE = dt.date(2016, 2, 15)


@dataclass(frozen=True)
class ForecastConfig:
    """Simulation count, interval level and walk policy for forecasting.

    ``refit_policy`` is ``"fit_once"`` or ``("refit_every", k)``;
    ``mode`` is ``"joint_unconditional"`` or
    ``("conditional_on_subset", (var, ...))`` where the named variables'
    realized next-day observations condition the vine simulation.
    """

    M: int = 10000
    alpha: float = 0.05
    split_date: dt.date = DEFAULT_SPLIT_DATE
    refit_policy: object = "fit_once"
    mode: object = "joint_unconditional"

    def __post_init__(self):
        if self.M < 100:
            raise ValidationError(f"M must be >= 100, got {self.M}")
        if not 0.0 < self.alpha < 1.0:
            raise ValidationError(f"alpha must lie in (0, 1), got {self.alpha}")
        if isinstance(self.refit_policy, (list, tuple)):
            tag, k = self.refit_policy
            if tag != "refit_every" or int(k) < 1:
                raise ValidationError(f"bad refit policy {self.refit_policy!r}")
        elif self.refit_policy != "fit_once":
            raise ValidationError(f"bad refit policy {self.refit_policy!r}")
        if isinstance(self.mode, (list, tuple)):
            tag, names = self.mode
            if tag != "conditional_on_subset" or not names:
                raise ValidationError(f"bad forecast mode {self.mode!r}")
        elif self.mode != "joint_unconditional":
            raise ValidationError(f"bad forecast mode {self.mode!r}")

    @property
    def conditioning_vars(self) -> tuple:
        if isinstance(self.mode, (list, tuple)):
            return tuple(self.mode[1])
        return ()


@dataclass(frozen=True)
class ForecastPoint:
    variable: str
    date: dt.date
    point: float
    lower: float
    upper: float
    observed: float = None

    def __post_init__(self):
        if not self.lower <= self.point <= self.upper:
            raise ValidationError(
                f"forecast for {self.variable} at {self.date}: point {self.point} "
                f"outside interval [{self.lower}, {self.upper}]"
            )


@dataclass
class ForecastTrack:
    """Rolling-forecast output: emitted points plus per-date skip records."""

    points: list = field(default_factory=list)
    skipped: list = field(default_factory=list)  # (date, reason)

    def for_variable(self, name: str) -> list:
        return [p for p in self.points if p.variable == name]

    def to_frame(self):
        import pandas as pd

        return pd.DataFrame(
            [
                {
                    "date": p.date.isoformat(),
                    "variable": p.variable,
                    "observed": p.observed,
                    "point": p.point,
                    "lower": p.lower,
                    "upper": p.upper,
                }
                for p in self.points
            ]
        )

    def to_csv(self, path) -> None:
        from pathlib import Path

        df = self.to_frame()
        lines = ["date,variable,observed,point,lower,upper"]
        for row in df.itertuples(index=False):
            obs = "" if row.observed is None or not np.isfinite(row.observed) else repr(float(row.observed))
            lines.append(
                f"{row.date},{row.variable},{obs},{row.point!r},{row.lower!r},{row.upper!r}"
            )
        Path(path).write_text("\n".join(lines) + "\n")


@dataclass
class FittedMarginals:
    """Marginals fitted column-by-column plus the aligned u-data matrix."""

    names: tuple
    models: tuple
    u_data: np.ndarray  # n_common x d, aligned at the max burn-in

    def states(self, frame: TimeSeriesFrame) -> dict:
        return {
            name: model.init_state(frame.column(name))
            for name, model in zip(self.names, self.models)
        }

    def signature(self) -> list:
        return [[name, type(m).__name__] for name, m in zip(self.names, self.models)]


def fit_marginals(frame: TimeSeriesFrame, specs: dict, seed: int = 0) -> FittedMarginals:
    """Fit one marginal per column from ``specs`` (name -> constructed
    model) and assemble the burn-in-aligned u-data matrix."""
    missing = [c for c in frame.columns if c not in specs]
    if missing:
        raise ValidationError(f"no marginal spec for column(s) {missing}")
    extra = [c for c in specs if c not in frame.columns]
    if extra:
        raise ValidationError(f"marginal spec names unknown column(s) {extra}")
    names = tuple(frame.columns)
    models = []
    u_cols = []
    for name in names:
        model = specs[name]
        if not isinstance(model, MarginalBase):
            model = marginal_from_dict(dict(model))
        y = frame.column(name)
        if frame.mask[name].any():
            raise ValidationError(f"column {name!r} has masked cells; fill or drop them first")
        model.fit(y, rng=substream(seed, "marginal-fit", name))
        u_cols.append(clamp_u(model.pit(y, rng=substream(seed, "marginal-pit", name))))
        models.append(model)
    burn = max(len(frame) - len(u) for u in u_cols)
    u = np.column_stack([col[len(col) - (len(frame) - burn):] for col in u_cols])
    return FittedMarginals(names=names, models=tuple(models), u_data=u)


def forecast_one_step(
    marginals: FittedMarginals,
    vine: RVineCopula,
    states: dict,
    cfg: ForecastConfig,
    rng: np.random.Generator,
    date: dt.date,
    observed: dict = None,
) -> list:
    """Forecast every variable one step ahead of the buffers in ``states``.

    ``observed`` supplies realized next-day values; it is required for the
    variables named by a conditional mode and otherwise only annotates the
    output.
    """
    observed = observed or {}
    names = marginals.names
    for name in names:
        if name not in states:
            raise ValidationError(f"missing state for variable {name!r}")
    cond = {}
    for name in cfg.conditioning_vars:
        if name not in names:
            raise ValidationError(f"conditioning variable {name!r} is not a data column")
        if name not in observed or observed[name] is None:
            raise ValidationError(
                f"conditional mode needs the realized observation of {name!r}"
            )
        j = names.index(name)
        model = marginals.models[j]
        cond[j] = clamp_u(model.cdf_next(states[name], observed[name]))
    if cond:
        u = vine.conditional_simulate(cond, cfg.M, rng=rng)
    else:
        u = vine.simulate(cfg.M, rng=rng)
    out = []
    for j, name in enumerate(names):
        if j in cond:
            continue
        model = marginals.models[j]
        x = np.asarray(model.quantile(states[name], u[:, j]), dtype=float)
        point = float(np.mean(x))
        lower = float(np.quantile(x, cfg.alpha / 2.0))
        upper = float(np.quantile(x, 1.0 - cfg.alpha / 2.0))
        out.append(
            ForecastPoint(
                variable=name,
                date=date,
                point=float(np.clip(point, lower, upper)),
                lower=lower,
                upper=upper,
                observed=observed.get(name),
            )
        )
    return out


def _build_vine(u_data, vine_spec):
    if vine_spec == "independence":
        return independence_vine(u_data.shape[1])
    if vine_spec == "gaussian":
        return RVineCopula(families=("gaussian",), independence_level=None).fit(u_data)
    if vine_spec == "full" or vine_spec is None:
        return RVineCopula(families=DEFAULT_FAMILIES).fit(u_data)
    if isinstance(vine_spec, RVineCopula):
        if not hasattr(vine_spec, "trees_"):
            return vine_spec.fit(u_data)
        return vine_spec
    if isinstance(vine_spec, (list, tuple)):
        return RVineCopula(families=tuple(vine_spec)).fit(u_data)
    raise ValidationError(f"unknown vine spec {vine_spec!r}")


def rolling_forecast(
    frame: TimeSeriesFrame,
    specs: dict,
    cfg: ForecastConfig,
    seed: int = 0,
    vine: object = "full",
    stream: str = "forecast",
    fitted: FittedMarginals = None,
) -> ForecastTrack:
    """Walk the hold-out window after ``cfg.split_date`` one day at a time.

    Marginals and the vine are fitted on the training window (refit per
    ``cfg.refit_policy``); each day's realized observations advance the
    marginal filters before the next forecast. ``fitted`` short-circuits
    the initial marginal fit when the caller already holds one.
    """
    if pd.Timestamp(cfg.split_date) >= frame.dates[-1]:
        # empty hold-out window: nothing to forecast
        if len(frame) < 100:
            raise ValidationError(
                f"need >= 100 training observations through {cfg.split_date}, got {len(frame)}"
            )
        return ForecastTrack()
    fit_frame, holdout = frame.split(cfg.split_date)
    if len(fit_frame) < 100:
        raise ValidationError(
            f"need >= 100 training observations through {cfg.split_date}, got {len(fit_frame)}"
        )
    if fitted is None:
        fitted = fit_marginals(fit_frame, specs, seed=seed)
    model_vine = _build_vine(fitted.u_data, vine)
    states = fitted.states(fit_frame)
    rng = substream(seed, stream)
    track = ForecastTrack()
    refit_every = None
    if isinstance(cfg.refit_policy, (list, tuple)):
        refit_every = int(cfg.refit_policy[1])

    dates = [ts.date() for ts in holdout.dates]
    for i, date in enumerate(dates):
        if refit_every is not None and i > 0 and i % refit_every == 0:
            upto = TimeSeriesFrame(
                frame.data.iloc[: len(fit_frame) + i].copy(),
                frame.mask.iloc[: len(fit_frame) + i].copy(),
            )
            fitted = fit_marginals(upto, specs, seed=seed)
            model_vine = _build_vine(fitted.u_data, vine)
            states = fitted.states(upto)
        row = holdout.data.iloc[i]
        row_mask = holdout.mask.iloc[i]
        if row_mask.any() or not np.all(np.isfinite(row.to_numpy(dtype=float))):
            bad = [c for c in frame.columns if row_mask[c] or not np.isfinite(float(row[c]))]
            msg = f"skipping {date}: missing observation(s) in {bad}"
            warnings.warn(msg)
            track.skipped.append((date, msg))
            continue
        observed = {c: float(row[c]) for c in frame.columns}
        track.points.extend(
            forecast_one_step(fitted, model_vine, states, cfg, rng, date, observed)
        )
        for name, model in zip(fitted.names, fitted.models):
            states[name] = model.advance(states[name], observed[name])
    return track
