"""Seeded synthetic data generators for the acceptance suite.

Each system pairs hand-specified "true" marginals with a hand-built vine:
u-vectors are drawn from the vine and pushed through each marginal's
one-step predictive quantile sequentially, so the generated series obey
exactly the model class the toolkit fits. A burn-in segment washes out
the arbitrary initial filter state and is discarded.
"""

import datetime as dt

import numpy as np
import pandas as pd

from .copulas import PairCopula
from .errors import ValidationError
from .marginals import ArimaGarchTMarginal, ArimaMarginal
from .marginals.base import MarginalState
from .rng import substream
from .timeseries import TimeSeriesFrame
from .vine import RVineCopula, VineEdge

__all__ = [
    "make_arima",
    "make_garch",
    "build_vine",
    "simulate_frame",
    "three_variable_system",
    "six_variable_system",
]


def make_arima(p=0, d=0, q=0, a=0.0, phi=(), theta=(), sigma2=1.0, transform="none", shift=0.0):
    """An ArimaMarginal with fixed (true) parameters, no fitting."""
    return ArimaMarginal.from_dict({
        "kind": "arima", "p": p, "d": d, "q": q, "transform": transform,
        "shift": shift, "a": float(a), "phi": list(phi), "theta": list(theta),
        "sigma2": float(sigma2), "loglik": 0.0, "aic": 0.0, "n": 0,
    })


def make_garch(p=0, d=0, q=0, a=0.0, phi=(), theta=(), omega=0.05,
               alpha=(0.1,), beta=(0.85,), nu=8.0, transform="none", shift=0.0):
    """An ArimaGarchTMarginal with fixed (true) parameters, no fitting."""
    return ArimaGarchTMarginal.from_dict({
        "kind": "arima_garch_t", "p": p, "d": d, "q": q,
        "garch_p": len(alpha), "garch_q": len(beta), "transform": transform,
        "shift": shift, "a": float(a), "phi": list(phi), "theta": list(theta),
        "omega": float(omega), "alpha": list(alpha), "beta": list(beta),
        "nu": float(nu), "loglik": 0.0, "aic": 0.0, "n": 0,
    })


def _blank_state(model) -> MarginalState:
    """Filter state with zero history (unconditional start)."""
    p = getattr(model, "p", 0)
    q = getattr(model, "q", 0)
    d = getattr(model, "d", 0)
    st = MarginalState(t=0, w_hist=np.zeros(p), eps_hist=np.zeros(q), x_hist=np.zeros(d))
    if isinstance(model, ArimaGarchTMarginal):
        persist = float(np.sum(model.alpha_) + np.sum(model.beta_))
        uncond = model.omega_ / max(1.0 - persist, 1e-6)
        st.eps_hist = np.zeros(max(q, model.garch_p))
        st.sigma2_hist = np.full(model.garch_q, uncond)
    return st


def build_vine(d: int, edges: list) -> RVineCopula:
    """Assemble a fitted-looking RVineCopula from explicit edges.

    ``edges`` is a list of ``((a, b), conditioning_iterable, PairCopula)``
    with zero-based variable indices; it must describe a valid R-vine.
    """
    m = RVineCopula()
    m.d_ = d
    by_level = {}
    for (a, b), cond, cop in edges:
        e = VineEdge(tuple(sorted((a, b))), frozenset(cond), copula=cop, tau=cop.tau())
        if e.copula.loglik is None:
            object.__setattr__(e.copula, "loglik", 0.0)
        by_level.setdefault(len(e.conditioning) + 1, []).append(e)
    if sorted(by_level) != list(range(1, d)):
        raise ValidationError("edges do not form trees 1..d-1")
    m.trees_ = [by_level[k] for k in sorted(by_level)]
    m._index_edges()
    m._assert_structure()
    m.loglik_ = 0.0
    m.n_params_ = sum(e.copula.n_params for lvl in m.trees_ for e in lvl)
    m.aic_ = 0.0
    m.bic_ = 0.0
    return m


def simulate_frame(
    marginals: dict,
    vine: RVineCopula,
    n: int,
    seed: int = 0,
    start_date: dt.date = dt.date(2015, 1, 1),
    burn: int = 200,
) -> TimeSeriesFrame:
    """Generate ``n`` daily rows from true marginals bound by ``vine``."""
    names = list(marginals)
    d = len(names)
    if vine.d_ != d:
        raise ValidationError(f"vine dimension {vine.d_} != {d} marginals")
    rng = substream(seed, "synth")
    U = vine.simulate(n + burn, rng=rng)
    cols = {name: np.empty(n + burn) for name in names}
    states = {name: _blank_state(m) for name, m in marginals.items()}
    for t in range(n + burn):
        for j, name in enumerate(names):
            model = marginals[name]
            x = float(model.quantile(states[name], U[t, j]))
            cols[name][t] = x
            states[name] = model.advance(states[name], x)
    index = pd.date_range(start=pd.Timestamp(start_date), periods=n, freq="D")
    data = pd.DataFrame({name: cols[name][burn:] for name in names}, index=index)
    mask = pd.DataFrame(False, index=index, columns=names)
    return TimeSeriesFrame(data, mask)


def three_variable_system(seed: int = 0, n_train: int = 400, n_holdout: int = 500,
                          split_date: dt.date = dt.date(2016, 2, 15)):
    """Correctly-specifiable 3-variable system: ARIMA marginals bound by a
    Gaussian/Clayton vine. Returns (frame, specs, true_marginals, true_vine)
    where ``specs`` are unfitted models of the generating class."""
    marginals = {
        "A": make_arima(p=1, a=0.2, phi=(0.6,), sigma2=1.0),
        "B": make_arima(p=1, q=1, a=-0.1, phi=(0.4,), theta=(0.3,), sigma2=0.5),
        "C": make_arima(q=1, a=0.0, theta=(-0.4,), sigma2=2.0),
    }
    vine = build_vine(3, [
        ((0, 1), (), PairCopula("gaussian", (0.65,))),
        ((1, 2), (), PairCopula("clayton", (2.0,))),
        ((0, 2), (1,), PairCopula("gaussian", (0.2,))),
    ])
    n = n_train + n_holdout
    start = split_date - dt.timedelta(days=n_train - 1)
    frame = simulate_frame(marginals, vine, n, seed=seed, start_date=start)
    specs = {
        "A": ArimaMarginal(p=1),
        "B": ArimaMarginal(p=1, q=1),
        "C": ArimaMarginal(q=1),
    }
    return frame, specs, marginals, vine


def six_variable_system(seed: int = 0, n_train: int = 500, n_holdout: int = 250,
                        split_date: dt.date = dt.date(2016, 2, 15)):
    """Asymmetric 6-variable system (Clayton/Gumbel-bearing vine over
    ARIMA and ARIMA-GARCH-t marginals) with strictly ordered first-tree
    dependence strengths. Returns (frame, specs, true_marginals, true_vine)."""
    marginals = {
        "V1": make_arima(p=1, a=0.1, phi=(0.5,), sigma2=1.0),
        "V2": make_arima(p=1, q=1, a=0.0, phi=(0.3,), theta=(0.25,), sigma2=0.8),
        "V3": make_garch(p=1, phi=(0.4,), omega=0.1, alpha=(0.12,), beta=(0.8,), nu=7.0),
        "V4": make_arima(q=1, a=-0.2, theta=(0.35,), sigma2=1.5),
        "V5": make_garch(omega=0.2, alpha=(0.15,), beta=(0.75,), nu=6.0),
        "V6": make_arima(p=1, a=0.3, phi=(-0.3,), sigma2=0.6),
    }
    # path structure (D-vine) on 1-2-3-4-5-6 with strictly decreasing |tau|
    vine = build_vine(6, [
        ((0, 1), (), PairCopula.from_tau("clayton", 0.60)),
        ((1, 2), (), PairCopula.from_tau("gumbel", 0.52)),
        ((2, 3), (), PairCopula.from_tau("clayton", 0.44)),
        ((3, 4), (), PairCopula.from_tau("gumbel", 0.36)),
        ((4, 5), (), PairCopula.from_tau("frank", 0.28)),
        ((0, 2), (1,), PairCopula.from_tau("frank", 0.20)),
        ((1, 3), (2,), PairCopula.from_tau("gaussian", 0.15)),
        ((2, 4), (3,), PairCopula.from_tau("clayton", 0.12)),
        ((3, 5), (4,), PairCopula.from_tau("gaussian", 0.10)),
        ((0, 3), (1, 2), PairCopula.from_tau("gaussian", 0.08)),
        ((1, 4), (2, 3), PairCopula("independence")),
        ((2, 5), (3, 4), PairCopula("independence")),
        ((0, 4), (1, 2, 3), PairCopula("independence")),
        ((1, 5), (2, 3, 4), PairCopula("independence")),
        ((0, 5), (1, 2, 3, 4), PairCopula("independence")),
    ])
    n = n_train + n_holdout
    start = split_date - dt.timedelta(days=n_train - 1)
    frame = simulate_frame(marginals, vine, n, seed=seed, start_date=start)
    specs = {
        "V1": ArimaMarginal(p=1),
        "V2": ArimaMarginal(p=1, q=1),
        "V3": ArimaGarchTMarginal(p=1),
        "V4": ArimaMarginal(q=1),
        "V5": ArimaGarchTMarginal(),
        "V6": ArimaMarginal(p=1),
    }
    return frame, specs, marginals, vine


SYSTEMS = {
    "three_var": three_variable_system,
    "six_var": six_variable_system,
}
