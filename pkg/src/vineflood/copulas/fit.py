"""Maximum-likelihood fitting and family selection for pair copulas."""

import numpy as np
from scipy import optimize, stats

from ..errors import NumericalError, ValidationError
from .core import ROTATABLE, PairCopula
from .families import EPS, get_family

DEFAULT_FAMILIES = (
    "independence",
    "gaussian",
    "student_t",
    "clayton",
    "gumbel",
    "frank",
    "joe",
    "bb1",
    "bb8",
)

__all__ = ["DEFAULT_FAMILIES", "fit_pair", "kendall_tau"]


def kendall_tau(u, v) -> float:
    """Kendall's tau-b (O(n log n) inversion counting via scipy)."""
    t, _ = stats.kendalltau(u, v)
    return float(t)


def _independence_pvalue(u, v) -> float:
    _, p = stats.kendalltau(u, v)
    return float(p)


def _candidate_rotations(fam_name: str, tau_hat: float):
    fam = get_family(fam_name)
    if fam_name not in ROTATABLE or fam.symmetric_dependence:
        return (0,)
    return (0, 180) if tau_hat >= 0 else (90, 270)


def _fit_candidate(fam_name: str, rotation: int, u, v, tau_hat: float):
    """MLE of one family x rotation; returns (PairCopula, loglik) or None."""
    fam = get_family(fam_name)
    n = len(u)
    base_tau = -tau_hat if rotation in (90, 270) else tau_hat
    lo_t, hi_t = fam.tau_range
    start_tau = float(np.clip(base_tau, lo_t + 1e-4, hi_t - 1e-4))
    try:
        theta0 = fam.theta_from_tau(start_tau)
    except Exception:
        return None

    if rotation == 90:
        uu, vv = 1.0 - u, v
    elif rotation == 180:
        uu, vv = 1.0 - u, 1.0 - v
    elif rotation == 270:
        uu, vv = u, 1.0 - v
    else:
        uu, vv = u, v

    def negll(theta):
        ll = fam.logpdf(uu, vv, tuple(theta))
        if not np.all(np.isfinite(ll)):
            return 1e10
        return -float(np.sum(ll))

    if fam.n_params == 0:
        theta = ()
    elif fam.n_params == 1:
        (lo, hi) = fam.bounds[0]
        res = optimize.minimize_scalar(
            lambda t: negll((t,)), bounds=(lo, hi), method="bounded",
            options={"xatol": 1e-8},
        )
        if not res.success:
            return None
        theta = (float(res.x),)
    else:
        # 2-D simplex on unconstrained scale (logit within the box)
        bounds = np.array(fam.bounds)

        def to_box(z):
            return bounds[:, 0] + (bounds[:, 1] - bounds[:, 0]) / (1.0 + np.exp(-z))

        def from_box(t):
            t = np.clip(t, bounds[:, 0] + 1e-9, bounds[:, 1] - 1e-9)
            p = (t - bounds[:, 0]) / (bounds[:, 1] - bounds[:, 0])
            return np.log(p / (1.0 - p))

        res = optimize.minimize(
            lambda z: negll(to_box(z)), from_box(np.array(theta0)),
            method="Nelder-Mead", options={"xatol": 1e-7, "fatol": 1e-9, "maxiter": 2000},
        )
        if not res.success and res.fun >= 1e10:
            return None
        theta = tuple(float(t) for t in to_box(res.x))

    ll = -negll(theta)
    if not np.isfinite(ll):
        return None
    try:
        return PairCopula(fam.name, theta, rotation, loglik=ll)
    except ValidationError:
        return None


def fit_pair(
    u,
    v,
    families=DEFAULT_FAMILIES,
    criterion: str = "aic",
    independence_level: float | None = 0.05,
) -> PairCopula:
    """Fit every candidate family x rotation by MLE, select by AIC/BIC.

    A Kendall-tau z-test at ``independence_level`` short-circuits to the
    independence copula; pass ``None`` to disable the test.
    """
    u = np.clip(np.asarray(u, dtype=float), EPS, 1.0 - EPS)
    v = np.clip(np.asarray(v, dtype=float), EPS, 1.0 - EPS)
    if u.shape != v.shape or u.ndim != 1:
        raise ValidationError("u and v must be 1-d arrays of equal length")
    n = len(u)
    if n < 30:
        raise ValidationError(f"need at least 30 observations to fit, got {n}")
    if criterion not in ("aic", "bic"):
        raise ValidationError("criterion must be 'aic' or 'bic'")

    families = [get_family(f).name for f in families]
    if independence_level is not None and _independence_pvalue(u, v) > independence_level:
        return PairCopula("independence", loglik=0.0)

    tau_hat = kendall_tau(u, v)
    best, best_score = None, np.inf
    failures = []
    for fam_name in sorted(set(families)):
        if fam_name == "independence":
            pc = PairCopula("independence", loglik=0.0)
            score = 0.0
            if score < best_score:
                best, best_score = pc, score
            continue
        for rot in _candidate_rotations(fam_name, tau_hat):
            fitted = _fit_candidate(fam_name, rot, u, v, tau_hat)
            if fitted is None:
                failures.append(f"{fam_name}/{rot}")
                continue
            k = fitted.n_params
            score = -2.0 * fitted.loglik + (2.0 * k if criterion == "aic" else np.log(n) * k)
            if score < best_score - 1e-12:
                best, best_score = fitted, score
    if best is None:
        raise NumericalError(
            "no candidate copula converged; failures: " + ", ".join(failures)
        )
    return best
