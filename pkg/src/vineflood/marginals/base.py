"""Shared marginal-model machinery: fit-scale transforms, forecast state,
and the estimator base class."""

from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator

from ..errors import ValidationError

U_CLAMP = 1e-10

__all__ = ["MarginalBase", "MarginalState", "U_CLAMP", "clamp_u"]


def clamp_u(u):
    """Clamp u-data away from the boundary to protect copula likelihoods."""
    return np.clip(u, U_CLAMP, 1.0 - U_CLAMP)


@dataclass
class MarginalState:
    """One-step conditioning buffers at time T (most recent value last)."""

    t: int = 0
    w_hist: np.ndarray = field(default_factory=lambda: np.zeros(0))       # differenced scale
    eps_hist: np.ndarray = field(default_factory=lambda: np.zeros(0))
    sigma2_hist: np.ndarray = field(default_factory=lambda: np.zeros(0))
    x_hist: np.ndarray = field(default_factory=lambda: np.zeros(0))       # transformed scale, for undifferencing

    def copy(self) -> "MarginalState":
        return MarginalState(
            self.t,
            self.w_hist.copy(),
            self.eps_hist.copy(),
            self.sigma2_hist.copy(),
            self.x_hist.copy(),
        )


class MarginalBase(BaseEstimator):
    """Common surface of the univariate marginals.

    Subclasses implement ``fit``, ``pit`` (the probability integral
    transform producing u-data), ``quantile`` (inverse PIT at a given
    state) and ``advance`` (push one realized observation through the
    filter). ``transform='log'`` fits on log scale; series with zero or
    negative values are shifted by 1 + |min| first, with the shift
    recorded so forecasts can be un-shifted.
    """

    transform = "none"

    # -- fit-scale handling ------------------------------------------------
    def _fit_scale(self, y: np.ndarray, learn_shift: bool) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        if self.transform == "none":
            if learn_shift:
                self.shift_ = 0.0
            return y
        if self.transform != "log":
            raise ValidationError(f"unknown transform {self.transform!r}")
        if learn_shift:
            m = float(np.min(y))
            self.shift_ = 0.0 if m > 0 else 1.0 + abs(m)
        return np.log(y + self.shift_)

    def _data_scale(self, w):
        if self.transform == "none":
            return w
        return np.exp(w) - self.shift_

    # -- interface ---------------------------------------------------------
    @property
    def burn_in(self) -> int:
        """Observations at the start of the series with no u-value."""
        return 0

    def fit(self, y, rng=None):
        raise NotImplementedError

    def pit(self, y, rng=None) -> np.ndarray:
        """u-data for ``y``; output length is ``len(y) - burn_in``."""
        raise NotImplementedError

    def init_state(self, y) -> MarginalState:
        """Run the filter over ``y`` and return the time-T buffers."""
        raise NotImplementedError

    def quantile(self, state: MarginalState, u) -> np.ndarray:
        """Inverse PIT: map u through the one-step predictive quantile."""
        raise NotImplementedError

    def advance(self, state: MarginalState, x_obs: float) -> MarginalState:
        """Return the state after observing ``x_obs`` at the next step."""
        raise NotImplementedError

    def cdf_next(self, state: MarginalState, x_obs: float) -> float:
        """One-step predictive cdf at ``x_obs``; inverse of :meth:`quantile`.

        Generic monotone bisection on ``quantile``; subclasses with a
        closed-form forward cdf may override.
        """
        lo, hi = U_CLAMP, 1.0 - U_CLAMP
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            if float(self.quantile(state, mid)) < x_obs:
                lo = mid
            else:
                hi = mid
        return 0.5 * (lo + hi)

    def to_dict(self) -> dict:
        raise NotImplementedError

    # -- shared checks -----------------------------------------------------
    def _check_fitted(self):
        if not hasattr(self, "loglik_"):
            raise ValidationError(f"{type(self).__name__} is not fitted")
