"""ARIMA marginal model: conditional Gaussian MLE, PIT, inverse PIT."""

from dataclasses import dataclass

import numpy as np
from scipy import optimize, signal, stats

from ..errors import NumericalError, ValidationError
from .base import MarginalBase, MarginalState, clamp_u
from .reparam import ar_to_pacf, pacf_to_ar

__all__ = ["ArimaMarginal", "ArimaSpec", "arma_residuals", "select_arima_order"]


@dataclass(frozen=True)
class ArimaSpec:
    p: int
    d: int
    q: int

    def __post_init__(self):
        if self.p < 0 or self.q < 0:
            raise ValidationError("AR and MA orders must be nonnegative")
        if self.d not in (0, 1, 2):
            raise ValidationError(f"differencing degree d must be 0, 1 or 2, got {self.d}")


def arma_residuals(w: np.ndarray, a: float, phi: np.ndarray, theta: np.ndarray) -> np.ndarray:
    """Conditional (CSS) residuals eps_t for t = p..n-1, presample eps = 0."""
    p = len(phi)
    n = len(w)
    rhs = w[p:] - a
    for i in range(1, p + 1):
        rhs = rhs - phi[i - 1] * w[p - i : n - i]
    if len(theta):
        return signal.lfilter([1.0], np.r_[1.0, theta], rhs)
    return rhs


def _check_roots(coeffs: np.ndarray, label: str) -> None:
    # polynomial 1 - c1 z - ... - cp z^p must have roots outside the unit circle
    if not len(coeffs):
        return
    roots = np.roots(np.r_[-coeffs[::-1], 1.0])
    if len(roots) and np.min(np.abs(roots)) <= 1.0 + 1e-6:
        raise NumericalError(f"{label} constraint violated: root modulus <= 1 + 1e-6")


def _difference_next(x_new: float, x_hist: np.ndarray, d: int) -> float:
    if d == 0:
        return x_new
    if d == 1:
        return x_new - x_hist[-1]
    return x_new - 2.0 * x_hist[-1] + x_hist[-2]


def _undifference_next(w_next, x_hist: np.ndarray, d: int):
    if d == 0:
        return w_next
    if d == 1:
        return w_next + x_hist[-1]
    return w_next + 2.0 * x_hist[-1] - x_hist[-2]


class ArimaMarginal(MarginalBase):
    """ARIMA(p, d, q) with Gaussian innovations.

    Estimation is conditional maximum likelihood (conditional sum of
    squares with the innovation variance concentrated out), optimized by
    Nelder-Mead over partial-autocorrelation-transformed AR/MA
    coefficients so stationarity and invertibility hold by construction.
    """

    def __init__(self, p=0, d=0, q=0, transform="none"):
        self.p = p
        self.d = d
        self.q = q
        self.transform = transform

    @property
    def spec(self) -> ArimaSpec:
        return ArimaSpec(self.p, self.d, self.q)

    @property
    def kind(self) -> str:
        return "arima"

    @property
    def burn_in(self) -> int:
        return self.d + self.p

    # -- estimation --------------------------------------------------------
    def _unpack(self, x):
        p, q = self.p, self.q
        a = x[0]
        phi = pacf_to_ar(x[1 : 1 + p]) if p else np.zeros(0)
        theta = -pacf_to_ar(x[1 + p : 1 + p + q]) if q else np.zeros(0)
        return a, phi, theta

    def fit(self, y, rng=None):
        self.spec  # validate orders
        y = np.asarray(y, dtype=float)
        if len(y) <= 10 * (self.p + self.q + 1):
            raise ValidationError(
                f"series too short: need > {10 * (self.p + self.q + 1)} observations, got {len(y)}"
            )
        w = np.diff(self._fit_scale(y, learn_shift=True), n=self.d)
        if np.any(~np.isfinite(w)):
            raise ValidationError("series contains missing or non-finite values after differencing")
        neff = len(w) - self.p

        def negll(x):
            a, phi, theta = self._unpack(x)
            eps = arma_residuals(w, a, phi, theta)
            s2 = np.mean(eps**2)
            if not np.isfinite(s2) or s2 <= 0:
                return 1e12
            return 0.5 * neff * (np.log(2.0 * np.pi * s2) + 1.0)

        x0 = np.r_[np.mean(w), np.zeros(self.p + self.q)]
        res = optimize.minimize(
            negll, x0, method="Nelder-Mead",
            options={"xatol": 1e-9, "fatol": 1e-10, "maxiter": 4000 * max(len(x0), 1)},
        )
        if not np.isfinite(res.fun):
            raise NumericalError(f"ARIMA fit did not converge; last iterate {res.x}")
        self.a_, self.phi_, self.theta_ = self._unpack(res.x)
        _check_roots(self.phi_, "stationarity")
        _check_roots(-self.theta_, "invertibility")
        eps = arma_residuals(w, self.a_, self.phi_, self.theta_)
        self.sigma2_ = float(np.mean(eps**2))
        self.loglik_ = float(-negll(res.x))
        k = self.p + self.q + 2  # constant + coefficients + variance
        self.aic_ = -2.0 * self.loglik_ + 2.0 * k
        self.n_ = len(y)
        return self

    # -- PIT / inverse PIT ---------------------------------------------------
    def _filter(self, y):
        w = np.diff(self._fit_scale(np.asarray(y, dtype=float), learn_shift=False), n=self.d)
        eps = arma_residuals(w, self.a_, self.phi_, self.theta_)
        return w, eps

    def pit(self, y, rng=None):
        self._check_fitted()
        _, eps = self._filter(y)
        return clamp_u(stats.norm.cdf(eps / np.sqrt(self.sigma2_)))

    def init_state(self, y) -> MarginalState:
        self._check_fitted()
        y = np.asarray(y, dtype=float)
        if len(y) < self.burn_in + 1:
            raise ValidationError(
                f"need at least {self.burn_in + 1} observations to build state, got {len(y)}"
            )
        w, eps = self._filter(y)
        xf = self._fit_scale(y, learn_shift=False)
        return MarginalState(
            t=len(y),
            w_hist=w[len(w) - self.p :].copy(),
            eps_hist=eps[max(len(eps) - self.q, 0) :].copy(),
            x_hist=xf[len(xf) - self.d :].copy(),
        )

    def _mean_next(self, state: MarginalState) -> float:
        m = self.a_
        for i in range(1, self.p + 1):
            m += self.phi_[i - 1] * state.w_hist[-i]
        for j in range(1, self.q + 1):
            m += self.theta_[j - 1] * state.eps_hist[-j]
        return m

    def quantile(self, state: MarginalState, u):
        self._check_fitted()
        z = stats.norm.ppf(clamp_u(np.asarray(u, dtype=float)))
        w_next = self._mean_next(state) + np.sqrt(self.sigma2_) * z
        return self._data_scale(_undifference_next(w_next, state.x_hist, self.d))

    def advance(self, state: MarginalState, x_obs: float) -> MarginalState:
        self._check_fitted()
        xf = float(self._fit_scale(np.asarray([x_obs]), learn_shift=False)[0])
        w_obs = _difference_next(xf, state.x_hist, self.d)
        eps_new = w_obs - self._mean_next(state)
        new = state.copy()
        new.t += 1
        if self.p:
            new.w_hist = np.r_[state.w_hist, w_obs][-self.p:]
        if self.q:
            new.eps_hist = np.r_[state.eps_hist, eps_new][-self.q:]
        if self.d:
            new.x_hist = np.r_[state.x_hist, xf][-self.d:]
        return new

    # -- serialization -------------------------------------------------------
    def to_dict(self) -> dict:
        self._check_fitted()
        return {
            "kind": self.kind,
            "p": self.p, "d": self.d, "q": self.q,
            "transform": self.transform,
            "shift": self.shift_,
            "a": self.a_,
            "phi": list(map(float, self.phi_)),
            "theta": list(map(float, self.theta_)),
            "sigma2": self.sigma2_,
            "loglik": self.loglik_,
            "aic": self.aic_,
            "n": self.n_,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ArimaMarginal":
        m = cls(d["p"], d["d"], d["q"], d["transform"])
        m.shift_ = d["shift"]
        m.a_ = d["a"]
        m.phi_ = np.asarray(d["phi"], dtype=float)
        m.theta_ = np.asarray(d["theta"], dtype=float)
        m.sigma2_ = d["sigma2"]
        m.loglik_ = d["loglik"]
        m.aic_ = d["aic"]
        m.n_ = d["n"]
        return m


def select_arima_order(y, max_p=3, max_q=3, max_d=1, transform="none") -> ArimaMarginal:
    """AIC grid search over p <= max_p, q <= max_q, d <= max_d."""
    best = None
    for d in range(max_d + 1):
        for p in range(max_p + 1):
            for q in range(max_q + 1):
                try:
                    m = ArimaMarginal(p, d, q, transform).fit(y)
                except (ValidationError, NumericalError):
                    continue
                if best is None or m.aic_ < best.aic_:
                    best = m
    if best is None:
        raise NumericalError("no ARIMA order converged in the search grid")
    return best
