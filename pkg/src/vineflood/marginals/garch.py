"""ARIMA-GARCH marginal with Student's-t innovations, joint MLE."""

import numpy as np
from scipy import optimize, signal, special, stats

from ..errors import NumericalError, ValidationError
from .arima import ArimaMarginal, _difference_next, _undifference_next, arma_residuals, _check_roots
from .base import MarginalBase, MarginalState, clamp_u
from .reparam import pacf_to_ar

__all__ = ["ArimaGarchTMarginal", "std_t_cdf", "std_t_logpdf", "std_t_ppf"]

_NU_CAP = 100.0


def std_t_logpdf(z, nu):
    """Log density of the unit-variance Student's t (nu > 2)."""
    return (
        special.gammaln((nu + 1.0) / 2.0)
        - special.gammaln(nu / 2.0)
        - 0.5 * np.log(np.pi * (nu - 2.0))
        - (nu + 1.0) / 2.0 * np.log1p(np.asarray(z) ** 2 / (nu - 2.0))
    )


def std_t_cdf(z, nu):
    return stats.t.cdf(np.asarray(z) * np.sqrt(nu / (nu - 2.0)), nu)


def std_t_ppf(u, nu):
    return stats.t.ppf(u, nu) * np.sqrt((nu - 2.0) / nu)


class ArimaGarchTMarginal(MarginalBase):
    """ARIMA(p, d, q) mean with GARCH(garch_p, garch_q) variance and
    standardized Student's-t innovations.

    The variance recursion is initialized at the sample variance of the
    mean-equation residuals; mean and variance parameters are estimated
    jointly by Nelder-Mead over reparameterized coordinates.
    """

    def __init__(self, p=0, d=0, q=0, garch_p=1, garch_q=1, transform="none"):
        self.p = p
        self.d = d
        self.q = q
        self.garch_p = garch_p
        self.garch_q = garch_q
        self.transform = transform

    @property
    def kind(self) -> str:
        return "arima_garch_t"

    @property
    def n_fit_params(self) -> int:
        return 2 + self.p + self.q + self.garch_p + self.garch_q + 1  # a, arma, omega, alpha, beta, nu

    @property
    def burn_in(self) -> int:
        return self.d + self.p + self.garch_p

    # -- filters -----------------------------------------------------------
    def _variance_path(self, eps, omega, alpha, beta):
        """sigma^2_t for t = garch_p..len(eps)-1, presample at var(eps)."""
        P, Q = self.garch_p, self.garch_q
        varhat = float(np.var(eps))
        eps2 = eps**2
        n = len(eps)
        s = np.full(n - P, omega)
        for i in range(1, P + 1):
            s = s + alpha[i - 1] * eps2[P - i : n - i]
        if Q == 0:
            return s, varhat
        a_poly = np.r_[1.0, -np.asarray(beta)]
        zi = signal.lfiltic([1.0], a_poly, y=[varhat] * Q)
        sigma2, _ = signal.lfilter([1.0], a_poly, s, zi=zi)
        return sigma2, varhat

    def _unpack(self, x):
        p, q, P, Q = self.p, self.q, self.garch_p, self.garch_q
        i = 0
        a = x[i]; i += 1
        phi = pacf_to_ar(x[i : i + p]) if p else np.zeros(0); i += p
        theta = -pacf_to_ar(x[i : i + q]) if q else np.zeros(0); i += q
        omega = np.exp(x[i]); i += 1
        alpha = np.exp(x[i : i + P]); i += P
        beta = np.exp(x[i : i + Q]); i += Q
        nu = 2.0 + np.exp(x[i])
        return a, phi, theta, omega, alpha, beta, nu

    def fit(self, y, rng=None):
        y = np.asarray(y, dtype=float)
        if len(y) <= 20 * self.n_fit_params:
            raise ValidationError(
                f"series too short: need > {20 * self.n_fit_params} observations, got {len(y)}"
            )
        w = np.diff(self._fit_scale(y, learn_shift=True), n=self.d)
        P = self.garch_p

        def negll(x):
            a, phi, theta, omega, alpha, beta, nu = self._unpack(x)
            persist = float(np.sum(alpha) + np.sum(beta))
            if persist >= 0.999 or nu > _NU_CAP or omega > 1e8:
                return 1e12
            eps = arma_residuals(w, a, phi, theta)
            sigma2, _ = self._variance_path(eps, omega, alpha, beta)
            if np.any(sigma2 <= 0) or not np.all(np.isfinite(sigma2)):
                return 1e12
            z = eps[P:] / np.sqrt(sigma2)
            ll = np.sum(std_t_logpdf(z, nu) - 0.5 * np.log(sigma2))
            return -ll if np.isfinite(ll) else 1e12

        # stage 1: Gaussian ARIMA start for the mean equation
        arima0 = ArimaMarginal(self.p, 0, self.q).fit(w)
        varhat = arima0.sigma2_
        from .reparam import ar_to_pacf

        x0 = np.r_[
            arima0.a_,
            ar_to_pacf(arima0.phi_) if self.p else [],
            ar_to_pacf(-arima0.theta_) if self.q else [],
            np.log(0.1 * varhat),
            np.log(np.full(self.garch_p, 0.05 / self.garch_p)),
            np.log(np.full(self.garch_q, 0.85 / self.garch_q)),
            np.log(8.0 - 2.0),
        ]
        # second start near constant variance: when the true process has no
        # conditional heteroscedasticity the likelihood is flat in beta, and a
        # high-persistence start would park beta at a spurious value
        x0_flat = x0.copy()
        off = 1 + self.p + self.q
        x0_flat[off] = np.log(0.9 * varhat)
        x0_flat[off + 1 : off + 1 + self.garch_p] = np.log(0.02 / self.garch_p)
        x0_flat[off + 1 + self.garch_p : off + 1 + self.garch_p + self.garch_q] = np.log(
            0.05 / self.garch_q
        )

        candidates = []
        for start in (x0, x0_flat):
            res = optimize.minimize(
                negll, start, method="Nelder-Mead",
                options={"xatol": 1e-8, "fatol": 1e-9, "maxiter": 3000 * len(x0)},
            )
            # restart once from the incumbent for polish
            res = optimize.minimize(
                negll, res.x, method="Nelder-Mead",
                options={"xatol": 1e-9, "fatol": 1e-10, "maxiter": 3000 * len(x0)},
            )
            if np.isfinite(res.fun) and res.fun < 1e12:
                candidates.append(res)
        if not candidates:
            raise NumericalError("ARIMA-GARCH fit did not converge from any start")

        def persistence(r):
            _, _, _, _, alpha, beta, _ = self._unpack(r.x)
            return float(np.sum(alpha) + np.sum(beta))

        stationary = [r for r in candidates if persistence(r) < 0.999 - 1e-9]
        if not stationary:
            raise NumericalError(
                "covariance stationarity violated: sum(alpha) + sum(beta) >= 1 at optimum"
            )
        candidates = stationary
        best = min(candidates, key=lambda r: r.fun)
        # tie-break toward the identified low-persistence solution when the
        # variance equation contributes essentially no likelihood
        near = [r for r in candidates if r.fun <= best.fun + 0.5]
        res = min(near, key=persistence)
        a, phi, theta, omega, alpha, beta, nu = self._unpack(res.x)
        if np.sum(alpha) + np.sum(beta) >= 0.999 - 1e-9:
            raise NumericalError("covariance stationarity violated: sum(alpha) + sum(beta) >= 1 at optimum")
        _check_roots(phi, "stationarity")
        _check_roots(-theta, "invertibility")
        self.a_, self.phi_, self.theta_ = a, phi, theta
        self.omega_, self.alpha_, self.beta_, self.nu_ = float(omega), alpha, beta, float(nu)
        self.loglik_ = float(-res.fun)
        self.aic_ = -2.0 * self.loglik_ + 2.0 * self.n_fit_params
        self.n_ = len(y)
        return self

    # -- PIT / inverse PIT ---------------------------------------------------
    def _filter(self, y):
        w = np.diff(self._fit_scale(np.asarray(y, dtype=float), learn_shift=False), n=self.d)
        eps = arma_residuals(w, self.a_, self.phi_, self.theta_)
        sigma2, _ = self._variance_path(eps, self.omega_, self.alpha_, self.beta_)
        return w, eps, sigma2

    def pit(self, y, rng=None):
        self._check_fitted()
        _, eps, sigma2 = self._filter(y)
        z = eps[self.garch_p :] / np.sqrt(sigma2)
        return clamp_u(std_t_cdf(z, self.nu_))

    def init_state(self, y) -> MarginalState:
        self._check_fitted()
        y = np.asarray(y, dtype=float)
        if len(y) < self.burn_in + 1:
            raise ValidationError(
                f"need at least {self.burn_in + 1} observations to build state, got {len(y)}"
            )
        w, eps, sigma2 = self._filter(y)
        xf = self._fit_scale(y, learn_shift=False)
        keep_eps = max(self.q, self.garch_p)
        return MarginalState(
            t=len(y),
            w_hist=w[len(w) - self.p :].copy(),
            eps_hist=eps[max(len(eps) - keep_eps, 0) :].copy(),
            sigma2_hist=sigma2[max(len(sigma2) - self.garch_q, 0) :].copy(),
            x_hist=xf[len(xf) - self.d :].copy(),
        )

    def _mean_next(self, state: MarginalState) -> float:
        m = self.a_
        for i in range(1, self.p + 1):
            m += self.phi_[i - 1] * state.w_hist[-i]
        for j in range(1, self.q + 1):
            m += self.theta_[j - 1] * state.eps_hist[-j]
        return m

    def _sigma2_next(self, state: MarginalState) -> float:
        s = self.omega_
        for i in range(1, self.garch_p + 1):
            s += self.alpha_[i - 1] * state.eps_hist[-i] ** 2
        for j in range(1, self.garch_q + 1):
            s += self.beta_[j - 1] * state.sigma2_hist[-j]
        return s

    def quantile(self, state: MarginalState, u):
        self._check_fitted()
        z = std_t_ppf(clamp_u(np.asarray(u, dtype=float)), self.nu_)
        w_next = self._mean_next(state) + np.sqrt(self._sigma2_next(state)) * z
        return self._data_scale(_undifference_next(w_next, state.x_hist, self.d))

    def advance(self, state: MarginalState, x_obs: float) -> MarginalState:
        self._check_fitted()
        xf = float(self._fit_scale(np.asarray([x_obs]), learn_shift=False)[0])
        w_obs = _difference_next(xf, state.x_hist, self.d)
        eps_new = w_obs - self._mean_next(state)
        sigma2_new = self._sigma2_next(state)
        new = state.copy()
        new.t += 1
        if self.p:
            new.w_hist = np.r_[state.w_hist, w_obs][-self.p:]
        keep_eps = max(self.q, self.garch_p)
        if keep_eps:
            new.eps_hist = np.r_[state.eps_hist, eps_new][-keep_eps:]
        if self.garch_q:
            new.sigma2_hist = np.r_[state.sigma2_hist, sigma2_new][-self.garch_q:]
        if self.d:
            new.x_hist = np.r_[state.x_hist, xf][-self.d:]
        return new

    # -- serialization -------------------------------------------------------
    def to_dict(self) -> dict:
        self._check_fitted()
        return {
            "kind": self.kind,
            "p": self.p, "d": self.d, "q": self.q,
            "garch_p": self.garch_p, "garch_q": self.garch_q,
            "transform": self.transform,
            "shift": self.shift_,
            "a": self.a_,
            "phi": list(map(float, self.phi_)),
            "theta": list(map(float, self.theta_)),
            "omega": self.omega_,
            "alpha": list(map(float, self.alpha_)),
            "beta": list(map(float, self.beta_)),
            "nu": self.nu_,
            "loglik": self.loglik_,
            "aic": self.aic_,
            "n": self.n_,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ArimaGarchTMarginal":
        m = cls(d["p"], d["d"], d["q"], d["garch_p"], d["garch_q"], d["transform"])
        m.shift_ = d["shift"]
        m.a_ = d["a"]
        m.phi_ = np.asarray(d["phi"], dtype=float)
        m.theta_ = np.asarray(d["theta"], dtype=float)
        m.omega_ = d["omega"]
        m.alpha_ = np.asarray(d["alpha"], dtype=float)
        m.beta_ = np.asarray(d["beta"], dtype=float)
        m.nu_ = d["nu"]
        m.loglik_ = d["loglik"]
        m.aic_ = d["aic"]
        m.n_ = d["n"]
        return m
