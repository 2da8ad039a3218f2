"""Bivariate copula family implementations.

Archimedean families (Clayton, Gumbel, Frank, Joe, BB1, BB8) are driven
by their strict generator phi and its first two derivatives, all in
log-stable form:

    C(u,v)    = phi_inv(phi(u) + phi(v))
    h(u|v)    = phi'(v) / phi'(C)
    c(u,v)    = -phi''(C) phi'(u) phi'(v) / phi'(C)^3

Elliptical families (Gaussian, Student t) use their closed forms; their
cdf is evaluated by adaptive quadrature over the conditional form.

All methods accept scalars or numpy arrays in the open unit interval;
callers are responsible for clamping to [EPS, 1-EPS].
"""

import numpy as np
from scipy import integrate, optimize, special, stats

from ..errors import ValidationError

EPS = 1e-10

__all__ = ["EPS", "FAMILIES", "get_family"]


def _clip(x):
    return np.clip(x, EPS, 1.0 - EPS)


class _Base:
    """Family interface: parameter vector ``theta`` passed to every call."""

    name = "base"
    n_params = 0
    # (low, high) box per parameter, used by fitting
    bounds: tuple = ()
    tau_range = (-1.0, 1.0)
    symmetric_dependence = True  # covers negative dependence via its parameter

    @classmethod
    def check_theta(cls, theta):
        theta = tuple(float(t) for t in theta)
        if len(theta) != cls.n_params:
            raise ValidationError(
                f"{cls.name} expects {cls.n_params} parameter(s), got {len(theta)}"
            )
        for t, (lo, hi) in zip(theta, cls.bounds):
            if not (lo <= t <= hi):
                raise ValidationError(
                    f"{cls.name} parameter {t} outside domain [{lo}, {hi}]"
                )
        return theta

    @classmethod
    def logpdf(cls, u, v, theta):
        raise NotImplementedError

    @classmethod
    def pdf(cls, u, v, theta):
        return np.exp(cls.logpdf(u, v, theta))

    @classmethod
    def cdf(cls, u, v, theta):
        raise NotImplementedError

    @classmethod
    def hfunc(cls, u, v, theta):
        """Conditional cdf P(U <= u | V = v) = dC/dv."""
        raise NotImplementedError

    @classmethod
    def hinv(cls, w, v, theta):
        """Inverse of ``hfunc`` in its first argument (bisection fallback)."""
        return _hinv_bisect(cls, w, v, theta)

    @classmethod
    def tau(cls, theta):
        raise NotImplementedError

    @classmethod
    def theta_from_tau(cls, tau):
        """Parameter vector attaining Kendall's tau (used as fit start)."""
        raise NotImplementedError


def _hinv_bisect(fam, w, v, theta, tol=1e-11, max_iter=200):
    """Monotone bisection of h(u|v) = w in u on (0,1)."""
    w = np.asarray(w, dtype=float)
    v = np.asarray(v, dtype=float)
    w, v = np.broadcast_arrays(w, v)
    lo = np.full(w.shape, EPS)
    hi = np.full(w.shape, 1.0 - EPS)
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        too_low = fam.hfunc(mid, v, theta) < w
        lo = np.where(too_low, mid, lo)
        hi = np.where(too_low, hi, mid)
        if np.max(hi - lo) < tol:
            break
    out = 0.5 * (lo + hi)
    return out if out.ndim else float(out)


# ---------------------------------------------------------------------------
# Independence


class Independence(_Base):
    name = "independence"
    n_params = 0
    bounds = ()
    tau_range = (0.0, 0.0)

    @classmethod
    def logpdf(cls, u, v, theta):
        return np.zeros(np.broadcast(np.asarray(u), np.asarray(v)).shape)

    @classmethod
    def cdf(cls, u, v, theta):
        return np.asarray(u) * np.asarray(v)

    @classmethod
    def hfunc(cls, u, v, theta):
        return np.broadcast_arrays(np.asarray(u, dtype=float), v)[0].copy()

    @classmethod
    def hinv(cls, w, v, theta):
        return np.broadcast_arrays(np.asarray(w, dtype=float), v)[0].copy()

    @classmethod
    def tau(cls, theta):
        return 0.0

    @classmethod
    def theta_from_tau(cls, tau):
        return ()


# ---------------------------------------------------------------------------
# Archimedean machinery


class _Archimedean(_Base):
    symmetric_dependence = False

    # generator primitives, log-stable ------------------------------------
    @classmethod
    def gen(cls, t, theta):
        raise NotImplementedError

    @classmethod
    def gen_inv(cls, s, theta):
        raise NotImplementedError

    @classmethod
    def log_neg_gen_d1(cls, t, theta):
        """log |phi'(t)| (phi' < 0 for a strict generator)."""
        raise NotImplementedError

    @classmethod
    def log_gen_d2(cls, t, theta):
        """log phi''(t) (phi'' > 0)."""
        raise NotImplementedError

    # Evaluations at the copula value C = gen_inv(s) are done directly in
    # terms of s: near the upper corner C rounds to 1 in floating point and
    # the log-derivatives would blow up, while s keeps full precision.
    @classmethod
    def log_neg_gen_d1_s(cls, s, theta):
        """log |phi'(gen_inv(s))| computed from s without forming C."""
        return cls.log_neg_gen_d1(_clip(cls.gen_inv(s, theta)), theta)

    @classmethod
    def log_gen_d2_s(cls, s, theta):
        """log phi''(gen_inv(s)) computed from s without forming C."""
        return cls.log_gen_d2(_clip(cls.gen_inv(s, theta)), theta)

    # derived surface ------------------------------------------------------
    @classmethod
    def cdf(cls, u, v, theta):
        u, v = _clip(np.asarray(u, dtype=float)), _clip(np.asarray(v, dtype=float))
        return _clip(cls.gen_inv(cls.gen(u, theta) + cls.gen(v, theta), theta))

    @classmethod
    def logpdf(cls, u, v, theta):
        u, v = _clip(np.asarray(u, dtype=float)), _clip(np.asarray(v, dtype=float))
        s = cls.gen(u, theta) + cls.gen(v, theta)
        # boundary parameters can drive individual terms to +-inf; the
        # combined value is still meaningful to the optimizer's guards
        with np.errstate(divide="ignore", invalid="ignore"):
            return (
                cls.log_gen_d2_s(s, theta)
                + cls.log_neg_gen_d1(u, theta)
                + cls.log_neg_gen_d1(v, theta)
                - 3.0 * cls.log_neg_gen_d1_s(s, theta)
            )

    @classmethod
    def hfunc(cls, u, v, theta):
        u, v = _clip(np.asarray(u, dtype=float)), _clip(np.asarray(v, dtype=float))
        s = cls.gen(u, theta) + cls.gen(v, theta)
        return _clip(np.exp(cls.log_neg_gen_d1(v, theta) - cls.log_neg_gen_d1_s(s, theta)))

    @classmethod
    def tau(cls, theta):
        # tau = 1 + 4 * int_0^1 phi(t)/phi'(t) dt for Archimedean copulas
        def integrand(t):
            return -cls.gen(t, theta) * np.exp(-cls.log_neg_gen_d1(t, theta))

        val, _ = integrate.quad(integrand, 0.0, 1.0, limit=200)
        return 1.0 + 4.0 * val


class Clayton(_Archimedean):
    name = "clayton"
    n_params = 1
    bounds = ((1e-4, 20.0),)
    tau_range = (1e-4, 0.9)

    @classmethod
    def gen(cls, t, theta):
        th = theta[0]
        return np.expm1(-th * np.log(t)) / th

    @classmethod
    def gen_inv(cls, s, theta):
        th = theta[0]
        return np.exp(-np.log1p(th * s) / th)

    @classmethod
    def log_neg_gen_d1(cls, t, theta):
        return -(theta[0] + 1.0) * np.log(t)

    @classmethod
    def log_gen_d2(cls, t, theta):
        th = theta[0]
        return np.log(th + 1.0) - (th + 2.0) * np.log(t)

    @classmethod
    def log_neg_gen_d1_s(cls, s, theta):
        th = theta[0]
        return (th + 1.0) / th * np.log1p(th * np.asarray(s))

    @classmethod
    def log_gen_d2_s(cls, s, theta):
        th = theta[0]
        return np.log(th + 1.0) + (th + 2.0) / th * np.log1p(th * np.asarray(s))

    @classmethod
    def hfunc(cls, u, v, theta):
        th = theta[0]
        u, v = _clip(np.asarray(u, dtype=float)), _clip(np.asarray(v, dtype=float))
        s = u ** (-th) + v ** (-th) - 1.0
        return _clip(v ** (-th - 1.0) * s ** (-1.0 - 1.0 / th))

    @classmethod
    def hinv(cls, w, v, theta):
        th = theta[0]
        w, v = _clip(np.asarray(w, dtype=float)), _clip(np.asarray(v, dtype=float))
        inner = (w * v ** (th + 1.0)) ** (-th / (th + 1.0)) + 1.0 - v ** (-th)
        return _clip(inner ** (-1.0 / th))

    @classmethod
    def tau(cls, theta):
        return theta[0] / (theta[0] + 2.0)

    @classmethod
    def theta_from_tau(cls, tau):
        return (2.0 * tau / (1.0 - tau),)


class Gumbel(_Archimedean):
    name = "gumbel"
    n_params = 1
    bounds = ((1.0, 20.0),)
    tau_range = (0.0, 0.95)

    @classmethod
    def gen(cls, t, theta):
        return (-np.log(t)) ** theta[0]

    @classmethod
    def gen_inv(cls, s, theta):
        return np.exp(-np.asarray(s) ** (1.0 / theta[0]))

    @classmethod
    def log_neg_gen_d1(cls, t, theta):
        th = theta[0]
        return np.log(th) + (th - 1.0) * np.log(-np.log(t)) - np.log(t)

    @classmethod
    def log_gen_d2(cls, t, theta):
        th = theta[0]
        lt = -np.log(t)
        return np.log(th) + (th - 2.0) * np.log(lt) + np.log(th - 1.0 + lt) - 2.0 * np.log(t)

    @classmethod
    def log_neg_gen_d1_s(cls, s, theta):
        # at t = gen_inv(s): -log t = s**(1/theta)
        th = theta[0]
        s = np.asarray(s, dtype=float)
        return np.log(th) + (th - 1.0) / th * np.log(s) + s ** (1.0 / th)

    @classmethod
    def log_gen_d2_s(cls, s, theta):
        th = theta[0]
        s = np.asarray(s, dtype=float)
        r = s ** (1.0 / th)
        return np.log(th) + (th - 2.0) / th * np.log(s) + np.log(th - 1.0 + r) + 2.0 * r

    @classmethod
    def tau(cls, theta):
        return 1.0 - 1.0 / theta[0]

    @classmethod
    def theta_from_tau(cls, tau):
        return (1.0 / max(1.0 - tau, 1e-6),)


class Frank(_Archimedean):
    name = "frank"
    n_params = 1
    bounds = ((-35.0, 35.0),)
    tau_range = (-0.94, 0.94)
    symmetric_dependence = True

    @classmethod
    def check_theta(cls, theta):
        theta = super().check_theta(theta)
        if theta[0] == 0.0:
            raise ValidationError("frank theta must be nonzero")
        return theta

    @classmethod
    def gen(cls, t, theta):
        th = theta[0]
        return -np.log(np.expm1(-th * t) / np.expm1(-th))

    @classmethod
    def gen_inv(cls, s, theta):
        th = theta[0]
        return -np.log1p(np.exp(-s) * np.expm1(-th)) / th

    @classmethod
    def log_neg_gen_d1(cls, t, theta):
        th = theta[0]
        return np.log(abs(th)) - th * t - np.log(np.abs(np.expm1(-th * t)))

    @classmethod
    def log_gen_d2(cls, t, theta):
        th = theta[0]
        return 2.0 * np.log(abs(th)) - th * t - 2.0 * np.log(np.abs(np.expm1(-th * t)))

    @classmethod
    def log_neg_gen_d1_s(cls, s, theta):
        # at t = gen_inv(s): expm1(-theta*t) = exp(-s)*expm1(-theta)
        th = theta[0]
        s = np.asarray(s, dtype=float)
        log_abs_e = -s + np.log(abs(np.expm1(-th)))
        log1p_e = np.log1p(np.exp(-s) * np.expm1(-th))
        return np.log(abs(th)) + log1p_e - log_abs_e

    @classmethod
    def log_gen_d2_s(cls, s, theta):
        th = theta[0]
        s = np.asarray(s, dtype=float)
        log_abs_e = -s + np.log(abs(np.expm1(-th)))
        log1p_e = np.log1p(np.exp(-s) * np.expm1(-th))
        return 2.0 * np.log(abs(th)) + log1p_e - 2.0 * log_abs_e

    @classmethod
    def hfunc(cls, u, v, theta):
        th = theta[0]
        u, v = _clip(np.asarray(u, dtype=float)), _clip(np.asarray(v, dtype=float))
        eu, ev = np.expm1(-th * u), np.expm1(-th * v)
        e1 = np.expm1(-th)
        return _clip(np.exp(-th * v) * eu / (e1 + eu * ev))

    @classmethod
    def hinv(cls, w, v, theta):
        th = theta[0]
        w, v = _clip(np.asarray(w, dtype=float)), _clip(np.asarray(v, dtype=float))
        ev = np.expm1(-th * v)
        e1 = np.expm1(-th)
        x = w * e1 / (np.exp(-th * v) - w * ev)
        return _clip(-np.log1p(x) / th)

    @classmethod
    def tau(cls, theta):
        th = theta[0]
        # Debye function D1
        d1, _ = integrate.quad(lambda t: t / np.expm1(t), 0.0, abs(th), limit=200)
        d1 /= abs(th)
        t = 1.0 - 4.0 / abs(th) * (1.0 - d1)
        return t if th > 0 else -t

    @classmethod
    def theta_from_tau(cls, tau):
        if abs(tau) < 1e-8:
            return (1e-6 if tau >= 0 else -1e-6,)
        lo, hi = 1e-6, cls.bounds[0][1]
        th = optimize.brentq(lambda t: cls.tau((t,)) - abs(tau), lo, hi, xtol=1e-10)
        return (th if tau > 0 else -th,)


class Joe(_Archimedean):
    name = "joe"
    n_params = 1
    bounds = ((1.0 + 1e-6, 20.0),)
    tau_range = (1e-4, 0.93)

    @classmethod
    def _one_minus_g(cls, t, theta):
        # 1 - (1-t)^theta, stable for t near 0
        return -np.expm1(theta[0] * np.log1p(-t))

    @classmethod
    def gen(cls, t, theta):
        # -log(1 - (1-t)^theta) via log1p so tiny (1-t)^theta survives
        g = np.exp(theta[0] * np.log1p(-np.asarray(t, dtype=float)))
        return -np.log1p(-g)

    @classmethod
    def gen_inv(cls, s, theta):
        return -np.expm1(np.log(-np.expm1(-np.asarray(s))) / theta[0])

    @classmethod
    def log_neg_gen_d1(cls, t, theta):
        th = theta[0]
        return np.log(th) + (th - 1.0) * np.log1p(-t) - np.log(cls._one_minus_g(t, theta))

    @classmethod
    def log_gen_d2(cls, t, theta):
        th = theta[0]
        omg = cls._one_minus_g(t, theta)  # 1 - g
        g = 1.0 - omg
        return (
            np.log(th)
            + (th - 2.0) * np.log1p(-t)
            + np.log((th - 1.0) * omg + th * g)
            - 2.0 * np.log(omg)
        )

    @classmethod
    def log_neg_gen_d1_s(cls, s, theta):
        # at t = gen_inv(s): log(1-t) = log(-expm1(-s))/theta, 1-(1-t)^th = exp(-s)
        th = theta[0]
        s = np.asarray(s, dtype=float)
        y = np.log(-np.expm1(-s))
        return np.log(th) + (th - 1.0) * y / th + s

    @classmethod
    def log_gen_d2_s(cls, s, theta):
        th = theta[0]
        s = np.asarray(s, dtype=float)
        y = np.log(-np.expm1(-s))
        mix = (th - 1.0) * np.exp(-s) - th * np.expm1(-s)
        return np.log(th) + (th - 2.0) * y / th + np.log(mix) + 2.0 * s

    @classmethod
    def theta_from_tau(cls, tau):
        lo, hi = cls.bounds[0]
        if cls.tau((hi,)) < tau:
            return (hi,)
        return (optimize.brentq(lambda t: cls.tau((t,)) - tau, lo, hi, xtol=1e-10),)


class BB1(_Archimedean):
    name = "bb1"
    n_params = 2
    bounds = ((1e-3, 7.0), (1.0, 7.0))
    tau_range = (1e-3, 0.9)

    @classmethod
    def gen(cls, t, theta):
        th, de = theta
        return np.expm1(-th * np.log(t)) ** de

    @classmethod
    def gen_inv(cls, s, theta):
        th, de = theta
        return np.exp(-np.log1p(np.asarray(s) ** (1.0 / de)) / th)

    @classmethod
    def log_neg_gen_d1(cls, t, theta):
        th, de = theta
        w = np.expm1(-th * np.log(t))
        return np.log(de * th) - (th + 1.0) * np.log(t) + (de - 1.0) * np.log(w)

    @classmethod
    def log_gen_d2(cls, t, theta):
        th, de = theta
        w = np.expm1(-th * np.log(t))
        return (
            np.log(de * th)
            - (th + 2.0) * np.log(t)
            + (de - 2.0) * np.log(w)
            + np.log((th + 1.0) * w + th * (de - 1.0) * (w + 1.0))
        )

    @classmethod
    def log_neg_gen_d1_s(cls, s, theta):
        # at t = gen_inv(s): w = t^-th - 1 = s**(1/delta), in logs throughout
        th, de = theta
        lw = np.log(np.asarray(s, dtype=float)) / de
        log1pw = np.logaddexp(0.0, lw)
        return np.log(de * th) + (th + 1.0) / th * log1pw + (de - 1.0) * lw

    @classmethod
    def log_gen_d2_s(cls, s, theta):
        th, de = theta
        lw = np.log(np.asarray(s, dtype=float)) / de
        log1pw = np.logaddexp(0.0, lw)
        if de > 1.0:
            mix = np.logaddexp(np.log(th + 1.0) + lw, np.log(th * (de - 1.0)) + log1pw)
        else:
            mix = np.log(th + 1.0) + lw
        return np.log(de * th) + (th + 2.0) / th * log1pw + (de - 2.0) * lw + mix

    @classmethod
    def tau(cls, theta):
        th, de = theta
        return 1.0 - 2.0 / (de * (th + 2.0))

    @classmethod
    def theta_from_tau(cls, tau):
        # underdetermined: pin delta, solve theta
        de = 1.5
        th = 2.0 / (de * (1.0 - tau)) - 2.0
        lo, hi = cls.bounds[0]
        if th < lo:
            # fall back to delta carrying the dependence
            th = lo
            de = min(max(2.0 / ((1.0 - tau) * (th + 2.0)), 1.0), cls.bounds[1][1])
        return (min(th, hi), de)


class BB8(_Archimedean):
    name = "bb8"
    n_params = 2
    bounds = ((1.0, 8.0), (1e-2, 1.0))
    tau_range = (1e-3, 0.75)

    @classmethod
    def _eta(cls, theta):
        th, de = theta
        if de >= 1.0:  # log1p(-1) = -inf is correct but noisy; eta = 1 exactly
            return 1.0
        return -np.expm1(th * np.log1p(-de))  # 1 - (1-delta)^theta

    @classmethod
    def _g(cls, t, theta):
        th, de = theta
        return -np.expm1(th * np.log1p(-de * t))  # 1 - (1-delta t)^theta

    @classmethod
    def gen(cls, t, theta):
        return np.log(cls._eta(theta)) - np.log(cls._g(t, theta))

    @classmethod
    def gen_inv(cls, s, theta):
        th, de = theta
        inner = cls._eta(theta) * np.exp(-np.asarray(s))
        return -np.expm1(np.log1p(-inner) / th) / de

    @classmethod
    def log_neg_gen_d1(cls, t, theta):
        th, de = theta
        return np.log(th * de) + (th - 1.0) * np.log1p(-de * t) - np.log(cls._g(t, theta))

    @classmethod
    def log_gen_d2(cls, t, theta):
        th, de = theta
        g = cls._g(t, theta)
        one_m = np.exp(th * np.log1p(-de * t))  # (1 - delta t)^theta
        return (
            np.log(th) + 2.0 * np.log(de)
            + (th - 2.0) * np.log1p(-de * t)
            + np.log(th * one_m + (th - 1.0) * g)
            - 2.0 * np.log(g)
        )

    @classmethod
    def log_neg_gen_d1_s(cls, s, theta):
        # at t = gen_inv(s): log(1 - delta t) = log1p(-eta exp(-s))/theta,
        # g(t) = eta exp(-s)
        th, de = theta
        s = np.asarray(s, dtype=float)
        log_eta = np.log(cls._eta(theta))
        L = np.log1p(-np.exp(log_eta - s))
        return np.log(th * de) + (th - 1.0) * L / th - (log_eta - s)

    @classmethod
    def log_gen_d2_s(cls, s, theta):
        th, de = theta
        s = np.asarray(s, dtype=float)
        log_eta = np.log(cls._eta(theta))
        L = np.log1p(-np.exp(log_eta - s))
        mix = th * np.exp(L) - (th - 1.0) * np.expm1(L)
        return (
            np.log(th) + 2.0 * np.log(de)
            + (th - 2.0) * L / th
            + np.log(mix)
            - 2.0 * (log_eta - s)
        )

    @classmethod
    def theta_from_tau(cls, tau):
        de = 0.9
        lo, hi = cls.bounds[0]
        f = lambda t: cls.tau((t, de)) - tau
        if f(hi) < 0:
            return (hi, de)
        if f(lo + 1e-6) > 0:
            return (lo + 1e-6, de)
        return (optimize.brentq(f, lo + 1e-6, hi, xtol=1e-8), de)


# ---------------------------------------------------------------------------
# Elliptical families


class Gaussian(_Base):
    name = "gaussian"
    n_params = 1
    bounds = ((-1.0 + 1e-6, 1.0 - 1e-6),)
    tau_range = (-0.99, 0.99)

    @classmethod
    def logpdf(cls, u, v, theta):
        rho = theta[0]
        x = stats.norm.ppf(_clip(np.asarray(u, dtype=float)))
        y = stats.norm.ppf(_clip(np.asarray(v, dtype=float)))
        r2 = 1.0 - rho * rho
        return -0.5 * np.log(r2) - (rho * rho * (x * x + y * y) - 2.0 * rho * x * y) / (2.0 * r2)

    @classmethod
    def cdf(cls, u, v, theta):
        rho = theta[0]
        u = _clip(np.asarray(u, dtype=float))
        v = _clip(np.asarray(v, dtype=float))
        y = stats.norm.ppf(v)
        sq = np.sqrt(1.0 - rho * rho)

        def one(ui, yi):
            # adaptive quadrature of the conditional cdf over probability
            # space: substituting p = Phi(s) keeps the tails exact
            val, _ = integrate.quad(
                lambda p: stats.norm.cdf((yi - rho * stats.norm.ppf(p)) / sq),
                0.0, ui, limit=200, epsabs=1e-12, epsrel=1e-10,
            )
            return val

        out = np.asarray(np.vectorize(one)(u, y))
        return out if out.ndim else float(out)

    @classmethod
    def hfunc(cls, u, v, theta):
        rho = theta[0]
        x = stats.norm.ppf(_clip(np.asarray(u, dtype=float)))
        y = stats.norm.ppf(_clip(np.asarray(v, dtype=float)))
        return _clip(stats.norm.cdf((x - rho * y) / np.sqrt(1.0 - rho * rho)))

    @classmethod
    def hinv(cls, w, v, theta):
        rho = theta[0]
        zw = stats.norm.ppf(_clip(np.asarray(w, dtype=float)))
        zv = stats.norm.ppf(_clip(np.asarray(v, dtype=float)))
        return _clip(stats.norm.cdf(rho * zv + np.sqrt(1.0 - rho * rho) * zw))

    @classmethod
    def tau(cls, theta):
        return 2.0 / np.pi * np.arcsin(theta[0])

    @classmethod
    def theta_from_tau(cls, tau):
        return (np.sin(np.pi * tau / 2.0),)


class StudentT(_Base):
    name = "student_t"
    n_params = 2  # (rho, nu)
    bounds = ((-1.0 + 1e-6, 1.0 - 1e-6), (2.0 + 1e-6, 50.0))
    tau_range = (-0.99, 0.99)

    @classmethod
    def logpdf(cls, u, v, theta):
        rho, nu = theta
        x = stats.t.ppf(_clip(np.asarray(u, dtype=float)), nu)
        y = stats.t.ppf(_clip(np.asarray(v, dtype=float)), nu)
        r2 = 1.0 - rho * rho
        q = (x * x - 2.0 * rho * x * y + y * y) / (nu * r2)
        log_joint = (
            special.gammaln((nu + 2.0) / 2.0)
            - special.gammaln(nu / 2.0)
            - np.log(nu * np.pi)
            - 0.5 * np.log(r2)
            - (nu + 2.0) / 2.0 * np.log1p(q)
        )
        return log_joint - stats.t.logpdf(x, nu) - stats.t.logpdf(y, nu)

    @classmethod
    def cdf(cls, u, v, theta):
        rho, nu = theta
        u = _clip(np.asarray(u, dtype=float))
        v = _clip(np.asarray(v, dtype=float))
        y = stats.t.ppf(v, nu)
        r2 = 1.0 - rho * rho

        def one(ui, yi):
            def cond(p):
                s = stats.t.ppf(p, nu)
                scale = np.sqrt((nu + s * s) * r2 / (nu + 1.0))
                return stats.t.cdf((yi - rho * s) / scale, nu + 1.0)

            val, _ = integrate.quad(cond, 0.0, ui, limit=200, epsabs=1e-12, epsrel=1e-10)
            return val

        out = np.asarray(np.vectorize(one)(u, y))
        return out if out.ndim else float(out)

    @classmethod
    def hfunc(cls, u, v, theta):
        rho, nu = theta
        x = stats.t.ppf(_clip(np.asarray(u, dtype=float)), nu)
        y = stats.t.ppf(_clip(np.asarray(v, dtype=float)), nu)
        scale = np.sqrt((nu + y * y) * (1.0 - rho * rho) / (nu + 1.0))
        return _clip(stats.t.cdf((x - rho * y) / scale, nu + 1.0))

    @classmethod
    def hinv(cls, w, v, theta):
        rho, nu = theta
        y = stats.t.ppf(_clip(np.asarray(v, dtype=float)), nu)
        scale = np.sqrt((nu + y * y) * (1.0 - rho * rho) / (nu + 1.0))
        x = rho * y + scale * stats.t.ppf(_clip(np.asarray(w, dtype=float)), nu + 1.0)
        return _clip(stats.t.cdf(x, nu))

    @classmethod
    def tau(cls, theta):
        return 2.0 / np.pi * np.arcsin(theta[0])

    @classmethod
    def theta_from_tau(cls, tau):
        return (np.sin(np.pi * tau / 2.0), 5.0)


FAMILIES = {
    f.name: f
    for f in (Independence, Gaussian, StudentT, Clayton, Gumbel, Frank, Joe, BB1, BB8)
}


def get_family(name: str):
    try:
        return FAMILIES[name.lower()]
    except KeyError:
        raise ValidationError(
            f"unknown copula family {name!r}; choose from {sorted(FAMILIES)}"
        ) from None
