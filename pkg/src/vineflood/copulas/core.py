"""PairCopula: a copula family plus rotation and parameter vector.

Rotation convention (the dominant one in the vine-copula literature):

    90:  (u, v) -> (1-u, v)
    180: (u, v) -> (1-u, 1-v)   (survival copula)
    270: (u, v) -> (u, 1-v)

All base families here are exchangeable, which the rotated h-function
formulas below rely on.
"""

from dataclasses import dataclass, field

import numpy as np

from ..errors import ValidationError
from .families import EPS, get_family

ROTATABLE = {"clayton", "gumbel", "joe", "bb1", "bb8"}

__all__ = ["PairCopula", "ROTATABLE"]


@dataclass(frozen=True)
class PairCopula:
    family: str
    theta: tuple = ()
    rotation: int = 0
    loglik: float | None = field(default=None, compare=False)

    def __post_init__(self):
        fam = get_family(self.family)
        object.__setattr__(self, "family", fam.name)
        object.__setattr__(self, "theta", fam.check_theta(self.theta))
        if self.rotation not in (0, 90, 180, 270):
            raise ValidationError(f"rotation must be one of 0/90/180/270, got {self.rotation}")
        if self.rotation != 0 and fam.name not in ROTATABLE:
            raise ValidationError(f"rotation {self.rotation} not permitted for {fam.name}")

    @property
    def _fam(self):
        return get_family(self.family)

    @property
    def n_params(self) -> int:
        return self._fam.n_params

    # -- density ----------------------------------------------------------
    def logpdf(self, u, v):
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        r = self.rotation
        if r == 90:
            u = 1.0 - u
        elif r == 180:
            u, v = 1.0 - u, 1.0 - v
        elif r == 270:
            v = 1.0 - v
        return self._fam.logpdf(u, v, self.theta)

    def pdf(self, u, v):
        return np.exp(self.logpdf(u, v))

    # -- cdf --------------------------------------------------------------
    def cdf(self, u, v):
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        fam, th, r = self._fam, self.theta, self.rotation
        if r == 0:
            return fam.cdf(u, v, th)
        if r == 90:
            return v - fam.cdf(1.0 - u, v, th)
        if r == 180:
            return u + v - 1.0 + fam.cdf(1.0 - u, 1.0 - v, th)
        return u - fam.cdf(u, 1.0 - v, th)

    # -- h-functions ------------------------------------------------------
    def hfunc(self, u, v, cond_on: str = "second"):
        """Conditional cdf: P(U<=u | V=v) for cond_on='second', P(V<=v | U=u) otherwise."""
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        fam, th, r = self._fam, self.theta, self.rotation
        h = fam.hfunc
        if cond_on == "second":
            if r == 0:
                return h(u, v, th)
            if r == 90:
                return 1.0 - h(1.0 - u, v, th)
            if r == 180:
                return 1.0 - h(1.0 - u, 1.0 - v, th)
            return h(u, 1.0 - v, th)
        if cond_on == "first":
            # exchangeable base: dC/du at (u,v) equals h(v|u) of the base
            if r == 0:
                return h(v, u, th)
            if r == 90:
                return h(v, 1.0 - u, th)
            if r == 180:
                return 1.0 - h(1.0 - v, 1.0 - u, th)
            return 1.0 - h(1.0 - v, u, th)
        raise ValidationError(f"cond_on must be 'first' or 'second', got {cond_on!r}")

    def hinv(self, w, v, cond_on: str = "second"):
        """Inverse of hfunc in its free argument: hfunc(hinv(w|v)|v) = w."""
        w = np.asarray(w, dtype=float)
        v = np.asarray(v, dtype=float)
        fam, th, r = self._fam, self.theta, self.rotation
        hi = fam.hinv
        if cond_on == "second":
            if r == 0:
                return hi(w, v, th)
            if r == 90:
                return 1.0 - hi(1.0 - w, v, th)
            if r == 180:
                return 1.0 - hi(1.0 - w, 1.0 - v, th)
            return hi(w, 1.0 - v, th)
        if cond_on == "first":
            if r == 0:
                return hi(w, v, th)
            if r == 90:
                return hi(w, 1.0 - v, th)
            if r == 180:
                return 1.0 - hi(1.0 - w, 1.0 - v, th)
            return 1.0 - hi(1.0 - w, v, th)
        raise ValidationError(f"cond_on must be 'first' or 'second', got {cond_on!r}")

    # -- sampling ---------------------------------------------------------
    def sample(self, n: int, rng: np.random.Generator | int):
        """Draw n pairs via the conditional (v, hinv(w|v)) construction."""
        if n < 1:
            raise ValidationError("n must be >= 1")
        if not isinstance(rng, np.random.Generator):
            rng = np.random.default_rng(rng)
        v = rng.uniform(EPS, 1.0 - EPS, size=n)
        w = rng.uniform(EPS, 1.0 - EPS, size=n)
        u = self.hinv(w, v, cond_on="second")
        return np.column_stack([u, v])

    # -- Kendall's tau ----------------------------------------------------
    def tau(self) -> float:
        t = self._fam.tau(self.theta)
        return -t if self.rotation in (90, 270) else t

    @classmethod
    def from_tau(cls, family: str, tau: float, rotation: int = 0) -> "PairCopula":
        fam = get_family(family)
        base_tau = -tau if rotation in (90, 270) else tau
        lo, hi = fam.tau_range
        if not (lo <= base_tau <= hi):
            raise ValidationError(
                f"tau {tau} (base {base_tau:.4f}) unattainable for {fam.name} "
                f"rotation {rotation}; attainable base range [{lo}, {hi}]"
            )
        return cls(fam.name, fam.theta_from_tau(base_tau), rotation)

    # -- serialization ----------------------------------------------------
    def to_dict(self) -> dict:
        return {
            "family": self.family,
            "rotation": self.rotation,
            "theta": [float(t) for t in self.theta],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PairCopula":
        return cls(d["family"], tuple(d["theta"]), d.get("rotation", 0))
