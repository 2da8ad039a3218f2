"""Parameter reparameterizations making optimizer constraints implicit.

AR/MA stationarity and invertibility use the partial-autocorrelation
transform (tanh of unconstrained values, expanded through the
Durbin-Levinson recursion); positive parameters use log, probabilities
use logit.
"""

import numpy as np

__all__ = ["ar_to_pacf", "numerical_hessian", "pacf_to_ar"]


def pacf_to_ar(z: np.ndarray) -> np.ndarray:
    """Map unconstrained z to AR coefficients of a stationary polynomial."""
    r = np.tanh(np.asarray(z, dtype=float))
    p = len(r)
    phi = np.zeros(p)
    for k in range(p):
        new = phi.copy()
        new[k] = r[k]
        for i in range(k):
            new[i] = phi[i] - r[k] * phi[k - 1 - i]
        phi = new
    return phi[:p]


def ar_to_pacf(phi: np.ndarray) -> np.ndarray:
    """Inverse of :func:`pacf_to_ar` (valid for stationary coefficients)."""
    phi = np.asarray(phi, dtype=float).copy()
    p = len(phi)
    r = np.zeros(p)
    work = phi.copy()
    for k in range(p - 1, -1, -1):
        r[k] = work[k]
        if k > 0:
            prev = np.zeros(k)
            denom = 1.0 - r[k] ** 2
            for i in range(k):
                prev[i] = (work[i] + r[k] * work[k - 1 - i]) / denom
            work = prev
    return np.arctanh(np.clip(r, -1 + 1e-12, 1 - 1e-12))


def numerical_hessian(f, x, h: float = 1e-4) -> np.ndarray:
    """Central finite-difference Hessian of scalar f at x."""
    x = np.asarray(x, dtype=float)
    n = len(x)
    H = np.zeros((n, n))
    steps = h * np.maximum(np.abs(x), 1.0)
    for i in range(n):
        for j in range(i, n):
            ei = np.zeros(n)
            ej = np.zeros(n)
            ei[i] = steps[i]
            ej[j] = steps[j]
            if i == j:
                H[i, i] = (f(x + ei) - 2.0 * f(x) + f(x - ei)) / steps[i] ** 2
            else:
                H[i, j] = H[j, i] = (
                    f(x + ei + ej) - f(x + ei - ej) - f(x - ei + ej) + f(x - ei - ej)
                ) / (4.0 * steps[i] * steps[j])
    return H
