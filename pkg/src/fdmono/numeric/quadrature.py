"""Quadrature primitives shared by the numeric layer.

Two rules cover every integral in this package: Gauss-Legendre panels for
integrands that are analytic on the (closed) integration segment, and a
doubly exponential tanh-sinh rule for segments carrying an algebraic
singularity at an endpoint.  Both are exposed as node/weight generators so
callers can fold in their own branch bookkeeping.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

# Below this weight magnitude a tanh-sinh node cannot contribute at double
# precision even against a mild algebraic singularity.
_TS_WEIGHT_FLOOR = 1e-290


@lru_cache(maxsize=None)
def gauss_nodes(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights on [-1, 1], cached per order."""
    x, w = np.polynomial.legendre.leggauss(n)
    return x, w


@lru_cache(maxsize=None)
def gauss_nodes_unit(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights rescaled to [0, 1]."""
    x, w = gauss_nodes(n)
    return 0.5 * (x + 1.0), 0.5 * w


@lru_cache(maxsize=None)
def tanh_sinh_nodes(level: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Tanh-sinh nodes for integrals over (0, 1).

    The substitution is s = (1 + tanh((pi/2) sinh(tau))) / 2 sampled at
    tau = k h with h = 1 / 2**level.  Returns (s, 1 - s, w) where both s
    and 1 - s are computed without cancellation, so integrands with
    algebraic singularities at either endpoint can be evaluated stably.
    Nodes whose weight underflows the double range are dropped.

    Parameters
    ----------
    level : int
        Refinement level; the step is h = 2**-level.

    Returns
    -------
    tuple of ndarray
        Node positions s, complementary positions 1 - s, and weights w
        such that  integral_0^1 f(s) ds  ~  sum w_k f(s_k).
    """
    h = 0.5 ** level
    # g = (pi/2) sinh(tau) reaches ~300 before exp(2g) overflows; weights
    # die long before that, so cap tau where sech^2(g) underflows.
    k_max = int(np.ceil(6.5 / h))
    tau = h * np.arange(-k_max, k_max + 1)
    g = 0.5 * np.pi * np.sinh(tau)
    # s = expit(2g), 1 - s = expit(-2g); write both with exp of a negative
    # argument only, to stay inside the double range.
    ag = np.abs(g)
    e = np.exp(-2.0 * ag)
    small = e / (1.0 + e)
    big = 1.0 / (1.0 + e)
    s = np.where(g >= 0, big, small)
    cs = np.where(g >= 0, small, big)
    # ds/dtau = (pi/4) cosh(tau) sech^2(g); sech^2 = 4 e / (1+e)^2.
    w = h * np.pi * np.cosh(tau) * (e / (1.0 + e) ** 2)
    keep = (w > _TS_WEIGHT_FLOOR) & (s > 0.0) & (cs > 0.0)
    return s[keep], cs[keep], w[keep]


def integrate_ts(f, tol: float = 1e-12, max_level: int = 10,
                 min_level: int = 4) -> tuple[complex, float]:
    """Integrate f over (0, 1) by tanh-sinh refinement.

    Parameters
    ----------
    f : callable
        Vectorized integrand f(s, one_minus_s) -> ndarray.  The second
        argument supplies 1 - s without cancellation for use in factors
        singular at s = 1.
    tol : float
        Stop once successive levels agree to tol * max(1, |value|).
    max_level : int
        Hard refinement cap.
    min_level : int
        First level whose difference is trusted as an error estimate.

    Returns
    -------
    tuple
        (value, error_estimate); the estimate is the last inter-level
        difference, which for tanh-sinh overshoots the true error.
    """
    prev = None
    err = np.inf
    for level in range(min_level - 1, max_level + 1):
        s, cs, w = tanh_sinh_nodes(level)
        val = complex(np.sum(w * f(s, cs)))
        if prev is not None:
            err = abs(val - prev)
            if level >= min_level and err <= tol * max(1.0, abs(val)):
                return val, err
        prev = val
    return prev, err
