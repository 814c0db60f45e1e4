"""Lauricella F_D power series and its Euler-integral cross-check.

The series

    F_D(a, b, c; x) = sum_n  (a, |n|) prod_i (b_i, n_i)
                      / ((c, |n|) prod_i (1, n_i)) * prod_i x_i^{n_i}

with (q, k) the rising factorial converges for max |x_i| < 1.  For
Re(c) > Re(a) > 0 it equals

    Gamma(c) / (Gamma(a) Gamma(c - a))
        * integral_0^1 s^{a-1} (1-s)^{c-a-1} prod_i (1 - x_i s)^{-b_i} ds,

which this module evaluates independently by tanh-sinh quadrature so the
two can be compared.  The exponent dictionary linking (a, b, c) to the
local-system data used elsewhere in the package is also kept here:
alpha_0 = sum b - c, alpha_i = -b_i, alpha_{m+1} = c - a,
alpha_{m+2} = a, summing to zero.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import gamma as _gamma

from .quadrature import integrate_ts
from .scene import ConditionViolated

# Growth of the empirical shell ratio tolerated before it is used in the
# geometric tail bound; keeps the bound honest near transient growth.
_RATIO_INFLATE = 1.25
_RATIO_CAP = 0.999


class NoConvergence(Exception):
    """Series evaluation cannot reach the requested tolerance."""


@dataclass(frozen=True)
class SeriesValue:
    """Result of a series evaluation with an a-posteriori tail bound.

    Attributes
    ----------
    value : complex
        Partial sum at the point where the stopping rule fired.
    tail_bound : float
        Geometric-majorant bound on the absolute value of the dropped
        tail, built from the measured shell-to-shell decay.
    shells : int
        Number of homogeneous-degree shells summed.
    """

    value: complex
    tail_bound: float
    shells: int


@dataclass(frozen=True)
class EulerCheckResult:
    """Comparison of the series against its integral representation."""

    series: complex
    integral: complex
    rel_err: float
    tol: float

    @property
    def passed(self) -> bool:
        return self.rel_err <= self.tol


def exponents_from_hypergeometric(a, b, c) -> list[complex]:
    """Exponent vector (alpha_0, ..., alpha_{m+2}) for parameters (a, b, c).

    The entries are sum(b) - c, then -b_i for each i, then c - a, then a;
    they sum to zero.
    """
    b = [complex(v) for v in b]
    alphas = [sum(b) - c]
    alphas.extend(-v for v in b)
    alphas.append(complex(c) - complex(a))
    alphas.append(complex(a))
    return [complex(v) for v in alphas]


def hypergeometric_from_exponents(alphas) -> tuple[complex, list[complex], complex]:
    """Invert the exponent dictionary; requires the entries to sum to zero."""
    alphas = [complex(v) for v in alphas]
    if len(alphas) < 3:
        raise ValueError("need at least three exponents")
    if abs(sum(alphas)) > 1e-9:
        raise ValueError("exponents must sum to zero")
    m = len(alphas) - 3
    a = alphas[m + 2]
    b = [-alphas[i] for i in range(1, m + 1)]
    c = sum(b) - alphas[0]
    return a, b, c


def fd_series(a, b, c, x, tol: float = 1e-12,
              max_shells: int = 5000) -> SeriesValue:
    """Sum the F_D series shell by shell with a certified stopping rule.

    Terms of total degree N form one shell; each is produced from a
    degree-(N-1) neighbour by the one-step ratio
    (a + N - 1)(b_j + n_j - 1) / ((c + N - 1) n_j) * x_j.  Summation stops
    once the geometric majorant of the tail, built from the inflated
    empirical ratio of consecutive shell sums, drops below the tolerance.

    Parameters
    ----------
    a, c : complex
        Numerator and denominator Pochhammer parameters; c must not be a
        nonpositive integer.
    b : sequence of complex
        One parameter per variable.
    x : sequence of float or complex
        Evaluation point with max |x_i| < 1.
    tol : float
        Target bound on the dropped tail relative to max(1, |value|).
    max_shells : int
        Shell cap before giving up.

    Returns
    -------
    SeriesValue

    Raises
    ------
    NoConvergence
        If some |x_i| >= 1 or the tail bound is still above tolerance at
        the shell cap.
    ValueError
        If c is a nonpositive integer (the series is undefined).
    """
    a = complex(a)
    c = complex(c)
    b = [complex(v) for v in b]
    x = [complex(v) for v in x]
    if len(b) != len(x):
        raise ValueError("b and x must have equal length")
    if abs(c - round(c.real)) < 1e-13 and round(c.real) <= 0:
        raise ValueError("c must not be a nonpositive integer")
    radius = max((abs(v) for v in x), default=0.0)
    if radius >= 1.0:
        raise NoConvergence(f"series requires max |x_i| < 1, got {radius}")

    m = len(x)
    shell = {(0,) * m: 1.0 + 0.0j}
    total = 1.0 + 0.0j
    shell_sums = [1.0]
    for depth in range(1, max_shells + 1):
        nxt: dict[tuple[int, ...], complex] = {}
        for n, t in shell.items():
            for j in range(m):
                if x[j] == 0:
                    continue
                np_ = list(n)
                np_[j] += 1
                key = tuple(np_)
                if key in nxt:
                    continue
                # Build each new index once, from its lowest incremented slot.
                jj = next(i for i in range(m) if key[i] > 0 and x[i] != 0)
                if jj != j:
                    continue
                nxt[key] = t * (a + depth - 1) * (b[j] + n[j]) * x[j] \
                    / ((c + depth - 1) * (n[j] + 1))
        if not nxt:
            return SeriesValue(total, 0.0, depth)
        shell = nxt
        s = sum(shell.values())
        total += s
        shell_sums.append(abs(s))
        if depth >= 3:
            prev = shell_sums[-4:-1]
            ratios = [shell_sums[-i] / shell_sums[-i - 1]
                      for i in range(1, min(3, depth))
                      if shell_sums[-i - 1] > 0]
            rho = max(ratios, default=0.0) * _RATIO_INFLATE
            if 0.0 < rho < 1.0 and max(prev) > 0:
                bound = shell_sums[-1] * rho / (1.0 - rho)
                if bound <= tol * max(1.0, abs(total)):
                    return SeriesValue(total, bound, depth)
            if shell_sums[-1] == 0.0 and max(prev) == 0.0:
                return SeriesValue(total, 0.0, depth)
    raise NoConvergence(
        f"tail bound not reached within {max_shells} shells at radius {radius}")


def euler_integral(a, b, c, x, tol: float = 1e-12) -> tuple[complex, float]:
    """Evaluate the integral side of the Euler representation.

    Computes Gamma(c)/(Gamma(a) Gamma(c-a)) times the integral of
    s^{a-1} (1-s)^{c-a-1} prod (1 - x_i s)^{-b_i} over (0, 1) by
    tanh-sinh quadrature.  Requires Re(c) > Re(a) > 0 and real x_i < 1.

    Returns
    -------
    tuple
        (value, error_estimate) with the estimate scaled like the value.
    """
    a = complex(a)
    c = complex(c)
    b = [complex(v) for v in b]
    xs = [float(v) for v in x]
    if not (c.real > a.real > 0):
        raise ConditionViolated("integral form requires Re(c) > Re(a) > 0")
    if any(v >= 1.0 for v in xs):
        raise ConditionViolated("integral form requires every x_i < 1")
    pref = _gamma(c) / (_gamma(a) * _gamma(c - a))
    ea = a - 1.0
    ec = c - a - 1.0

    def f(s, cs):
        acc = ea * np.log(s) + ec * np.log(cs)
        for bj, xj in zip(b, xs):
            acc = acc - bj * np.log1p(-xj * s)
        return np.exp(acc)

    val, err = integrate_ts(f, tol=tol)
    return pref * val, abs(pref) * err


def euler_integral_check(a, b, c, x, tol: float = 1e-8) -> EulerCheckResult:
    """Compare the series and integral evaluations of F_D at one point.

    The two sides are computed by unrelated algorithms (shell summation
    versus quadrature), so agreement validates both.  Requires the common
    domain: max |x_i| < 1 with real x_i, and Re(c) > Re(a) > 0.
    """
    sv = fd_series(a, b, c, x, tol=min(tol * 1e-2, 1e-12))
    iv, _ = euler_integral(a, b, c, x, tol=min(tol * 1e-2, 1e-12))
    scale = max(1.0, abs(sv.value))
    rel = abs(sv.value - iv) / scale
    return EulerCheckResult(sv.value, iv, rel, tol)
