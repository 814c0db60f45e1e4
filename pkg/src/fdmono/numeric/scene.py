"""Numeric evaluation scenes: exponents, base point, and validity checks.

A scene fixes everything the quadrature and continuation layers need:
numeric exponents alpha_0..alpha_{m+2} summing to zero, a real base point
putting the punctures 0, x_1, ..., x_m, 1 in the slot order required by
the symbolic layer (infinity always occupies the last slot), a parameter
shift selecting which solution-space identification is in force, and a
symbol assignment tying the symbolic multiplier field to concrete unit
complex numbers lambda_i = exp(2 pi i alpha_i).

Scenes are only admitted when the hypotheses of the identification
theorems hold: the three rightmost exponents non-integral with
alpha_{i_{m+1}} + alpha_{i_{m+2}} nonzero, plus the shift-specific
integrality restrictions.  Exponent vectors with integral last entry
(which would send a puncture to -infinity) are rejected here; they are
supported symbolically but carry no finite-path realization.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass, field

import numpy as np

from ..exactfield import Monomial
from ..homology import (
    Alignment,
    Integral,
    NonIntegral,
    ParameterSystem,
    validate_alignment,
    validate_params,
)

# Declared non-integral exponents closer than this to an integer are
# rejected: the multiplier would be numerically indistinguishable from 1.
_INT_TOL = 1e-9
# Cross-check tolerance between monomial evaluations and exp(2 pi i alpha).
_LAMBDA_TOL = 1e-10
_SUM_TOL = 1e-12


class SceneError(Exception):
    """Invalid scene configuration."""


class ConditionViolated(SceneError):
    """A parameter-regime hypothesis fails for the requested shift."""


class EndpointDivergence(SceneError):
    """An open-arc integral diverges at one of its puncture endpoints."""


@dataclass(frozen=True)
class NumericScene:
    """Immutable numeric instance of a local system at a real base point.

    Attributes
    ----------
    params : ParameterSystem
        Symbolic multiplier data; every non-integral entry carries a
        numeric hint equal to its exponent.
    alignment : Alignment
        Slot order; integral punctures first, then by position, with the
        infinite puncture in the final slot.
    alphas : ndarray
        Complex exponents, length m + 3, summing to zero.
    x : ndarray
        Real positions of the m + 2 finite punctures, indexed by
        puncture: x[0] = 0, x[m+1] = 1.
    shift : str
        One of "hat", "check", "none"; selects the lf-side or fin-side
        identification (or none).
    assignment : dict
        Symbol values on the unit circle consistent with the exponents.
    quad_tol : float
        Target quadrature accuracy for period components.
    max_level : int
        Tanh-sinh refinement cap.
    """

    params: ParameterSystem
    alignment: Alignment
    alphas: np.ndarray
    x: np.ndarray
    shift: str
    assignment: dict = field(default_factory=dict)
    quad_tol: float = 1e-10
    max_level: int = 10

    @property
    def m(self) -> int:
        return self.params.m

    @property
    def n_finite(self) -> int:
        return self.m + 2

    @property
    def gap(self) -> float:
        """Smallest distance between two finite punctures."""
        xs = np.sort(self.x)
        return float(np.min(np.diff(xs)))

    @property
    def side(self) -> str | None:
        """Which period family the shift validates: lf, fin, or None."""
        return {"hat": "lf", "check": "fin"}.get(self.shift)

    def lam(self, i: int) -> complex:
        """Numeric multiplier exp(2 pi i alpha_i)."""
        return cmath.exp(2j * cmath.pi * self.alphas[i])

    def beta(self, side: str) -> np.ndarray:
        """Integrand exponents over the finite punctures for one side.

        Both period families integrate exp(sum_j beta_j log(t - x_j)) dt;
        the lf side uses beta = alpha - e_{m+1} restricted to the finite
        punctures, the fin side its negative-exponent counterpart
        beta = -alpha - e_{m+1}.  The unit shift at puncture m + 1 is the
        dt/(t - x_{m+1}) factor of the pairing form.
        """
        a = self.alphas[: self.n_finite].copy()
        if side == "fin":
            a = -a
        a[self.m + 1] -= 1.0
        return a

    def shifted_alphas(self) -> np.ndarray:
        """Exponents after the scene's parameter shift."""
        a = self.alphas.copy()
        if self.shift == "none":
            return a
        sgn = 1.0 if self.shift == "hat" else -1.0
        i_hub = self.alignment.point(self.m + 1)
        i_last = self.alignment.point(self.m + 2)
        a[i_hub] += sgn
        a[i_last] += sgn
        a[self.m + 1] -= sgn
        a[self.m + 2] -= sgn
        return a

    def require_lf_integrable(self) -> None:
        """Check every open-arc endpoint exponent is integrable.

        The arcs run from the hub (slot m+1 puncture) to each of the
        slot-0..m punctures; at an endpoint puncture j the integrand
        behaves like (t - x_j)^{beta_j}, which is improperly integrable
        iff Re(beta_j) > -1.
        """
        b = self.beta("lf")
        al = self.alignment
        ends = [al.point(k) for k in range(self.m + 2)]
        for j in ends:
            if b[j].real <= -1.0:
                raise EndpointDivergence(
                    f"arc endpoint exponent {b[j]:.6g} at puncture {j} "
                    "has real part <= -1")


def _is_near_integer(z: complex, tol: float = _INT_TOL) -> bool:
    return abs(z.imag) <= tol and abs(z.real - round(z.real)) <= tol


def _positions(m: int, x_movable) -> np.ndarray:
    xs = np.empty(m + 2)
    xs[0] = 0.0
    xs[1: m + 1] = x_movable
    xs[m + 1] = 1.0
    return xs


def scene_from_alphas(alphas, x, shift: str = "none",
                      quad_tol: float = 1e-10,
                      max_level: int = 10) -> NumericScene:
    """Build and validate a scene from raw exponents and a base point.

    Parameters
    ----------
    alphas : sequence
        Length m + 3.  Python ints mark integral exponents; everything
        else is treated as a non-integral complex exponent.
    x : sequence of float
        The m movable puncture positions; 0 and 1 are adjoined.  All
        m + 2 finite positions must be distinct, and every integral
        puncture must lie left of every non-integral one.
    shift : str
        "hat" validates the lf-side hypotheses, "check" the fin-side
        ones, "none" skips both.
    quad_tol, max_level : float, int
        Quadrature targets stored on the scene.

    Raises
    ------
    SceneError
        Malformed input, non-zero exponent sum, integral last exponent,
        position clashes, or slot-order violations.
    ConditionViolated
        The shift-specific parameter hypotheses fail.
    """
    if shift not in ("hat", "check", "none"):
        raise SceneError(f"unknown shift {shift!r}")
    m = len(alphas) - 3
    if m < 1:
        raise SceneError("need at least four exponents")
    if len(x) != m:
        raise SceneError(f"expected {m} movable positions, got {len(x)}")

    numeric = []
    integral = []
    for i, v in enumerate(alphas):
        if isinstance(v, bool):
            raise SceneError("boolean exponent")
        if isinstance(v, int):
            integral.append(i)
            numeric.append(complex(v))
        else:
            numeric.append(complex(v))
    av = np.array(numeric, dtype=complex)
    if abs(av.sum()) > _SUM_TOL:
        raise SceneError(f"exponents sum to {av.sum():.3e}, not 0")
    for i in range(m + 3):
        if i not in integral and _is_near_integer(av[i]):
            raise SceneError(
                f"exponent {i} declared non-integral but equals "
                f"{av[i]:.3g} within tolerance")
    if m + 2 in integral:
        raise SceneError(
            "integral last exponent sends a puncture to -infinity; "
            "not representable by finite paths")

    # Fresh symbol per non-integral index; the final one closes the
    # multiplier product to 1.
    non_int = [i for i in range(m + 3) if i not in integral]
    entries: list[Integral | NonIntegral] = [None] * (m + 3)
    for i in integral:
        entries[i] = Integral(int(round(av[i].real)))
    closing = non_int[-1]
    prod = Monomial()
    for i in non_int[:-1]:
        sym = Monomial({f"l{i}": 1})
        entries[i] = NonIntegral(sym, complex(av[i]))
        prod = prod * sym
    entries[closing] = NonIntegral(prod.inverse(), complex(av[closing]))
    ps = ParameterSystem(m, tuple(entries))
    validate_params(ps)

    xs = _positions(m, [float(v) for v in x])
    if np.min(np.abs(xs[:, None] - xs[None, :])
              + np.eye(m + 2)) <= 0.0:
        raise SceneError("puncture positions must be distinct")

    # Slot order: ascending position among finite punctures, infinity
    # last; the integral punctures must come out as a prefix.
    order = list(np.argsort(xs, kind="stable")) + [m + 2]
    order = [int(v) for v in order]
    r = len(integral)
    if sorted(order[:r]) != sorted(integral):
        raise SceneError(
            "integral punctures must lie left of all non-integral ones "
            f"(positions give slot order {order})")
    al = validate_alignment(ps, order)

    assignment = {f"l{i}": cmath.exp(2j * cmath.pi * av[i])
                  for i in non_int[:-1]}
    for i in non_int:
        got = entries[i].multiplier.evaluate(assignment)
        want = cmath.exp(2j * cmath.pi * av[i])
        if abs(got - want) > _LAMBDA_TOL:
            raise SceneError(
                f"multiplier mismatch at index {i}: monomial gives "
                f"{got:.12g}, exponent gives {want:.12g}")

    scene = NumericScene(ps, al, av, xs, shift, assignment,
                         float(quad_tol), int(max_level))
    _check_shift_conditions(scene)
    return scene


def _check_shift_conditions(scene: NumericScene) -> None:
    """Enforce the hypotheses under which the periods solve the system."""
    if scene.shift == "none":
        return
    m = scene.m
    al = scene.alignment
    a = scene.alphas
    for slot in (m, m + 1, m + 2):
        v = a[al.point(slot)]
        if _is_near_integer(v):
            raise ConditionViolated(
                f"exponent in slot {slot} must be non-integral, got {v:.4g}")
    s = a[al.point(m + 1)] + a[al.point(m + 2)]
    if abs(s) <= _INT_TOL:
        raise ConditionViolated(
            "exponents in the last two slots must not sum to zero")
    shifted = scene.shifted_alphas()
    for i, v in enumerate(shifted):
        if not _is_near_integer(v):
            continue
        n = round(v.real)
        if scene.shift == "hat" and n <= -1:
            raise ConditionViolated(
                f"shifted exponent {i} is the negative integer {n}")
        if scene.shift == "check" and n <= 0:
            raise ConditionViolated(
                f"shifted exponent {i} is the non-positive integer {n}")


def scene_from_json(obj) -> NumericScene:
    """Build a scene from configuration JSON.

    Expected shape::

        { "alphas": [int or [re, im], ...],
          "x": [x_1, ..., x_m],
          "shift": "hat" | "check" | "none",
          "quad": {"tol": float, "max_level": int} }

    A "loop" key may be present; it is read by the continuation layer,
    not here.
    """
    if not isinstance(obj, dict):
        raise SceneError("config must be a JSON object")
    try:
        raw = obj["alphas"]
        xm = obj["x"]
    except KeyError as exc:
        raise SceneError(f"missing config key {exc}") from None
    alphas = []
    for v in raw:
        if isinstance(v, bool):
            raise SceneError("boolean exponent")
        if isinstance(v, int):
            alphas.append(v)
        elif isinstance(v, (list, tuple)) and len(v) == 2:
            alphas.append(complex(float(v[0]), float(v[1])))
        elif isinstance(v, float):
            alphas.append(complex(v))
        else:
            raise SceneError(f"bad exponent entry {v!r}")
    shift = obj.get("shift", "none")
    quad = obj.get("quad", {})
    if not isinstance(quad, dict):
        raise SceneError("quad must be an object")
    return scene_from_alphas(
        alphas, [float(v) for v in xm], shift,
        quad_tol=float(quad.get("tol", 1e-10)),
        max_level=int(quad.get("max_level", 10)))
