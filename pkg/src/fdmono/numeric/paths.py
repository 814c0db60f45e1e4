"""Branch-carrying integration paths and twisted period vectors.

Every period integral in this package has the form

    integral  exp( sum_j beta_j log(t - x_j) ) dt

over an arc or circle, where the logarithm branches are fixed on the
upper half plane and then carried by continuity.  A path is a polyline
whose vertices each store one logarithm per finite puncture; integration
snaps quadrature-node logarithms to the linear interpolation of the
vertex values, so branch choices are locked even when a path has been
dragged below the real axis by a continuation step.

Open arcs may terminate on punctures; their terminal edges are
integrated by tanh-sinh in the distance-to-puncture variable, which
absorbs the algebraic endpoint factor.  All other edges use adaptive
Gauss-Legendre panels with clearance-based splitting.  Straight chords
between vertices carry no geometric error: a polygon is homotopic to any
smooth path with the same vertices as long as no puncture sits between
them, which the clearance rules enforce.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .quadrature import gauss_nodes_unit, tanh_sinh_nodes
from .scene import ConditionViolated, NumericScene, SceneError

TWO_PI = 2.0 * np.pi

# Geometry defaults, all relative to the smallest puncture gap:
# travel height of arcs, circle radius (= terminal height), length of the
# protected stub edges ending on punctures, and edge-length-to-clearance
# ratio for panel splitting.
ARC_HEIGHT = 1.0 / 6.0
CIRCLE_RADIUS = 1.0 / 16.0
STUB = 1.0 / 32.0
KAPPA = 0.5
CIRCLE_VERTICES = 48

_GL_N = 16
_MAX_SPLIT_DEPTH = 14


class QuadratureTrouble(Exception):
    """An edge integral failed to reach its accuracy target."""


@dataclass
class BranchPath:
    """Polyline with per-puncture logarithm carriers at every vertex.

    Attributes
    ----------
    vertices : ndarray
        Complex positions, shape (n,).
    logs : ndarray
        log(vertex - x_j) continued along the path, shape (n, P) for P
        finite punctures.  The entry for a puncture at which the path
        terminates is NaN at that terminal vertex only.
    start_puncture, end_puncture : int or None
        Puncture index when the corresponding endpoint lies on one.
    closed : bool
        Whether the path is a closed polygon (equal first/last vertex;
        logs differ by the winding).
    center : int or None
        For closed paths, the puncture the polygon encircles once
        counterclockwise.
    """

    vertices: np.ndarray
    logs: np.ndarray
    start_puncture: int | None = None
    end_puncture: int | None = None
    closed: bool = False
    center: int | None = None

    def copy(self) -> "BranchPath":
        return BranchPath(self.vertices.copy(), self.logs.copy(),
                          self.start_puncture, self.end_puncture,
                          self.closed, self.center)

    @property
    def exempt(self) -> set[int]:
        """Punctures excluded from this path's clearance checks."""
        out = set()
        if self.start_puncture is not None:
            out.add(self.start_puncture)
        if self.end_puncture is not None:
            out.add(self.end_puncture)
        if self.center is not None:
            out.add(self.center)
        return out


@dataclass
class Chain:
    """Formal complex combination of branch paths."""

    pieces: list[tuple[complex, BranchPath]]

    def copy(self) -> "Chain":
        return Chain([(c, p.copy()) for c, p in self.pieces])


def snap_to_reference(raw: np.ndarray, ref: np.ndarray) -> np.ndarray:
    """Shift principal logs by multiples of 2 pi i to track a reference."""
    k = np.round((ref.imag - raw.imag) / TWO_PI)
    return raw + 1j * TWO_PI * k


def march_logs(vertices: np.ndarray, x: np.ndarray,
               start_puncture: int | None = None,
               end_puncture: int | None = None,
               jump_limit: float = 0.5 * np.pi) -> np.ndarray:
    """Continue log(t - x_j) along a polyline from principal seeds.

    The first vertex takes principal values (the upper-half-plane branch
    on and above the real axis); successive vertices add the 2 pi i
    multiple that keeps consecutive imaginary parts closest.  Terminal
    vertices lying on a puncture get NaN for that puncture's factor.

    Raises
    ------
    ValueError
        If a single step would rotate some factor by jump_limit or more,
        which means the polyline is too coarse to fix branches.
    """
    n = len(vertices)
    diffs = vertices[:, None] - x[None, :]
    if start_puncture is not None:
        diffs[0, start_puncture] = diffs[1, start_puncture]
    if end_puncture is not None:
        diffs[-1, end_puncture] = diffs[-2, end_puncture]
    raw = np.log(diffs)
    steps = np.round((raw.imag[:-1] - raw.imag[1:]) / TWO_PI)
    wind = np.zeros((n, x.size))
    np.cumsum(steps, axis=0, out=wind[1:])
    logs = raw + 1j * TWO_PI * wind
    jumps = np.abs(np.diff(logs.imag, axis=0))
    if jumps.size and np.max(jumps) >= jump_limit:
        raise ValueError(
            f"branch increment {np.max(jumps):.3f} exceeds {jump_limit:.3f}; "
            "polyline too coarse")
    if start_puncture is not None:
        logs[0, start_puncture] = complex(np.nan, np.nan)
    if end_puncture is not None:
        logs[-1, end_puncture] = complex(np.nan, np.nan)
    return logs


def _refine(points: list[complex], x: np.ndarray, gap: float,
            protect_first: bool, protect_last: bool) -> np.ndarray:
    """Bisect edges until length <= min(max_len, KAPPA * clearance).

    Clearance is the distance from the edge midpoint to the nearest
    puncture; stub edges ending on punctures are protected from
    splitting (their singular factor is handled analytically).
    """
    max_len = gap * ARC_HEIGHT
    out: list[complex] = [points[0]]
    for i in range(len(points) - 1):
        if (protect_first and i == 0) or \
                (protect_last and i == len(points) - 2):
            out.append(points[i + 1])
            continue
        stack = [(points[i], points[i + 1])]
        while stack:
            a, b = stack.pop()
            mid = 0.5 * (a + b)
            clr = np.min(np.abs(mid - x))
            if abs(b - a) > min(max_len, KAPPA * clr):
                stack.append((mid, b))
                stack.append((a, mid))
            else:
                out.append(b)
    return np.array(out, dtype=complex)


def arc_path(scene: NumericScene, start: complex, end: complex,
             start_puncture: int | None = None,
             end_puncture: int | None = None,
             height: float | None = None) -> BranchPath:
    """Rise-run-descend polyline between two points near the real axis.

    The path climbs vertically from `start`, crosses at the travel
    height, and descends to `end`.  When an endpoint sits exactly on a
    puncture, a protected stub edge of length STUB * gap is inserted
    there so the singular factor stays within one straight edge.
    """
    gap = scene.gap
    h = gap * ARC_HEIGHT if height is None else height
    stub = gap * STUB
    pts: list[complex] = [start]
    if start_puncture is not None:
        pts.append(start + 1j * stub)
    pts.append(complex(start.real, h))
    pts.append(complex(end.real, h))
    if end_puncture is not None:
        pts.append(end + 1j * stub)
    pts.append(end)
    verts = _refine(pts, scene.x, gap,
                    start_puncture is not None, end_puncture is not None)
    logs = march_logs(verts, scene.x, start_puncture, end_puncture)
    return BranchPath(verts, logs, start_puncture, end_puncture)


def circle_path(scene: NumericScene, center: int,
                radius: float | None = None,
                n_vertices: int = CIRCLE_VERTICES) -> BranchPath:
    """Counterclockwise polygon around one puncture, based at its top.

    Starts and ends at center + i * radius, so it shares its base point
    with the arc terminals at the same height.
    """
    rho = scene.gap * CIRCLE_RADIUS if radius is None else radius
    theta = 0.5 * np.pi + TWO_PI * np.arange(n_vertices + 1) / n_vertices
    verts = scene.x[center] + rho * np.exp(1j * theta)
    verts[-1] = verts[0]
    logs = march_logs(verts, scene.x)
    wind = logs[-1] - logs[0]
    expect = np.zeros(scene.n_finite, dtype=complex)
    expect[center] = 1j * TWO_PI
    if np.max(np.abs(wind - expect)) > 1e-9:
        raise SceneError("circle winding check failed")
    return BranchPath(verts, logs, closed=True, center=center)


# ---------------------------------------------------------------------------
# integration


def _gl_raw(v0, v1, l0, l1, beta, x, n=_GL_N):
    s, w = gauss_nodes_unit(n)
    t = v0 + s * (v1 - v0)
    ref = l0[None, :] + s[:, None] * (l1 - l0)[None, :]
    logs = snap_to_reference(np.log(t[:, None] - x[None, :]), ref)
    f = np.exp(logs @ beta)
    return (v1 - v0) * np.sum(w * f)


def _mid_logs(v0, v1, l0, l1, x):
    vm = 0.5 * (v0 + v1)
    ref = 0.5 * (l0 + l1)
    return vm, snap_to_reference(np.log(vm - x), ref)


def _gl_edge(v0, v1, l0, l1, beta, x, tol, depth=0):
    vm, lm = _mid_logs(v0, v1, l0, l1, x)
    clr = np.min(np.abs(vm - x))
    too_long = abs(v1 - v0) > KAPPA * clr
    if not too_long:
        whole = _gl_raw(v0, v1, l0, l1, beta, x)
        halves = _gl_raw(v0, vm, l0, lm, beta, x) \
            + _gl_raw(vm, v1, lm, l1, beta, x)
        err = abs(whole - halves)
        if err <= tol or depth >= _MAX_SPLIT_DEPTH:
            return halves, err
    if depth >= _MAX_SPLIT_DEPTH:
        raise QuadratureTrouble("panel recursion exhausted")
    av, ae = _gl_edge(v0, vm, l0, lm, beta, x, 0.5 * tol, depth + 1)
    bv, be = _gl_edge(vm, v1, lm, l1, beta, x, 0.5 * tol, depth + 1)
    return av + bv, ae + be


def _ts_edge(v_sing, v_reg, l_sing, l_reg, p, beta, x, tol, max_level):
    """Integrate from a singular vertex on puncture p to a regular one.

    Parametrized t = v_sing + sigma (v_reg - v_sing); the factor
    (t - x_p)^{beta_p} becomes exp(beta_p (log sigma + log d)) with log d
    read from the regular vertex's carrier, which pins its branch.
    Weights are folded in logarithmically so steep endpoint factors
    cannot overflow.
    """
    d = v_reg - v_sing
    log_d = l_reg[p]
    others = [j for j in range(x.size) if j != p]
    bo = beta[others]
    lo0 = l_sing[others]
    lo1 = l_reg[others]
    prev = None
    err = np.inf
    for level in range(3, max_level + 1):
        s, cs, w = tanh_sinh_nodes(level)
        t = v_sing + s * d
        ref = lo0[None, :] + s[:, None] * (lo1 - lo0)[None, :]
        logs = snap_to_reference(np.log(t[:, None] - x[None, others]), ref)
        acc = logs @ bo + beta[p] * (np.log(s) + log_d) + np.log(w)
        val = d * np.sum(np.exp(acc))
        if prev is not None:
            err = abs(val - prev)
            if level >= 4 and err <= tol * max(1.0, abs(val)):
                return val, err
        prev = val
    return prev, err


def integrate_path(path: BranchPath, beta: np.ndarray, x: np.ndarray,
                   tol: float = 1e-12, max_level: int = 10) -> tuple[complex, float]:
    """Integrate exp(beta . logs) dt along a path; returns (value, error).

    The error is the sum of per-edge estimates: Gauss panels report the
    whole-versus-halves difference, tanh-sinh edges the last inter-level
    difference.
    """
    v = path.vertices
    logs = path.logs
    n_edges = len(v) - 1
    edge_tol = tol / max(8, n_edges)
    total = 0.0 + 0.0j
    err = 0.0
    first = 0
    last = n_edges
    if path.start_puncture is not None:
        val, e = _ts_edge(v[0], v[1], logs[0], logs[1],
                          path.start_puncture, beta, x, edge_tol, max_level)
        total += val
        err += e
        first = 1
    if path.end_puncture is not None:
        val, e = _ts_edge(v[-1], v[-2], logs[-1], logs[-2],
                          path.end_puncture, beta, x, edge_tol, max_level)
        total -= val
        err += e
        last = n_edges - 1
    for i in range(first, last):
        val, e = _gl_edge(v[i], v[i + 1], logs[i], logs[i + 1],
                          beta, x, edge_tol)
        total += val
        err += e
    return total, err


def integrate_chain(chain: Chain, beta: np.ndarray, x: np.ndarray,
                    tol: float = 1e-12,
                    max_level: int = 10) -> tuple[complex, float]:
    total = 0.0 + 0.0j
    err = 0.0
    for coeff, path in chain.pieces:
        val, e = integrate_path(path, beta, x, tol, max_level)
        total += coeff * val
        err += abs(coeff) * e
    return total, err


def circle_trapezoid(scene: NumericScene, center: int, beta: np.ndarray,
                     radius: float | None = None, n: int = 256) -> complex:
    """Independent closed-circle integral via the trapezoid rule.

    Uses the exact circle parametrization and its analytic derivative.
    When the center exponent is an integer the integrand is periodic and
    convergence is spectral; otherwise the branch fails to close and the
    endpoint term below restores plain trapezoid accuracy.  Serves as an
    oracle for the polygon rule.
    """
    rho = scene.gap * CIRCLE_RADIUS if radius is None else radius
    theta = 0.5 * np.pi + TWO_PI * np.arange(n) / n
    z = scene.x[center] + rho * np.exp(1j * theta)
    logs = np.log(z[:, None] - scene.x[None, :])
    im = logs.imag.copy()
    steps = np.round((im[:-1] - im[1:]) / TWO_PI)
    wind = np.zeros_like(im)
    np.cumsum(steps, axis=0, out=wind[1:])
    logs = logs + 1j * TWO_PI * wind
    logs[:, center] = np.log(rho) + 1j * theta
    f = np.exp(logs @ beta)
    g = f * 1j * rho * np.exp(1j * theta)
    # The value at theta = 2 pi continues the branch: the center factor
    # has gained a full turn, the others none.
    g_end = g[0] * np.exp(1j * TWO_PI * beta[center])
    return complex((np.sum(g) + 0.5 * (g_end - g[0])) * TWO_PI / n)


# ---------------------------------------------------------------------------
# cycle construction


def lf_cycles(scene: NumericScene) -> list[Chain]:
    """Open-arc cycles: hub puncture to each slot-k puncture, k = 0..m.

    The hub is the puncture in slot m+1, the rightmost finite one; every
    target lies to its left, so each arc is a single rise-run-descend
    path with both endpoints singular.
    """
    scene.require_lf_integrable()
    al = scene.alignment
    hub = al.point(scene.m + 1)
    a = complex(scene.x[hub])
    chains = []
    for k in range(scene.m + 1):
        tgt = al.point(k)
        b = complex(scene.x[tgt])
        path = arc_path(scene, a, b, start_puncture=hub, end_puncture=tgt)
        chains.append(Chain([(1.0 + 0.0j, path)]))
    return chains


def fin_cycles(scene: NumericScene) -> list[Chain]:
    """Compact cycles: circles, with connecting arcs for non-integral slots.

    Slot k < r is a pure circle with coefficient -1.  Slot k >= r is the
    regularized combination: the terminal-to-terminal arc weighted by
    (lam_k^{-1} - 1), minus the circle at the target, plus the hub circle
    weighted by (lam_k^{-1} - 1)/(lam_hub^{-1} - 1).  Terminals sit at
    height equal to the circle radius, so arcs land exactly on the circle
    base points.
    """
    al = scene.alignment
    m = scene.m
    hub = al.point(m + 1)
    rho = scene.gap * CIRCLE_RADIUS
    a_hat = scene.x[hub] + 1j * rho
    lam_hub_inv = 1.0 / scene.lam(hub)
    chains = []
    for k in range(m + 1):
        tgt = al.point(k)
        if k < al.r:
            chains.append(Chain([(-1.0 + 0.0j, circle_path(scene, tgt))]))
            continue
        lam_inv = 1.0 / scene.lam(tgt)
        c_arc = lam_inv - 1.0
        c_hub = (lam_inv - 1.0) / (lam_hub_inv - 1.0)
        t_hat = scene.x[tgt] + 1j * rho
        arc = arc_path(scene, a_hat, t_hat, height=scene.gap * ARC_HEIGHT)
        chains.append(Chain([
            (c_arc, arc),
            (-1.0 + 0.0j, circle_path(scene, tgt)),
            (c_hub, circle_path(scene, hub)),
        ]))
    return chains


def build_cycles(scene: NumericScene, side: str) -> list[Chain]:
    if side == "lf":
        return lf_cycles(scene)
    if side == "fin":
        return fin_cycles(scene)
    raise SceneError(f"unknown side {side!r}")


@dataclass
class PeriodResult:
    """Period vector with per-component quadrature error estimates."""

    values: np.ndarray
    errors: np.ndarray
    cycles: list[Chain]


def integrate_cycles(scene: NumericScene, cycles: list[Chain],
                     side: str) -> tuple[np.ndarray, np.ndarray]:
    beta = scene.beta(side)
    vals = np.empty(len(cycles), dtype=complex)
    errs = np.empty(len(cycles))
    for k, chain in enumerate(cycles):
        vals[k], errs[k] = integrate_chain(
            chain, beta, scene.x, scene.quad_tol, scene.max_level)
    return vals, errs


def period_vector(scene: NumericScene, side: str) -> PeriodResult:
    """Build and integrate the full cycle basis for one side.

    Side "lf" requires shift "hat" and side "fin" requires "check":
    those shifts are what make the integrals land in the solution
    spaces the bases represent.
    """
    needed = {"lf": "hat", "fin": "check"}.get(side)
    if needed is None:
        raise SceneError(f"unknown side {side!r}")
    if scene.shift != needed:
        raise ConditionViolated(
            f"side {side!r} requires shift {needed!r}, scene has "
            f"{scene.shift!r}")
    cycles = build_cycles(scene, side)
    vals, errs = integrate_cycles(scene, cycles, side)
    return PeriodResult(vals, errs, cycles)
