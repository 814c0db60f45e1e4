"""Analytic continuation of period vectors along configuration loops.

A loop moves one puncture: for a generator (p, q) with p >= 1 the
puncture x_p travels into the upper half plane, runs across to x_q,
circles it once counterclockwise, and retraces its approach; (0, q) is
realized as x_q looping around x_0 the same way.  Each micro-step
carries every integration path by a puncture isotopy: vertices within R
of the mover translate with it, the displacement falls smoothly to zero
between R and 2R, and R is half the current minimal puncture gap, so the
other punctures never feel the motion.  Logarithm carriers are updated
by principal-branch snapping against their previous values, which is
valid exactly because each step's rotations stay well under a half turn.

At the end of the loop the punctures are back at the base point and the
deformed paths represent the continued cycles; integrating them and
comparing against the symbolic circuit matrices (specialized at the
scene's multiplier values) is the end-to-end monodromy check.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..monodromy import CircuitCache, Generator, all_generators, make_generator
from ..reports import Check, VerificationReport
from .paths import Chain, build_cycles, integrate_cycles, snap_to_reference
from .scene import NumericScene, SceneError

TWO_PI = 2.0 * np.pi

# Per-step branch rotation above which continuation aborts; geometry that
# healthy schedules produce stays far below it.
_JUMP_LIMIT = 0.5 * np.pi
# Edges are bisected until shorter than _SPLIT_RATIO times their distance
# to the nearest puncture, so chords stay faithful where the isotopy
# bends paths and can never sweep across a puncture.
_SPLIT_RATIO = 0.35
# Path-to-puncture distance (relative to the initial gap) below which the
# continuation gives up.
_CLEAR_FRACTION = 1e-3


class BranchJump(Exception):
    """A continuation step rotated some branch by half a turn or more."""


class ClearanceLost(Exception):
    """A path vertex came too close to a puncture it must avoid."""


@dataclass(frozen=True)
class LoopSchedule:
    """Discretized loop for one generator.

    Attributes
    ----------
    pair : tuple
        Generator (p, q); the mover is x_p unless p = 0, in which case
        x_q orbits x_0.
    steps : int
        Number of increments for the full circle; the approach legs use
        the same arc-length spacing.
    radius : float or None
        Orbit radius; None means a quarter of the smallest puncture gap.
    """

    pair: tuple[int, int]
    steps: int = 72
    radius: float | None = None


def schedule_from_json(obj, m: int) -> LoopSchedule:
    """Read a {"pair": [p, q], "steps": n, "radius": f} object."""
    if not isinstance(obj, dict) or "pair" not in obj:
        raise SceneError("loop config must be an object with a 'pair' key")
    pq = obj["pair"]
    if not (isinstance(pq, (list, tuple)) and len(pq) == 2):
        raise SceneError("loop pair must be [p, q]")
    g = make_generator(m, int(pq[0]), int(pq[1]))
    radius = obj.get("radius")
    return LoopSchedule((g.p, g.q), int(obj.get("steps", 72)),
                        None if radius is None else float(radius))


def mover_center(pair: tuple[int, int]) -> tuple[int, int]:
    """Which puncture moves and which is encircled."""
    p, q = pair
    return (p, q) if p >= 1 else (q, 0)


def loop_track(scene: NumericScene, schedule: LoopSchedule) -> np.ndarray:
    """Mover positions along the loop, closed: track[0] == track[-1].

    The mover climbs to height radius/2, runs horizontally to the circle
    entry point on its own side, makes one full counterclockwise turn,
    and retraces the approach exactly.
    """
    mv, ce = mover_center(schedule.pair)
    x0 = complex(scene.x[mv])
    xc = complex(scene.x[ce])
    rho = scene.gap / 4.0 if schedule.radius is None else schedule.radius
    steps = int(schedule.steps)
    if steps < 1:
        raise SceneError("steps must be positive")
    if rho == 0.0:
        return np.array([x0, x0], dtype=complex)
    if not 0.0 < rho < 0.5 * scene.gap:
        raise SceneError(
            f"loop radius {rho:.4g} must lie in (0, {0.5 * scene.gap:.4g})")
    h = 0.5 * rho
    sgn = 1.0 if x0.real >= xc.real else -1.0
    entry = xc + sgn * np.sqrt(rho * rho - h * h) + 1j * h
    pitch = TWO_PI * rho / steps

    def leg(a: complex, b: complex) -> list[complex]:
        n = max(1, int(np.ceil(abs(b - a) / pitch)))
        return [a + (b - a) * j / n for j in range(1, n + 1)]

    approach = [x0] + leg(x0, x0 + 1j * h) + leg(x0 + 1j * h, entry)
    theta0 = np.angle(entry - xc)
    circle = [xc + rho * np.exp(1j * (theta0 + TWO_PI * j / steps))
              for j in range(1, steps + 1)]
    circle[-1] = entry
    back = approach[-2::-1]
    return np.array(approach + circle + back, dtype=complex)


def _smooth_falloff(d: np.ndarray, r: float) -> np.ndarray:
    """1 inside r, cosine rolloff to 0 at 2r."""
    out = np.zeros_like(d)
    out[d <= r] = 1.0
    band = (d > r) & (d < 2.0 * r)
    out[band] = 0.5 * (1.0 + np.cos(np.pi * (d[band] - r) / r))
    return out


def _split_edges(path, punct: np.ndarray) -> None:
    """Bisect edges until each is short against its puncture clearance.

    An edge of length at most _SPLIT_RATIO times its midpoint's distance
    to the nearest puncture has segment clearance above 0.98 of its
    vertex clearance, so a chord can never sweep across a puncture that
    its endpoints avoid.  A terminal edge ignores its own puncture in
    the distance (it ends there by design) but still splits when other
    punctures come close; splitting it leaves a shorter edge for the
    tanh-sinh rule plus an ordinary carrier vertex.
    """
    for _ in range(12):
        v = path.vertices
        mids = 0.5 * (v[:-1] + v[1:])
        lens = np.abs(np.diff(v))
        d_all = np.abs(mids[:, None] - punct[None, :])
        if path.start_puncture is not None:
            d_all[0, path.start_puncture] = np.inf
        if path.end_puncture is not None:
            d_all[-1, path.end_puncture] = np.inf
        need = lens > _SPLIT_RATIO * np.min(d_all, axis=1)
        if not np.any(need):
            return
        idx = np.nonzero(need)[0]
        new_v = np.insert(v, idx + 1, mids[idx])
        la = path.logs[idx]
        lb = path.logs[idx + 1]
        mid_ref = 0.5 * (la + lb)
        bad = np.isnan(mid_ref)
        mid_ref[bad] = np.where(np.isnan(la), lb, la)[bad]
        with np.errstate(divide="ignore", invalid="ignore"):
            mid_logs = snap_to_reference(
                np.log(mids[idx][:, None] - punct[None, :]), mid_ref)
        path.logs = np.insert(path.logs, idx + 1, mid_logs, axis=0)
        path.vertices = new_v


def _continue_track(scene: NumericScene, chains: list[Chain],
                    track: np.ndarray, mover: int,
                    eps_clear: float) -> list[Chain]:
    """Carry copies of the chains along a mover track; returns the copies."""
    out = [c.copy() for c in chains]
    paths = [p for c in out for _, p in c.pieces]
    punct = scene.x.astype(complex)
    if abs(punct[mover] - track[0]) > 1e-12:
        raise SceneError("track does not start at the mover's position")
    moved_any = False
    for k in range(len(track) - 1):
        delta = track[k + 1] - track[k]
        if delta == 0:
            continue
        moved_any = True
        gaps = np.abs(punct[:, None] - punct[None, :])
        np.fill_diagonal(gaps, np.inf)
        r = 0.5 * float(np.min(gaps))
        for path in paths:
            _split_edges(path, punct)
        for path in paths:
            eta = _smooth_falloff(np.abs(path.vertices - punct[mover]), r)
            path.vertices = path.vertices + eta * delta
        punct[mover] = track[k + 1]
        for path in paths:
            # Rounding in v + eta delta leaves pinned vertices a few ulp off
            # the mover; put them back exactly so the singular edge keeps its
            # endpoint on the puncture.
            if path.start_puncture == mover:
                path.vertices[0] = punct[mover]
            if path.end_puncture == mover:
                path.vertices[-1] = punct[mover]
        for path in paths:
            with np.errstate(divide="ignore", invalid="ignore"):
                raw = np.log(path.vertices[:, None] - punct[None, :])
                new_logs = snap_to_reference(raw, path.logs)
            if path.start_puncture is not None:
                new_logs[0, path.start_puncture] = complex(np.nan, np.nan)
            if path.end_puncture is not None:
                new_logs[-1, path.end_puncture] = complex(np.nan, np.nan)
            jumps = np.abs(new_logs.imag - path.logs.imag)
            worst = np.nanmax(jumps) if jumps.size else 0.0
            if worst >= _JUMP_LIMIT:
                raise BranchJump(
                    f"branch increment {worst:.3f} at step {k}; "
                    "increase the schedule's steps")
            path.logs = new_logs
        for path in paths:
            keep = [j for j in range(scene.n_finite) if j not in path.exempt]
            if not keep:
                continue
            d = np.abs(path.vertices[:, None] - punct[None, keep])
            if float(d.min()) < eps_clear:
                raise ClearanceLost(
                    f"path within {d.min():.2e} of puncture "
                    f"{keep[int(d.argmin()) % len(keep)]} at step {k}")
    if moved_any:
        for path in paths:
            _split_edges(path, punct)
    return out


def continue_chains(scene: NumericScene, chains: list[Chain],
                    schedule: LoopSchedule,
                    reverse: bool = False) -> list[Chain]:
    """Deform chain copies along the loop; the inputs are not modified.

    With reverse=True the track is traversed backwards, undoing a prior
    forward continuation up to isotopy.
    """
    track = loop_track(scene, schedule)
    if reverse:
        track = track[::-1]
    mv, _ = mover_center(schedule.pair)
    return _continue_track(scene, chains, track, mv,
                           _CLEAR_FRACTION * scene.gap)


def continue_loop(scene: NumericScene, schedule: LoopSchedule,
                  side: str | None = None) -> np.ndarray:
    """Period vector evaluated on the basis cycles continued along a loop.

    Builds the side's cycle basis, carries it once around the schedule's
    loop, and integrates the deformed paths.  A radius-0 schedule leaves
    every path untouched and reproduces the starting vector bit for bit.

    Parameters
    ----------
    scene : NumericScene
        The side must agree with the scene's shift ("hat" integrates the
        lf basis, "check" the fin basis).
    schedule : LoopSchedule
        Loop to traverse.
    side : {"lf", "fin"}, optional
        Defaults to the side selected by the scene's shift.
    """
    if side is None:
        side = scene.side
        if side is None:
            raise SceneError(
                "scene shift must be 'hat' (lf side) or 'check' (fin side)")
    chains = build_cycles(scene, side)
    moved = continue_chains(scene, chains, schedule)
    values, _ = integrate_cycles(scene, moved, side)
    return values


def numeric_circuit_matrix(scene: NumericScene, cache: CircuitCache,
                           g: Generator, side: str) -> np.ndarray:
    """The symbolic circuit matrix specialized at the scene's multipliers."""
    sym = cache.matrix(g, "M" if side == "lf" else "N")
    return np.array(sym.evaluate(scene.assignment), dtype=complex)


def verify_monodromy_numeric(scene: NumericScene,
                             generators: list | None = None,
                             steps: int | None = None,
                             radius: float | None = None,
                             tol: float = 1e-6,
                             closure: bool = True) -> VerificationReport:
    """End-to-end check: continued periods against circuit-matrix predictions.

    For every generator the relevant period vector is continued along
    the loop and compared with M . start (lf side, shift hat) or with
    transpose(N) . start (fin side, shift check); optionally the
    deformed paths are carried back along the reversed loop and compared
    with the start vector.

    Parameters
    ----------
    scene : NumericScene
        Must carry shift "hat" or "check"; this fixes the side.
    generators : list of Generator or (p, q) pairs, optional
        Generators to run; default all of them.
    steps, radius : optional
        Schedule overrides applied to every generator.
    tol : float
        Relative-residual threshold; loop closure uses 2 * tol.
    closure : bool
        Whether to run the reverse continuation check per generator.
    """
    side = scene.side
    if side is None:
        raise SceneError(
            "scene shift must be 'hat' (lf side) or 'check' (fin side)")
    if generators is None:
        gens = all_generators(scene.m)
    else:
        gens = [g if isinstance(g, Generator)
                else make_generator(scene.m, g[0], g[1])
                for g in generators]
    cycles = build_cycles(scene, side)
    base, base_err = integrate_cycles(scene, cycles, side)
    scale = float(np.linalg.norm(base))
    if scale == 0.0:
        raise SceneError("base period vector vanishes; nothing to compare")
    cache = CircuitCache(scene.params, scene.alignment)
    report = VerificationReport(header={
        "suite": "numeric-monodromy",
        "side": side,
        "steps": steps if steps is not None else 72,
        "tol": tol,
    })
    for g in gens:
        sched = LoopSchedule((g.p, g.q),
                             steps if steps is not None else 72, radius)
        moved = continue_chains(scene, cycles, sched)
        cont, cont_err = integrate_cycles(scene, moved, side)
        mat = numeric_circuit_matrix(scene, cache, g, side)
        pred = mat @ base if side == "lf" else mat.T @ base
        resid = float(np.linalg.norm(cont - pred)) / scale
        report.add(Check(
            f"monodromy-{side}-{g.p}{g.q}",
            resid <= tol,
            None if resid <= tol else {
                "residual": resid,
                "tol": tol,
                "quad_err": float(base_err.sum() + cont_err.sum()),
            },
        ))
        if closure:
            back = continue_chains(scene, moved, sched, reverse=True)
            again, _ = integrate_cycles(scene, back, side)
            resid2 = float(np.linalg.norm(again - base)) / scale
            report.add(Check(
                f"loop-closure-{g.p}{g.q}",
                resid2 <= 2.0 * tol,
                None if resid2 <= 2.0 * tol else {
                    "residual": resid2, "tol": 2.0 * tol},
            ))
    return report
