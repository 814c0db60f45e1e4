"""Command-line front end.

Subcommands construct circuit matrices from a parameter file, multiply
generator words, run the symbolic verification suites, reproduce the
embedded worked-example table, run the numeric monodromy check from a
scene configuration, and compare the series against its integral
representation.  Exit status: 0 when everything passed, 1 when a
verification ran and failed (the report is still printed), 2 on input
errors.  Output depends only on the arguments and declared seeds.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys

from .exactfield import ExactFieldError, RatMatrix, format_ratfunc
from .golden import golden_matrices, verify_golden
from .homology import ParameterError, params_from_json
from .monodromy import (
    CircuitCache,
    InvalidGenerator,
    circuit_matrices,
    make_generator,
    parse_word,
    run_suite,
    word_matrix,
)
from .numeric import verify_monodromy_numeric
from .numeric.scene import SceneError, scene_from_json
from .numeric.series import euler_integral_check
from .numeric.continuation import BranchJump, ClearanceLost

QUAD_TOL_ENV = "FDMONO_QUAD_TOL"

_INPUT_ERRORS = (
    ParameterError,
    InvalidGenerator,
    ExactFieldError,
    SceneError,
    OSError,
    json.JSONDecodeError,
    ValueError,
)


def _matrix_text(mat: RatMatrix) -> str:
    """Aligned text block, one bracketed row per line."""
    cells = [[format_ratfunc(mat.entry(i, j)) for j in range(mat.cols)]
             for i in range(mat.rows)]
    widths = [max(len(cells[i][j]) for i in range(mat.rows))
              for j in range(mat.cols)]
    lines = []
    for row in cells:
        padded = [cell.rjust(w) for cell, w in zip(row, widths)]
        lines.append("[ " + "  ".join(padded) + " ]")
    return "\n".join(lines)


def _matrix_json(mat: RatMatrix) -> list[list[str]]:
    return [[format_ratfunc(mat.entry(i, j)) for j in range(mat.cols)]
            for i in range(mat.rows)]


def _load_json(path: str):
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def _parse_pair(text: str) -> tuple[int, int]:
    parts = text.split(",")
    if len(parts) != 2:
        raise InvalidGenerator(f"pair must be 'P,Q', got {text!r}")
    return int(parts[0]), int(parts[1])


def _cmd_matrices(args) -> int:
    ps, al = params_from_json(_load_json(args.params))
    g = make_generator(ps.m, *_parse_pair(args.pair))
    pair = circuit_matrices(ps, al, g)
    if args.format == "json":
        obj = {"pair": [g.p, g.q],
               "M": _matrix_json(pair.m_matrix),
               "N": _matrix_json(pair.n_matrix)}
        print(json.dumps(obj, indent=2))
    else:
        print(f"M{g.label()}:")
        print(_matrix_text(pair.m_matrix))
        print(f"N{g.label()}:")
        print(_matrix_text(pair.n_matrix))
    return 0


def _cmd_word(args) -> int:
    ps, al = params_from_json(_load_json(args.params))
    word = parse_word(args.word, ps.m)
    mat = word_matrix(ps, al, word, args.side)
    print(_matrix_text(mat))
    return 0


def _cmd_verify(args) -> int:
    ps, al = params_from_json(_load_json(args.params))
    report = run_suite(ps, al, args.suite, seed=args.seed)
    report.header.setdefault("seed", args.seed)
    print(report.format_text())
    return 0 if report.passed else 1


def _cmd_section7(args) -> int:
    table = golden_matrices()
    for pair in sorted(table):
        for key in ("M", "N"):
            print(f"{key}{pair[0]}{pair[1]}:")
            print(_matrix_text(table[pair][key]))
    report = verify_golden()
    print(report.format_text())
    return 0 if report.passed else 1


def _cmd_numeric_verify(args) -> int:
    obj = _load_json(args.config)
    scene = scene_from_json(obj)
    env_tol = os.environ.get(QUAD_TOL_ENV)
    if env_tol is not None:
        scene = dataclasses.replace(scene, quad_tol=float(env_tol))
    loop = obj.get("loop") if isinstance(obj, dict) else None
    loop = loop if isinstance(loop, dict) else {}
    if args.pairs != "all":
        pairs = [_parse_pair(args.pairs)]
    elif "pair" in loop:
        pairs = [(int(loop["pair"][0]), int(loop["pair"][1]))]
    else:
        pairs = None
    steps = args.steps if args.steps is not None else loop.get("steps")
    radius = loop.get("radius")
    report = verify_monodromy_numeric(
        scene, generators=pairs,
        steps=None if steps is None else int(steps),
        radius=None if radius is None else float(radius),
        tol=args.tol)
    print(report.format_text())
    return 0 if report.passed else 1


def _cmd_euler_check(args) -> int:
    b = [float(v) for v in args.b.split(",") if v]
    x = [float(v) for v in args.x.split(",") if v]
    tol = args.tol
    env_tol = os.environ.get(QUAD_TOL_ENV)
    if env_tol is not None:
        tol = float(env_tol)
    res = euler_integral_check(args.a, b, args.c, x, tol=tol)
    print(f"series   {res.series.real:.15g} {res.series.imag:+.15g}j")
    print(f"integral {res.integral.real:.15g} {res.integral.imag:+.15g}j")
    print(f"rel_err  {res.rel_err:.3e}")
    print(f"status: {'pass' if res.passed else 'fail'} (tol {res.tol:.1e})")
    return 0 if res.passed else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fdmono",
        description="Exact circuit matrices and numeric monodromy checks "
                    "for twisted-cycle local systems.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("matrices", help="circuit matrix pair for one generator")
    p.add_argument("--params", required=True, help="parameter JSON file")
    p.add_argument("--pair", required=True, help="generator as 'P,Q'")
    p.add_argument("--format", choices=("json", "text"), default="text")
    p.set_defaults(func=_cmd_matrices)

    p = sub.add_parser("word", help="matrix of a generator word")
    p.add_argument("--params", required=True, help="parameter JSON file")
    p.add_argument("--word", required=True,
                   help="comma-separated letters PQ with optional ^-1")
    p.add_argument("--side", choices=("M", "N"), required=True)
    p.set_defaults(func=_cmd_word)

    p = sub.add_parser("verify", help="symbolic verification suites")
    p.add_argument("--params", required=True, help="parameter JSON file")
    p.add_argument("--suite", choices=("identities", "eigen", "blocks", "all"),
                   default="all")
    p.add_argument("--seed", type=int, default=0,
                   help="seed for randomized checks (echoed in the header)")
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser(
        "section7",
        help="print the worked-example matrices and check them")
    p.set_defaults(func=_cmd_section7)

    p = sub.add_parser("numeric-verify",
                       help="numeric monodromy check from a scene config")
    p.add_argument("--config", required=True, help="scene JSON file")
    p.add_argument("--pairs", default="all",
                   help="'all' or a single generator 'P,Q'")
    p.add_argument("--tol", type=float, default=1e-6,
                   help="relative residual tolerance")
    p.add_argument("--steps", type=int, default=None,
                   help="loop steps override")
    p.set_defaults(func=_cmd_numeric_verify)

    p = sub.add_parser("euler-check",
                       help="series versus integral representation")
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--b", required=True, help="comma-separated values")
    p.add_argument("--c", type=float, required=True)
    p.add_argument("--x", required=True, help="comma-separated values")
    p.add_argument("--tol", type=float, default=1e-8)
    p.set_defaults(func=_cmd_euler_check)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (BranchJump, ClearanceLost) as exc:
        print(f"error: continuation aborted: {exc}", file=sys.stderr)
        return 2
    except _INPUT_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
