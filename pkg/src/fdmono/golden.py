"""Worked three-variable configuration with its expected circuit matrices.

A fixed m = 3 instance: the exponents at 0 and x_1 are integers, the
remaining four are not, the multipliers at x_2 and x_3 are reciprocal
(s and s^-1), the one at 1 is an independent symbol u, and infinity
carries the closure u^-1.  The slot order is the identity.  For this
configuration every circuit matrix has a short closed form; the table
below stores them as rational-function strings, and ``verify_golden``
checks the engine's output against them entry by entry with exact
rational-function equality, so normalization differences can never
produce a false mismatch.
"""

from __future__ import annotations

from .exactfield import RatMatrix, parse_monomial, parse_ratfunc, ratfunc_eq
from .homology import Alignment, Integral, NonIntegral, ParameterSystem, validate_alignment
from .monodromy import CircuitCache, make_generator
from .reports import Check, VerificationReport

_ID4 = ("1", "0", "0", "0",
        "0", "1", "0", "0",
        "0", "0", "1", "0",
        "0", "0", "0", "1")

# Rows are flattened 4 x 4; entries use the substitution lambda_2 = s,
# lambda_3 = s^-1, lambda_4 = u.
GOLDEN_TABLE: dict[tuple[int, int], dict[str, tuple[str, ...]]] = {
    (0, 1): {"M": _ID4, "N": _ID4},
    (0, 2): {
        "M": ("s", "0", "1-s", "0",
              "0", "1", "0", "0",
              "0", "0", "1", "0",
              "0", "0", "0", "1"),
        "N": ("s^-1", "0", "(s-1)/s", "0",
              "0", "1", "0", "0",
              "0", "0", "1", "0",
              "0", "0", "0", "1"),
    },
    (0, 3): {
        "M": ("s^-1", "0", "0", "1-s^-1",
              "0", "1", "0", "0",
              "0", "0", "1", "0",
              "0", "0", "0", "1"),
        "N": ("s", "0", "(s-1)*(s^-1-1)/(s*s^-1)", "(s^-1-1)/s^-1",
              "0", "1", "0", "0",
              "0", "0", "1", "0",
              "0", "0", "0", "1"),
    },
    (1, 2): {
        "M": ("1", "0", "0", "0",
              "0", "s", "1-s", "0",
              "0", "0", "1", "0",
              "0", "0", "0", "1"),
        "N": ("1", "0", "0", "0",
              "0", "s^-1", "(s-1)/s", "0",
              "0", "0", "1", "0",
              "0", "0", "0", "1"),
    },
    (1, 3): {
        "M": ("1", "0", "0", "0",
              "0", "s^-1", "0", "1-s^-1",
              "0", "0", "1", "0",
              "0", "0", "0", "1"),
        "N": ("1", "0", "0", "0",
              "0", "s", "(s-1)*(s^-1-1)/(s*s^-1)", "(s^-1-1)/s^-1",
              "0", "0", "1", "0",
              "0", "0", "0", "1"),
    },
    (1, 4): {
        "M": ("1", "0", "0", "0",
              "0", "u", "0", "0",
              "0", "0", "1", "0",
              "0", "0", "0", "1"),
        "N": ("1", "0", "0", "0",
              "0", "u^-1", "(1-s)/(s*u)", "(1-s^-1)/(s^-1*u)",
              "0", "0", "1", "0",
              "0", "0", "0", "1"),
    },
    (2, 3): {
        "M": ("1", "0", "0", "0",
              "0", "1", "0", "0",
              "0", "0", "2-s", "s-1",
              "0", "0", "1-s", "s"),
        "N": ("1", "0", "0", "0",
              "0", "1", "0", "0",
              "0", "0", "(2*s-1)/s", "1-s",
              "0", "0", "(s-1)/s^2", "s^-1"),
    },
    (2, 4): {
        "M": ("1", "0", "s-1", "0",
              "0", "1", "s-1", "0",
              "0", "0", "s*u", "0",
              "0", "0", "u*(s-1)", "1"),
        "N": ("1", "0", "0", "0",
              "0", "1", "0", "0",
              "0", "0", "1/(s*u)", "(1-s^-1)/(s^-1*u)",
              "0", "0", "0", "1"),
    },
    (3, 4): {
        "M": ("1", "0", "0", "s^-1-1",
              "0", "1", "0", "s^-1-1",
              "0", "0", "1", "s^-1-1",
              "0", "0", "0", "s^-1*u"),
        "N": ("1", "0", "0", "0",
              "0", "1", "0", "0",
              "0", "0", "1", "0",
              "0", "0", "(1-s)/s", "1/(s^-1*u)"),
    },
}


def golden_parameters() -> tuple[ParameterSystem, Alignment]:
    """The fixed configuration the table belongs to."""
    ps = ParameterSystem(3, (
        Integral(1),
        Integral(-1),
        NonIntegral(parse_monomial("s")),
        NonIntegral(parse_monomial("s^-1")),
        NonIntegral(parse_monomial("u")),
        NonIntegral(parse_monomial("u^-1")),
    ))
    al = validate_alignment(ps, (0, 1, 2, 3, 4, 5))
    return ps, al


def golden_matrices() -> dict[tuple[int, int], dict[str, RatMatrix]]:
    """The table parsed into exact matrices."""
    out: dict[tuple[int, int], dict[str, RatMatrix]] = {}
    for pair, sides in GOLDEN_TABLE.items():
        out[pair] = {}
        for key, flat in sides.items():
            rows = [[parse_ratfunc(flat[4 * i + j]) for j in range(4)]
                    for i in range(4)]
            out[pair][key] = RatMatrix(rows)
    return out


def verify_golden() -> VerificationReport:
    """Engine circuit matrices against the embedded table, exactly."""
    ps, al = golden_parameters()
    cache = CircuitCache(ps, al)
    expected = golden_matrices()
    report = VerificationReport(header={"suite": "golden", "m": ps.m})
    for pair in sorted(expected):
        g = make_generator(ps.m, *pair)
        for key in ("M", "N"):
            got = cache.matrix(g, key)
            want = expected[pair][key]
            ok = (got.rows == want.rows and got.cols == want.cols and all(
                ratfunc_eq(got.entry(i, j), want.entry(i, j))
                for i in range(4) for j in range(4)))
            witness = None
            if not ok:
                bad = [(i, j) for i in range(4) for j in range(4)
                       if not ratfunc_eq(got.entry(i, j), want.entry(i, j))]
                witness = {"mismatched_entries": bad[:4]}
            report.add(Check(f"{key}{pair[0]}{pair[1]}", ok, witness))
    return report
