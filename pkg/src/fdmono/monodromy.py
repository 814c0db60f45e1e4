"""Circuit matrices for puncture-exchange loops and their exact verification.

For each admissible pair (p, q) a loop that carries x_q once around x_p
(positively, through the upper half plane) acts on the two twisted-cycle
bases.  Both actions are rank-one perturbations of the identity built from
the intersection matrix and a pair of coordinate vectors; the suites below
verify the defining conjugation identity, eigenstructure, reflection form,
and the block structure forced by integral exponents.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass

from .exactfield import (
    RatFunc,
    RatMatrix,
    SingularSystem,
    mat_det,
    mat_inverse,
    mat_mul,
    mat_solve,
)
from .homology import (
    Alignment,
    Integral,
    ParameterSystem,
    det_check,
    extension_col,
    extension_row,
    intersection_matrix,
    pairing_check,
)
from .reports import Check, VerificationReport


class InvalidGenerator(Exception):
    """Raised for a pair (p, q) outside the generator range."""


class HypothesisViolated(Exception):
    """Raised when an operation's applicability condition fails."""


@dataclass(frozen=True)
class Generator:
    """The loop moving x_q once around x_p; for p = 0 the moving point is x_q."""

    p: int
    q: int

    def label(self) -> str:
        return f"{self.p}{self.q}"


def make_generator(m: int, p: int, q: int) -> Generator:
    if not (0 <= p < q <= m + 1):
        raise InvalidGenerator(f"need 0 <= p < q <= {m + 1}, got ({p}, {q})")
    if p == 0 and q == m + 1:
        raise InvalidGenerator(f"(0, {m + 1}) is not a generator")
    return Generator(p=p, q=q)


def all_generators(m: int) -> list[Generator]:
    out = []
    for p in range(0, m + 1):
        for q in range(p + 1, m + 2):
            if p == 0 and q == m + 1:
                continue
            out.append(Generator(p=p, q=q))
    return out


def generator_vectors(
    ps: ParameterSystem, al: Alignment, g: Generator
) -> tuple[RatMatrix, RatMatrix]:
    """The defining row v and column w of the rank-one updates for g.

    v is the difference of the slot rows of q and p; w combines the slot
    columns weighted by the inverse-multiplier increments.
    """
    one = RatFunc.one()
    sp = al.slot_of(g.p)
    sq = al.slot_of(g.q)
    v = extension_row(ps, al, sq) - extension_row(ps, al, sp)
    lam_p = ps.lam(g.p)
    lam_q = ps.lam(g.q)
    cp = lam_p.inverse() - one
    cq = lam_q.inverse() - one
    w = extension_col(ps, al, sq).scale(cp) - extension_col(ps, al, sp).scale(cq)
    return v, w


@dataclass
class CircuitPair:
    """The two basis actions of one generator plus its defining data."""

    generator: Generator
    m_matrix: RatMatrix
    n_matrix: RatMatrix
    v: RatMatrix
    w: RatMatrix
    lam_product: RatFunc


def _outer(col: RatMatrix, row: RatMatrix) -> RatMatrix:
    n = col.rows
    k = row.cols
    zero = RatFunc.zero()
    out = []
    for i in range(n):
        ci = col.entry(i, 0)
        if ci.is_zero():
            out.append([zero] * k)
        else:
            out.append([
                ci * row.entry(0, j) if not row.entry(0, j).is_zero() else zero
                for j in range(k)
            ])
    return RatMatrix(out)


def circuit_matrices(
    ps: ParameterSystem,
    al: Alignment,
    g: Generator,
    h: RatMatrix | None = None,
) -> CircuitPair:
    """Both basis actions of generator g as exact matrices.

    The row-basis action is I - lam_p * lam_q * (H w) v and the column-basis
    action is I + w (v H), where H is the intersection matrix.
    """
    if h is None:
        h = intersection_matrix(ps, al)
    v, w = generator_vectors(ps, al, g)
    lam_prod = ps.lam(g.p) * ps.lam(g.q)
    n_dim = ps.m + 1
    ident = RatMatrix.identity(n_dim)
    hw = mat_mul(h, w)
    vh = mat_mul(v, h)
    m_mat = ident - _outer(hw, v).scale(lam_prod)
    n_mat = ident + _outer(w, vh)
    return CircuitPair(
        generator=g, m_matrix=m_mat, n_matrix=n_mat, v=v, w=w, lam_product=lam_prod
    )


class CircuitCache:
    """Shared intersection matrix plus memoized circuit pairs and inverses."""

    def __init__(self, ps: ParameterSystem, al: Alignment):
        self.ps = ps
        self.al = al
        self.h = intersection_matrix(ps, al)
        self._pairs: dict[tuple[int, int], CircuitPair] = {}
        self._inverses: dict[tuple[int, int, str], RatMatrix] = {}

    def pair(self, g: Generator) -> CircuitPair:
        key = (g.p, g.q)
        if key not in self._pairs:
            self._pairs[key] = circuit_matrices(self.ps, self.al, g, h=self.h)
        return self._pairs[key]

    def matrix(self, g: Generator, side: str, power: int = 1) -> RatMatrix:
        if side not in ("M", "N"):
            raise ValueError(f"side must be 'M' or 'N', got {side!r}")
        cp = self.pair(g)
        base = cp.m_matrix if side == "M" else cp.n_matrix
        if power == 1:
            return base
        if power == -1:
            key = (g.p, g.q, side)
            if key not in self._inverses:
                self._inverses[key] = mat_inverse(base)
            return self._inverses[key]
        raise ValueError(f"power must be +1 or -1, got {power}")


# ---------------------------------------------------------------------------
# words

_WORD_LETTER_RE = re.compile(r"^(\d)(\d)(\^-1)?$")


def parse_word(text: str, m: int) -> list[tuple[Generator, int]]:
    """Parse a comma-separated word such as '02,13^-1' into generator powers."""
    letters = []
    for raw in text.split(","):
        token = raw.strip()
        if not token:
            raise InvalidGenerator(f"empty letter in word {text!r}")
        mm = _WORD_LETTER_RE.match(token)
        if mm is None:
            raise InvalidGenerator(
                f"bad word letter {token!r}; expected digits PQ with optional ^-1"
            )
        p, q = int(mm.group(1)), int(mm.group(2))
        g = make_generator(m, p, q)
        letters.append((g, -1 if mm.group(3) else 1))
    return letters


def word_matrix(
    ps: ParameterSystem,
    al: Alignment,
    word: list[tuple[Generator, int]],
    side: str,
    cache: CircuitCache | None = None,
) -> RatMatrix:
    """Product of generator matrices along the word, left to right.

    Concatenation of words multiplies in the same order on both sides,
    matching the composition of basis transports.
    """
    if cache is None:
        cache = CircuitCache(ps, al)
    out = RatMatrix.identity(ps.m + 1)
    for g, power in word:
        out = mat_mul(out, cache.matrix(g, side, power))
    return out


# ---------------------------------------------------------------------------
# verification suites


def _is_zero_matrix(a: RatMatrix) -> bool:
    return all(
        a.entry(i, j).is_zero() for i in range(a.rows) for j in range(a.cols)
    )


def _expected_pairing(lam_prod: RatFunc) -> RatFunc:
    one = RatFunc.one()
    return (one - lam_prod) / lam_prod


def verify_conjugation(
    ps: ParameterSystem, al: Alignment, seed: int = 0, cache: CircuitCache | None = None
) -> VerificationReport:
    """Check M H N = H for every generator, plus transported random pairings."""
    if cache is None:
        cache = CircuitCache(ps, al)
    report = VerificationReport(header={"suite": "identities", "seed": seed})
    h = cache.h
    rng = random.Random(seed)
    n_dim = ps.m + 1
    for g in all_generators(ps.m):
        cp = cache.pair(g)
        lhs = mat_mul(mat_mul(cp.m_matrix, h), cp.n_matrix)
        ok = lhs == h
        report.add(
            Check(
                name=f"conjugation-{g.label()}",
                passed=ok,
                witness=None if ok else {"got": str(lhs), "want": str(h)},
            )
        )
        a = RatMatrix.row_vector(
            [RatFunc.const(rng.randint(-3, 3)) for _ in range(n_dim)]
        )
        b = RatMatrix.col_vector(
            [RatFunc.const(rng.randint(-3, 3)) for _ in range(n_dim)]
        )
        before = mat_mul(mat_mul(a, h), b).entry(0, 0)
        after = mat_mul(
            mat_mul(mat_mul(a, cp.m_matrix), h), mat_mul(cp.n_matrix, b)
        ).entry(0, 0)
        ok2 = before == after
        report.add(
            Check(
                name=f"transported-pairing-{g.label()}",
                passed=ok2,
                witness=None if ok2 else {"before": str(before), "after": str(after)},
            )
        )
    return report


def degenerate_identity_checks(
    ps: ParameterSystem, al: Alignment, cache: CircuitCache | None = None
) -> list[Check]:
    """Generators with both exponents integral must act trivially."""
    if cache is None:
        cache = CircuitCache(ps, al)
    checks = []
    for g in all_generators(ps.m):
        if isinstance(ps.entries[g.p], Integral) and isinstance(
            ps.entries[g.q], Integral
        ):
            cp = cache.pair(g)
            ok = cp.m_matrix.is_identity() and cp.n_matrix.is_identity()
            checks.append(
                Check(
                    name=f"degenerate-identity-{g.label()}",
                    passed=ok,
                    witness=None
                    if ok
                    else {"M": str(cp.m_matrix), "N": str(cp.n_matrix)},
                )
            )
    return checks


def determinant_checks(
    ps: ParameterSystem, al: Alignment, cache: CircuitCache | None = None
) -> list[Check]:
    """det of the two actions must be the multiplier product and its inverse."""
    if cache is None:
        cache = CircuitCache(ps, al)
    checks = []
    for g in all_generators(ps.m):
        cp = cache.pair(g)
        dm = mat_det(cp.m_matrix)
        dn = mat_det(cp.n_matrix)
        ok = dm == cp.lam_product and dn == cp.lam_product.inverse()
        checks.append(
            Check(
                name=f"determinant-{g.label()}",
                passed=ok,
                witness=None
                if ok
                else {
                    "detM": str(dm),
                    "detN": str(dn),
                    "lam_product": str(cp.lam_product),
                },
            )
        )
    return checks


def verify_eigen(
    ps: ParameterSystem, al: Alignment, cache: CircuitCache | None = None
) -> VerificationReport:
    """Eigen relations of v and w and the pairing value, per generator."""
    if cache is None:
        cache = CircuitCache(ps, al)
    report = VerificationReport(header={"suite": "eigen"})
    h = cache.h
    for g in all_generators(ps.m):
        cp = cache.pair(g)
        lam = cp.lam_product
        if not _is_zero_matrix(cp.v):
            got = mat_mul(cp.v, cp.m_matrix)
            want = cp.v.scale(lam)
            ok = got == want
            report.add(
                Check(
                    name=f"row-eigen-{g.label()}",
                    passed=ok,
                    witness=None if ok else {"got": str(got), "want": str(want)},
                )
            )
        if not _is_zero_matrix(cp.w):
            got = mat_mul(cp.n_matrix, cp.w)
            want = cp.w.scale(lam.inverse())
            ok = got == want
            report.add(
                Check(
                    name=f"col-eigen-{g.label()}",
                    passed=ok,
                    witness=None if ok else {"got": str(got), "want": str(want)},
                )
            )
        if not lam.is_one():
            got = mat_mul(mat_mul(cp.v, h), cp.w).entry(0, 0)
            want = _expected_pairing(lam)
            ok = got == want
            report.add(
                Check(
                    name=f"pairing-value-{g.label()}",
                    passed=ok,
                    witness=None if ok else {"got": str(got), "want": str(want)},
                )
            )
    return report


def reflection_matrices(
    ps: ParameterSystem, al: Alignment, g: Generator, cache: CircuitCache | None = None
) -> tuple[RatMatrix, RatMatrix]:
    """Reflection forms of the two actions; needs a nontrivial multiplier product.

    Raises HypothesisViolated when lam_p * lam_q is one, where the
    reflection normalization divides by zero.
    """
    if cache is None:
        cache = CircuitCache(ps, al)
    cp = cache.pair(g)
    if cp.lam_product.is_one():
        raise HypothesisViolated(
            f"generator {g.label()} has multiplier product 1; no reflection form"
        )
    h = cache.h
    pairing = mat_mul(mat_mul(cp.v, h), cp.w).entry(0, 0)
    if pairing.is_zero():
        raise HypothesisViolated(
            f"generator {g.label()} has degenerate pairing; no reflection form"
        )
    one = RatFunc.one()
    ident = RatMatrix.identity(ps.m + 1)
    coeff_m = (one - cp.lam_product) / pairing
    coeff_n = (one - cp.lam_product.inverse()) / pairing
    hw = mat_mul(h, cp.w)
    vh = mat_mul(cp.v, h)
    m_ref = ident - _outer(hw, cp.v).scale(coeff_m)
    n_ref = ident - _outer(cp.w, vh).scale(coeff_n)
    return m_ref, n_ref


def reflection_checks(
    ps: ParameterSystem, al: Alignment, cache: CircuitCache | None = None
) -> list[Check]:
    """Reflection forms agree with the circuit matrices whenever applicable."""
    if cache is None:
        cache = CircuitCache(ps, al)
    checks = []
    for g in all_generators(ps.m):
        try:
            m_ref, n_ref = reflection_matrices(ps, al, g, cache=cache)
        except HypothesisViolated:
            # multiplier product 1: the action may still be a nontrivial
            # parabolic, but no reflection normalization exists
            checks.append(
                Check(name=f"reflection-inapplicable-{g.label()}", passed=True)
            )
            continue
        cp = cache.pair(g)
        ok = m_ref == cp.m_matrix and n_ref == cp.n_matrix
        checks.append(
            Check(
                name=f"reflection-{g.label()}",
                passed=ok,
                witness=None
                if ok
                else {
                    "M_reflection": str(m_ref),
                    "M": str(cp.m_matrix),
                    "N_reflection": str(n_ref),
                    "N": str(cp.n_matrix),
                },
            )
        )
    return checks


def orthogonality_checks(
    ps: ParameterSystem, al: Alignment, cache: CircuitCache | None = None
) -> list[Check]:
    """Eigenvector pairings across the two actions vanish off-diagonal.

    Row eigenvectors of the row action and column eigenvectors of the
    column action whose eigenvalue product is not one must pair to zero
    through the intersection matrix.
    """
    if cache is None:
        cache = CircuitCache(ps, al)
    h = cache.h
    checks = []
    one = RatFunc.one()
    n_dim = ps.m + 1
    for g in all_generators(ps.m):
        cp = cache.pair(g)
        lam = cp.lam_product
        if lam.is_one():
            checks.append(
                Check(name=f"orthogonality-vacuous-{g.label()}", passed=True)
            )
            continue
        # row eigenvectors: v with eigenvalue lam, fixed unit rows with 1
        rows: list[tuple[str, RatMatrix, RatFunc]] = []
        if not _is_zero_matrix(cp.v):
            rows.append(("v", cp.v, lam))
        for j in range(n_dim):
            e_j = RatMatrix.row_vector(
                [one if t == j else RatFunc.zero() for t in range(n_dim)]
            )
            if mat_mul(e_j, cp.m_matrix) == e_j:
                rows.append((f"e{j}", e_j, one))
        cols: list[tuple[str, RatMatrix, RatFunc]] = []
        if not _is_zero_matrix(cp.w):
            cols.append(("w", cp.w, lam.inverse()))
        for k in range(n_dim):
            e_k = RatMatrix.col_vector(
                [one if t == k else RatFunc.zero() for t in range(n_dim)]
            )
            if mat_mul(cp.n_matrix, e_k) == e_k:
                cols.append((f"e{k}", e_k, one))
        ok = True
        bad = {}
        for rname, rvec, rval in rows:
            for cname, cvec, cval in cols:
                if (rval * cval).is_one():
                    continue
                pairing = mat_mul(mat_mul(rvec, h), cvec).entry(0, 0)
                if not pairing.is_zero():
                    ok = False
                    bad[f"{rname}.H.{cname}"] = str(pairing)
        checks.append(
            Check(
                name=f"orthogonality-{g.label()}",
                passed=ok,
                witness=bad or None,
            )
        )
    return checks


def invariant_block_report(
    ps: ParameterSystem, al: Alignment, cache: CircuitCache | None = None
) -> VerificationReport:
    """Block structure forced by integral exponents.

    With r integral exponents the column action maps the span of the first
    r basis columns to itself (lower-left block vanishes) and the row
    action preserves the subspace of rows annihilating those columns
    through the intersection pairing.  With r = 0 there is nothing to
    assert and the report passes vacuously.
    """
    if cache is None:
        cache = CircuitCache(ps, al)
    report = VerificationReport(header={"suite": "blocks", "r": al.r})
    r = al.r
    if r == 0:
        report.add(Check(name="no-invariant-block-r0", passed=True))
        return report
    h = cache.h
    n_dim = ps.m + 1
    # columns of H against which the annihilator is computed
    c = RatMatrix(
        [[h.entry(i, k) for k in range(r)] for i in range(n_dim)]
    )
    res = mat_solve(c.transpose(), RatMatrix.zeros(r, 1))
    annihilator_rows = [vec.transpose() for vec in res.nullspace]
    for g in all_generators(ps.m):
        cp = cache.pair(g)
        bad = {}
        for j in range(r, n_dim):
            for k in range(r):
                if not cp.n_matrix.entry(j, k).is_zero():
                    bad[f"N[{j}][{k}]"] = str(cp.n_matrix.entry(j, k))
        report.add(
            Check(
                name=f"col-block-{g.label()}",
                passed=not bad,
                witness=bad or None,
            )
        )
        bad = {}
        for idx, row in enumerate(annihilator_rows):
            moved = mat_mul(mat_mul(row, cp.m_matrix), c)
            if not _is_zero_matrix(moved):
                bad[f"row{idx}"] = str(moved)
        report.add(
            Check(
                name=f"row-annihilator-{g.label()}",
                passed=not bad,
                witness=bad or None,
            )
        )
    return report


def run_suite(
    ps: ParameterSystem,
    al: Alignment,
    suite: str,
    seed: int = 0,
    cache: CircuitCache | None = None,
) -> VerificationReport:
    """Aggregate the named verification suite into one report."""
    if cache is None:
        cache = CircuitCache(ps, al)
    if suite == "identities":
        report = verify_conjugation(ps, al, seed=seed, cache=cache)
        report.extend(degenerate_identity_checks(ps, al, cache=cache))
        report.extend(determinant_checks(ps, al, cache=cache))
        report.add(det_check(ps, al))
        report.add(pairing_check(ps, al))
        return report
    if suite == "eigen":
        report = verify_eigen(ps, al, cache=cache)
        report.extend(reflection_checks(ps, al, cache=cache))
        report.extend(orthogonality_checks(ps, al, cache=cache))
        return report
    if suite == "blocks":
        return invariant_block_report(ps, al, cache=cache)
    if suite == "all":
        report = VerificationReport(header={"suite": "all", "seed": seed})
        for name in ("identities", "eigen", "blocks"):
            sub = run_suite(ps, al, name, seed=seed, cache=cache)
            report.extend(sub.checks)
        return report
    raise ValueError(f"unknown suite {suite!r}")
