"""Exact arithmetic over multivariate Laurent rational functions.

Implements the small computer-algebra layer the circuit-matrix engine sits
on: sparse Laurent monomials, polynomials with exact rational coefficients,
rational functions kept as explicit numerator/denominator pairs, and dense
matrices over that field.

Equality of rational functions is decided by cross-multiplication, never by
GCD reduction.  Normalization is limited to cheap canonical steps (monomial
content extraction, constant denominators, proportionality detection, a
bounded exact-division attempt, monic denominator), which keeps arithmetic
predictable and fast while guaranteeing a stable printed form.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Sequence


class ExactFieldError(Exception):
    """Base class for errors raised by this module."""


class DivisionByZero(ExactFieldError):
    """Raised when a denominator is identically zero."""


class DimensionMismatch(ExactFieldError):
    """Raised when matrix shapes are incompatible."""


class SingularSystem(ExactFieldError):
    """Raised when a matrix required to be invertible is singular."""

    def __init__(self, message: str, rank: int | None = None):
        super().__init__(message)
        self.rank = rank


class ParseError(ExactFieldError):
    """Raised on malformed rational-function strings."""


_ZERO = Fraction(0)
_ONE = Fraction(1)


class Monomial:
    """A Laurent monomial: a finite map from symbol names to integer exponents.

    Instances are immutable and hashable; exponents may be negative and
    zero exponents are dropped, so equal monomials compare equal.
    """

    __slots__ = ("_key", "_hash")

    def __init__(self, exps: Mapping[str, int] | Iterable[tuple[str, int]] = ()):
        items = exps.items() if isinstance(exps, Mapping) else exps
        key = tuple(sorted((s, int(e)) for s, e in items if e != 0))
        object.__setattr__(self, "_key", key)
        object.__setattr__(self, "_hash", hash(key))

    def __setattr__(self, name, value):
        raise AttributeError("Monomial is immutable")

    @property
    def key(self) -> tuple[tuple[str, int], ...]:
        return self._key

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other) -> bool:
        return isinstance(other, Monomial) and self._key == other._key

    def is_one(self) -> bool:
        return not self._key

    def exponent(self, sym: str) -> int:
        for s, e in self._key:
            if s == sym:
                return e
        return 0

    def symbols(self) -> set[str]:
        return {s for s, _ in self._key}

    def __mul__(self, other: "Monomial") -> "Monomial":
        if not self._key:
            return other
        if not other._key:
            return self
        exps = dict(self._key)
        for s, e in other._key:
            exps[s] = exps.get(s, 0) + e
        return Monomial(exps)

    def inverse(self) -> "Monomial":
        return Monomial((s, -e) for s, e in self._key)

    def __pow__(self, n: int) -> "Monomial":
        return Monomial((s, e * n) for s, e in self._key)

    def lex_key(self, universe: Sequence[str]) -> tuple[int, ...]:
        """Exponent vector with respect to an ordered symbol list."""
        d = dict(self._key)
        return tuple(d.get(s, 0) for s in universe)

    def divides(self, other: "Monomial") -> bool:
        """True when other/self has no negative shift beyond other's support.

        In the Laurent ring every monomial divides every other; this tests
        ordinary divisibility and is used only after shifting to the
        plain polynomial ring.
        """
        d = dict(other._key)
        return all(d.get(s, 0) >= e for s, e in self._key)

    def evaluate(self, assign: Mapping[str, complex]) -> complex:
        v = 1.0 + 0.0j
        for s, e in self._key:
            v *= assign[s] ** e
        return v

    def __str__(self) -> str:
        if not self._key:
            return "1"
        parts = []
        for s, e in self._key:
            parts.append(s if e == 1 else f"{s}^{e}")
        return "*".join(parts)

    def __repr__(self) -> str:
        return f"Monomial({dict(self._key)!r})"


MONO_ONE = Monomial()


class Poly:
    """A Laurent polynomial: finite sum of rational multiples of monomials.

    Stored as a dict mapping Monomial to nonzero Fraction.  The dict is
    treated as immutable after construction.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Monomial, Fraction] | None = None):
        if terms is None:
            self.terms = {}
        else:
            self.terms = {m: c for m, c in terms.items() if c != 0}

    # -- constructors -------------------------------------------------

    @staticmethod
    def zero() -> "Poly":
        return Poly()

    @staticmethod
    def one() -> "Poly":
        return Poly({MONO_ONE: _ONE})

    @staticmethod
    def const(c: Fraction | int) -> "Poly":
        c = Fraction(c)
        return Poly({MONO_ONE: c}) if c else Poly()

    @staticmethod
    def symbol(name: str, exp: int = 1) -> "Poly":
        return Poly({Monomial({name: exp}): _ONE})

    @staticmethod
    def term(mono: Monomial, coeff: Fraction | int = 1) -> "Poly":
        c = Fraction(coeff)
        return Poly({mono: c}) if c else Poly()

    # -- predicates ---------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_one(self) -> bool:
        return len(self.terms) == 1 and self.terms.get(MONO_ONE) == _ONE

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and MONO_ONE in self.terms)

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ExactFieldError("polynomial is not constant")
        return self.terms.get(MONO_ONE, _ZERO)

    def __len__(self) -> int:
        return len(self.terms)

    def __eq__(self, other) -> bool:
        return isinstance(other, Poly) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    # -- ring operations ----------------------------------------------

    def __add__(self, other: "Poly") -> "Poly":
        if not self.terms:
            return other
        if not other.terms:
            return self
        out = dict(self.terms)
        for m, c in other.terms.items():
            s = out.get(m)
            if s is None:
                out[m] = c
            else:
                s = s + c
                if s:
                    out[m] = s
                else:
                    del out[m]
        p = Poly.__new__(Poly)
        p.terms = out
        return p

    def __neg__(self) -> "Poly":
        p = Poly.__new__(Poly)
        p.terms = {m: -c for m, c in self.terms.items()}
        return p

    def __sub__(self, other: "Poly") -> "Poly":
        if not other.terms:
            return self
        return self + (-other)

    def __mul__(self, other: "Poly") -> "Poly":
        a, b = self.terms, other.terms
        if not a or not b:
            return Poly()
        if len(a) == 1:
            (ma, ca), = a.items()
            if ma is MONO_ONE or not ma.key:
                if ca == 1:
                    return other
                p = Poly.__new__(Poly)
                p.terms = {m: ca * c for m, c in b.items()}
                return p
            p = Poly.__new__(Poly)
            p.terms = {ma * m: ca * c for m, c in b.items()}
            return p
        if len(b) == 1:
            return other * self
        out: dict[Monomial, Fraction] = {}
        for ma, ca in a.items():
            for mb, cb in b.items():
                m = ma * mb
                c = ca * cb
                s = out.get(m)
                if s is None:
                    out[m] = c
                else:
                    s = s + c
                    if s:
                        out[m] = s
                    else:
                        del out[m]
        p = Poly.__new__(Poly)
        p.terms = out
        return p

    def scale(self, c: Fraction) -> "Poly":
        if c == 1:
            return self
        if not c:
            return Poly()
        p = Poly.__new__(Poly)
        p.terms = {m: x * c for m, x in self.terms.items()}
        return p

    def shift(self, mono: Monomial) -> "Poly":
        """Multiply every term by a monomial."""
        if not mono.key:
            return self
        p = Poly.__new__(Poly)
        p.terms = {m * mono: c for m, c in self.terms.items()}
        return p

    # -- structure ----------------------------------------------------

    def symbols(self) -> set[str]:
        out: set[str] = set()
        for m in self.terms:
            out.update(m.symbols())
        return out

    def universe(self) -> list[str]:
        return sorted(self.symbols())

    def content_monomial(self) -> Monomial:
        """Componentwise minimum exponent over all terms, as a monomial.

        Dividing by the content leaves a polynomial whose per-symbol
        minimum exponent is exactly zero.
        """
        if not self.terms:
            return MONO_ONE
        mins: dict[str, int] = {}
        seen: dict[str, int] = {}
        n = len(self.terms)
        for m in self.terms:
            for s, e in m.key:
                if s in mins:
                    if e < mins[s]:
                        mins[s] = e
                    seen[s] += 1
                else:
                    mins[s] = e
                    seen[s] = 1
        # a symbol absent from some term has implicit exponent 0 there
        for s, cnt in seen.items():
            if cnt < n and mins[s] > 0:
                mins[s] = 0
        return Monomial({s: e for s, e in mins.items() if e != 0})

    def leading(self, universe: Sequence[str] | None = None) -> tuple[Monomial, Fraction]:
        """Leading term under lexicographic order on the symbol universe."""
        if not self.terms:
            raise ExactFieldError("zero polynomial has no leading term")
        if universe is None:
            universe = self.universe()
        m = max(self.terms, key=lambda mm: mm.lex_key(universe))
        return m, self.terms[m]

    def sorted_terms(self) -> list[tuple[Monomial, Fraction]]:
        universe = self.universe()
        return sorted(
            self.terms.items(), key=lambda t: t[0].lex_key(universe), reverse=True
        )

    def evaluate(self, assign: Mapping[str, complex]) -> complex:
        v = 0.0 + 0.0j
        for m, c in self.terms.items():
            v += (c.numerator / c.denominator) * m.evaluate(assign)
        return v

    def __str__(self) -> str:
        return format_poly(self)

    def __repr__(self) -> str:
        return f"Poly({format_poly(self)})"


def divexact(num: Poly, den: Poly, max_terms: int | None = None) -> Poly | None:
    """Exact quotient num/den, or None when den does not divide num.

    Works in the Laurent ring: monomial contents are split off (they are
    units) and the remaining plain polynomials are divided by multivariate
    long division under lexicographic order.  When ``max_terms`` is given
    the attempt is abandoned once the working remainder grows past it.
    """
    if den.is_zero():
        raise DivisionByZero("exact division by zero polynomial")
    if num.is_zero():
        return Poly.zero()
    cn = num.content_monomial()
    cd = den.content_monomial()
    nn = num.shift(cn.inverse())
    dd = den.shift(cd.inverse())
    unit = cn * cd.inverse()
    if len(dd) == 1:
        (m, c), = dd.terms.items()
        # after content extraction a single-term denominator is constant
        return nn.scale(_ONE / c).shift(unit)
    universe = sorted(nn.symbols() | dd.symbols())
    lead_m, lead_c = dd.leading(universe)
    quotient: dict[Monomial, Fraction] = {}
    rem = nn
    steps = 0
    limit = max_terms if max_terms is not None else None
    while not rem.is_zero():
        rm, rc = rem.leading(universe)
        if not lead_m.divides(rm):
            return None
        qm = rm * lead_m.inverse()
        qc = rc / lead_c
        quotient[qm] = quotient.get(qm, _ZERO) + qc
        rem = rem - dd.shift(qm).scale(qc)
        steps += 1
        if limit is not None and (len(rem) > limit or steps > limit):
            return None
    q = Poly.__new__(Poly)
    q.terms = {m: c for m, c in quotient.items() if c}
    return q.shift(unit)


# bounded effort for opportunistic simplification inside RatFunc arithmetic
_DIV_ATTEMPT_LIMIT = 400


class RatFunc:
    """A rational function num/den over Laurent polynomials.

    The denominator is kept as a plain polynomial with zero per-symbol
    minimum exponent and leading coefficient one; any monomial unit is
    folded into the numerator.  Equality is decided by cross-multiplication.
    """

    __slots__ = ("num", "den")

    def __init__(self, num: Poly, den: Poly | None = None):
        if den is None:
            den = Poly.one()
        if den.is_zero():
            raise DivisionByZero("rational function with zero denominator")
        if num.is_zero():
            self.num = Poly.zero()
            self.den = Poly.one()
            return
        if den.is_one():
            self.num = num
            self.den = den
            return
        num, den = _normalize(num, den)
        self.num = num
        self.den = den

    # -- constructors -------------------------------------------------

    @staticmethod
    def zero() -> "RatFunc":
        return RatFunc(Poly.zero())

    @staticmethod
    def one() -> "RatFunc":
        return RatFunc(Poly.one())

    @staticmethod
    def const(c: Fraction | int) -> "RatFunc":
        return RatFunc(Poly.const(c))

    @staticmethod
    def symbol(name: str, exp: int = 1) -> "RatFunc":
        return RatFunc(Poly.symbol(name, exp))

    @staticmethod
    def from_monomial(mono: Monomial, coeff: Fraction | int = 1) -> "RatFunc":
        return RatFunc(Poly.term(mono, coeff))

    # -- predicates ---------------------------------------------------

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_one(self) -> bool:
        return self.num.is_one() and self.den.is_one()

    def is_monomial(self) -> bool:
        return len(self.num) == 1 and self.den.is_one()

    def __eq__(self, other) -> bool:
        if not isinstance(other, RatFunc):
            return NotImplemented
        if self.den == other.den:
            return self.num == other.num
        return self.num * other.den == other.num * self.den

    def __hash__(self):
        raise TypeError("RatFunc is not hashable")

    # -- field operations ---------------------------------------------

    def __add__(self, other: "RatFunc") -> "RatFunc":
        if self.num.is_zero():
            return other
        if other.num.is_zero():
            return self
        if self.den == other.den:
            return RatFunc(self.num + other.num, self.den)
        return RatFunc(
            self.num * other.den + other.num * self.den, self.den * other.den
        )

    def __neg__(self) -> "RatFunc":
        r = RatFunc.__new__(RatFunc)
        r.num = -self.num
        r.den = self.den
        return r

    def __sub__(self, other: "RatFunc") -> "RatFunc":
        if other.num.is_zero():
            return self
        return self + (-other)

    def __mul__(self, other: "RatFunc") -> "RatFunc":
        if self.num.is_zero() or other.num.is_zero():
            return RatFunc.zero()
        if self.is_one():
            return other
        if other.is_one():
            return self
        return RatFunc(self.num * other.num, self.den * other.den)

    def __truediv__(self, other: "RatFunc") -> "RatFunc":
        if other.num.is_zero():
            raise DivisionByZero("division by zero rational function")
        if other.is_one():
            return self
        return RatFunc(self.num * other.den, self.den * other.num)

    def inverse(self) -> "RatFunc":
        if self.num.is_zero():
            raise DivisionByZero("inverse of zero")
        return RatFunc(self.den, self.num)

    def __pow__(self, n: int) -> "RatFunc":
        if n == 0:
            return RatFunc.one()
        base = self if n > 0 else self.inverse()
        out = RatFunc.one()
        for _ in range(abs(n)):
            out = out * base
        return out

    def evaluate(self, assign: Mapping[str, complex]) -> complex:
        d = self.den.evaluate(assign)
        if d == 0:
            raise DivisionByZero("denominator vanishes at the given assignment")
        return self.num.evaluate(assign) / d

    def symbols(self) -> set[str]:
        return self.num.symbols() | self.den.symbols()

    def __str__(self) -> str:
        return format_ratfunc(self)

    def __repr__(self) -> str:
        return f"RatFunc({format_ratfunc(self)})"


def _normalize(num: Poly, den: Poly) -> tuple[Poly, Poly]:
    """Apply the cheap canonical steps; num may stay Laurent, den may not."""
    cn = num.content_monomial()
    cd = den.content_monomial()
    if cd.key:
        den = den.shift(cd.inverse())
    unit = cn * cd.inverse()
    if cn.key:
        num = num.shift(cn.inverse())
    if len(den) == 1:
        # single term with zero minimum exponents is a plain constant
        c = den.terms[MONO_ONE]
        return num.scale(_ONE / c).shift(unit), Poly.one()
    if len(num) == len(den) and num.terms.keys() == den.terms.keys():
        ratio = None
        for m, c in num.terms.items():
            r = c / den.terms[m]
            if ratio is None:
                ratio = r
            elif r != ratio:
                ratio = None
                break
        if ratio is not None:
            return Poly.term(unit, ratio), Poly.one()
    q = divexact(num, den, max_terms=_DIV_ATTEMPT_LIMIT)
    if q is not None:
        return q.shift(unit), Poly.one()
    _, lc = den.leading()
    if lc != 1:
        inv = _ONE / lc
        num = num.scale(inv)
        den = den.scale(inv)
    return num.shift(unit), den


def ratfunc_eq(a: RatFunc, b: RatFunc) -> bool:
    """Exact equality by cross-multiplication."""
    return a == b


# ---------------------------------------------------------------------------
# matrices


class RatMatrix:
    """A dense matrix over RatFunc with exact operations."""

    __slots__ = ("rows", "cols", "data")

    def __init__(self, data: Sequence[Sequence[RatFunc]]):
        self.data = [list(row) for row in data]
        self.rows = len(self.data)
        self.cols = len(self.data[0]) if self.data else 0
        for row in self.data:
            if len(row) != self.cols:
                raise DimensionMismatch("ragged matrix rows")

    @staticmethod
    def identity(n: int) -> "RatMatrix":
        one = RatFunc.one()
        zero = RatFunc.zero()
        return RatMatrix(
            [[one if i == j else zero for j in range(n)] for i in range(n)]
        )

    @staticmethod
    def zeros(rows: int, cols: int) -> "RatMatrix":
        zero = RatFunc.zero()
        return RatMatrix([[zero for _ in range(cols)] for _ in range(rows)])

    @staticmethod
    def row_vector(entries: Sequence[RatFunc]) -> "RatMatrix":
        return RatMatrix([list(entries)])

    @staticmethod
    def col_vector(entries: Sequence[RatFunc]) -> "RatMatrix":
        return RatMatrix([[e] for e in entries])

    def __getitem__(self, ij: tuple[int, int]) -> RatFunc:
        return self.data[ij[0]][ij[1]]

    def entry(self, i: int, j: int) -> RatFunc:
        return self.data[i][j]

    def transpose(self) -> "RatMatrix":
        return RatMatrix(
            [[self.data[i][j] for i in range(self.rows)] for j in range(self.cols)]
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, RatMatrix):
            return NotImplemented
        if self.rows != other.rows or self.cols != other.cols:
            return False
        for i in range(self.rows):
            for j in range(self.cols):
                if not self.data[i][j] == other.data[i][j]:
                    return False
        return True

    def __add__(self, other: "RatMatrix") -> "RatMatrix":
        if self.rows != other.rows or self.cols != other.cols:
            raise DimensionMismatch("matrix addition shape mismatch")
        return RatMatrix(
            [
                [self.data[i][j] + other.data[i][j] for j in range(self.cols)]
                for i in range(self.rows)
            ]
        )

    def __sub__(self, other: "RatMatrix") -> "RatMatrix":
        if self.rows != other.rows or self.cols != other.cols:
            raise DimensionMismatch("matrix subtraction shape mismatch")
        return RatMatrix(
            [
                [self.data[i][j] - other.data[i][j] for j in range(self.cols)]
                for i in range(self.rows)
            ]
        )

    def scale(self, c: RatFunc) -> "RatMatrix":
        return RatMatrix(
            [[c * self.data[i][j] for j in range(self.cols)] for i in range(self.rows)]
        )

    def __mul__(self, other: "RatMatrix") -> "RatMatrix":
        return mat_mul(self, other)

    def is_identity(self) -> bool:
        if self.rows != self.cols:
            return False
        for i in range(self.rows):
            for j in range(self.cols):
                e = self.data[i][j]
                if i == j:
                    if not e.is_one():
                        if not e == RatFunc.one():
                            return False
                elif not e.is_zero():
                    return False
        return True

    def evaluate(self, assign: Mapping[str, complex]):
        """Evaluate entrywise into a nested list of complex numbers."""
        return [
            [self.data[i][j].evaluate(assign) for j in range(self.cols)]
            for i in range(self.rows)
        ]

    def __str__(self) -> str:
        return "\n".join(
            "[" + ", ".join(format_ratfunc(e) for e in row) + "]" for row in self.data
        )

    def __repr__(self) -> str:
        return f"RatMatrix({self.rows}x{self.cols})"


def mat_mul(a: RatMatrix, b: RatMatrix) -> RatMatrix:
    """Matrix product, skipping structurally zero and unit entries."""
    if a.cols != b.rows:
        raise DimensionMismatch(f"cannot multiply {a.rows}x{a.cols} by {b.rows}x{b.cols}")
    zero = RatFunc.zero()
    out = [[zero for _ in range(b.cols)] for _ in range(a.rows)]
    for i in range(a.rows):
        arow = a.data[i]
        orow = out[i]
        for k in range(a.cols):
            aik = arow[k]
            if aik.is_zero():
                continue
            brow = b.data[k]
            if aik.is_one():
                for j in range(b.cols):
                    bkj = brow[j]
                    if not bkj.is_zero():
                        orow[j] = orow[j] + bkj
            else:
                for j in range(b.cols):
                    bkj = brow[j]
                    if not bkj.is_zero():
                        orow[j] = orow[j] + aik * bkj
    return RatMatrix(out)


def mat_det(a: RatMatrix) -> RatFunc:
    """Determinant by fraction-free (Bareiss) elimination.

    Each row is first lifted to a common polynomial denominator; Bareiss
    then runs over polynomials with exact divisions that are guaranteed to
    succeed, avoiding the intermediate swell of naive field elimination.
    """
    if a.rows != a.cols:
        raise DimensionMismatch("determinant of non-square matrix")
    n = a.rows
    if n == 0:
        return RatFunc.one()
    lifted: list[list[Poly]] = []
    denom = RatFunc.one()
    for i in range(n):
        row_den = Poly.one()
        for j in range(n):
            row_den = row_den * a.data[i][j].den
        lifted.append(
            [
                a.data[i][j].num * divexact(row_den, a.data[i][j].den)
                for j in range(n)
            ]
        )
        denom = denom * RatFunc(row_den)
    m = [row[:] for row in lifted]
    sign = 1
    prev = Poly.one()
    for k in range(n - 1):
        if m[k][k].is_zero():
            pivot_row = None
            for i in range(k + 1, n):
                if not m[i][k].is_zero():
                    pivot_row = i
                    break
            if pivot_row is None:
                return RatFunc.zero()
            m[k], m[pivot_row] = m[pivot_row], m[k]
            sign = -sign
        pkk = m[k][k]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                t = m[i][j] * pkk - m[i][k] * m[k][j]
                q = divexact(t, prev)
                if q is None:
                    raise ExactFieldError("Bareiss exact division failed")
                m[i][j] = q
            m[i][k] = Poly.zero()
        prev = pkk
    det_poly = m[n - 1][n - 1]
    if sign < 0:
        det_poly = -det_poly
    return RatFunc(det_poly) / denom


@dataclass
class SolveResult:
    """Outcome of a linear solve: particular solution, rank, kernel basis.

    ``solution`` is None when the system is inconsistent.  ``nullspace``
    holds column vectors spanning the kernel of the coefficient matrix.
    """

    solution: RatMatrix | None
    rank: int
    nullspace: list[RatMatrix] = field(default_factory=list)


def mat_solve(a: RatMatrix, b: RatMatrix) -> SolveResult:
    """Solve a X = b by Gaussian elimination over the rational-function field.

    Pivots prefer entries with the fewest polynomial terms to limit growth.
    On rank-deficient systems the free variables are set to zero in the
    particular solution and a nullspace basis is returned.
    """
    if a.rows != b.rows:
        raise DimensionMismatch("right-hand side has wrong number of rows")
    n, m = a.rows, a.cols
    k = b.cols
    aug = [[a.data[i][j] for j in range(m)] + [b.data[i][j] for j in range(k)]
           for i in range(n)]
    zero = RatFunc.zero()
    one = RatFunc.one()
    pivot_cols: list[int] = []
    row = 0
    for col in range(m):
        best = None
        best_size = None
        for i in range(row, n):
            e = aug[i][col]
            if not e.is_zero():
                size = len(e.num.terms) + len(e.den.terms)
                if best is None or size < best_size:
                    best, best_size = i, size
        if best is None:
            continue
        aug[row], aug[best] = aug[best], aug[row]
        piv = aug[row][col]
        inv = piv.inverse()
        aug[row] = [inv * e for e in aug[row]]
        for i in range(n):
            if i != row and not aug[i][col].is_zero():
                f = aug[i][col]
                aug[i] = [
                    aug[i][j] - f * aug[row][j] for j in range(m + k)
                ]
        pivot_cols.append(col)
        row += 1
        if row == n:
            break
    rank = row
    for i in range(rank, n):
        for j in range(m, m + k):
            if not aug[i][j].is_zero():
                return SolveResult(solution=None, rank=rank,
                                   nullspace=_nullspace(aug, pivot_cols, m))
        # rows below the rank must vanish entirely on the left as well
    x = [[zero for _ in range(k)] for _ in range(m)]
    for r, col in enumerate(pivot_cols):
        for j in range(k):
            x[col][j] = aug[r][m + j]
    return SolveResult(
        solution=RatMatrix(x) if m > 0 else RatMatrix.zeros(0, k),
        rank=rank,
        nullspace=_nullspace(aug, pivot_cols, m),
    )


def _nullspace(aug, pivot_cols: list[int], m: int) -> list[RatMatrix]:
    zero = RatFunc.zero()
    one = RatFunc.one()
    free_cols = [c for c in range(m) if c not in pivot_cols]
    basis = []
    for fc in free_cols:
        v = [zero for _ in range(m)]
        v[fc] = one
        for r, pc in enumerate(pivot_cols):
            v[pc] = -aug[r][fc]
        basis.append(RatMatrix.col_vector(v))
    return basis


def mat_inverse(a: RatMatrix) -> RatMatrix:
    if a.rows != a.cols:
        raise DimensionMismatch("inverse of non-square matrix")
    res = mat_solve(a, RatMatrix.identity(a.rows))
    if res.rank < a.rows or res.solution is None:
        raise SingularSystem("matrix is singular", rank=res.rank)
    return res.solution


# ---------------------------------------------------------------------------
# printing


def _format_coeff(c: Fraction) -> str:
    if c.denominator == 1:
        return str(c.numerator)
    return f"{c.numerator}/{c.denominator}"


def format_poly(p: Poly) -> str:
    """Deterministic human-readable form: terms in descending lex order."""
    if p.is_zero():
        return "0"
    parts: list[str] = []
    for m, c in p.sorted_terms():
        neg = c < 0
        ac = -c if neg else c
        if m.is_one():
            body = _format_coeff(ac)
        elif ac == 1:
            body = str(m)
        else:
            body = f"{_format_coeff(ac)}*{m}"
        if not parts:
            parts.append(f"-{body}" if neg else body)
        else:
            parts.append(f" - {body}" if neg else f" + {body}")
    return "".join(parts)


def format_ratfunc(r: RatFunc) -> str:
    if r.den.is_one():
        return format_poly(r.num)
    return f"({format_poly(r.num)})/({format_poly(r.den)})"


# ---------------------------------------------------------------------------
# parsing

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<int>\d+)|(?P<name>[A-Za-z][A-Za-z0-9_]*)|(?P<op>[-+*/^()]))"
)


def _tokenize(text: str) -> list[tuple[str, str]]:
    # tolerate the unicode minus that shows up in copied formulas
    text = text.replace("−", "-").replace("·", "*")
    tokens: list[tuple[str, str]] = []
    pos = 0
    while pos < len(text):
        mm = _TOKEN_RE.match(text, pos)
        if mm is None:
            if text[pos:].strip() == "":
                break
            raise ParseError(f"unexpected character {text[pos]!r} at position {pos}")
        if mm.group("int") is not None:
            tokens.append(("int", mm.group("int")))
        elif mm.group("name") is not None:
            tokens.append(("name", mm.group("name")))
        else:
            tokens.append(("op", mm.group("op")))
        pos = mm.end()
    tokens.append(("end", ""))
    return tokens


class _Parser:
    def __init__(self, tokens: list[tuple[str, str]]):
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> tuple[str, str]:
        return self.tokens[self.pos]

    def next(self) -> tuple[str, str]:
        t = self.tokens[self.pos]
        self.pos += 1
        return t

    def expect_op(self, op: str) -> None:
        kind, val = self.next()
        if kind != "op" or val != op:
            raise ParseError(f"expected {op!r}, got {val!r}")

    def parse_expr(self) -> RatFunc:
        negate = False
        kind, val = self.peek()
        if kind == "op" and val == "-":
            self.next()
            negate = True
        elif kind == "op" and val == "+":
            self.next()
        out = self.parse_term()
        if negate:
            out = -out
        while True:
            kind, val = self.peek()
            if kind == "op" and val in "+-":
                self.next()
                rhs = self.parse_term()
                out = out + rhs if val == "+" else out - rhs
            else:
                return out

    def parse_term(self) -> RatFunc:
        out = self.parse_factor()
        while True:
            kind, val = self.peek()
            if kind == "op" and val in "*/":
                self.next()
                rhs = self.parse_factor()
                out = out * rhs if val == "*" else out / rhs
            else:
                return out

    def parse_factor(self) -> RatFunc:
        base = self.parse_atom()
        kind, val = self.peek()
        if kind == "op" and val == "^":
            self.next()
            exp = self.parse_exponent()
            return base ** exp
        return base

    def parse_exponent(self) -> int:
        kind, val = self.next()
        if kind == "op" and val == "(":
            inner = self.parse_exponent()
            self.expect_op(")")
            return inner
        sign = 1
        if kind == "op" and val == "-":
            sign = -1
            kind, val = self.next()
        if kind != "int":
            raise ParseError(f"expected integer exponent, got {val!r}")
        return sign * int(val)

    def parse_atom(self) -> RatFunc:
        kind, val = self.next()
        if kind == "int":
            return RatFunc.const(int(val))
        if kind == "name":
            return RatFunc.symbol(val)
        if kind == "op" and val == "(":
            inner = self.parse_expr()
            self.expect_op(")")
            return inner
        if kind == "op" and val == "-":
            return -self.parse_atom()
        raise ParseError(f"unexpected token {val!r}")


def parse_ratfunc(text: str) -> RatFunc:
    """Parse a rational-function expression.

    Grammar: integers, symbols matching [A-Za-z][A-Za-z0-9_]*, the operators
    + - * / ^ with integer exponents, and parentheses.  Output of
    ``format_ratfunc`` always parses back to an equal value.
    """
    parser = _Parser(_tokenize(text))
    out = parser.parse_expr()
    kind, val = parser.peek()
    if kind != "end":
        raise ParseError(f"trailing input at token {val!r}")
    return out


def parse_monomial(text: str) -> Monomial:
    """Parse a pure monomial: '*'-separated sym or sym^int factors, or '1'."""
    r = parse_ratfunc(text)
    if r.den.is_one() and len(r.num) == 1:
        (m, c), = r.num.terms.items()
        if c == 1:
            return m
    raise ParseError(f"not a monomial: {text!r}")
