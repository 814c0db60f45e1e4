"""Parameter systems, puncture alignment, and the twisted intersection matrix.

A parameter system records, for punctures 0, x_1, ..., x_m, 1, infinity on
the projective line, whether each exponent is an integer or carries a
nontrivial monodromy multiplier (a Laurent monomial in named symbols).  The
alignment orders punctures so integral ones occupy the leading slots and
positions ascend along the real axis; the intersection matrix of the
twisted-cycle bases and the extension vectors for out-of-basis cycles are
exact matrices over the rational-function field.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

from .exactfield import (
    MONO_ONE,
    Monomial,
    Poly,
    RatFunc,
    RatMatrix,
    mat_det,
    mat_mul,
    parse_monomial,
)
from .reports import Check


class ParameterError(Exception):
    """Base class for invalid parameter systems."""


class AllIntegral(ParameterError):
    """Every exponent is an integer; the twisted theory degenerates."""


class FewerThanTwoNonIntegral(ParameterError):
    """At least two exponents must be non-integral."""


class ProductNotOne(ParameterError):
    """The product of all monodromy multipliers must be identically one."""


class TrivialLambda(ParameterError):
    """A non-integral entry must carry a nontrivial multiplier."""


class AlignmentError(ParameterError):
    """An explicit alignment violates the ordering conventions."""


@dataclass(frozen=True)
class Integral:
    """An integer exponent; its monodromy multiplier is one."""

    value: int


@dataclass(frozen=True)
class NonIntegral:
    """A non-integral exponent with multiplier a nontrivial Laurent monomial.

    ``numeric_hint`` optionally carries a concrete exponent value used when
    a numerical scene is built from the same data.
    """

    multiplier: Monomial
    numeric_hint: complex | None = None


Entry = Union[Integral, NonIntegral]


@dataclass(frozen=True)
class ParameterSystem:
    """Exponent data for the m + 3 punctures 0, x_1, ..., x_m, 1, infinity."""

    m: int
    entries: tuple[Entry, ...]

    @property
    def n_points(self) -> int:
        return self.m + 3

    def integral_indices(self) -> list[int]:
        return [i for i, e in enumerate(self.entries) if isinstance(e, Integral)]

    def nonintegral_indices(self) -> list[int]:
        return [i for i, e in enumerate(self.entries) if isinstance(e, NonIntegral)]

    def multiplier(self, i: int) -> Monomial:
        e = self.entries[i]
        return MONO_ONE if isinstance(e, Integral) else e.multiplier

    def lam(self, i: int) -> RatFunc:
        """The monodromy multiplier of puncture i as a rational function."""
        return RatFunc.from_monomial(self.multiplier(i))


def validate_params(ps: ParameterSystem) -> None:
    """Check a parameter system, raising a ParameterError subclass on failure."""
    if ps.m < 1:
        raise ParameterError(f"m must be at least 1, got {ps.m}")
    if len(ps.entries) != ps.m + 3:
        raise ParameterError(
            f"expected {ps.m + 3} entries for m={ps.m}, got {len(ps.entries)}"
        )
    for i, e in enumerate(ps.entries):
        if isinstance(e, NonIntegral) and e.multiplier.is_one():
            raise TrivialLambda(f"entry {i} is non-integral with multiplier 1")
        if not isinstance(e, (Integral, NonIntegral)):
            raise ParameterError(f"entry {i} has unsupported type {type(e)!r}")
    nonint = ps.nonintegral_indices()
    if not nonint:
        raise AllIntegral("all exponents are integers")
    if len(nonint) < 2:
        raise FewerThanTwoNonIntegral(
            f"only {len(nonint)} non-integral exponent(s); need at least 2"
        )
    prod = MONO_ONE
    for i in range(ps.n_points):
        prod = prod * ps.multiplier(i)
    if not prod.is_one():
        raise ProductNotOne(f"multiplier product is {prod}, expected 1")


@dataclass(frozen=True)
class Alignment:
    """Slot assignment of punctures: order[p] is the puncture in slot p.

    Integral punctures fill slots 0 .. r-1; slot m+2 holds infinity unless
    the exponent at infinity is integral, in which case infinity sits in
    slot 0.  In numerical scenes the slot order is also the ascending order
    of puncture positions on the real axis.
    """

    order: tuple[int, ...]
    r: int

    def point(self, p: int) -> int:
        return self.order[p]

    def slot_of(self, i: int) -> int:
        return self.order.index(i)

    @property
    def iota(self) -> dict[int, int]:
        return {i: p for p, i in enumerate(self.order)}


def derive_alignment(ps: ParameterSystem) -> Alignment:
    """Default alignment: integral indices ascending, then the rest ascending."""
    ints = ps.integral_indices()
    nonint = ps.nonintegral_indices()
    inf = ps.n_points - 1
    if inf in ints:
        order = [inf] + [i for i in ints if i != inf] + nonint
    else:
        order = ints + nonint
    al = Alignment(order=tuple(order), r=len(ints))
    validate_alignment(ps, al.order)
    return al


def validate_alignment(ps: ParameterSystem, order: Sequence[int]) -> Alignment:
    """Check an explicit slot order against the alignment conventions."""
    n = ps.n_points
    if sorted(order) != list(range(n)):
        raise AlignmentError(f"order {list(order)} is not a permutation of 0..{n - 1}")
    ints = set(ps.integral_indices())
    r = len(ints)
    if set(order[:r]) != ints:
        raise AlignmentError(
            f"integral indices {sorted(ints)} must occupy the first {r} slots"
        )
    inf = n - 1
    if isinstance(ps.entries[inf], NonIntegral):
        if order[n - 1] != inf:
            raise AlignmentError("the point at infinity must sit in the last slot")
    else:
        if order[0] != inf:
            raise AlignmentError(
                "with an integral exponent at infinity it must sit in slot 0"
            )
    return Alignment(order=tuple(order), r=r)


# ---------------------------------------------------------------------------
# intersection matrix and extension vectors


def intersection_matrix(ps: ParameterSystem, al: Alignment) -> RatMatrix:
    """The (m+1) x (m+1) intersection matrix of the two cycle bases.

    Entry (j, k) is delta_jk + t_jk * d_k / (lam_hub - 1) where d_k is
    (lam_k - 1)/lam_k for non-integral slot k and 0 otherwise, t_jk is 1
    on or above the diagonal and lam_hub strictly below, and lam_hub is the
    multiplier of the slot m+1 puncture.
    """
    m = ps.m
    one = RatFunc.one()
    zero = RatFunc.zero()
    lam_hub = ps.lam(al.point(m + 1))
    hub_factor = (lam_hub - one).inverse()
    d: list[RatFunc] = []
    for k in range(m + 1):
        if k < al.r:
            d.append(zero)
        else:
            lam_k = ps.lam(al.point(k))
            d.append((lam_k - one) / lam_k)
    rows = []
    for j in range(m + 1):
        row = []
        for k in range(m + 1):
            if d[k].is_zero():
                row.append(one if j == k else zero)
                continue
            t = one if j <= k else lam_hub
            e = t * d[k] * hub_factor
            if j == k:
                e = e + one
            row.append(e)
        rows.append(row)
    return RatMatrix(rows)


def extension_row(ps: ParameterSystem, al: Alignment, k: int) -> RatMatrix:
    """Coordinates of the slot-k arc cycle as a row in the basis of slots 0..m.

    Slots 0..m are unit rows, slot m+1 is zero, and slot m+2 carries the
    closing cycle expressed through the basis.
    """
    m = ps.m
    zero = RatFunc.zero()
    one = RatFunc.one()
    if not 0 <= k <= m + 2:
        raise ParameterError(f"slot {k} out of range 0..{m + 2}")
    if k <= m:
        return RatMatrix.row_vector(
            [one if j == k else zero for j in range(m + 1)]
        )
    if k == m + 1:
        return RatMatrix.zeros(1, m + 1)
    lam_last = ps.lam(al.point(m + 2))
    pref = -(lam_last / (lam_last - one))
    entries = []
    prefix = one
    for j in range(m + 1):
        lam_j = ps.lam(al.point(j))
        entries.append(pref * prefix * (lam_j - one))
        prefix = prefix * lam_j
    return RatMatrix.row_vector(entries)


def extension_col(ps: ParameterSystem, al: Alignment, k: int) -> RatMatrix:
    """Coordinates of the slot-k circle-closed cycle as a column, slots 0..m.

    For the closing slot the normalization is fixed by pairing the basis
    rows against the closing cycle: every such pairing equals
    (lam_last^-1 - 1)/(lam_hub^-1 - 1), which forces the suffix products
    of slot multipliers to be scaled by -lam_hub.
    """
    m = ps.m
    zero = RatFunc.zero()
    one = RatFunc.one()
    if not 0 <= k <= m + 2:
        raise ParameterError(f"slot {k} out of range 0..{m + 2}")
    if k <= m:
        return RatMatrix.col_vector(
            [one if j == k else zero for j in range(m + 1)]
        )
    if k == m + 1:
        return RatMatrix.zeros(m + 1, 1)
    pref = -ps.lam(al.point(m + 1))
    entries = []
    suffix = one
    for j in range(m, -1, -1):
        suffix = suffix * ps.lam(al.point(j))
        entries.append(pref * suffix)
    entries.reverse()
    return RatMatrix.col_vector(entries)


def extension_vectors(
    ps: ParameterSystem, al: Alignment, k: int
) -> tuple[RatMatrix, RatMatrix]:
    """Row and column coordinates of the slot-k cycles in the two bases."""
    return extension_row(ps, al, k), extension_col(ps, al, k)


def det_formula(ps: ParameterSystem, al: Alignment) -> RatFunc:
    """Closed form of the intersection determinant."""
    one = RatFunc.one()
    lam_last = ps.lam(al.point(ps.m + 2))
    lam_hub = ps.lam(al.point(ps.m + 1))
    return (one - lam_last) / (one - lam_hub.inverse())


def det_check(ps: ParameterSystem, al: Alignment) -> Check:
    """Compare the eliminated determinant with its closed form."""
    h = intersection_matrix(ps, al)
    got = mat_det(h)
    want = det_formula(ps, al)
    ok = got == want
    witness = None if ok else {"determinant": str(got), "closed_form": str(want)}
    return Check(name="intersection-determinant", passed=ok, witness=witness)


def pairing_formula(ps: ParameterSystem, al: Alignment) -> RatFunc:
    """Closed form of the self-pairing of the closing cycle pair."""
    one = RatFunc.one()
    lam_last = ps.lam(al.point(ps.m + 2))
    lam_hub = ps.lam(al.point(ps.m + 1))
    return one + (lam_last - one) / ((lam_hub - one) * lam_last)


def pairing_check(ps: ParameterSystem, al: Alignment) -> Check:
    """Pair the closing row against the closing column through the matrix."""
    h = intersection_matrix(ps, al)
    row = extension_row(ps, al, ps.m + 2)
    col = extension_col(ps, al, ps.m + 2)
    got = mat_mul(mat_mul(row, h), col).entry(0, 0)
    want = pairing_formula(ps, al)
    ok = got == want
    witness = None if ok else {"pairing": str(got), "closed_form": str(want)}
    return Check(name="closing-cycle-pairing", passed=ok, witness=witness)


# ---------------------------------------------------------------------------
# JSON interchange


def params_from_json(obj: dict) -> tuple[ParameterSystem, Alignment]:
    """Build and validate a parameter system from its JSON form.

    Expected shape::

        {"m": 2,
         "alphas": [{"type": "integral", "value": 1},
                    {"type": "symbolic", "lambda": "s", "numeric_hint": [0.3, 0.0]},
                    ...],
         "alignment_override": [3, 0, 1, 2, 4]}   # optional
    """
    if not isinstance(obj, dict):
        raise ParameterError("parameter JSON must be an object")
    try:
        m = int(obj["m"])
        alphas = obj["alphas"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ParameterError(f"missing or malformed field: {exc}") from exc
    if not isinstance(alphas, list):
        raise ParameterError("'alphas' must be a list")
    entries: list[Entry] = []
    for i, spec in enumerate(alphas):
        if not isinstance(spec, dict) or "type" not in spec:
            raise ParameterError(f"alpha entry {i} must be an object with a 'type'")
        kind = spec["type"]
        if kind == "integral":
            try:
                entries.append(Integral(value=int(spec["value"])))
            except (KeyError, TypeError, ValueError) as exc:
                raise ParameterError(f"alpha entry {i}: bad integral value") from exc
        elif kind == "symbolic":
            try:
                mono = parse_monomial(str(spec["lambda"]))
            except KeyError as exc:
                raise ParameterError(f"alpha entry {i}: missing 'lambda'") from exc
            hint = None
            if "numeric_hint" in spec and spec["numeric_hint"] is not None:
                pair = spec["numeric_hint"]
                if not (isinstance(pair, (list, tuple)) and len(pair) == 2):
                    raise ParameterError(
                        f"alpha entry {i}: numeric_hint must be [re, im]"
                    )
                hint = complex(float(pair[0]), float(pair[1]))
            entries.append(NonIntegral(multiplier=mono, numeric_hint=hint))
        else:
            raise ParameterError(f"alpha entry {i}: unknown type {kind!r}")
    ps = ParameterSystem(m=m, entries=tuple(entries))
    validate_params(ps)
    if "alignment_override" in obj and obj["alignment_override"] is not None:
        if not isinstance(obj["alignment_override"], list):
            raise ParameterError("'alignment_override' must be a list of indices")
        al = validate_alignment(ps, [int(i) for i in obj["alignment_override"]])
    else:
        al = derive_alignment(ps)
    return ps, al


def params_to_json(ps: ParameterSystem, al: Alignment | None = None) -> dict:
    alphas = []
    for e in ps.entries:
        if isinstance(e, Integral):
            alphas.append({"type": "integral", "value": e.value})
        else:
            entry: dict = {"type": "symbolic", "lambda": str(e.multiplier)}
            if e.numeric_hint is not None:
                entry["numeric_hint"] = [e.numeric_hint.real, e.numeric_hint.imag]
            alphas.append(entry)
    out: dict = {"m": ps.m, "alphas": alphas}
    if al is not None:
        out["alignment_override"] = list(al.order)
    return out
