"""Deterministic random parameter systems for property-style verification."""

from __future__ import annotations

import random

from .exactfield import MONO_ONE, Monomial
from .homology import (
    Alignment,
    Integral,
    NonIntegral,
    ParameterSystem,
    derive_alignment,
    validate_params,
)

_SYMBOL_POOL = ("s", "u", "w")


def random_parameter_system(
    seed: int,
    m_range: tuple[int, int] = (2, 6),
    max_symbols: int = 3,
    max_exponent: int = 2,
) -> tuple[ParameterSystem, Alignment]:
    """A random valid parameter system with its derived alignment.

    The number of integral exponents r is drawn from 0..m, every
    non-integral multiplier is a nontrivial Laurent monomial in at most
    ``max_symbols`` symbols, and one multiplier is chosen to close the
    product to one.  Fully deterministic in the seed.
    """
    rng = random.Random(seed)
    m = rng.randint(*m_range)
    n = m + 3
    r = rng.randint(0, m)
    integral = set(rng.sample(range(n), r))
    nonint = [i for i in range(n) if i not in integral]
    nsym = rng.randint(1, max_symbols)
    syms = _SYMBOL_POOL[:nsym]

    def random_monomial() -> Monomial:
        while True:
            mono = Monomial(
                {s: rng.randint(-max_exponent, max_exponent) for s in syms}
            )
            if not mono.is_one():
                return mono

    while True:
        monos: dict[int, Monomial] = {}
        prod = MONO_ONE
        for i in nonint[:-1]:
            mono = random_monomial()
            monos[i] = mono
            prod = prod * mono
        closing = prod.inverse()
        if not closing.is_one():
            monos[nonint[-1]] = closing
            break

    entries = []
    for i in range(n):
        if i in integral:
            entries.append(Integral(value=rng.randint(-2, 3)))
        else:
            entries.append(NonIntegral(multiplier=monos[i]))
    ps = ParameterSystem(m=m, entries=tuple(entries))
    validate_params(ps)
    return ps, derive_alignment(ps)
