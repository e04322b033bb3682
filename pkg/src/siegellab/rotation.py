"""Continued fractions for rotation numbers: expansion, convergents, bounded type."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

#: Fractional remainders below this are treated as exact rationals
#: (double precision noise floor).
RATIONAL_CUTOFF = 1e-14

GOLDEN_MEAN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class ContinuedFraction:
    """x = a0 + 1/(a1 + 1/(a2 + ...)) with positive partial quotients a1, a2, ..."""

    a0: int
    partial_quotients: tuple[int, ...]
    value: float

    def __post_init__(self):
        if any(a < 1 for a in self.partial_quotients):
            raise ValueError("partial quotients must be >= 1")

    @property
    def terms(self) -> list[int]:
        return [self.a0, *self.partial_quotients]

    def __str__(self):
        inner = ",".join(str(a) for a in self.partial_quotients)
        return f"[{self.a0};{inner}]"


def cf_expand(x: float, max_terms: int = 32) -> ContinuedFraction:
    """Gauss-map expansion of x, truncated at max_terms partial quotients.

    Stops early when the fractional remainder drops below the rational cutoff.
    """
    if not math.isfinite(x):
        raise ValueError("x must be finite")
    if max_terms < 1:
        raise ValueError("max_terms must be >= 1")
    a0 = math.floor(x)
    frac = x - a0
    quotients: list[int] = []
    for _ in range(max_terms):
        if frac < RATIONAL_CUTOFF:
            break
        y = 1.0 / frac
        a = math.floor(y)
        quotients.append(a)
        frac = y - a
    return ContinuedFraction(a0, tuple(quotients), x)


@dataclass(frozen=True)
class BoundedTypeReport:
    bounded: bool
    observed_max: int
    depth: int

    def __bool__(self):
        return self.bounded


def is_bounded_type(cf: ContinuedFraction, bound: int) -> BoundedTypeReport:
    """Decide sup a_n <= bound on the truncated expansion.

    Only the available partial quotients are inspected; the report carries the
    truncation depth since the true supremum ranges over infinitely many terms.
    """
    if not cf.partial_quotients:
        raise ValueError("continued fraction has no partial quotients")
    observed = max(cf.partial_quotients)
    return BoundedTypeReport(observed <= bound, observed, len(cf.partial_quotients))


def convergents(cf: ContinuedFraction) -> list[tuple[int, int]]:
    """Convergents p_k/q_k of the expansion, in lowest terms.

    Uses p_k = a_k p_{k-1} + p_{k-2}, q_k = a_k q_{k-1} + q_{k-2}.
    """
    out = []
    p_prev, q_prev = 1, 0
    p, q = cf.a0, 1
    out.append((p, q))
    for a in cf.partial_quotients:
        p, p_prev = a * p + p_prev, p
        q, q_prev = a * q + q_prev, q
        g = math.gcd(p, q)
        out.append((p // g, q // g))
    return out


def reconstruct(cf: ContinuedFraction) -> Fraction:
    """Exact rational value of the truncated expansion."""
    acc = Fraction(0)
    for a in reversed(cf.partial_quotients):
        acc = 1 / (a + acc)
    return cf.a0 + acc
