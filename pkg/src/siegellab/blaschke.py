"""Circle reflection and the symmetric (quasi-Blaschke style) model constructor.

Given any evaluator defined outside the closed unit disk, the model extends it
inside by reflection across the unit circle, so it commutes with z -> 1/conj(z)
by construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import EvalAtZero
from .maps import INFINITY, is_infinity
from .pullback import chordal_distance


def reflect(z: complex) -> complex:
    """z -> 1/conj(z): involution fixing the unit circle, swapping 0 and infinity."""
    if is_infinity(z):
        return 0j
    if z == 0:
        return INFINITY
    return 1.0 / z.conjugate()


@dataclass(frozen=True)
class SymmetricModel:
    """Evaluator on C \\ {0}: outer map for |z| >= 1, reflected outer map inside."""

    outer: Callable[[complex], complex]

    def __call__(self, z: complex) -> complex:
        if z == 0:
            raise EvalAtZero("the symmetric model is undefined at 0")
        if abs(z) >= 1.0:
            return self.outer(z)
        return reflect(self.outer(reflect(z)))


def build_model(outer: Callable[[complex], complex]) -> SymmetricModel:
    return SymmetricModel(outer)


@dataclass(frozen=True)
class SymmetryReport:
    samples: int
    rng_seed: int
    max_deviation: float


def verify_symmetry(model: Callable[[complex], complex], samples: int,
                    rng_seed: int) -> SymmetryReport:
    """Max chordal distance between model(z*)  and (model(z))* over random samples."""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    rng = np.random.default_rng(rng_seed)
    worst = 0.0
    count = 0
    while count < samples:
        z = complex(rng.normal(), rng.normal())
        if abs(z) < 1e-3:
            continue
        count += 1
        lhs = model(reflect(z))
        rhs = reflect(model(z))
        worst = max(worst, chordal_distance(lhs, rhs))
    return SymmetryReport(samples, rng_seed, worst)


@dataclass(frozen=True)
class Mobius:
    """w = (a z + b) / (c z + d), an analytic test conjugacy for the model."""

    a: complex
    b: complex
    c: complex
    d: complex

    def __post_init__(self):
        if self.a * self.d - self.b * self.c == 0:
            raise ValueError("degenerate Moebius coefficients")

    def __call__(self, z: complex) -> complex:
        if is_infinity(z):
            return self.a / self.c if self.c != 0 else INFINITY
        den = self.c * z + self.d
        if den == 0:
            return INFINITY
        return (self.a * z + self.b) / den

    def inverse(self) -> "Mobius":
        return Mobius(self.d, -self.b, -self.c, self.a)

    def derivative(self, z: complex) -> complex:
        den = self.c * z + self.d
        return (self.a * self.d - self.b * self.c) / (den * den)


def conjugated_outer(phi: Mobius, family) -> Callable[[complex], complex]:
    """phi o f o phi^{-1}, the natural outer map induced by an entire family."""
    phi_inv = phi.inverse()

    def outer(z: complex) -> complex:
        u = phi_inv(z)
        if is_infinity(u):
            return INFINITY
        v = family(u)
        if is_infinity(v):
            return phi(INFINITY)
        return phi(v)

    return outer
