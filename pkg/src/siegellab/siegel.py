"""Siegel linearizers, boundary orbits and rotation number measurement.

The Taylor machinery is scalar-type agnostic: coefficients may be Python
complexes or mpmath numbers.  High orders of the linearizer need the latter,
because the coefficients grow like (1/r)^k with r the conformal radius and the
conjugacy residual is then swamped by double precision rounding.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateOrbit, SmallDivisorBlowup
from .maps import MapFamily, is_infinity


@dataclass(frozen=True)
class TaylorSeries:
    """Truncated power series sum c_k (z - center)^k, k = 0..K."""

    center: complex
    coeffs: tuple

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def __add__(self, other: "TaylorSeries") -> "TaylorSeries":
        if other.center != self.center:
            raise ValueError("series centers differ")
        n = min(len(self.coeffs), len(other.coeffs))
        return TaylorSeries(self.center,
                            tuple(a + b for a, b in zip(self.coeffs[:n], other.coeffs[:n])))

    def __mul__(self, other):
        if not isinstance(other, TaylorSeries):
            return TaylorSeries(self.center, tuple(c * other for c in self.coeffs))
        if other.center != self.center:
            raise ValueError("series centers differ")
        n = min(len(self.coeffs), len(other.coeffs))
        out = [0] * n
        for i, a in enumerate(self.coeffs[:n]):
            for j in range(n - i):
                out[i + j] += a * other.coeffs[j]
        return TaylorSeries(self.center, tuple(out))

    __rmul__ = __mul__

    def compose_inner(self, inner_coeffs) -> tuple:
        """Coefficients of self(center + g(t)) where g(t) = sum_{k>=1} g_k t^k.

        Horner evaluation truncated at the order of self.
        """
        n = len(self.coeffs)
        g = list(inner_coeffs[:n - 1])  # g_1 .. g_{n-1}
        acc = [0] * n
        for c in reversed(self.coeffs):
            # acc = acc * g + c, with g having zero constant term
            new = [0] * n
            for i, a in enumerate(acc):
                if a == 0:
                    continue
                for j, b in enumerate(g, start=1):
                    if i + j < n:
                        new[i + j] += a * b
            new[0] += c
            acc = new
        return tuple(acc)

    def eval(self, z: complex):
        u = z - self.center
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * u + c
        return acc


def _factorials(n: int):
    out = [1.0]
    for k in range(1, n + 1):
        out.append(out[-1] * k)
    return out


def taylor_at(family: MapFamily, center: complex, order: int) -> TaylorSeries:
    """Series of the map about `center`, via recentred sin/exp series."""
    from .maps import ExpAffine, Sine, ZExp

    if order < 2:
        raise ValueError("order must be >= 2")
    fact = _factorials(order)
    c = [0j] * (order + 1)
    if isinstance(family, Sine):
        # sin(a + u) = sin a cos u + cos a sin u
        rot = family.rotation
        sa, ca = cmath.sin(center), cmath.cos(center)
        for k in range(order + 1):
            m, r = divmod(k, 2)
            base = sa if r == 0 else ca
            c[k] = rot * base * (-1) ** m / fact[k]
    elif isinstance(family, ZExp):
        # lam (a + u) e^{a + u} = lam e^a (a + u) sum u^k / k!
        pref = family.lam * cmath.exp(center)
        c[0] = pref * center
        for k in range(1, order + 1):
            c[k] = pref * (center / fact[k] + 1.0 / fact[k - 1])
    elif isinstance(family, ExpAffine):
        ea = cmath.exp(center)
        c[0] = ea + center + family.log_lam
        c[1] = ea + 1.0
        for k in range(2, order + 1):
            c[k] = ea / fact[k]
    else:
        raise TypeError(f"unsupported family {family!r}")
    return TaylorSeries(center, tuple(c))


@dataclass(frozen=True)
class Linearizer:
    """psi(zeta) = center + zeta + b_2 zeta^2 + ... conjugating f to zeta -> multiplier * zeta."""

    multiplier: complex
    center: complex
    coeffs: tuple  # b_1 = 1, b_2 .. b_K

    @property
    def order(self) -> int:
        return len(self.coeffs)

    def psi_coeffs(self) -> tuple:
        return self.coeffs


def linearizer(series: TaylorSeries, order: int, small_divisor_floor: float = 1e-12) -> Linearizer:
    """Solve f(psi(zeta)) = psi(multiplier * zeta) coefficient by coefficient.

    `series` is the Taylor series of f about its fixed point; the linear
    coefficient is the multiplier and must be of modulus one with nonzero
    small divisors multiplier^k - multiplier through the requested order.
    """
    lam = series.coeffs[1]
    if abs(abs(lam) - 1.0) > 1e-9:
        raise ValueError("multiplier must have modulus 1")
    if abs(complex(series.coeffs[0]) - complex(series.center)) > 1e-9 * (1 + abs(series.center)):
        raise ValueError("series is not centered at a fixed point")
    if order > series.order:
        raise ValueError("requested order exceeds the series order")
    for k in range(2, order + 1):
        if abs(lam ** k - lam) < small_divisor_floor:
            raise SmallDivisorBlowup(f"|multiplier^{k} - multiplier| below floor")
    c = series.coeffs
    one = lam / lam
    # P[k][n] = coefficient of zeta^n in psi(zeta)^k; filled order by order.
    b = [0 * one] * (order + 1)
    b[1] = one
    P = [[0 * one] * (order + 1) for _ in range(order + 1)]
    P[1][1] = one
    for n in range(2, order + 1):
        for k in range(2, n + 1):
            s = 0 * one
            for j in range(1, n - k + 2):
                s += b[j] * P[k - 1][n - j]
            P[k][n] = s
        rhs = 0 * one
        for k in range(2, n + 1):
            rhs += c[k] * P[k][n]
        b[n] = rhs / (lam ** n - lam)
        P[1][n] = b[n]
    return Linearizer(lam, series.center, tuple(b[1:]))


def conjugacy_residual(series: TaylorSeries, lin: Linearizer) -> float:
    """Max coefficient modulus of f(psi(zeta)) - psi(multiplier * zeta).

    Recomputed by full Horner composition, independent of the order-by-order
    solve inside :func:`linearizer`.
    """
    n = lin.order
    f_u = TaylorSeries(0j, tuple(series.coeffs[: n + 1]))
    psi = lin.coeffs  # b_1 .. b_n
    lhs = f_u.compose_inner(psi)
    lam = lin.multiplier
    resid = 0.0
    for k in range(1, n + 1):
        rhs_k = psi[k - 1] * lam ** k
        resid = max(resid, abs(complex(lhs[k] - rhs_k)))
    resid = max(resid, abs(complex(lhs[0] - (series.coeffs[0] - series.center))))
    return resid


@dataclass(frozen=True)
class BoundaryOrbit:
    points: np.ndarray  # complex array, points[0] = seed
    seed: complex
    escaped: bool


def trace_boundary(family: MapFamily, seed: complex, n: int,
                   escape_radius: float = 10.0) -> BoundaryOrbit:
    """Iterate the seed n times, recording the orbit; stops early on escape.

    Seeding with a critical value on the Siegel boundary traces a forward
    invariant, boundary-dense orbit for bounded type rotation numbers.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    pts = np.empty(n + 1, dtype=complex)
    z = complex(seed)
    pts[0] = z
    escaped = False
    count = 1
    for i in range(1, n + 1):
        z = family(z)
        if is_infinity(z) or abs(z) > escape_radius:
            pts[i] = z
            count = i + 1
            escaped = True
            break
        pts[i] = z
        count = i + 1
    return BoundaryOrbit(pts[:count], complex(seed), escaped)


@dataclass(frozen=True)
class RotationMeasurement:
    value: float
    error_bound: float
    bad_steps: int


def measure_rotation_number(orbit: BoundaryOrbit, center: complex = 0j) -> RotationMeasurement:
    """Average winding of arg(points - center) per step, reduced mod 1.

    Angular increments are unwrapped assuming steps below pi; larger jumps
    are counted and inflate the reported error bound instead of failing.
    """
    if orbit.escaped:
        raise ValueError("orbit escaped; rotation number undefined")
    rel = orbit.points - center
    n = len(rel)
    if n < 2:
        raise DegenerateOrbit("need at least two orbit points")
    mods = np.abs(rel)
    if np.min(mods) < 1e-12 * (1.0 + np.max(mods)):
        raise DegenerateOrbit("orbit point coincides with the center")
    ang = np.angle(rel)
    steps = np.diff(ang)
    steps = np.mod(steps + math.pi, 2 * math.pi) - math.pi
    bad = int(np.sum(np.abs(steps) > math.pi * (1 - 1e-12)))
    total = float(np.sum(steps))
    value = (total / (2 * math.pi * (n - 1))) % 1.0
    err = 1.0 / (n - 1) + bad * (1.0 / (n - 1))
    return RotationMeasurement(value, err, bad)


def inner_radius(lin: Linearizer) -> float:
    """Heuristic conformal radius proxy: 1 / limsup |b_k|^{1/k} over the tail half.

    Low accuracy by construction; returns +inf for the identity linearizer.
    """
    b = [abs(complex(x)) for x in lin.coeffs]
    if len(b) < 10:
        raise ValueError("need at least 10 coefficients")
    tail = [(k + 1, v) for k, v in enumerate(b) if (k + 1) >= len(b) // 2 and v > 0]
    if not tail:
        return math.inf
    limsup = max(v ** (1.0 / k) for k, v in tail)
    if limsup == 0:
        return math.inf
    return 1.0 / limsup
