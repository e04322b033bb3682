"""Transcendental entire map families with exact derivatives, singular data and
analytic inverse branches.

Three families are provided:

* ``Sine(theta)``      -- z -> e^{2 pi i theta} sin(z)
* ``ZExp(lam)``        -- z -> lam * z * e^z
* ``ExpAffine(lam)``   -- z -> e^z + z + Log(lam)   (principal logarithm)

Evaluation never raises on overflow: results that leave the range of double
precision are returned as the point at infinity (a non-finite complex), which
escape-time rendering treats as escaped.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import lambertw as _scipy_lambertw

from .errors import DomainError, NearSingularValue, NoConvergence

TWO_PI = 2.0 * math.pi

#: Tagged point at infinity.  Any non-finite complex is treated as infinity.
INFINITY = complex(math.inf, math.inf)

#: Real-part cap above which exp() overflows double precision.
_EXP_CAP = 709.0


def is_infinity(z: complex) -> bool:
    """True when z represents the point at infinity (any non-finite complex)."""
    return not (math.isfinite(z.real) and math.isfinite(z.imag))


@dataclass(frozen=True)
class PointLattice:
    """Arithmetic progression base + k*step of points in the plane, k integer."""

    base: complex
    step: complex

    def point(self, k: int) -> complex:
        return self.base + k * self.step

    def points(self, k_min: int, k_max: int) -> list[complex]:
        return [self.point(k) for k in range(k_min, k_max + 1)]

    def distance(self, w: complex) -> float:
        """Euclidean distance from w to the nearest lattice point."""
        t = ((w - self.base) / self.step).real
        k = round(t)
        return min(abs(w - self.point(k + dk)) for dk in (-1, 0, 1))


@dataclass(frozen=True)
class SingularData:
    """Critical points/values and asymptotic values of a map family.

    ``critical_points`` and ``critical_values`` are either finite lists or a
    :class:`PointLattice` when the family has infinitely many.
    """

    critical_points: list[complex] | PointLattice
    critical_values: list[complex] | PointLattice
    asymptotic_values: list[complex] = field(default_factory=list)

    def singular_value_distance(self, w: complex) -> float:
        """Euclidean distance from w to the nearest singular value."""
        d = math.inf
        cv = self.critical_values
        if isinstance(cv, PointLattice):
            d = cv.distance(w)
        else:
            for v in cv:
                d = min(d, abs(w - v))
        for v in self.asymptotic_values:
            d = min(d, abs(w - v))
        return d


class MapFamily:
    """Common interface of the concrete families."""

    name: str = "abstract"

    def __call__(self, z: complex) -> complex:
        raise NotImplementedError

    def derivative(self, z: complex) -> complex:
        raise NotImplementedError

    def singular_data(self) -> SingularData:
        raise NotImplementedError

    def inverse(self, w: complex, branch: int) -> complex:
        raise NotImplementedError

    def eval_array(self, z: np.ndarray) -> np.ndarray:
        """Vectorized evaluation; overflow produces non-finite entries."""
        raise NotImplementedError

    # -- shared helpers -------------------------------------------------

    def _check_regular(self, w: complex, tol: float = 1e-9) -> None:
        if self.singular_data().singular_value_distance(w) < tol:
            raise NearSingularValue(f"{w} is within {tol} of a singular value of {self.name}")

    def nearest_inverse(self, w: complex, ref: complex, k_range: int = 4) -> complex:
        """Preimage of w closest to ref, scanning branches around the reference.

        Used by round-trip tests and by pullback seed selection.
        """
        best = None
        center = self._branch_hint(ref)
        for k in range(center - k_range, center + k_range + 1):
            try:
                z = self.inverse(w, k)
            except (DomainError, NoConvergence):
                continue
            if best is None or abs(z - ref) < abs(best - ref):
                best = z
        if best is None:
            raise NoConvergence(f"no inverse branch of {self.name} found near {ref}")
        return best

    def _branch_hint(self, ref: complex) -> int:
        return 0


@dataclass(frozen=True)
class Sine(MapFamily):
    """S(z) = e^{2 pi i theta} sin(z) with rotation number theta in (0, 1)."""

    theta: float
    name: str = field(default="sine", init=False)

    def __post_init__(self):
        if not 0.0 < self.theta < 1.0:
            raise ValueError("theta must lie in (0, 1)")

    @property
    def rotation(self) -> complex:
        return cmath.exp(2j * math.pi * self.theta)

    def __call__(self, z: complex) -> complex:
        if abs(z.imag) > _EXP_CAP:
            return INFINITY
        try:
            return self.rotation * cmath.sin(z)
        except OverflowError:
            return INFINITY

    def derivative(self, z: complex) -> complex:
        if abs(z.imag) > _EXP_CAP:
            return INFINITY
        try:
            return self.rotation * cmath.cos(z)
        except OverflowError:
            return INFINITY

    def singular_data(self) -> SingularData:
        rot = self.rotation
        return SingularData(
            critical_points=PointLattice(math.pi / 2, math.pi),
            critical_values=[rot, -rot],
            asymptotic_values=[],
        )

    def inverse(self, w: complex, branch: int) -> complex:
        """Branch k of the inverse: (-1)^k Arcsin(e^{-2 pi i theta} w) + k pi."""
        self._check_regular(w)
        u = cmath.asin(w / self.rotation)
        if branch % 2:
            u = -u
        return u + branch * math.pi

    def eval_array(self, z: np.ndarray) -> np.ndarray:
        with np.errstate(over="ignore", invalid="ignore"):
            out = self.rotation * np.sin(z)
        return out

    def _branch_hint(self, ref: complex) -> int:
        return round(ref.real / math.pi)


@dataclass(frozen=True)
class ZExp(MapFamily):
    """f(z) = lam * z * e^z, lam != 0.

    Critical point -1, critical value -lam/e, asymptotic value 0 (a fixed point).
    """

    lam: complex
    name: str = field(default="zexp", init=False)

    def __post_init__(self):
        if self.lam == 0:
            raise ValueError("lam must be nonzero")

    def __call__(self, z: complex) -> complex:
        if z.real > _EXP_CAP:
            return INFINITY
        try:
            return self.lam * z * cmath.exp(z)
        except OverflowError:
            return INFINITY

    def derivative(self, z: complex) -> complex:
        if z.real > _EXP_CAP:
            return INFINITY
        try:
            return self.lam * cmath.exp(z) * (1 + z)
        except OverflowError:
            return INFINITY

    def singular_data(self) -> SingularData:
        return SingularData(
            critical_points=[-1.0 + 0j],
            critical_values=[-self.lam / math.e],
            asymptotic_values=[0j],
        )

    def inverse(self, w: complex, branch: int) -> complex:
        """Branch k of the inverse via Lambert W: W_k(w/lam)."""
        self._check_regular(w)
        return lambert_w(branch, w / self.lam)

    def eval_array(self, z: np.ndarray) -> np.ndarray:
        with np.errstate(over="ignore", invalid="ignore"):
            return self.lam * z * np.exp(z)

    def _branch_hint(self, ref: complex) -> int:
        return round(ref.imag / TWO_PI)


@dataclass(frozen=True)
class ExpAffine(MapFamily):
    """g(z) = e^z + z + Log(lam), the exponential lift of ZExp(lam).

    Satisfies ZExp(lam)(e^z) = e^{g(z)}.  Log is the principal branch.
    """

    lam: complex
    name: str = field(default="expaffine", init=False)

    def __post_init__(self):
        if self.lam == 0:
            raise ValueError("lam must be nonzero")

    @property
    def log_lam(self) -> complex:
        return cmath.log(self.lam)

    def __call__(self, z: complex) -> complex:
        if z.real > _EXP_CAP:
            return INFINITY
        return cmath.exp(z) + z + self.log_lam

    def derivative(self, z: complex) -> complex:
        if z.real > _EXP_CAP:
            return INFINITY
        return cmath.exp(z) + 1.0

    def singular_data(self) -> SingularData:
        # g'(z) = e^z + 1 vanishes at (2k+1) pi i; g there is -1 + (2k+1) pi i + Log lam.
        return SingularData(
            critical_points=PointLattice(1j * math.pi, 2j * math.pi),
            critical_values=PointLattice(-1.0 + 1j * math.pi + self.log_lam, 2j * math.pi),
            asymptotic_values=[],
        )

    def inverse(self, w: complex, branch: int, max_iter: int = 60) -> complex:
        """Damped Newton from a seed grid with spacing pi in the imaginary direction.

        The seed grid is indexed by the branch integer; no closed form exists.
        """
        self._check_regular(w)
        z = complex((w - self.log_lam).real if (w - self.log_lam).real < 0 else 0.0,
                    branch * math.pi)
        fz = self(z) - w
        for _ in range(max_iter):
            if abs(fz) <= 1e-13 * (1.0 + abs(w)):
                return z
            dz = self.derivative(z)
            if dz == 0 or is_infinity(dz):
                raise NoConvergence("Newton hit a critical point of expaffine")
            step = -fz / dz
            # damping: halve the step until the residual decreases
            t = 1.0
            for _ in range(40):
                z_new = z + t * step
                f_new = self(z_new) - w
                if not is_infinity(f_new) and abs(f_new) < abs(fz):
                    break
                t *= 0.5
            else:
                raise NoConvergence("damped Newton stalled for expaffine inverse")
            z, fz = z_new, f_new
        raise NoConvergence("expaffine inverse did not converge")

    def eval_array(self, z: np.ndarray) -> np.ndarray:
        with np.errstate(over="ignore", invalid="ignore"):
            return np.exp(z) + z + self.log_lam

    def _branch_hint(self, ref: complex) -> int:
        return round(ref.imag / math.pi)


def lambert_w(branch: int, w: complex, tol: float = 1e-13) -> complex:
    """Branch `branch` of the Lambert W function: z with z * e^z = w.

    Backed by scipy's evaluator plus a Halley polish so the residual satisfies
    |z e^z - w| <= tol * (1 + |w|) away from the branch point -1/e.
    """
    w = complex(w)
    if w == 0:
        if branch == 0:
            return 0j
        raise DomainError("w = 0 lies only on branch 0 of Lambert W")
    z = complex(_scipy_lambertw(w, branch))
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise DomainError(f"Lambert W undefined for branch {branch} at {w}")
    # Halley refinement (Corless et al. 1996, eq. 5.9)
    for _ in range(8):
        e = cmath.exp(z)
        f = z * e - w
        if abs(f) <= tol * (1.0 + abs(w)):
            break
        denom = e * (z + 1) - (z + 2) * f / (2 * z + 2) if z != -1 else e * (z + 1)
        if denom == 0:
            break
        z = z - f / denom
    return z


# -- functional wrappers matching the operation-style API ----------------------


def eval_map(family: MapFamily, z: complex) -> complex:
    return family(z)


def derivative(family: MapFamily, z: complex) -> complex:
    return family.derivative(z)


def singular_data(family: MapFamily) -> SingularData:
    return family.singular_data()


def inverse_branch(family: MapFamily, w: complex, branch: int) -> complex:
    return family.inverse(w, branch)
