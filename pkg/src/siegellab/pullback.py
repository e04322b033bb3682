"""Jordan disk pullbacks under inverse branches and chordal diameter experiments.

A Jordan disk is approximated by a closed polyline.  Lifting continues one
inverse branch around the boundary by predictor-corrector Newton steps; a lift
that fails to close up signals monodromy (the component has degree > 1) and is
reported, not silently accepted.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import (ExperimentDegenerate, LiftDidNotClose, NoConvergence,
                     SingularValueOnBoundary)
from .maps import MapFamily, PointLattice, is_infinity

#: Closure and vertex-correspondence tolerance for lifted polylines.
CLOSE_TOL = 1e-8

#: Max working vertices during adaptive refinement of one lift.
MAX_VERTICES = 2 ** 12


def chordal_distance(z: complex, w: complex) -> float:
    """Spherical chord 2|z-w| / sqrt((1+|z|^2)(1+|w|^2)), with limits at infinity."""
    zi, wi = is_infinity(z), is_infinity(w)
    if zi and wi:
        return 0.0
    if zi:
        return 2.0 / math.hypot(1.0, abs(w))
    if wi:
        return 2.0 / math.hypot(1.0, abs(z))
    return 2.0 * abs(z - w) / math.sqrt((1.0 + abs(z) ** 2) * (1.0 + abs(w) ** 2))


@dataclass(frozen=True)
class JordanDiskApprox:
    """Positively oriented closed polyline approximating a bounded Jordan disk.

    Vertices are stored without repeating the first point.
    """

    boundary: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.boundary, dtype=complex)
        if len(v) < 16:
            raise ValueError("need at least 16 boundary vertices")
        if not np.all(np.isfinite(v.real) & np.isfinite(v.imag)):
            raise ValueError("boundary vertices must be finite")
        if _signed_area(v) < 0:
            v = v[::-1].copy()
        object.__setattr__(self, "boundary", v)

    @classmethod
    def circle(cls, center: complex, radius: float, n: int = 128) -> "JordanDiskApprox":
        t = np.linspace(0.0, 2 * math.pi, n, endpoint=False)
        return cls(center + radius * np.exp(1j * t))

    def contains(self, z: complex) -> bool:
        """Winding number test at the polyline resolution."""
        return abs(self.winding(z) - 1) < 0.5

    def winding(self, z: complex) -> float:
        rel = self.boundary - z
        if np.min(np.abs(rel)) == 0.0:
            return 1.0
        ang = np.angle(np.roll(rel, -1) / rel)
        return float(np.sum(ang) / (2 * math.pi))

    def interior_point(self) -> complex:
        """A point inside the disk; vertex centroid with a winding fallback."""
        c = complex(np.mean(self.boundary))
        # a disk at the resolution limit: the winding test is all roundoff,
        # and the centroid is the best interior estimate available
        if float(np.max(np.abs(self.boundary - c))) < 1e-9 * (1.0 + abs(c)):
            return c
        if self.contains(c):
            return c
        # fall back: probe inward from edge midpoints along the normal
        v = self.boundary
        for i in range(0, len(v), max(1, len(v) // 16)):
            a, b = v[i], v[(i + 1) % len(v)]
            mid, edge = (a + b) / 2, b - a
            normal = 1j * edge / abs(edge)  # inward for positive orientation
            for s in (0.5, 0.1, 0.02):
                p = mid + s * normal * abs(edge)
                if self.contains(p):
                    return complex(p)
        raise ValueError("could not locate an interior point")

    def is_simple(self, tol: float = 1e-9) -> bool:
        return _polyline_simple(self.boundary, tol)


def _signed_area(v: np.ndarray) -> float:
    # center first: the shoelace sum cancels catastrophically for small
    # polygons far from the origin, and area is translation invariant
    v = v - np.mean(v)
    x, y = v.real, v.imag
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def _polyline_simple(v: np.ndarray, tol: float) -> bool:
    """All-pairs proper-intersection test between non-adjacent segments."""
    n = len(v)
    a = v
    b = np.roll(v, -1)
    d = b - a
    scale = max(1.0, float(np.max(np.abs(d))))
    for i in range(n - 2):
        j0 = i + 2
        j1 = n if i > 0 else n - 1  # segment 0 is adjacent to segment n-1
        if j0 >= j1:
            continue
        aj, dj = a[j0:j1], d[j0:j1]
        den = (d[i].real * dj.imag - d[i].imag * dj.real)
        rel = aj - a[i]
        num_t = rel.real * dj.imag - rel.imag * dj.real
        num_s = rel.real * d[i].imag - rel.imag * d[i].real
        with np.errstate(divide="ignore", invalid="ignore"):
            t = num_t / den
            s = num_s / den
        eps = tol / scale
        hit = (np.abs(den) > 1e-300) & (t > eps) & (t < 1 - eps) & (s > eps) & (s < 1 - eps)
        if np.any(hit):
            return False
    return True


def chordal_diameter(disk: JordanDiskApprox) -> float:
    return chordal_diameter_points(disk.boundary)


def chordal_diameter_points(pts: np.ndarray) -> float:
    """Max pairwise chordal distance, chunked to bound memory."""
    pts = np.asarray(pts, dtype=complex)
    norm = np.sqrt(1.0 + np.abs(pts) ** 2)
    best = 0.0
    chunk = 512
    for i in range(0, len(pts), chunk):
        blk = pts[i:i + chunk]
        nb = norm[i:i + chunk]
        d = 2.0 * np.abs(blk[:, None] - pts[None, :]) / (nb[:, None] * norm[None, :])
        best = max(best, float(d.max()))
    return best


def lift_disk(family: MapFamily, disk: JordanDiskApprox, seed: complex,
              singular_tol: float = 1e-6) -> JordanDiskApprox:
    """Lift the disk through the inverse branch selected by the seed.

    The seed is a preimage of an interior point.  The branch is continued to
    the boundary and then around it by predictor-corrector Newton steps with
    transient subdivision; the result must close up within CLOSE_TOL or the
    lift has monodromy.
    """
    w_seed = family(seed)
    if is_infinity(w_seed):
        raise ValueError("f(seed) must lie inside the disk")
    c = complex(np.mean(disk.boundary))
    spread = float(np.max(np.abs(disk.boundary - c)))
    if spread < 1e-9 * (1.0 + abs(c)):
        # disk at the double-precision resolution limit: winding numbers and
        # closure are roundoff noise, but the disk is far smaller than any
        # branch separation, so a pointwise Newton lift from the seed is exact
        if abs(w_seed - c) > max(10.0 * spread, 1e-9 * (1.0 + abs(c))):
            raise ValueError("f(seed) must lie inside the disk")
        _check_boundary_regular(family, disk.boundary, singular_tol)
        lifted = np.array([_newton(family, seed, complex(w)) for w in disk.boundary])
        return JordanDiskApprox(lifted)
    if not disk.contains(w_seed):
        raise ValueError("f(seed) must lie inside the disk")
    _check_boundary_regular(family, disk.boundary, singular_tol)

    budget = [MAX_VERTICES]
    # walk from the seed's image to the first boundary vertex, then around
    z = _continue_segment(family, seed, w_seed, disk.boundary[0], budget)
    lifted = np.empty(len(disk.boundary), dtype=complex)
    lifted[0] = z
    for i in range(1, len(disk.boundary)):
        z = _continue_segment(family, z, disk.boundary[i - 1], disk.boundary[i], budget)
        lifted[i] = z
    z_close = _continue_segment(family, z, disk.boundary[-1], disk.boundary[0], budget)
    if abs(z_close - lifted[0]) > CLOSE_TOL * (1.0 + abs(lifted[0])):
        raise LiftDidNotClose(
            f"lift returned {z_close} vs start {lifted[0]}; component has degree > 1")
    return JordanDiskApprox(lifted)


def _check_boundary_regular(family: MapFamily, boundary: np.ndarray, tol: float) -> None:
    sd = family.singular_data()
    values = []
    cv = sd.critical_values
    if isinstance(cv, PointLattice):
        # lattice values near the boundary's bounding box
        span = int(abs(np.max(boundary.imag) - np.min(boundary.imag)) / abs(cv.step)) + 2
        k0 = int(((complex(np.mean(boundary)) - cv.base) / cv.step).real)
        values.extend(cv.points(k0 - span, k0 + span))
    else:
        values.extend(cv)
    values.extend(sd.asymptotic_values)
    for v in values:
        d = 2.0 * np.abs(boundary - v) / np.sqrt(
            (1.0 + np.abs(boundary) ** 2) * (1.0 + abs(v) ** 2))
        if float(np.min(d)) < tol:
            raise SingularValueOnBoundary(
                f"singular value {v} within chordal {tol} of the boundary")


def _newton(family: MapFamily, z0: complex, w: complex, max_iter: int = 20) -> complex:
    z = z0
    tol = 1e-11 * (1.0 + abs(w))
    for _ in range(max_iter):
        f = family(z)
        if is_infinity(f):
            raise NoConvergence("evaluation overflowed during Newton")
        r = f - w
        if abs(r) <= tol:
            return z
        d = family.derivative(z)
        if d == 0 or is_infinity(d):
            raise NoConvergence("derivative degenerate during Newton")
        z = z - r / d
    f = family(z)
    if not is_infinity(f) and abs(f - w) <= tol:
        return z
    raise NoConvergence("Newton corrector did not converge")


def _continue_segment(family: MapFamily, z: complex, w_from: complex, w_to: complex,
                      budget: list) -> complex:
    """Continue the inverse branch along the segment w_from -> w_to.

    Subdivides when the corrector moves further than half the local step of
    the lifted curve, which would risk hopping to a different branch.
    """
    stack = [(w_from, w_to)]
    while stack:
        a, b = stack.pop()
        try:
            z_new = _newton(family, z, b)
        except NoConvergence:
            z_new = None
        if z_new is not None:
            # expected lifted spacing of this sub-segment from the local derivative;
            # a much larger corrector move means we risk hopping branches
            d = family.derivative(z)
            expected = abs(b - a) / max(abs(d), 1e-12) if not is_infinity(d) else 0.0
            ok = abs(z_new - z) <= 2.0 * expected + 1e-12 or abs(b - a) < 1e-13
        else:
            ok = False
        if ok:
            z = z_new
            continue
        if budget[0] <= 0:
            if z_new is None:
                raise NoConvergence("refinement budget exhausted during lift")
            z = z_new
            continue
        budget[0] -= 1
        mid = (a + b) / 2
        stack.append((mid, b))
        stack.append((a, mid))
    return z


class BranchPolicy:
    """Strategy choosing the seed (a preimage of an interior point) per level."""

    def seed(self, family: MapFamily, disk: JordanDiskApprox, level: int,
             rng: np.random.Generator) -> complex:
        raise NotImplementedError


@dataclass(frozen=True)
class FixedBranch(BranchPolicy):
    branch: int

    def seed(self, family, disk, level, rng):
        return family.inverse(disk.interior_point(), self.branch)


@dataclass(frozen=True)
class RandomBranch(BranchPolicy):
    branches: tuple[int, ...] = (-1, 0, 1)

    def seed(self, family, disk, level, rng):
        k = int(rng.choice(np.asarray(self.branches)))
        return family.inverse(disk.interior_point(), k)


@dataclass(frozen=True)
class NearestBranch(BranchPolicy):
    reference: complex
    k_range: int = 4

    def seed(self, family, disk, level, rng):
        return family.nearest_inverse(disk.interior_point(), self.reference, self.k_range)


@dataclass
class ChainFailure:
    level: int
    error: Exception


@dataclass
class PullbackChain:
    levels: list[JordanDiskApprox]
    branch_seeds: list[complex]
    diameters: list[float]
    failure: ChainFailure | None = None

    @property
    def depth(self) -> int:
        return len(self.levels) - 1

    @property
    def completed(self) -> bool:
        return self.failure is None


def pullback_chain(family: MapFamily, disk0: JordanDiskApprox, policy: BranchPolicy,
                   depth: int, rng: np.random.Generator | None = None) -> PullbackChain:
    """Iterated lift: levels[n+1] is a component of f^{-1}(levels[n]).

    Stops early with the partial chain and the failing level recorded when a
    lift errors out.
    """
    if depth < 0:
        raise ValueError("depth must be >= 0")
    if rng is None:
        rng = np.random.default_rng(0)
    chain = PullbackChain([disk0], [], [chordal_diameter(disk0)])
    disk = disk0
    for level in range(depth):
        try:
            seed = policy.seed(family, disk, level, rng)
            lifted = lift_disk(family, disk, seed)
        except Exception as exc:  # propagate with level index, keep partial chain
            chain.failure = ChainFailure(level + 1, exc)
            break
        chain.levels.append(lifted)
        chain.branch_seeds.append(seed)
        chain.diameters.append(chordal_diameter(lifted))
        disk = lifted
    return chain


@dataclass
class ShrinkReport:
    chains: int
    depth: int
    epsilon: float
    rng_seed: int
    completed: int
    per_level_max: list[float]
    per_level_min: list[float]
    per_level_median: list[float]
    first_level_below_epsilon: int | None
    note: str = ("sampled pullback chains only; uniformity of the shrinking level over "
                 "all components cannot be certified by sampling")

    def to_dict(self) -> dict:
        return {
            "chains": self.chains,
            "depth": self.depth,
            "epsilon": self.epsilon,
            "rng_seed": self.rng_seed,
            "completed": self.completed,
            "per_level_max": self.per_level_max,
            "per_level_min": self.per_level_min,
            "per_level_median": self.per_level_median,
            "first_level_below_epsilon": self.first_level_below_epsilon,
            "note": self.note,
        }


def shrink_experiment(family: MapFamily, disk0: JordanDiskApprox, chains: int, depth: int,
                      epsilon: float, rng_seed: int,
                      policy: BranchPolicy | None = None,
                      workers: int = 1) -> ShrinkReport:
    """Randomized pullback chains with per-level chordal diameter statistics.

    Deterministic for a given rng_seed: each chain runs on its own generator
    seeded by (rng_seed, chain index), and results merge by chain index.
    """
    if chains < 1:
        raise ExperimentDegenerate("need at least one chain")
    if policy is None:
        policy = RandomBranch()

    def run(i: int) -> PullbackChain:
        rng = np.random.default_rng([rng_seed, i])
        return pullback_chain(family, disk0, policy, depth, rng)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, range(chains)))
    else:
        results = [run(i) for i in range(chains)]

    if not any(c.depth >= 3 for c in results):
        raise ExperimentDegenerate("no chain completed depth >= 3")

    per_max, per_min, per_med = [], [], []
    for lvl in range(depth + 1):
        vals = [c.diameters[lvl] for c in results if len(c.diameters) > lvl]
        if not vals:
            break
        per_max.append(max(vals))
        per_min.append(min(vals))
        per_med.append(float(np.median(vals)))
    first = None
    for lvl, m in enumerate(per_max):
        if m < epsilon:
            first = lvl
            break
    completed = sum(1 for c in results if c.completed)
    return ShrinkReport(chains, depth, epsilon, rng_seed, completed,
                        per_max, per_min, per_med, first)
