"""Half hyperbolic neighborhoods of circle arcs on the slit sphere.

The ambient domain is the sphere minus the closed arc T \\ I of the unit
circle.  An explicit chain of conformal maps (Moebius sending the slit
endpoints to 0 and infinity, a rotation, the principal square root) takes it
to the upper half-plane, where the hyperbolic metric is elementary.  The
boundary of the distance-d neighborhood of I consists of two circular arcs
through the endpoints of I meeting the removed arc at angle beta with
log cot(beta/4) = d.
"""

from __future__ import annotations

import cmath
import heapq
import math
from dataclasses import dataclass

import numpy as np
import shapely
from scipy.integrate import quad
from shapely.geometry import Polygon

from .errors import DegenerateInterval, Disconnected, PointOnSlit


def angle_from_d(d: float) -> float:
    """The intersection angle beta in (0, pi) with log cot(beta/4) = d."""
    if d <= 0:
        raise ValueError("d must be positive")
    return 4.0 * math.atan(math.exp(-d))


def d_from_angle(beta: float) -> float:
    if not 0 < beta < math.pi:
        raise ValueError("beta must lie in (0, pi)")
    return math.log(1.0 / math.tan(beta / 4.0))


@dataclass(frozen=True)
class ArcInterval:
    """Open subarc of the unit circle from angle phi1 to phi2 (counterclockwise)."""

    phi1: float
    phi2: float

    def __post_init__(self):
        length = self.phi2 - self.phi1
        if not 0 < length < 2 * math.pi:
            raise DegenerateInterval("need 0 < phi2 - phi1 < 2*pi")
        p1 = self.phi1 % (2 * math.pi)
        object.__setattr__(self, "phi1", p1)
        object.__setattr__(self, "phi2", p1 + length)

    @property
    def length(self) -> float:
        return self.phi2 - self.phi1

    @property
    def a(self) -> complex:
        """First endpoint e^{i phi1}."""
        return cmath.exp(1j * self.phi1)

    @property
    def b(self) -> complex:
        return cmath.exp(1j * self.phi2)

    @property
    def midpoint(self) -> complex:
        return cmath.exp(1j * (self.phi1 + self.phi2) / 2)

    @property
    def slit_midpoint(self) -> complex:
        """Midpoint of the removed arc T \\ I."""
        return cmath.exp(1j * (self.phi2 + self.phi1 + 2 * math.pi) / 2)


class SlitSphere:
    """The sphere minus T \\ I, uniformized onto the upper half-plane."""

    def __init__(self, interval: ArcInterval):
        self.interval = interval
        a, b, m = interval.a, interval.b, interval.slit_midpoint
        self._kappa = (m - b) / (m - a)  # so that M(m) = 1

    def mobius(self, z: complex) -> complex:
        """M with M(a)=0, M(b)=inf, M(T\\I)=[0, inf]."""
        a, b = self.interval.a, self.interval.b
        if z == b:
            return complex(math.inf, 0)
        return self._kappa * (z - a) / (z - b)

    def mobius_inv(self, zeta: complex) -> complex:
        a, b = self.interval.a, self.interval.b
        t = zeta / self._kappa
        if t == 1:
            return complex(math.inf, math.inf)
        return (a - b * t) / (1 - t)

    def to_halfplane(self, z: complex, tol: float = 1e-13) -> complex:
        """Conformal coordinate in the upper half-plane."""
        zeta = self.mobius(z)
        if not (math.isfinite(zeta.real) and math.isfinite(zeta.imag)):
            raise PointOnSlit("point maps to the slit endpoint at infinity")
        r, phi = abs(zeta), cmath.phase(zeta)  # phi in (-pi, pi]
        if phi < 0:
            phi += 2 * math.pi
        if r == 0 or phi < tol or phi > 2 * math.pi - tol:
            raise PointOnSlit("point lies on the removed arc")
        return math.sqrt(r) * cmath.exp(0.5j * phi)

    def distance(self, z: complex, w: complex) -> float:
        """Hyperbolic distance in the slit sphere (exact via the map chain)."""
        u, v = self.to_halfplane(z), self.to_halfplane(w)
        return _halfplane_distance(u, v)

    def distance_to_arc(self, z: complex) -> float:
        """Hyperbolic distance from z to the arc I itself.

        The image of I is the geodesic i * (0, inf); distance to it depends
        only on the argument of the half-plane coordinate.
        """
        u = self.to_halfplane(z)
        alpha = cmath.phase(u)
        return math.acosh(1.0 / math.sin(alpha))


def _halfplane_distance(u: complex, v: complex) -> float:
    num = abs(u - v) ** 2
    den = 2.0 * u.imag * v.imag
    return math.acosh(1.0 + num / den)


def slit_sphere_distance(interval: ArcInterval, z: complex, w: complex) -> float:
    return SlitSphere(interval).distance(z, w)


def halfplane_distance_by_integration(u: complex, v: complex,
                                      tol: float = 1e-10) -> float:
    """Hyperbolic distance in the upper half-plane by adaptive quadrature of
    |dz| / Im z along the geodesic, constructed by Euclidean geometry only.

    Independent oracle for the closed-form arccosh distance.
    """
    if abs(u.real - v.real) < 1e-14 * (1 + abs(u) + abs(v)):
        # vertical geodesic
        y0, y1 = sorted((u.imag, v.imag))
        val, _ = quad(lambda y: 1.0 / y, y0, y1, epsabs=tol, epsrel=tol)
        return val
    # geodesic = circle centered on the real axis through u and v
    c = (abs(u) ** 2 - abs(v) ** 2) / (2.0 * (u.real - v.real))
    r = abs(u - c)
    t0, t1 = cmath.phase(u - c), cmath.phase(v - c)
    if t0 > t1:
        t0, t1 = t1, t0
    val, _ = quad(lambda t: 1.0 / math.sin(t), t0, t1, epsabs=tol, epsrel=tol)
    return val


@dataclass(frozen=True)
class CircleArc:
    center: complex
    radius: float
    angle_start: float
    angle_end: float

    def point(self, t: float) -> complex:
        ang = self.angle_start + t * (self.angle_end - self.angle_start)
        return self.center + self.radius * cmath.exp(1j * ang)

    def polyline(self, n: int = 128) -> np.ndarray:
        t = np.linspace(0.0, 1.0, n)
        ang = self.angle_start + t * (self.angle_end - self.angle_start)
        return self.center + self.radius * np.exp(1j * ang)


def _circle_through(p: complex, q: complex, r: complex) -> tuple[complex, float]:
    """Center and radius of the circle through three points."""
    ax, ay = p.real, p.imag
    bx, by = q.real, q.imag
    cx, cy = r.real, r.imag
    d = 2.0 * (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by))
    if abs(d) < 1e-300:
        raise ValueError("points are collinear")
    ux = ((ax * ax + ay * ay) * (by - cy) + (bx * bx + by * by) * (cy - ay)
          + (cx * cx + cy * cy) * (ay - by)) / d
    uy = ((ax * ax + ay * ay) * (cx - bx) + (bx * bx + by * by) * (ax - cx)
          + (cx * cx + cy * cy) * (bx - ax)) / d
    center = complex(ux, uy)
    return center, abs(p - center)


def _arc_between(center: complex, radius: float, p: complex, q: complex,
                 through: complex) -> CircleArc:
    """Arc of the circle from p to q passing through the third point."""
    tp = cmath.phase(p - center)
    tq = cmath.phase(q - center)
    tm = cmath.phase(through - center)
    # normalize so the arc runs from tp increasing; flip if `through` misses it
    span = (tq - tp) % (2 * math.pi)
    mid = (tm - tp) % (2 * math.pi)
    if mid <= span:
        return CircleArc(center, radius, tp, tp + span)
    return CircleArc(center, radius, tp, tp - (2 * math.pi - span))


@dataclass(frozen=True)
class HalfNeighborhood:
    """Exact geometry of the symmetric hyperbolic neighborhood of an arc.

    The outer arc bounds the |z| > 1 half; the inner arc is its reflection
    across the unit circle.
    """

    interval: ArcInterval
    d: float
    beta: float
    outer_arc: CircleArc
    inner_arc: CircleArc

    def contains(self, z: complex) -> bool:
        """Membership in the half neighborhood: |z| > 1 and inside the region
        bounded by the outer arc and the unit circle."""
        if abs(z) <= 1.0:
            return False
        return self.full_contains(z)

    def full_contains(self, z: complex) -> bool:
        """Membership in the full symmetric neighborhood (no |z| > 1 restriction),
        decided through the uniformizing coordinate."""
        sphere = SlitSphere(self.interval)
        try:
            zeta = sphere.mobius(z)
        except ZeroDivisionError:
            return False
        if not (math.isfinite(zeta.real) and math.isfinite(zeta.imag)):
            return False
        phi = cmath.phase(zeta) % (2 * math.pi)
        if phi == 0.0 and abs(zeta) == 0.0:
            return True  # endpoint a of I maps to 0; treat as inside closure
        return self.beta < phi < 2 * math.pi - self.beta

    def distance_contains(self, z: complex) -> bool:
        """Membership via the hyperbolic distance to the arc (must be < d)."""
        if abs(z) <= 1.0:
            return False
        try:
            return SlitSphere(self.interval).distance_to_arc(z) < self.d
        except PointOnSlit:
            return False


def build_half_neighborhood(interval: ArcInterval, d: float) -> HalfNeighborhood:
    """Construct the two boundary arcs meeting T \\ I at angle beta.

    The arcs are preimages of the rays arg = +-beta under the uniformizing
    Moebius map; the outer one lives in |z| >= 1.
    """
    if d <= 0:
        raise ValueError("d must be positive")
    beta = angle_from_d(d)
    sphere = SlitSphere(interval)
    a, b = interval.a, interval.b
    arcs = []
    for sign in (1.0, -1.0):
        third = sphere.mobius_inv(cmath.exp(sign * 1j * beta))
        center, radius = _circle_through(a, b, third)
        arcs.append(_arc_between(center, radius, a, b, third))
    # outer arc: its midpoint has modulus > 1
    first_outer = abs(arcs[0].point(0.5)) > 1.0
    outer, inner = (arcs[0], arcs[1]) if first_outer else (arcs[1], arcs[0])
    return HalfNeighborhood(interval, d, beta, outer, inner)


def measure_intersection_angle(hn: HalfNeighborhood) -> float:
    """Angle between the outer boundary arc and T \\ I at the shared endpoint,
    measured from tangent vectors of the two circles."""
    arc = hn.outer_arc
    a = hn.interval.a
    sign = 1.0 if arc.angle_end > arc.angle_start else -1.0
    t_arc = sign * 1j * (arc.point(0.0) - arc.center)  # into the arc at a
    t_arc /= abs(t_arc)
    t_slit = -1j * a  # along the unit circle from a into the removed arc
    cosang = t_arc.real * t_slit.real + t_arc.imag * t_slit.imag
    return math.acos(max(-1.0, min(1.0, cosang)))


# -- quasihyperbolic distance on a lattice graph -------------------------------


_STENCIL = [(1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (1, -1), (-1, 1), (-1, -1)]


def quasihyperbolic_distance(domain: Polygon, z: complex, w: complex,
                             grid_step: float) -> float:
    """Shortest-path estimate of the quasihyperbolic distance in the domain.

    Lattice graph with 8-neighbor stencil; each edge is weighted by its
    Euclidean length over the distance from its midpoint to the domain
    boundary.  Converges to the quasihyperbolic distance as grid_step -> 0;
    the stencil bias is O(1 - cos(pi/8)).
    """
    if grid_step <= 0:
        raise ValueError("grid_step must be positive")
    for p in (z, w):
        if not domain.contains(shapely.Point(p.real, p.imag)):
            raise ValueError(f"point {p} is not inside the domain")
    minx, miny, maxx, maxy = domain.bounds
    nx = int((maxx - minx) / grid_step) + 2
    ny = int((maxy - miny) / grid_step) + 2
    xs = minx + np.arange(nx) * grid_step
    ys = miny + np.arange(ny) * grid_step
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    inside = shapely.contains_xy(domain, X.ravel(), Y.ravel()).reshape(X.shape)

    boundary = domain.boundary

    def dist_to_boundary(points):
        return shapely.distance(boundary, shapely.points(points))

    # node indices of inside lattice points
    idx = -np.ones(X.shape, dtype=np.int64)
    ii, jj = np.nonzero(inside)
    idx[ii, jj] = np.arange(len(ii))
    n_nodes = len(ii)
    coords = X[ii, jj] + 1j * Y[ii, jj]

    zi = _attach(z, xs, ys, idx, coords)
    wi = _attach(w, xs, ys, idx, coords)
    if zi is None or wi is None:
        raise Disconnected("query point has no inside lattice neighbor")

    # build adjacency with vectorized midpoint distances
    adj: list[list[tuple[int, float]]] = [[] for _ in range(n_nodes + 2)]
    for di, dj in _STENCIL:
        i2, j2 = ii + di, jj + dj
        valid = (i2 >= 0) & (i2 < nx) & (j2 >= 0) & (j2 < ny)
        src = np.nonzero(valid)[0]
        tgt_idx = idx[i2[valid], j2[valid]]
        keep = tgt_idx >= 0
        src = src[keep]
        tgt = tgt_idx[keep]
        mids = (coords[src] + coords[tgt]) / 2.0
        length = math.hypot(di, dj) * grid_step
        bd = dist_to_boundary(np.column_stack([mids.real, mids.imag]))
        with np.errstate(divide="ignore"):
            wts = length / bd
        for s, t, wt in zip(src, tgt, wts):
            if math.isfinite(wt):
                adj[s].append((int(t), float(wt)))

    # endpoint nodes n_nodes (z) and n_nodes+1 (w): connect to nearby lattice points
    for node, p in ((n_nodes, z), (n_nodes + 1, w)):
        for t in _near_nodes(p, xs, ys, idx):
            mid = (p + coords[t]) / 2.0
            bd = float(dist_to_boundary(np.array([[mid.real, mid.imag]]))[0])
            if bd > 0:
                wt = abs(p - coords[t]) / bd
                adj[node].append((int(t), wt))
                adj[t].append((node, wt))
    if z == w:
        return 0.0

    # Dijkstra
    dist = [math.inf] * (n_nodes + 2)
    dist[n_nodes] = 0.0
    heap = [(0.0, n_nodes)]
    target = n_nodes + 1
    while heap:
        dcur, node = heapq.heappop(heap)
        if node == target:
            return dcur
        if dcur > dist[node]:
            continue
        for t, wt in adj[node]:
            nd = dcur + wt
            if nd < dist[t]:
                dist[t] = nd
                heapq.heappush(heap, (nd, t))
    raise Disconnected("no lattice path between the query points")


def _near_nodes(p: complex, xs, ys, idx):
    i0 = int(np.searchsorted(xs, p.real)) - 1
    j0 = int(np.searchsorted(ys, p.imag)) - 1
    out = []
    for di in range(0, 2):
        for dj in range(0, 2):
            i, j = i0 + di, j0 + dj
            if 0 <= i < idx.shape[0] and 0 <= j < idx.shape[1] and idx[i, j] >= 0:
                out.append(int(idx[i, j]))
    return out


def _attach(p: complex, xs, ys, idx, coords):
    near = _near_nodes(p, xs, ys, idx)
    return near[0] if near else None
