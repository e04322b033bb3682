"""Integer ramification arithmetic on finite orbit portraits.

A portrait is an abstract functional graph of marked points with local
degrees and one marked periodic cycle.  The ramification weight is 2 on the
cycle and elsewhere the lcm of degree products along all directed paths into
the node; it is finite exactly when no node of degree > 1 lies on a cycle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import CriticalCycle, NotDivisible


@dataclass(frozen=True)
class OrbitPortrait:
    nodes: tuple
    next_map: dict
    local_degree: dict
    marked_cycle: tuple

    def __post_init__(self):
        nodes = tuple(self.nodes)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "marked_cycle", tuple(self.marked_cycle))
        nodeset = set(nodes)
        for z in nodes:
            if z not in self.next_map or self.next_map[z] not in nodeset:
                raise ValueError(f"next is not total at node {z!r}")
            if self.local_degree.get(z, 0) < 1:
                raise ValueError(f"local degree at {z!r} must be >= 1")
        cyc = self.marked_cycle
        if not cyc:
            raise ValueError("marked cycle must be nonempty")
        for i, z in enumerate(cyc):
            if self.next_map[z] != cyc[(i + 1) % len(cyc)]:
                raise ValueError("marked_cycle is not a cycle under next")

    @classmethod
    def from_json_dict(cls, data: dict) -> "OrbitPortrait":
        return cls(tuple(data["nodes"]),
                   dict(data["next"]),
                   {k: int(v) for k, v in data["degree"].items()},
                   tuple(data["cycle"]))

    def predecessors(self, z):
        return [w for w in self.nodes if self.next_map[w] == z]

    def cycle_nodes(self) -> set:
        """All nodes lying on some cycle of the functional graph."""
        on_cycle = set()
        n = len(self.nodes)
        for z in self.nodes:
            w = z
            for _ in range(n):
                w = self.next_map[w]
            # after n steps we are on the eventual cycle; walk it
            start = w
            cyc = {w}
            w = self.next_map[w]
            while w != start:
                cyc.add(w)
                w = self.next_map[w]
            on_cycle |= cyc
        return on_cycle


@dataclass(frozen=True)
class RamificationAssignment:
    nu: dict

    def __getitem__(self, z) -> int:
        return self.nu[z]


def compute_nu(portrait: OrbitPortrait) -> RamificationAssignment:
    """nu = 2 on the marked cycle, else lcm of path degree products into the node.

    Fixpoint propagation: D(z) = lcm over predecessors w of deg(w) * D(w)
    with D initialized to 1; terminates because critical nodes are acyclic,
    so every path product divides the product of all critical degrees.
    """
    for z in portrait.cycle_nodes():
        if portrait.local_degree[z] > 1:
            raise CriticalCycle(f"node {z!r} has degree > 1 on a cycle")
    D = {z: 1 for z in portrait.nodes}
    preds = {z: portrait.predecessors(z) for z in portrait.nodes}
    changed = True
    while changed:
        changed = False
        for z in portrait.nodes:
            acc = 1
            for w in preds[z]:
                acc = math.lcm(acc, portrait.local_degree[w] * D[w])
            if preds[z] and acc != D[z]:
                D[z] = math.lcm(D[z], acc)
                changed = True
    nu = {}
    cycle = set(portrait.marked_cycle)
    for z in portrait.nodes:
        nu[z] = 2 if z in cycle else (D[z] if preds[z] else 1)
    return RamificationAssignment(nu)


def brute_force_nu(portrait: OrbitPortrait, max_len: int | None = None) -> RamificationAssignment:
    """Oracle: enumerate every directed path of length >= 1 into each node and
    take the lcm of the degree products along it."""
    if max_len is None:
        max_len = 2 * len(portrait.nodes)
    preds = {z: portrait.predecessors(z) for z in portrait.nodes}
    nu = {}
    cycle = set(portrait.marked_cycle)
    for z in portrait.nodes:
        acc = 1
        frontier = [(z, 1)]
        for _ in range(max_len):
            new = []
            for node, prod in frontier:
                for w in preds[node]:
                    p = prod * portrait.local_degree[w]
                    acc = math.lcm(acc, p)
                    new.append((w, p))
            frontier = new
            if not frontier:
                break
        nu[z] = 2 if z in cycle else acc
    return RamificationAssignment(nu)


def pull_back_nu(portrait: OrbitPortrait, nu: RamificationAssignment) -> RamificationAssignment:
    """nu_tilde(z) = nu(next(z)) / deg(z), required to be an exact integer."""
    out = {}
    for z in portrait.nodes:
        target = nu[portrait.next_map[z]]
        deg = portrait.local_degree[z]
        if target % deg != 0:
            raise NotDivisible(z)
        out[z] = target // deg
    return RamificationAssignment(out)


@dataclass(frozen=True)
class CoveringReport:
    per_node: dict  # node -> "covering" | "holomorphic" | "neither"
    overall: str

    def is_covering(self) -> bool:
        return self.overall == "covering"


def check_covering(portrait: OrbitPortrait, nu: RamificationAssignment,
                   nu_tilde: RamificationAssignment) -> CoveringReport:
    """Classify the pair as orbifold covering / holomorphic-only / neither.

    Covering at w: nu(f(w)) == deg(w) * nu_tilde(w).
    Holomorphic at w: nu(f(w)) divides deg(w) * nu_tilde(w).
    """
    per = {}
    for w in portrait.nodes:
        lhs = nu[portrait.next_map[w]]
        rhs = portrait.local_degree[w] * nu_tilde[w]
        if lhs == rhs:
            per[w] = "covering"
        elif rhs % lhs == 0:
            per[w] = "holomorphic"
        else:
            per[w] = "neither"
    if all(v == "covering" for v in per.values()):
        overall = "covering"
    elif all(v in ("covering", "holomorphic") for v in per.values()):
        overall = "holomorphic"
    else:
        overall = "neither"
    return CoveringReport(per, overall)
