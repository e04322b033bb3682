import math

import numpy as np
import pytest

from siegellab.errors import (ExperimentDegenerate, NearSingularValue,
                              SingularValueOnBoundary)
from siegellab.maps import INFINITY, Sine, ZExp
from siegellab.pullback import (FixedBranch, JordanDiskApprox, NearestBranch,
                                RandomBranch, chordal_diameter, chordal_distance,
                                lift_disk, pullback_chain, shrink_experiment)

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def test_chordal_distance_basics():
    assert chordal_distance(0, 0) == 0.0
    assert abs(chordal_distance(0, 1) - 2.0 / math.sqrt(2.0)) < 1e-15
    assert chordal_distance(INFINITY, INFINITY) == 0.0
    assert abs(chordal_distance(0, INFINITY) - 2.0) < 1e-15
    # symmetric
    assert chordal_distance(1 + 2j, -3j) == chordal_distance(-3j, 1 + 2j)


def test_chordal_distance_invariant_under_inversion():
    # the chordal metric is invariant under z -> 1/z up to conjugation symmetry
    for z, w in ((0.5, 2.0), (1 + 1j, 2 - 1j)):
        d1 = chordal_distance(z, w)
        d2 = chordal_distance(1 / z, 1 / w)
        assert abs(d1 - d2) < 1e-12


def test_disk_orientation_and_contains():
    disk = JordanDiskApprox.circle(1 + 1j, 0.5, 64)
    assert disk.contains(1 + 1j)
    assert not disk.contains(2 + 2j)
    # reversed input is re-oriented
    rev = JordanDiskApprox(disk.boundary[::-1])
    assert rev.contains(1 + 1j)
    from siegellab.pullback import _signed_area
    assert _signed_area(rev.boundary) > 0


def test_disk_interior_point_and_simple():
    disk = JordanDiskApprox.circle(0, 1.0, 48)
    assert abs(disk.interior_point()) < 0.5
    assert disk.is_simple()
    # figure-eight style self crossing; the phase shift keeps the crossing
    # in segment interiors rather than on a shared vertex
    t = np.linspace(0, 2 * math.pi, 32, endpoint=False) + 0.11
    bowtie = np.cos(t) + 0.3j * np.sin(2 * t)
    assert not JordanDiskApprox(bowtie).is_simple()


def test_chordal_diameter_circle():
    disk = JordanDiskApprox.circle(0, 1.0, 128)
    # diameter of the unit circle on the sphere: distance between 1 and -1 is 2
    assert abs(chordal_diameter(disk) - 2.0) < 1e-3


def test_lift_disk_round_trip():
    f = Sine(GOLDEN)
    disk = JordanDiskApprox.circle(0.5 + 0.5j, 0.1, 64)
    seed = f.inverse(disk.interior_point(), 0)
    lifted = lift_disk(f, disk, seed)
    # forward images of the lifted boundary reproduce the original vertices
    fwd = np.array([f(complex(z)) for z in lifted.boundary])
    assert np.max(np.abs(fwd - disk.boundary)) < 1e-7


def test_lift_disk_distinct_branches_disjoint():
    f = ZExp(2.0)
    disk = JordanDiskApprox.circle(0.3 + 0.4j, 0.05, 64)
    seeds = [f.inverse(disk.interior_point(), k) for k in (0, -1)]
    lifts = [lift_disk(f, disk, s) for s in seeds]
    d = np.abs(lifts[0].boundary[:, None] - lifts[1].boundary[None, :])
    assert d.min() > 0.1


def test_lift_disk_rejects_singular_boundary():
    f = ZExp(2.0)
    cv = -2.0 / math.e
    disk = JordanDiskApprox.circle(cv + 0.05, 0.05, 64)  # boundary hits the cv
    seed = f.inverse(disk.interior_point(), 0)
    with pytest.raises((SingularValueOnBoundary, NearSingularValue)):
        lift_disk(f, disk, seed)


def test_lift_disk_rejects_bad_seed():
    f = Sine(GOLDEN)
    disk = JordanDiskApprox.circle(0.5 + 0.5j, 0.1, 64)
    with pytest.raises(ValueError):
        lift_disk(f, disk, 100.0 + 0j)


def test_pullback_chain_records_partial_failure():
    f = ZExp(2.0)
    # disk around the critical value: the very first lift must refuse
    disk = JordanDiskApprox.circle(-2.0 / math.e, 0.05, 64)
    chain = pullback_chain(f, disk, FixedBranch(0), 4)
    assert not chain.completed
    assert chain.failure.level == 1
    assert chain.depth == 0


def test_shrink_experiment_deterministic():
    f = Sine(GOLDEN)
    disk = JordanDiskApprox.circle(1.8 + 0.3j, 0.08, 48)
    kw = dict(chains=4, depth=6, epsilon=0.02, rng_seed=9)
    r1 = shrink_experiment(f, disk, **kw)
    r2 = shrink_experiment(f, disk, **kw)
    r4 = shrink_experiment(f, disk, workers=4, **kw)
    assert r1.to_dict() == r2.to_dict() == r4.to_dict()


def test_shrink_experiment_diameters_decrease():
    f = Sine(GOLDEN)
    disk = JordanDiskApprox.circle(1.8 + 0.3j, 0.08, 48)
    rep = shrink_experiment(f, disk, chains=4, depth=8, epsilon=0.05, rng_seed=2)
    assert rep.completed >= 1
    assert rep.per_level_median[-1] < rep.per_level_median[0]


def test_shrink_experiment_degenerate():
    with pytest.raises(ExperimentDegenerate):
        shrink_experiment(Sine(GOLDEN), JordanDiskApprox.circle(2, 0.05, 32),
                          chains=0, depth=3, epsilon=0.1, rng_seed=1)


def test_branch_policies():
    f = Sine(GOLDEN)
    disk = JordanDiskApprox.circle(0.5 + 0.5j, 0.05, 32)
    rng = np.random.default_rng(1)
    s_fixed = FixedBranch(1).seed(f, disk, 0, rng)
    s_near = NearestBranch(s_fixed).seed(f, disk, 0, rng)
    assert abs(s_fixed - s_near) < 1e-9
    s_rand = RandomBranch((0,)).seed(f, disk, 0, rng)
    assert abs(f(s_rand) - disk.interior_point()) < 1e-9
