import cmath
import math

import numpy as np
import pytest

from siegellab.errors import DomainError, NearSingularValue, NoConvergence
from siegellab.maps import (INFINITY, ExpAffine, PointLattice, Sine, ZExp,
                            inverse_branch, is_infinity, lambert_w)

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def test_sine_values():
    f = Sine(GOLDEN)
    rot = cmath.exp(2j * math.pi * GOLDEN)
    assert abs(f(0) - 0) < 1e-15
    assert abs(f(math.pi / 2) - rot) < 1e-14
    assert abs(f.derivative(0) - rot) < 1e-14


def test_sine_overflow_is_infinity():
    f = Sine(GOLDEN)
    assert is_infinity(f(1e6j))
    assert is_infinity(f(complex(0, 800)))


def test_zexp_values():
    f = ZExp(2.0)
    assert f(0) == 0
    assert abs(f(1.0) - 2 * math.e) < 1e-14
    # critical point: derivative vanishes at -1
    assert abs(f.derivative(-1.0)) < 1e-15
    assert is_infinity(f(1e4))


def test_expaffine_is_exponential_lift_of_zexp():
    lam = 2.0 + 1.0j
    g = ExpAffine(lam)
    f = ZExp(lam)
    for z in (0.3 + 0.2j, -1.0 + 2.0j, 1.5 - 0.7j):
        lhs = f(cmath.exp(z))
        rhs = cmath.exp(g(z))
        assert abs(lhs - rhs) < 1e-12 * (1 + abs(lhs))


def test_expaffine_critical_points():
    # g'(z) = e^z + 1 vanishes exactly at odd multiples of pi i
    g = ExpAffine(2.0 + 1.0j)
    for k in range(-3, 4):
        z = (2 * k + 1) * math.pi * 1j
        assert abs(g.derivative(z)) < 1e-12


def test_singular_data_sine():
    f = Sine(GOLDEN)
    sd = f.singular_data()
    rot = cmath.exp(2j * math.pi * GOLDEN)
    assert sd.singular_value_distance(rot) < 1e-14
    assert sd.singular_value_distance(-rot) < 1e-14
    assert isinstance(sd.critical_points, PointLattice)
    # critical points are at pi/2 + k pi
    assert sd.critical_points.distance(math.pi / 2 + 3 * math.pi) < 1e-12


def test_singular_data_zexp():
    sd = ZExp(2.0).singular_data()
    assert sd.critical_points == [-1.0 + 0j]
    assert abs(sd.critical_values[0] + 2.0 / math.e) < 1e-15
    assert sd.asymptotic_values == [0j]
    assert sd.singular_value_distance(0.0) == 0.0


def test_singular_data_expaffine_lattice():
    lam = 3.0
    sd = ExpAffine(lam).singular_data()
    v = -1.0 + 1j * math.pi + cmath.log(lam)
    assert sd.critical_values.distance(v) < 1e-13
    assert sd.critical_values.distance(v + 4j * math.pi) < 1e-13


def test_inverse_round_trip_sine():
    f = Sine(GOLDEN)
    rng = np.random.default_rng(3)
    for _ in range(200):
        w = complex(rng.normal(scale=2), rng.normal(scale=2))
        for k in (-2, -1, 0, 1, 2):
            z = f.inverse(w, k)
            assert abs(f(z) - w) < 1e-10 * (1 + abs(w))


def test_inverse_branches_sine_differ():
    f = Sine(GOLDEN)
    w = 0.3 + 0.1j
    zs = [f.inverse(w, k) for k in range(-2, 3)]
    for i in range(len(zs)):
        for j in range(i + 1, len(zs)):
            assert abs(zs[i] - zs[j]) > 0.5


def test_inverse_round_trip_zexp():
    f = ZExp(2.0)
    w = f(-0.5)
    z = f.inverse(w, 0)
    assert abs(z + 0.5) < 1e-12
    # and the Lambert identity directly: z e^z = w / lam
    assert abs(z * cmath.exp(z) - w / 2.0) < 1e-13


def test_inverse_round_trip_expaffine():
    g = ExpAffine(2.0 + 1.0j)
    rng = np.random.default_rng(5)
    solved = 0
    for _ in range(100):
        w = complex(rng.normal(scale=2), rng.normal(scale=2))
        k = int(rng.integers(-3, 4))
        try:
            z = g.inverse(w, k)
        except (NoConvergence, NearSingularValue):
            continue  # Newton may stall when the seed straddles a cut
        solved += 1
        assert abs(g(z) - w) < 1e-10 * (1 + abs(w))
    assert solved >= 80


def test_inverse_rejects_singular_values():
    f = ZExp(2.0)
    with pytest.raises(NearSingularValue):
        f.inverse(-2.0 / math.e, 0)
    with pytest.raises(NearSingularValue):
        f.inverse(0.0, 0)


def test_nearest_inverse_recovers_reference():
    f = Sine(GOLDEN)
    z_true = 0.4 + 7 * math.pi + 0.3j
    z = f.nearest_inverse(f(z_true), z_true + 0.05)
    assert abs(z - z_true) < 1e-9


def test_lambert_w_residuals():
    rng = np.random.default_rng(11)
    for _ in range(500):
        w = complex(rng.normal(scale=3), rng.normal(scale=3))
        for k in (-1, 0, 1):
            z = lambert_w(k, w)
            assert abs(z * cmath.exp(z) - w) <= 1e-10 * (1 + abs(w))


def test_lambert_w_branch0_at_zero():
    assert lambert_w(0, 0) == 0
    with pytest.raises(DomainError):
        lambert_w(-1, 0)


def test_eval_array_matches_scalar():
    for f in (Sine(GOLDEN), ZExp(1.5 + 0.5j), ExpAffine(1.5 + 0.5j)):
        z = np.array([0.1 + 0.2j, -1.0 + 1.0j, 2.0 - 0.3j])
        arr = f.eval_array(z)
        for zi, wi in zip(z, arr):
            assert abs(f(complex(zi)) - wi) < 1e-12


def test_invalid_parameters():
    with pytest.raises(ValueError):
        Sine(0.0)
    with pytest.raises(ValueError):
        ZExp(0)
    with pytest.raises(ValueError):
        ExpAffine(0)
