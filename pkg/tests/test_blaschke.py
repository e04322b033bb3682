import cmath
import math

import pytest

from siegellab.blaschke import (Mobius, SymmetricModel, build_model,
                                conjugated_outer, reflect, verify_symmetry)
from siegellab.errors import EvalAtZero
from siegellab.maps import INFINITY, Sine, is_infinity


def test_reflect_involution():
    for z in (0.5 + 0.2j, 2.0 - 1.0j, 1.0 + 0j):
        assert abs(reflect(reflect(z)) - z) < 1e-15
    assert reflect(0) is INFINITY or is_infinity(reflect(0))
    assert reflect(INFINITY) == 0
    # fixes the unit circle
    u = cmath.exp(0.7j)
    assert abs(reflect(u) - u) < 1e-15


def test_model_symmetric_by_construction():
    model = build_model(lambda z: z * z + 0.1)
    rep = verify_symmetry(model, 1000, rng_seed=1)
    assert rep.max_deviation <= 1e-12


def test_model_uses_outer_outside():
    model = build_model(lambda z: z * z)
    assert abs(model(2.0) - 4.0) < 1e-15
    # inside: reflected evaluation, model(1/2) = reflect(outer(2)) = 1/4
    assert abs(model(0.5) - 0.25) < 1e-15


def test_model_rejects_zero():
    model = build_model(lambda z: z)
    with pytest.raises(EvalAtZero):
        model(0)


def test_broken_model_detected():
    # using the outer map on both sides of the circle breaks the symmetry
    # (note z -> z^2 alone commutes with reflection; the offset does not)
    broken = lambda z: z * z + 1.0
    rep = verify_symmetry(broken, 1000, rng_seed=1)
    assert rep.max_deviation > 0.1


def test_verify_symmetry_deterministic():
    model = build_model(lambda z: z + 1.0 / z)
    r1 = verify_symmetry(model, 200, rng_seed=5)
    r2 = verify_symmetry(model, 200, rng_seed=5)
    assert r1 == r2


def test_mobius_inverse_and_derivative():
    phi = Mobius(2.0, 1.0, 1.0, 1.0)
    inv = phi.inverse()
    for z in (0.3 + 0.2j, -1.5 + 1.0j):
        assert abs(inv(phi(z)) - z) < 1e-12
    # derivative consistent with finite differences
    h = 1e-6
    z = 0.4 + 0.1j
    fd = (phi(z + h) - phi(z - h)) / (2 * h)
    assert abs(phi.derivative(z) - fd) < 1e-6
    with pytest.raises(ValueError):
        Mobius(1.0, 2.0, 1.0, 2.0)


def test_conjugated_outer_matches_direct():
    f = Sine(0.6)
    phi = Mobius(1.0, 2.0, 0.0, 1.0)  # z + 2
    outer = conjugated_outer(phi, f)
    for z in (2.5 + 0.3j, 3.0 - 0.5j):
        assert abs(outer(z) - (f(z - 2) + 2)) < 1e-12


def test_conjugated_model_symmetry():
    f = Sine(0.6)
    phi = Mobius(1.0, 3.0, 0.0, 1.0)
    model = build_model(conjugated_outer(phi, f))
    rep = verify_symmetry(model, 500, rng_seed=3)
    assert rep.max_deviation <= 1e-12
