import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sfcalc.quat import (
    I,
    J,
    K,
    ONE,
    UNIT_I,
    UNIT_J,
    ImaginaryUnit,
    Quaternion,
    Sphere,
    embed_complex,
    project_complex,
    qmul,
    slice_embed,
    sphere_of,
)

from conftest import nonzero_quaternions, quaternions, units


def left_mult_matrix(a):
    """Real 4x4 matrix of ``x -> a x`` in the basis 1, I, J, K."""
    w, x, y, z = a.as_tuple()
    return np.array([
        [w, -x, -y, -z],
        [x, w, -z, y],
        [y, z, w, -x],
        [z, -y, x, w],
    ])


def test_basis_relations():
    assert I * J == K
    assert J * I == -K
    assert J * K == I
    assert K * I == J
    for u in (I, J, K):
        assert u * u == -ONE


def test_one_plus_i_times_conjugate():
    assert (ONE + I) * (ONE - I) == Quaternion(2.0)


def test_product_against_real_matrix_representation():
    a = Quaternion(2.0, 0.0, 3.0, 0.0)
    b = Quaternion(1.0, 1.0, 0.0, 1.0)
    expected = left_mult_matrix(a) @ b.array
    assert np.allclose((a * b).array, expected, atol=1e-15)
    # frozen value of the same oracle
    assert (a * b).isclose(Quaternion(2.0, 5.0, 3.0, -1.0))


@given(quaternions(), quaternions())
def test_product_matches_matrix_oracle(a, b):
    assert np.allclose((a * b).array, left_mult_matrix(a) @ b.array, atol=1e-11)


@given(quaternions(), quaternions(), quaternions())
def test_associative_and_distributive(a, b, c):
    assert ((a * b) * c).isclose(a * (b * c), atol=1e-9)
    assert (a * (b + c)).isclose(a * b + a * c, atol=1e-9)


@given(quaternions())
def test_conjugate_gives_squared_norm(x):
    n2 = x.norm() ** 2
    assert (x * x.conj()).isclose(Quaternion(n2), atol=1e-10)
    assert (x.conj() * x).isclose(Quaternion(n2), atol=1e-10)


@given(nonzero_quaternions())
def test_inverse(x):
    y = x * x.inv()
    assert abs(y.w - 1.0) < 1e-14 * max(1.0, x.norm() * x.inv().norm())
    assert y.isclose(ONE, atol=1e-14)


@given(quaternions(), quaternions())
def test_conjugate_reverses_products(a, b):
    assert (a * b).conj().isclose(b.conj() * a.conj(), atol=1e-10)


@given(quaternions())
def test_real_and_vector_parts(x):
    assert (x + x.conj()) * 0.5 == Quaternion(x.real)
    assert ((x - x.conj()) * 0.5).isclose(x.vector, atol=1e-12)


@given(units())
def test_units_square_to_minus_one(u):
    sq = u.quaternion * u.quaternion
    assert sq.isclose(-ONE, atol=1e-15)
    assert abs(np.linalg.norm(u.vector) - 1.0) < 1e-15


def test_sphere_examples():
    assert sphere_of(3.0) == Sphere(3.0, 0.0)
    assert sphere_of(Quaternion(1.0, 2.0)) == Sphere(1.0, 2.0)
    s = sphere_of(Quaternion(1.0, 1.0, 1.0, 1.0))
    assert s.s0 == 1.0
    assert s.s1 == pytest.approx(math.sqrt(3.0), abs=1e-15)


def test_sphere_rejects_negative_radius():
    with pytest.raises(ValueError):
        Sphere(0.0, -1.0)
    assert Sphere(0.0, -1e-14).s1 == 0.0


def test_slice_embed_examples():
    assert slice_embed(Sphere(0.0, 1.0), UNIT_J) == J
    assert slice_embed(Sphere(1.0, 2.0), UNIT_I) == Quaternion(1.0, 2.0)


def test_slice_embed_round_trip(rng):
    for _ in range(100):
        s = Sphere(float(rng.normal()), float(abs(rng.normal())) + 1e-3)
        u = ImaginaryUnit.random(rng)
        back = sphere_of(slice_embed(s, u))
        assert back.s0 == pytest.approx(s.s0, abs=1e-14)
        assert back.s1 == pytest.approx(s.s1, abs=1e-14)


@given(quaternions())
def test_embed_sphere_with_own_unit(x):
    if x.vector.norm() < 1e-6:
        return
    assert slice_embed(sphere_of(x), x.unit()).isclose(x, atol=1e-12)


def test_unit_of_real_is_global_i():
    assert Quaternion(2.0).unit() == UNIT_I


@given(st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False), units())
def test_embed_project_round_trip(z, u):
    q = embed_complex(z, u)
    assert abs(project_complex(q, u) - z) < 1e-12
    # the embedding is multiplicative
    w = complex(0.3, -1.2)
    prod = qmul(embed_complex(z, u), embed_complex(w, u))
    assert np.allclose(prod, embed_complex(z * w, u), atol=1e-11)


def test_unit_normalises_and_rejects_zero():
    u = ImaginaryUnit(0.0, 3.0, 4.0)
    assert (u.a, u.b, u.c) == (0.0, 0.6, 0.8)
    with pytest.raises(ValueError):
        ImaginaryUnit(0.0, 0.0, 0.0)


def test_power_and_division():
    x = Quaternion(1.0, 2.0, -1.0, 0.5)
    assert (x ** 3).isclose(x * x * x)
    assert (x / x).isclose(ONE)
    with pytest.raises(ZeroDivisionError):
        Quaternion(0.0).inv()
