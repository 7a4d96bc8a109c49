import math

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from trefoilflow.hyperbolic import (INF, GeodesicLine, HyperbolicError, HyperbolicFrame, Matrix2,
                                    NotHyperbolic, S, T, axis, closed_geodesic_length, distance,
                                    fixed_points, frame_at, geodesic_flow, in_modular_domain,
                                    intersection, mobius_apply, reduce_to_fundamental_domain,
                                    words_to_matrix)

coord = st.floats(min_value=-5, max_value=5, allow_nan=False)
height = st.floats(min_value=0.05, max_value=5, allow_nan=False)
angle = st.floats(min_value=-math.pi, max_value=math.pi, allow_nan=False)


def test_generator_relations():
    I = Matrix2.identity()
    assert (S @ S).proj_equal(I)
    assert ((S @ T) ** 3).proj_equal(I)
    assert (T ** 3).entries() == (1, 3, 0, 1)
    assert (T ** -2).entries() == (1, -2, 0, 1)


def test_integer_products_stay_exact():
    M = words_to_matrix([T, S, T, T, S] * 10)
    assert all(isinstance(e, int) for e in M.entries())
    assert M.det() == 1


def test_mobius_infinity():
    assert mobius_apply(T, INF) is INF
    assert mobius_apply(S, INF) == 0
    assert mobius_apply(S, 0) is INF


def test_known_length():
    # [[2,1],[1,1]] has trace 3
    assert closed_geodesic_length(Matrix2(2, 1, 1, 1)) == pytest.approx(2 * math.acosh(1.5))
    with pytest.raises(NotHyperbolic):
        closed_geodesic_length(T)


def test_axis_orientation():
    M = Matrix2(2, 1, 1, 1)
    ax = axis(M)
    # the forward end is the attracting fixed point: iterating from i converges there
    z = 1j
    for _ in range(60):
        z = mobius_apply(M, z)
    assert abs(z - ax.v) < 1e-9
    assert sorted([ax.u, ax.v]) == sorted(fixed_points(M))


@settings(max_examples=60, deadline=None)
@given(coord, height, angle, st.floats(min_value=-3, max_value=3))
def test_flow_moves_at_unit_speed(x, y, a, t):
    f = frame_at(complex(x, y), a)
    g = geodesic_flow(f, t)
    assert distance(f.base_point, g.base_point) == pytest.approx(abs(t), abs=1e-7)
    # stays on the same geodesic
    for e in (g.forward_endpoint, g.backward_endpoint):
        assert f.geodesic().contains_ideal(e, 1e-6)


@settings(max_examples=60, deadline=None)
@given(coord, height, angle)
def test_frame_direction_roundtrip(x, y, a):
    f = frame_at(complex(x, y), a)
    assert f.base_point == pytest.approx(complex(x, y), abs=1e-12)
    assert math.remainder(f.direction - a, 2 * math.pi) == pytest.approx(0, abs=1e-9)


@settings(max_examples=60, deadline=None)
@given(st.integers(-6, 6), st.integers(-6, 6), st.integers(-6, 6))
def test_isometry_invariance_of_distance(a, b, c):
    assume(a != 0)
    # any integer matrix of det 1 built from T^a S T^b S T^c
    M = words_to_matrix([T ** a, S, T ** b, S, T ** c])
    z, w = 0.3 + 1.1j, -0.7 + 0.4j
    assert distance(mobius_apply(M, z), mobius_apply(M, w)) == pytest.approx(distance(z, w))


def test_side_signs():
    g = GeodesicLine(-1.0, 1.0)  # unit semicircle traversed left to right
    assert g.side(0.5j) < 0 < g.side(2j)
    assert g.side(1j) == pytest.approx(0.0, abs=1e-15)
    assert g.side(INF) > 0 and g.side(0.0) < 0
    assert g.reversed().side(2j) < 0


def test_intersection():
    z = intersection(GeodesicLine(-1.0, 1.0), GeodesicLine(0.0, INF))
    assert z == pytest.approx(1j)
    assert intersection(GeodesicLine(-1.0, 1.0), GeodesicLine(2.0, 3.0)) is None


@settings(max_examples=80, deadline=None)
@given(coord, height)
def test_reduction_lands_in_domain(x, y):
    z = complex(x, y)
    z2, w = reduce_to_fundamental_domain(z)
    assert in_modular_domain(z2, 1e-9)
    assert mobius_apply(w, z) == pytest.approx(z2, abs=1e-8)


def test_bad_input():
    with pytest.raises(HyperbolicError):
        frame_at(1 - 1j, 0.0)
    with pytest.raises(HyperbolicError):
        GeodesicLine(1.0, 1.0)
    with pytest.raises(HyperbolicError):
        geodesic_flow(HyperbolicFrame(Matrix2.identity()), 1e4)


def _random_sl2(rng):
    a, b, c = rng.normal(size=3)
    while abs(a) < 0.1:
        a = rng.normal()
    return Matrix2(a, b, c, (1 + b * c) / a)


def test_mobius_homomorphism():
    rng = np.random.default_rng(0)
    for _ in range(1000):
        M, N = _random_sl2(rng), _random_sl2(rng)
        z = complex(rng.normal(), rng.uniform(0.1, 3))
        lhs = mobius_apply(M @ N, z)
        rhs = mobius_apply(M, mobius_apply(N, z))
        assert abs(lhs - rhs) <= 1e-10 * max(1.0, abs(lhs))


def test_flow_keeps_unit_determinant():
    f = frame_at(0.3 + 0.7j, 0.4)
    for t in (1e-3, 1.0, 17.0, 300.0, -250.0):
        assert abs(geodesic_flow(f, t).g.det() - 1) <= 1e-12


@settings(max_examples=80, deadline=None)
@given(coord, height)
def test_reduction_idempotent(x, y):
    z2, _ = reduce_to_fundamental_domain(complex(x, y))
    z3, w = reduce_to_fundamental_domain(z2)
    assert z3 == pytest.approx(z2, abs=1e-12)


def test_length_conjugation_invariant():
    rng = np.random.default_rng(1)
    M = Matrix2(5, 2, 2, 1)
    for _ in range(200):
        W = _random_sl2(rng)
        C = W @ M @ W.inv()
        assert closed_geodesic_length(C) == pytest.approx(closed_geodesic_length(M), abs=1e-10)
