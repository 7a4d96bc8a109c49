import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from trefoilflow.hyperbolic import INF, HyperbolicFrame, Matrix2, closed_geodesic_length
from trefoilflow import modular as mf
from trefoilflow.knots.words import primitive_mixed_words


@pytest.fixture(scope="module")
def half():
    rep = mf.build_representation(0.5)
    return rep, mf.section_geometry(rep)


@pytest.mark.parametrize("l", [0.0, 0.1, 0.5, 1.0, 3.0])
def test_representation_orders_and_trace(l):
    rep = mf.build_representation(l)
    I = Matrix2.identity()
    assert (rep.a @ rep.a).proj_equal(I)
    assert (rep.b @ rep.b @ rep.b).proj_equal(I, 1e-9)
    assert abs(rep.h.trace()) == pytest.approx(2 * math.cosh(l / 2), abs=1e-12)
    assert rep.b.det() == pytest.approx(1.0)


def test_standard_group_at_zero():
    rep = mf.build_representation(0.0)
    assert rep.q == pytest.approx(1j)
    assert rep.p == pytest.approx(complex(-0.5, math.sqrt(3) / 2))
    with pytest.raises(mf.ModularError):
        mf.build_representation(-1.0)


def test_section_layout(half):
    rep, sec = half
    lo, hi = sec.trims
    assert lo == pytest.approx(-hi)
    assert sec.point_at(0.0) == pytest.approx(rep.q)
    # p is on the left of l0, l1 and l2 pass through p's images of q
    assert sec.l0.side(rep.p) > 0
    for x in (lo, hi):
        z = sec.point_at(x)
        assert min(abs(sec.h0.side(z)), abs(sec.h1.side(z))) < 1e-9


@settings(max_examples=60, deadline=None)
@given(st.floats(-1.4, 1.4), st.floats(0.01, 2 * math.pi - 0.01))
def test_coords_roundtrip(x, th):
    rep = mf.build_representation(0.5)
    sec = mf.section_geometry(rep)
    pt = sec.coords(sec.frame(mf.SectionPoint(x, th)))
    assert pt.x == pytest.approx(x, abs=1e-9)
    assert math.remainder(pt.theta - th, 2 * math.pi) == pytest.approx(0, abs=1e-9)


def test_angle_towards_and_from(half):
    rep, sec = half
    f = sec.frame(mf.SectionPoint(0.3, 1.0))
    assert sec.angle_towards(0.3, f.forward_endpoint) == pytest.approx(1.0)
    assert sec.angle_from(0.3, f.backward_endpoint) == pytest.approx(1.0)


def test_theta_bounds_order(half):
    rep, sec = half
    for x in np.linspace(sec.trims[0], sec.trims[1], 9)[1:-1]:
        tb = mf.theta_bounds(sec, x)
        assert tb.theta0_s < tb.theta0_u and tb.theta1_u < tb.theta1_s
        assert 0 < tb.lower < tb.upper < math.pi
        # reflection symmetry of the section
        tm = mf.theta_bounds(sec, -x)
        assert tb.theta0_s == pytest.approx(tm.theta1_u, abs=1e-9)


def test_first_return_preconditions(half):
    rep, sec = half
    with pytest.raises(mf.CornerOrbit):
        mf.first_return(rep, sec, mf.SectionPoint(sec.trims[1], 1.0))
    with pytest.raises(mf.Wandering):
        mf.first_return(rep, sec, mf.SectionPoint(0.0, 0.01))
    with pytest.raises(mf.Wandering):
        mf.first_return(rep, sec, mf.SectionPoint(0.1, math.pi / 2))
    ideal = mf.section_geometry(mf.build_representation(0.0))
    with pytest.raises(mf.ModularError):
        mf.first_return(rep, ideal, mf.SectionPoint(0.0, 1.0))


def test_return_lands_in_core(half):
    rep, sec = half
    step = mf.first_return(rep, sec, mf.SectionPoint(0.1, 0.69))
    assert mf.in_core(sec, step.point)
    assert step.letter in "LR" and step.time > 0
    assert step.exit in mf.EXIT_LETTER


@pytest.mark.parametrize("w", ["LR", "LLR", "LRR", "LRLRR", "LLRLR", "LLLRRR"])
def test_periodic_seed(half, w):
    rep, sec = half
    s = mf.seed_periodic(rep, sec, w)
    steps = mf.orbit_steps(rep, sec, s.point, 2 * len(w))
    assert "".join(st.letter for st in steps) == s.word * 2
    assert sum(st.time for st in steps[:len(w)]) == pytest.approx(s.length, abs=1e-8)
    assert s.length == pytest.approx(closed_geodesic_length(rep.forward_translation(w)))
    end = steps[len(w) - 1].point
    assert end.x == pytest.approx(s.point.x, abs=1e-8)
    assert end.theta == pytest.approx(s.point.theta, abs=1e-8)


def test_mirror_words_have_mirrored_seeds(half):
    rep, sec = half
    a, b = mf.seed_periodic(rep, sec, "LLR"), mf.seed_periodic(rep, sec, "RRL")
    assert a.length == pytest.approx(b.length)


@pytest.mark.parametrize("l", [0.3, 0.6, 1.0])
def test_two_leaf_property(l):
    rep = mf.build_representation(l)
    sec = mf.section_geometry(rep)
    for e in mf.unstable_leaf_endpoints(sec, 3):
        r = mf.verify_two_leaf_image(rep, sec, 24, e)
        assert r.returned >= 2 and len(r.clusters) == 2 and r.ok
    r = mf.verify_two_leaf_image(rep, sec, 24, kind="stable")
    assert r.returned >= 2 and len(r.clusters) == 1 and r.ok


def test_exports(half, tmp_path):
    rep, sec = half
    pts = [mf.SectionPoint(0.1, th) for th in (0.69, math.pi / 2, 1.92)]
    mf.export_returns_csv(tmp_path / "r.csv", rep, sec, pts)
    rows = (tmp_path / "r.csv").read_text().splitlines()
    assert rows[0] == "x,theta,x_next,theta_next,letter,time" and len(rows) == 3
    assert json.loads(mf.itinerary_json("LRR")) == ["L", "R", "R"]


def test_random_points_return_or_wander(half):
    rep, sec = half
    rng = np.random.default_rng(0)
    lo, hi = sec.trims
    returned, times = 0, []
    for _ in range(1000):
        x = rng.uniform(lo, hi)
        tb = mf.theta_bounds(sec, x)
        pt = mf.SectionPoint(x, rng.uniform(tb.lower, tb.upper))
        try:
            st = mf.first_return(rep, sec, pt)
        except mf.Wandering as exc:
            assert exc.time <= 50
            continue
        returned += 1
        times.append(st.time)
        assert mf.in_core(sec, st.point)
    assert returned > 100 and min(times) > 0.1


def test_outside_band_wanders(half):
    rep, sec = half
    rng = np.random.default_rng(1)
    for _ in range(100):
        x = rng.uniform(*sec.trims)
        tb = mf.theta_bounds(sec, x)
        th = rng.choice([rng.uniform(0, tb.lower), rng.uniform(tb.upper, math.pi)])
        with pytest.raises(mf.Wandering):
            mf.first_return(rep, sec, mf.SectionPoint(x, th))


def test_theta_margin():
    for l in (0.2, 0.5, 1.0):
        sec = mf.section_geometry(mf.build_representation(l))
        for x in np.linspace(*sec.trims, 50)[1:-1]:
            tb = mf.theta_bounds(sec, x)
            assert tb.theta0_u - tb.theta0_s > 1e-6 and tb.theta1_s - tb.theta1_u > 1e-6


def test_reduction_commutes_with_flow():
    from trefoilflow.hyperbolic import geodesic_flow, frame_at, reduce_to_fundamental_domain

    f = frame_at(2.3 + 0.2j, 0.7)
    _, w = reduce_to_fundamental_domain(f.base_point)
    reduced = HyperbolicFrame(w @ f.g)
    for t in (0.5, 3.0):
        a = geodesic_flow(reduced, t).g
        b = w @ geodesic_flow(f, t).g
        assert a.proj_equal(b, 1e-9)
