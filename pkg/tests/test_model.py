import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from trefoilflow import model as md

r_pos = st.floats(min_value=1e-4, max_value=0.25)
x_val = st.floats(min_value=-1, max_value=1).filter(lambda x: x != 0)


def test_params_validation():
    for bad in (dict(r=0.3), dict(nu=0.6), dict(nu=0.45, delta=0.6), dict(nu=0.3, delta=0.2)):
        with pytest.raises(md.ModelError):
            md.ModelParams(**bad)


def test_map_values():
    mp = md.ModelParams(0.1)
    assert md.interval_map(0.01, mp) == pytest.approx(-1.079)
    assert md.tip(mp, +1) == pytest.approx(-1.1)
    pt = md.return_map(md.ReturnMapPoint(1.0, 0.0), mp)
    assert pt.x == pytest.approx(1.0) and pt.y == pytest.approx(0.6)
    assert md.return_map(md.ReturnMapPoint(0.0, 0.0), mp).status is md.Status.ON_DISCONTINUITY
    with pytest.raises(md.ModelError):
        md.interval_map(0.0, mp)


@settings(max_examples=80, deadline=None)
@given(st.floats(-0.25, 0.25), x_val)
def test_map_is_odd(r, x):
    mp = md.ModelParams(r)
    assert md.interval_map(-x, mp) == pytest.approx(-md.interval_map(x, mp))


def test_escape_status_names_the_wing():
    mp = md.ModelParams(0.1)
    right = md.return_map(md.ReturnMapPoint(0.01, 0.0), mp)
    left = md.return_map(md.ReturnMapPoint(-0.01, 0.0), mp)
    assert right.status is md.Status.ESCAPED_RIGHT
    assert left.status is md.Status.ESCAPED_LEFT
    assert md.return_map(right, mp) is right


@pytest.mark.parametrize("r,regime", [(-0.25, "lorenz_attractor"), (-0.1, "lorenz_attractor"),
                                      (-1e-6, "lorenz_attractor"), (0.0, "boundary_heteroclinic"),
                                      (1e-6, "fake_horseshoe"), (0.1, "fake_horseshoe"),
                                      (0.25, "fake_horseshoe")])
def test_regimes(r, regime):
    rep = md.classify_regime(md.ModelParams(r))
    assert rep.regime == regime
    assert rep.inventory["sinks"] == 2 and rep.inventory["sources"] == 1


def test_lorenz_regime_reports_branch_fixed_points():
    rep = md.classify_regime(md.ModelParams(-0.1))
    fps = rep.witnesses["branch_fixed_points"]
    assert fps[0]["x"] == pytest.approx(0.9 / 0.8)
    assert not fps[0]["inside_section"]


@settings(max_examples=40, deadline=None)
@given(r_pos, st.text(alphabet="LR", min_size=1, max_size=10))
def test_word_roundtrip(r, w):
    mp = md.ModelParams(r)
    pt = md.periodic_orbit_from_word(w, mp)
    assert md.itinerary(pt, mp, len(w)) == w
    back = md.orbit(pt, mp, len(w))[-1]
    assert back.x == pytest.approx(pt.x, abs=1e-9) and back.y == pytest.approx(pt.y, abs=1e-9)


def test_all_short_words_roundtrip():
    mp = md.ModelParams(0.1)
    for n in range(1, 9):
        res = md.realized_words(mp, n)
        assert res["realized"] == res["distinct"] == 2 ** n


def test_periodic_orbit_needs_full_shift():
    with pytest.raises(md.ModelError):
        md.periodic_orbit_from_word("LR", md.ModelParams(-0.1))
    with pytest.raises(md.ModelError):
        md.periodic_orbit_from_word("LX", md.ModelParams(0.1))


def test_fixed_points_of_branches():
    mp = md.ModelParams(0.1)
    x = md.periodic_fixed(mp, +1)
    assert md.interval_map(x, mp) == pytest.approx(x)
    assert md.periodic_orbit_from_word("R", mp).x == pytest.approx(1.0)
    assert md.periodic_orbit_from_word("R", mp).y == pytest.approx(6 / 7)


@pytest.mark.parametrize("r", [-1e-5, -1e-6, 0.0, 0.1])
def test_lap_counts_double(r):
    assert md.lap_counts(md.ModelParams(r), 12) == [2 ** k for k in range(1, 13)]


def test_entropy_and_survivors():
    mp = md.ModelParams(0.1)
    assert md.entropy_estimate(mp, 16) == pytest.approx(math.log(2), abs=1e-12)
    ivs = md.survivor_intervals(mp, 6)
    assert len(ivs) == 64
    assert all(b - a == pytest.approx(2 / mp.mu ** 6) for a, b in ivs)
    assert all(not (a < 0 < b) for a, b in ivs)


def test_horseshoe():
    hs = md.horseshoe_markov(md.ModelParams(0.1))
    assert hs.transition.tolist() == [[1, 1], [1, 1]]
    assert hs.x_orientation_preserved and hs.y_orientation_preserved
    with pytest.raises(md.ModelError):
        md.horseshoe_markov(md.ModelParams(0.0))


def test_kneading():
    k = md.kneading(md.ModelParams(0.1), 8)
    assert k.escape_step == {"plus": 0, "minus": 0}
    assert k.escape_status["plus"] == "escaped_right_sink"
    k = md.kneading(md.ModelParams(0.0), 4)
    assert (k.plus, k.minus) == ("LLLL", "RRRR")
    k = md.kneading(md.ModelParams(-0.1), 8)
    assert k.plus == "LLLRLLRR" and k.minus == "RRRLRRLL"


def test_csv_exports(tmp_path):
    mp = md.ModelParams(0.1)
    md.export_graph_csv(tmp_path / "g.csv", mp, 11)
    md.export_survivors_csv(tmp_path / "s.csv", mp, 3)
    md.export_periodic_csv(tmp_path / "p.csv", mp, 4)
    assert (tmp_path / "s.csv").read_text().count("\n") == 9
    rows = (tmp_path / "p.csv").read_text().splitlines()
    assert rows[0] == "word,x,y,period" and len(rows) == 1 + 2 + 1 + 2 + 3


def test_expansion_on_r_range():
    for r in np.linspace(md.R_MIN, md.R_MAX, 1000):
        mp = md.ModelParams(float(r))
        slope = md.interval_map(0.75, mp) - md.interval_map(0.25, mp)
        assert slope / 0.5 == pytest.approx(mp.mu)
        assert mp.mu >= 2 + r - 0.25 * (r < 0) - 1e-12 and mp.mu > math.sqrt(2)


@pytest.mark.parametrize("n", [1, 3, 6])
def test_vertical_contraction(n):
    mp = md.ModelParams(0.1)
    x = md.periodic_orbit_from_word("LRR", mp).x
    top, bot = md.ReturnMapPoint(x, 1.0), md.ReturnMapPoint(x, -1.0)
    for _ in range(n):
        top, bot = md.return_map(top, mp), md.return_map(bot, mp)
    assert top.y - bot.y == pytest.approx(2 * mp.nu ** n, rel=1e-12)
