import pytest

from trefoilflow.knots import TREFOIL, UNKNOT, ghys_word_check, knot_certificate
from trefoilflow.knots.words import LorenzWord
from trefoilflow.model import ModelError, ModelParams
from trefoilflow.modular import ModularError, build_representation, section_geometry


@pytest.fixture(scope="module")
def setup():
    rep = build_representation(0.5)
    return rep, section_geometry(rep)


def test_lr_unknot(setup):
    r = ghys_word_check("LR", *setup)
    assert r.ok and r.modular_itinerary == "LR" and r.model_itinerary == "LR"
    assert r.knot.alexander == UNKNOT.to_list() and r.knot.genus == 0
    assert r.to_dict()["ok"] is True


def test_mirror_pair(setup):
    a, b = ghys_word_check("LLR", *setup), ghys_word_check("LRR", *setup)
    assert a.ok and b.ok
    assert not LorenzWord(a.modular_itinerary).cyclic_equal(b.modular_itinerary)
    assert LorenzWord(a.modular_itinerary).mirror().cyclic_equal(b.modular_itinerary)
    assert a.return_time == pytest.approx(b.return_time)


def test_trefoil_word(setup):
    r = ghys_word_check("LRLRR", *setup)
    assert r.ok and r.knot.alexander == TREFOIL.to_list() and r.knot.genus == 1


def test_preconditions(setup):
    with pytest.raises(ValueError):
        ghys_word_check("LRLR", *setup)
    with pytest.raises(ValueError):
        ghys_word_check("LLL", *setup)
    with pytest.raises(ModelError):
        ghys_word_check("LR", *setup, model=ModelParams(0.0))
    rep0 = build_representation(0.0)
    with pytest.raises(ModularError):
        ghys_word_check("LR", rep0, section_geometry(rep0))


def test_certificate_consistency():
    c = knot_certificate("LLRLRR")
    assert c.consistent and c.strands == 6
