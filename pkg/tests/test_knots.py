import itertools
import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from trefoilflow.knots import (TREFOIL, UNKNOT, AlexanderPoly, Braid, DegenerateCurve,
                               DiagramError, KnotDiagram, LorenzWord, NotAKnot,
                               alexander_from_braid, alexander_from_diagram,
                               braid_closure_diagram, genus_positive_braid, lorenz_braid,
                               polyline_to_diagram, primitive_mixed_words)
from trefoilflow.knots.braids import orbit_permutation, permutation_braid
from trefoilflow.knots.laurent import LaurentPoly, determinant
from trefoilflow.knots.words import L_MATRIX, R_MATRIX, cyclic_classes, word_to_matrix

small_ints = st.lists(st.integers(-9, 9), min_size=0, max_size=6)
laurent = st.builds(LaurentPoly, small_ints, st.integers(-3, 3))
word = st.text(alphabet="LR", min_size=1, max_size=9)


# --- Laurent polynomials ------------------------------------------------------------


@settings(max_examples=80, deadline=None)
@given(laurent, laurent, laurent)
def test_ring_laws(a, b, c):
    assert a + b == b + a and a * b == b * a
    assert (a + b) * c == a * c + b * c
    assert (a * b) * c == a * (b * c)
    assert a - a == LaurentPoly()


@settings(max_examples=60, deadline=None)
@given(laurent, laurent)
def test_product_matches_numpy(a, b):
    p = a * b
    if not a or not b:
        assert not p
        return
    assert list(p.coeffs) == np.convolve(a.coeffs, b.coeffs).tolist()
    assert p.low == a.low + b.low


@settings(max_examples=60, deadline=None)
@given(laurent, laurent.filter(bool))
def test_exact_division(a, b):
    assert (a * b).exact_div(b) == a


def test_inexact_division_raises():
    with pytest.raises(ValueError):
        LaurentPoly([1, 0, 1]).exact_div(LaurentPoly([1, 1]))


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 4), st.integers(0, 10**6))
def test_determinant_matches_numpy_on_constants(n, seed):
    M = np.random.default_rng(seed).integers(-5, 6, size=(n, n))
    D = determinant([[LaurentPoly([int(v)]) for v in row] for row in M])
    assert D == LaurentPoly([int(round(np.linalg.det(M)))])


def test_determinant_with_laurent_entries():
    t = LaurentPoly([0, 1])
    M = [[t, LaurentPoly([1])], [LaurentPoly([1], -1), t]]
    assert determinant(M) == LaurentPoly([-1, 0, 0, 1], -1)


# --- words --------------------------------------------------------------------------


@settings(max_examples=60, deadline=None)
@given(word, st.integers(0, 8))
def test_trace_invariant_under_rotation(w, k):
    k %= len(w)
    M, N = word_to_matrix(w), word_to_matrix(w[k:] + w[:k])
    assert M.trace() == N.trace() and M.det() == 1


def test_matrices():
    assert word_to_matrix("L") == L_MATRIX and word_to_matrix("R") == R_MATRIX
    assert word_to_matrix("LR").entries() == (1, 1, 1, 2)


def test_word_properties():
    w = LorenzWord("lrlr")
    assert w.symbols == "LRLR" and w.root == "LR" and w.power == 2 and not w.primitive
    assert LorenzWord("RLL").normal_form().symbols == "LLR"
    assert LorenzWord("LLR").cyclic_equal("RLL") and not LorenzWord("LLR").cyclic_equal("LRR")
    assert LorenzWord("LLR").mirror().symbols == "RRL"
    with pytest.raises(ValueError):
        LorenzWord("LXR")
    with pytest.raises(ValueError):
        LorenzWord("")


def necklaces(n):
    """Primitive binary necklaces of length n (Moebius inversion)."""
    mu = {1: 1, 2: -1, 3: -1, 4: 0, 5: -1, 6: 1, 7: -1, 8: 0}
    return sum(mu[d] * 2 ** (n // d) for d in range(1, n + 1) if n % d == 0) // n


@pytest.mark.parametrize("n", range(1, 9))
def test_class_counts_against_necklace_formula(n):
    all_primitive = list(cyclic_classes(n, primitive=True, mixed=False))
    assert len(all_primitive) == necklaces(n)
    mixed = list(cyclic_classes(n))
    assert len(mixed) == necklaces(n) - (2 if n == 1 else 0)


def test_primitive_mixed_up_to_six():
    assert len(primitive_mixed_words(6)) == 1 + 2 + 3 + 6 + 9


# --- braids -------------------------------------------------------------------------


@settings(max_examples=60, deadline=None)
@given(word)
def test_orbit_permutation_cycle_structure(w):
    lw = LorenzWord(w)
    perm = orbit_permutation(lw)
    assert sorted(perm) == list(range(len(w)))
    b = permutation_braid(perm)
    assert b.permutation() == perm
    assert b.components() == lw.power
    if lw.primitive:
        assert lorenz_braid(lw).is_knot()
    else:
        with pytest.raises(NotAKnot):
            lorenz_braid(lw)


@settings(max_examples=40, deadline=None)
@given(word.filter(lambda w: LorenzWord(w).primitive), st.integers(0, 8))
def test_braid_independent_of_rotation(w, k):
    k %= len(w)
    a = alexander_from_braid(lorenz_braid(w))
    b = alexander_from_braid(lorenz_braid(w[k:] + w[:k]))
    assert a == b


def test_braid_validation():
    with pytest.raises(ValueError):
        Braid(2, (2,))
    with pytest.raises(ValueError):
        Braid(0)
    with pytest.raises(NotAKnot):
        genus_positive_braid(Braid(2, (1, 1)))


def torus_alexander(p, q):
    num = np.polynomial.polynomial.polymul([-1] + [0] * (p * q - 1) + [1], [-1, 1])
    den = np.polynomial.polynomial.polymul([-1] + [0] * (p - 1) + [1],
                                           [-1] + [0] * (q - 1) + [1])
    quo, rem = np.polynomial.polynomial.polydiv(num, den)
    assert np.allclose(rem, 0)
    return [int(round(c)) for c in quo]


@pytest.mark.parametrize("p,q", [(2, 3), (2, 5), (2, 7), (3, 4), (3, 5), (4, 5), (3, 7)])
def test_torus_knots_against_formula(p, q):
    b = Braid(p, tuple(range(1, p)) * q)
    A = alexander_from_braid(b)
    assert A.to_list() == torus_alexander(p, q)
    assert genus_positive_braid(b) == (p - 1) * (q - 1) // 2 == A.degree // 2


@pytest.mark.parametrize("k", range(5))
def test_genus_of_two_strand_torus_knots(k):
    b = Braid(2, (1,) * (2 * k + 1))
    assert genus_positive_braid(b) == braid_closure_diagram(b).seifert_genus() == k


def test_known_lorenz_knots():
    assert alexander_from_braid(lorenz_braid("LR")) == UNKNOT
    assert alexander_from_braid(lorenz_braid("LRLRR")) == TREFOIL
    assert alexander_from_braid(lorenz_braid("LLRLR")) == TREFOIL


# --- diagrams -----------------------------------------------------------------------


STANDARD_TREFOIL = KnotDiagram(((1, 5, 2, 4), (3, 1, 4, 6), (5, 3, 6, 2)), (1, 1, 1))


def test_standard_trefoil_pd():
    d = STANDARD_TREFOIL
    assert d.components() == 1 and d.is_planar()
    assert alexander_from_diagram(d) == TREFOIL
    assert d.seifert_genus() == 1 and d.writhe() == 3
    assert KnotDiagram.from_json(d.to_json()) == d
    assert json.loads(d.to_json())["signs"] == [1, 1, 1]


def test_diagram_validation():
    with pytest.raises(DiagramError):
        KnotDiagram(((1, 2, 3, 4),), (1,))
    with pytest.raises(DiagramError):
        KnotDiagram(((1, 2, 2, 1),), (2,))
    with pytest.raises(DiagramError):
        braid_closure_diagram(Braid(2))
    assert alexander_from_diagram(KnotDiagram.unknot()) == UNKNOT


def positive_braids(n, c):
    for word in itertools.product(range(1, n), repeat=c):
        yield Braid(n, word)


@pytest.mark.parametrize("n,c", [(2, 3), (3, 4), (3, 6), (4, 5), (4, 7)])
def test_braid_and_diagram_agree(n, c):
    count = 0
    for b in positive_braids(n, c):
        if not b.is_knot():
            continue
        d = braid_closure_diagram(b)
        assert d.is_planar()
        A = alexander_from_braid(b)
        assert A == alexander_from_diagram(d)
        assert abs(A.at_one()) == 1 and A.palindromic
        assert genus_positive_braid(b) == d.seifert_genus()
        count += 1
    assert count > 0


def torus_curve(p, q, n=600, R=3.0, r=1.0):
    s = np.linspace(0, 2 * np.pi, n, endpoint=False)
    P = np.column_stack([(R + r * np.cos(q * s)) * np.cos(p * s),
                         (R + r * np.cos(q * s)) * np.sin(p * s), r * np.sin(q * s)])
    return np.vstack([P, P[:1]])


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_polyline_trefoil(seed):
    d = polyline_to_diagram(torus_curve(2, 3), rng=seed)
    assert alexander_from_diagram(d) == TREFOIL
    assert d.is_planar() and d.raw_crossings >= len(d)


def test_polyline_torus_2_5_and_3_4():
    assert alexander_from_diagram(polyline_to_diagram(torus_curve(2, 5), rng=0)).to_list() \
        == torus_alexander(2, 5)
    assert alexander_from_diagram(polyline_to_diagram(torus_curve(3, 4, 900), rng=0)).to_list() \
        == torus_alexander(3, 4)


def test_polyline_unknot_and_kinks():
    s = np.linspace(0, 2 * np.pi, 50, endpoint=False)
    circle = np.column_stack([np.cos(s), np.sin(s), 0.3 * np.sin(3 * s)])
    circle = np.vstack([circle, circle[:1]])
    assert alexander_from_diagram(polyline_to_diagram(circle, rng=1)) == UNKNOT
    # a curl is removed by the kink reduction
    curl = np.column_stack([np.cos(s) + 0.6 * np.cos(2 * s), np.sin(s) + 0.6 * np.sin(2 * s),
                            0.1 * np.sin(s)])
    curl = np.vstack([curl, curl[:1]])
    d = polyline_to_diagram(curl, direction=[0, 0, 1])
    assert d.raw_crossings == 1 and len(d) == 0


def test_polyline_validation():
    with pytest.raises(DiagramError):
        polyline_to_diagram(np.zeros((3, 3)))
    P = torus_curve(2, 3)
    with pytest.raises(DiagramError):
        polyline_to_diagram(P[:-1])
    flat = np.array([[0, 0, 0], [1, 0, 0], [1, 1, 0], [0, 1, 0], [0, 0, 0]], dtype=float)
    # every projection of a planar quadrilateral is generic, so it is accepted
    assert len(polyline_to_diagram(flat, rng=0)) == 0


def test_degenerate_curve():
    # a doubled segment overlaps itself in every projection
    P = np.array([[0, 0, 0], [1, 0, 0], [2, 0, 0], [1, 0, 0], [0.5, 0, 0], [0, 0, 0.0]])
    with pytest.raises(DegenerateCurve):
        polyline_to_diagram(P, rng=0, max_tries=5)


def test_alexander_poly_helpers():
    A = AlexanderPoly.from_laurent(LaurentPoly([-1, 1, -1], 5))
    assert A == TREFOIL and str(A)
    with pytest.raises(ValueError):
        AlexanderPoly.from_laurent(LaurentPoly())
