"""Quick invariant suites per module, run by ``trefoilflow <command> --selftest``."""
from __future__ import annotations

import math

import numpy as np


def _check(name, cond, detail=None):
    return dict(name=name, passed=bool(cond), detail=detail)


def hyperbolic_suite():
    from .hyperbolic import Matrix2, S, T, axis, closed_geodesic_length, fixed_points, mobius_apply

    M = Matrix2(2, 1, 1, 1)
    ax = axis(M)
    out = [
        _check("S and T are unimodular", S.det() == 1 and T.det() == 1),
        _check("S^2 = -I", (S @ S).proj_equal(Matrix2.identity())),
        _check("(ST)^3 = -I", ((S @ T) ** 3).proj_equal(Matrix2.identity())),
        _check("length of [[2,1],[1,1]]",
               abs(closed_geodesic_length(M) - 2 * math.acosh(1.5)) < 1e-12),
        _check("axis endpoints are fixed",
               all(abs(mobius_apply(M, x) - x) < 1e-12 for x in fixed_points(M))),
        _check("axis is oriented towards the attracting point", ax.v == max(fixed_points(M))),
    ]
    return out


def lorenz_suite():
    from .lorenz import (LorenzParams, eigen_origin, hopf_threshold, hopf_threshold_numeric,
                         integrate)

    p = LorenzParams()
    e = eigen_origin(p)
    a = integrate([1.0, 2.0, 20.0], p, 2.0, 1e-10)
    b = integrate([-1.0, -2.0, 20.0], p, 2.0, 1e-10)
    return [
        _check("eigenvalue ordering at the classical parameters", e.ordered),
        _check("lambda2 = -beta", e.lambda2 == -p.beta),
        _check("Hopf closed form matches the eigenvalue crossing",
               abs(hopf_threshold(10.0) - hopf_threshold_numeric(10.0)) < 1e-6),
        _check("(x, y, z) -> (-x, -y, z) symmetry",
               np.allclose(a.final * [-1, -1, 1], b.final, atol=1e-8)),
    ]


def model_suite():
    from .model import ModelParams, classify_regime, kneading, realized_words

    rw = realized_words(ModelParams(0.1), 6)
    k0 = kneading(ModelParams(0.0), 8)
    regimes = [classify_regime(ModelParams(r)).regime for r in (-1e-6, 0.0, 1e-6)]
    return [
        _check("all words of length 6 realized at r = 0.1",
               rw["realized"] == rw["distinct"] == 64, rw),
        _check("r = 0 kneading is constant", k0.plus == "L" * 8 and k0.minus == "R" * 8),
        _check("regime flips at r = 0",
               regimes == ["lorenz_attractor", "boundary_heteroclinic", "fake_horseshoe"], regimes),
    ]


def modular_suite():
    from .modular import (build_representation, itinerary, section_geometry, seed_periodic,
                          verify_two_leaf_image)

    out = hyperbolic_suite()
    rep = build_representation(0.5)
    sec = section_geometry(rep)
    out.append(_check("|tr(ab)| = 2 cosh(l/2)",
                      abs(abs(rep.h.trace()) - 2 * math.cosh(0.25)) < 1e-12))
    for w in ("LR", "LLR", "LRR"):
        s = seed_periodic(rep, sec, w)
        it = itinerary(rep, sec, s.point, len(w))
        out.append(_check(f"itinerary of {w}", it == s.word, it))
    out.append(_check("unstable leaf returns as two leaves", verify_two_leaf_image(rep, sec, 16).ok))
    return out


def knots_suite():
    from .knots import (TREFOIL, UNKNOT, Braid, alexander_from_braid, alexander_from_diagram,
                        braid_closure_diagram, genus_positive_braid, lorenz_braid)
    from .knots.words import word_to_matrix

    out = [
        _check("trefoil from sigma1^3", alexander_from_braid(Braid(2, (1, 1, 1))) == TREFOIL),
        _check("LR gives the unknot", alexander_from_braid(lorenz_braid("LR")) == UNKNOT),
        _check("LRLRR gives the trefoil", alexander_from_braid(lorenz_braid("LRLRR")) == TREFOIL),
        _check("trace invariant under rotation",
               len({word_to_matrix(w).trace() for w in ("LLRLR", "LRLRL", "RLRLL")}) == 1),
    ]
    for k in range(5):
        b = Braid(2, (1,) * (2 * k + 1))
        d = braid_closure_diagram(b)
        out.append(_check(f"genus of sigma1^{2 * k + 1}", genus_positive_braid(b) == d.seifert_genus() == k))
    b = Braid(3, (1, 2, 1, 2))
    A = alexander_from_braid(b)
    out.append(_check("braid and diagram agree on s1 s2 s1 s2",
                      A == alexander_from_diagram(braid_closure_diagram(b))))
    out.append(_check("Delta(1) = +-1 and symmetric", abs(A.at_one()) == 1 and A.palindromic))
    return out


def ghys_suite():
    from .knots import ghys_word_check
    from .modular import build_representation, section_geometry

    rep = build_representation(0.5)
    sec = section_geometry(rep)
    return [_check(f"codings agree for {w}", ghys_word_check(w, rep, sec).ok)
            for w in ("LR", "LLR", "LRR", "LRLRR")]


SUITES = {
    "hyperbolic": hyperbolic_suite,
    "lorenz": lorenz_suite,
    "model": model_suite,
    "modular": modular_suite,
    "knots": knots_suite,
    "ghys": ghys_suite,
}


def run(names) -> dict:
    results = {}
    for n in names:
        results[n] = SUITES[n]()
    passed = all(c["passed"] for v in results.values() for c in v)
    return dict(status="ok" if passed else "fail", selftest=results)
