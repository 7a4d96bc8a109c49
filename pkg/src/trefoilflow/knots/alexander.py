"""Alexander polynomial two ways: reduced Burau of a braid, and the crossing matrix of a diagram."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple

from .braids import Braid, NotAKnot, burau_reduced
from .diagram import DiagramError, KnotDiagram
from .laurent import ONE, ZERO, T, LaurentPoly, determinant, identity


@dataclass(frozen=True)
class AlexanderPoly:
    """Normalized integer polynomial, ascending coefficients from degree 0."""

    coeffs: Tuple[int, ...]

    @classmethod
    def from_laurent(cls, p: LaurentPoly) -> "AlexanderPoly":
        if not p:
            raise ValueError("zero Alexander polynomial (split or non-knot input)")
        return cls(p.normalized().coeffs)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def palindromic(self) -> bool:
        c = self.coeffs
        return c == c[::-1] or c == tuple(-a for a in c[::-1])

    def at_one(self) -> int:
        return sum(self.coeffs)

    def as_laurent(self) -> LaurentPoly:
        return LaurentPoly(self.coeffs)

    def to_list(self) -> list:
        return list(self.coeffs)

    def __str__(self):
        return str(self.as_laurent())


TREFOIL = AlexanderPoly((1, -1, 1))
UNKNOT = AlexanderPoly((1,))


def alexander_from_braid(b: Braid) -> AlexanderPoly:
    """det(I - B) (1 - t) / (1 - t^n) with B the reduced Burau image of ``b``."""
    if not b.is_knot():
        raise NotAKnot("braid closure has several components")
    if b.n == 1:
        return UNKNOT
    B = burau_reduced(b)
    n1 = b.n - 1
    I = identity(n1)
    M = [[I[i][j] - B[i][j] for j in range(n1)] for i in range(n1)]
    det = determinant(M)
    # (1 - t^n)/(1 - t) = 1 + t + ... + t^(n-1)
    geom = LaurentPoly([1] * b.n)
    return AlexanderPoly.from_laurent(det.exact_div(geom))


def crossing_matrix(d: KnotDiagram):
    """Alexander matrix: one row per crossing, one column per arc of the diagram."""
    parent = {}

    def find(e):
        while parent[e] != e:
            parent[e] = parent[parent[e]]
            e = parent[e]
        return e

    for x in d.pd:
        for e in x:
            parent.setdefault(e, e)
    for k in range(len(d.pd)):
        _, _, oi, oo = d.roles(k)
        ra, rb = find(oi), find(oo)
        if ra != rb:
            parent[ra] = rb
    arcs = sorted({find(e) for e in parent})
    col = {a: i for i, a in enumerate(arcs)}
    one_minus_t = ONE - T
    rows = []
    for k in range(len(d.pd)):
        ui, uo, oi, _ = d.roles(k)
        row = [ZERO] * len(arcs)
        ko, ki, kj = col[find(oi)], col[find(ui)], col[find(uo)]
        if d.signs[k] > 0:
            row[ko] = row[ko] + one_minus_t
            row[ki] = row[ki] + T
            row[kj] = row[kj] - ONE
        else:
            row[ko] = row[ko] - one_minus_t
            row[ki] = row[ki] + ONE
            row[kj] = row[kj] - T
        rows.append(row)
    return rows, arcs


def alexander_from_diagram(d: KnotDiagram) -> AlexanderPoly:
    """Delete one row and one column of the crossing matrix and take the determinant."""
    if len(d) == 0:
        return UNKNOT
    if d.components() != 1:
        raise DiagramError("diagram has several components")
    rows, arcs = crossing_matrix(d)
    if len(arcs) != len(rows):
        raise DiagramError(f"inconsistent PD code: {len(rows)} crossings, {len(arcs)} arcs")
    minor = [r[:-1] for r in rows[:-1]]
    return AlexanderPoly.from_laurent(determinant(minor))
