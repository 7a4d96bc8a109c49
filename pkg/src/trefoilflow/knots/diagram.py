"""Planar diagrams as PD codes: braid closures, projection of 3D polylines, Seifert circles.

PD convention: each crossing lists four edge labels counterclockwise starting
from the incoming under-edge.  A positive crossing reads
(under-in, over-out, under-out, over-in); a negative one
(under-in, over-in, under-out, over-out).
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from .. import kernels
from .braids import Braid


class DiagramError(ValueError):
    pass


class DegenerateCurve(DiagramError):
    pass


@dataclass(frozen=True)
class KnotDiagram:
    pd: Tuple[Tuple[int, int, int, int], ...]
    signs: Tuple[int, ...]
    direction: Optional[np.ndarray] = field(default=None, compare=False)
    raw_crossings: int = field(default=0, compare=False)

    def __post_init__(self):
        pd = tuple(tuple(int(v) for v in x) for x in self.pd)
        signs = tuple(int(s) for s in self.signs)
        object.__setattr__(self, "pd", pd)
        object.__setattr__(self, "signs", signs)
        if len(pd) != len(signs):
            raise DiagramError("one sign per crossing required")
        if any(len(x) != 4 for x in pd) or any(s not in (1, -1) for s in signs):
            raise DiagramError("crossings need 4 labels and a sign of +-1")
        counts = {}
        for x in pd:
            for e in x:
                counts[e] = counts.get(e, 0) + 1
        bad = [e for e, c in counts.items() if c != 2]
        if bad:
            raise DiagramError(f"labels {sorted(bad)[:5]} do not appear exactly twice")

    @property
    def crossings(self):
        return self.pd

    def __len__(self):
        return len(self.pd)

    def roles(self, k: int):
        """(under_in, under_out, over_in, over_out) at crossing k."""
        a, b, c, d = self.pd[k]
        if self.signs[k] > 0:
            return a, c, d, b
        return a, c, b, d

    def _successor(self) -> dict:
        nxt = {}
        for k in range(len(self.pd)):
            ui, uo, oi, oo = self.roles(k)
            if ui in nxt or oi in nxt:
                raise DiagramError("an edge enters two crossings")
            nxt[ui] = uo
            nxt[oi] = oo
        return nxt

    def components(self) -> int:
        if not self.pd:
            return 1
        return _count_cycles(self._successor())

    def seifert_circles(self) -> int:
        """Circles of the oriented smoothing: under-in joins over-out, over-in joins under-out."""
        if not self.pd:
            return 1
        nxt = {}
        for k in range(len(self.pd)):
            ui, uo, oi, oo = self.roles(k)
            nxt[ui] = oo
            nxt[oi] = uo
        return _count_cycles(nxt)

    def faces(self) -> int:
        """Faces of the 4-valent graph traced with the PD rotation system."""
        if not self.pd:
            return 2
        where = {}
        for k, x in enumerate(self.pd):
            for p, e in enumerate(x):
                where.setdefault(e, []).append((k, p))
        seen = set()
        faces = 0
        for k in range(len(self.pd)):
            for p in range(4):
                if (k, p) in seen:
                    continue
                faces += 1
                dart = (k, p)
                while dart not in seen:
                    seen.add(dart)
                    ck, cp = dart
                    e = self.pd[ck][cp]
                    a, b = where[e]
                    other = b if a == dart else a
                    dart = (other[0], (other[1] - 1) % 4)
        return faces

    def is_planar(self) -> bool:
        return self.faces() == len(self.pd) + 2

    def writhe(self) -> int:
        return sum(self.signs)

    def seifert_genus(self) -> int:
        """Genus of the surface produced by Seifert's algorithm on this diagram."""
        if self.components() != 1:
            raise DiagramError("Seifert genus is computed for knots only")
        v = len(self.pd) - self.seifert_circles() + 1
        return v // 2

    def to_json(self) -> str:
        return json.dumps({"pd": [list(x) for x in self.pd], "signs": list(self.signs)})

    @classmethod
    def from_json(cls, s: str) -> "KnotDiagram":
        d = json.loads(s)
        return cls(tuple(map(tuple, d["pd"])), tuple(d["signs"]))

    @classmethod
    def unknot(cls) -> "KnotDiagram":
        return cls((), ())


def _count_cycles(nxt: dict) -> int:
    seen = set()
    c = 0
    for e in nxt:
        if e in seen:
            continue
        c += 1
        while e not in seen:
            seen.add(e)
            e = nxt[e]
    return c


def braid_closure_diagram(b: Braid) -> KnotDiagram:
    """PD code of the closure of a positive braid.

    At each generator the left strand passes over the right one; strands run
    downward and every crossing is positive.
    """
    if b.crossings == 0:
        if b.n == 1:
            return KnotDiagram.unknot()
        raise DiagramError("closure of the trivial braid on several strands is a split link")
    # an event per (crossing, strand); walk each strand to order its events
    n = b.n
    where = list(range(n))  # where[position] = strand
    per_strand = {s: [] for s in range(n)}
    xing = []
    for idx, k in enumerate(b.word):
        i = k - 1
        A, B = where[i], where[i + 1]
        per_strand[A].append(idx)
        per_strand[B].append(idx)
        xing.append((A, B))
        where[i], where[i + 1] = B, A
    perm = b.permutation()
    # follow the closed curve(s); each visit to a crossing becomes an event
    order = []
    visited = set()
    for start in range(n):
        if start in visited:
            continue
        s = start
        comp = []
        while s not in visited:
            visited.add(s)
            comp.extend((idx, s) for idx in per_strand[s])
            s = perm[s]
        order.append(comp)
    if len(order) > 1:
        raise DiagramError("braid closure is a link, not a knot")
    events = order[0]
    N = len(events)
    pos = {ev: m for m, ev in enumerate(events)}

    def lab(m):
        # edge m runs from event m to event m+1; labels are 1-based
        return m % N + 1

    pd, signs = [], []
    for idx, (A, B) in enumerate(xing):
        ma, mb = pos[(idx, A)], pos[(idx, B)]
        a_in, a_out = lab(ma - 1), lab(ma)
        b_in, b_out = lab(mb - 1), lab(mb)
        pd.append((b_in, a_out, b_out, a_in))
        signs.append(1)
    return KnotDiagram(tuple(pd), tuple(signs))


def _projection_basis(d):
    d = d / np.linalg.norm(d)
    helper = np.array([1.0, 0.0, 0.0]) if abs(d[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    u = np.cross(d, helper)
    u /= np.linalg.norm(u)
    v = np.cross(d, u)
    return u, v, d


def _diagram_along(P, d, tol):
    """Diagram of the closed polyline P projected along d, or None if not generic."""
    u, v, d = _projection_basis(d)
    Q = np.ascontiguousarray(np.column_stack([P @ u, P @ v]))
    depth = P @ d
    I, J, S, Tt, degenerate = kernels.segment_crossings(Q, tol)
    if degenerate:
        return None
    k = len(I)
    if k == 0:
        return [], []
    pts = Q[I] + S[:, None] * (Q[I + 1] - Q[I])
    if k > 1:
        # triple points: two crossings at the same planar location
        order = np.lexsort((pts[:, 1], pts[:, 0]))
        sp = pts[order]
        gaps = np.hypot(*(sp[1:] - sp[:-1]).T)
        if np.any(gaps < tol):
            return None
    di = depth[I] + S * (depth[I + 1] - depth[I])
    dj = depth[J] + Tt * (depth[J + 1] - depth[J])
    if np.any(np.abs(di - dj) < tol):
        return None
    events = []  # (curve parameter, crossing id, is_over)
    signs = []
    for c in range(k):
        over_i = di[c] > dj[c]
        ti = Q[I[c] + 1] - Q[I[c]]
        tj = Q[J[c] + 1] - Q[J[c]]
        o, un = (ti, tj) if over_i else (tj, ti)
        signs.append(1 if o[0] * un[1] - o[1] * un[0] > 0 else -1)
        events.append((I[c] + S[c], c, over_i))
        events.append((J[c] + Tt[c], c, not over_i))
    events.sort()
    return events, signs


def _reduce_kinks(events):
    """Drop crossings whose two visits are cyclically adjacent (Reidemeister I)."""
    while True:
        n = len(events)
        if n == 0:
            return events
        drop = None
        for m in range(n):
            if events[m][1] == events[(m + 1) % n][1]:
                drop = events[m][1]
                break
        if drop is None:
            return events
        events = [e for e in events if e[1] != drop]


def polyline_to_diagram(curve, rng=None, tol: float = 1e-9, max_tries: int = 100,
                        direction=None, reduce: bool = True) -> KnotDiagram:
    """Project a closed 3D polyline to a PD code.

    Directions are drawn at random until the projection has no tangencies,
    triple points or depth ties within ``tol``.  Kinks are removed afterwards.
    """
    P = np.asarray(getattr(curve, "points", curve), dtype=float)
    if P.ndim != 2 or P.shape[1] != 3 or len(P) < 4:
        raise DiagramError("need an (N, 3) closed polyline")
    if not np.array_equal(P[0], P[-1]):
        raise DiagramError("polyline is not closed")
    if np.any(np.all(P[1:] == P[:-1], axis=1)):
        raise DiagramError("consecutive duplicate points")
    rng = np.random.default_rng(rng)
    # scale-free tolerance for the planar tests
    scale = float(np.max(np.ptp(P, axis=0))) or 1.0
    for attempt in range(max_tries):
        d = np.asarray(direction, dtype=float) if (direction is not None and attempt == 0) \
            else rng.normal(size=3)
        res = _diagram_along(P / scale, d, tol)
        if res is None:
            continue
        events, signs = res
        raw = len(signs)
        if reduce:
            events = _reduce_kinks(events)
        if not events:
            return KnotDiagram((), (), direction=d / np.linalg.norm(d), raw_crossings=raw)
        N = len(events)
        slot = {}
        for m, (_, c, over) in enumerate(events):
            slot[(c, over)] = m
        kept = sorted({c for _, c, _ in events})
        pd, sg = [], []
        for c in kept:
            mu, mo = slot[(c, False)], slot[(c, True)]
            ui, uo = (mu - 1) % N + 1, mu % N + 1
            oi, oo = (mo - 1) % N + 1, mo % N + 1
            if signs[c] > 0:
                pd.append((ui, oo, uo, oi))
            else:
                pd.append((ui, oi, uo, oo))
            sg.append(signs[c])
        return KnotDiagram(tuple(pd), tuple(sg), direction=d / np.linalg.norm(d),
                           raw_crossings=raw)
    raise DegenerateCurve(f"degenerate curve: no generic projection in {max_tries} tries")
