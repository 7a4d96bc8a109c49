"""Geodesic flow on the modular surface with its cusp opened into a funnel.

The group is generated by an order-2 rotation ``a`` about q = i and an
order-3 rotation ``b`` about p.  For funnel length l > 0 the boundary element
ab is hyperbolic with translation length l.

Cross-section: the geodesic l0 through q perpendicular to [p, q], oriented
so that p (and the triple cover D3 of the fundamental domain) lies on its
left, trimmed by the two lifts of the funnel geodesic h that cross it.  A
section point is (x, theta): signed arclength from q along l0 and the angle
from the tangent of l0, counterclockwise, so 0 < theta < pi points into D3.

Frames are unimodular matrices (see ``hyperbolic``).  The frame at (x, theta)
is M0 · diag(e^{x/2}, e^{-x/2}) · K(-theta/2) where M0 is the frame at q along
l0 and K(alpha) rotates vectors at i by -2 alpha.

Letters: an orbit leaving D3 through l1 = b·l0 gets letter R and is pulled
back with a·b^-1; through l2 = b^2·l0 it gets L and is pulled back with a·b.
With this dictionary a periodic orbit with word w translates along the axis
of a·M_w·a, where M_w is the product of R -> a·b and L -> a·b^-1.
"""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.optimize import brentq

from .hyperbolic import (INF, GeodesicLine, HyperbolicError, HyperbolicFrame, Matrix2,
                         axis, closed_geodesic_length, geodesic_flow, intersection,
                         mobius_apply)

A_STANDARD = Matrix2(0, -1, 1, 0)
B_STANDARD = Matrix2(0, -1, 1, 1)
EXIT_LETTER = {"l1": "R", "l2": "L"}


class ModularError(HyperbolicError):
    pass


class Wandering(ModularError):
    """The orbit leaves the convex core (crosses a lift of h) and never returns."""

    def __init__(self, msg, time=0.0):
        super().__init__(msg)
        self.time = time


class CornerOrbit(ModularError):
    """The point lies on a corner orbit (tangent to the section boundary)."""


# --- representation ---------------------------------------------------------------


def _b_of(s: float) -> Matrix2:
    e = math.exp(s)
    return Matrix2(0.0, -e, 1.0 / e, 1.0)


@dataclass(frozen=True)
class Representation:
    a: Matrix2
    b: Matrix2
    l: float
    s: float = 0.0

    @property
    def h(self) -> Matrix2:
        return self.a @ self.b

    @property
    def q(self) -> complex:
        return elliptic_fixed_point(self.a)

    @property
    def p(self) -> complex:
        return elliptic_fixed_point(self.b)

    @property
    def b_inv(self) -> Matrix2:
        return self.b.inv()

    def letter_matrix(self, letter: str) -> Matrix2:
        return self.a @ self.b if letter == "R" else self.a @ self.b_inv

    def word_matrix(self, w: str) -> Matrix2:
        """M_w in this group: R -> a b, L -> a b^-1 (the L/R matrices at l = 0)."""
        M = Matrix2.identity()
        for ch in str(w):
            M = M @ self.letter_matrix(ch)
        return M

    def forward_translation(self, w: str) -> Matrix2:
        """Group element translating the periodic orbit of w forward by one period."""
        return self.a @ self.word_matrix(w) @ self.a


def elliptic_fixed_point(M: Matrix2) -> complex:
    a, b, c, d = M.entries()
    if c == 0:
        raise ModularError("not elliptic")
    disc = (d - a) ** 2 + 4 * b * c
    if disc >= 0:
        raise ModularError("not elliptic")
    return complex((a - d) / (2 * c), math.sqrt(-disc) / (2 * abs(c)))


def build_representation(l: float) -> Representation:
    """Deform b by conjugating with diag(e^{s/2}, e^{-s/2}) until |tr(ab)| = 2 cosh(l/2)."""
    if l < 0:
        raise ModularError("funnel length must be nonnegative")
    if l == 0:
        return Representation(A_STANDARD, B_STANDARD, 0.0, 0.0)
    target = 2.0 * math.cosh(l / 2)

    def gap(s):
        return abs((A_STANDARD @ _b_of(s)).trace()) - target

    hi = 1.0
    while gap(hi) < 0:
        hi *= 2
        if hi > 1e3:
            raise ModularError("trace root-find failed to bracket")
    s = brentq(gap, 0.0, hi, xtol=1e-14, rtol=4 * np.finfo(float).eps)
    return Representation(A_STANDARD, _b_of(s), float(l), float(s))


# --- cross-section ------------------------------------------------------------------


def _direction_towards(z: complex, w: complex) -> float:
    """Euclidean angle at z of the geodesic ray towards w."""
    y = z.imag
    r = math.sqrt(y)
    N = Matrix2(r, z.real / r, 0.0, 1.0 / r)
    w0 = complex(mobius_apply(N.inv(), w))
    c = (w0 - 1j) / (w0 + 1j)  # Cayley transform; its derivative at i turns by -pi/2
    return math.atan2(c.imag, c.real) + math.pi / 2


def _frame_matrix(z: complex, angle: float) -> Matrix2:
    r = math.sqrt(z.imag)
    N = Matrix2(r, z.real / r, 0.0, 1.0 / r)
    return N @ Matrix2.rotation((math.pi / 2 - angle) / 2)


def _orient_left(g: GeodesicLine, inside: complex) -> GeodesicLine:
    return g if g.side(inside) > 0 else g.reversed()


def _arccot(w) -> float:
    if w is INF:
        return 0.0
    return math.pi / 2 - math.atan(w)


@dataclass(frozen=True)
class SectionPoint:
    x: float
    theta: float


@dataclass(frozen=True)
class CrossSection:
    rep: Representation
    M0: Matrix2
    l0: GeodesicLine
    l1: GeodesicLine
    l2: GeodesicLine
    trims: tuple  # (x_lo, x_hi); infinite for l = 0
    ideal: bool
    h0: Optional[GeodesicLine] = None  # lift crossing l0 at x_hi, right-to-left
    h1: Optional[GeodesicLine] = None  # lift crossing l0 at x_lo, right-to-left
    h_mid: Optional[GeodesicLine] = None  # lift between l1 and l2, D3 on its left

    # -- coordinates --
    def frame_matrix(self, x: float, theta: float) -> Matrix2:
        e = math.exp(x / 2)
        return self.M0 @ Matrix2(e, 0.0, 0.0, 1.0 / e) @ Matrix2.rotation(-theta / 2)

    def frame(self, pt: SectionPoint) -> HyperbolicFrame:
        return HyperbolicFrame(self.frame_matrix(pt.x, pt.theta))

    def point_at(self, x: float) -> complex:
        return complex(mobius_apply(self.M0, 1j * math.exp(x)))

    def x_of(self, z: complex) -> float:
        w = complex(mobius_apply(self.M0.inv(), z))
        return math.log(abs(w))

    def coords(self, f: HyperbolicFrame) -> SectionPoint:
        """Section coordinates of a frame based on l0."""
        x = self.x_of(f.base_point)
        e = math.exp(x / 2)
        G = Matrix2(1.0 / e, 0.0, 0.0, e) @ self.M0.inv() @ f.g
        alpha = math.atan2(G.c, G.a)
        return SectionPoint(x, (-2 * alpha) % (2 * math.pi))

    def angle_towards(self, x: float, w) -> float:
        """Angle at x of the frame whose forward endpoint is the ideal point w."""
        e = math.exp(x / 2)
        N = Matrix2(1.0 / e, 0.0, 0.0, e) @ self.M0.inv()
        wp = mobius_apply(N, w)
        if wp is not INF:
            wp = wp.real if isinstance(wp, complex) else float(wp)
        return (-2 * _arccot(wp)) % (2 * math.pi)

    def angle_from(self, x: float, w) -> float:
        """Angle at x of the frame whose backward endpoint is w."""
        return (self.angle_towards(x, w) - math.pi) % (2 * math.pi)


def section_geometry(rep: Representation) -> CrossSection:
    q, p = rep.q, rep.p
    phi = _direction_towards(q, p)
    M0 = _frame_matrix(q, phi - math.pi / 2)
    l0 = HyperbolicFrame(M0).geodesic()
    l1 = l0.image(rep.b)
    l2 = l0.image(rep.b @ rep.b)
    if rep.l == 0:
        return CrossSection(rep, M0, l0, l1, l2, (-math.inf, math.inf), True)
    hA = axis(rep.a @ rep.b)
    hB = hA.image(rep.a)
    lifts = []
    for h in (hA, hB):
        z = intersection(l0, h)
        if z is None:
            raise ModularError("funnel lift does not cross l0")
        # right-to-left: backward endpoint on the right of l0
        h = h if l0.side(h.u) < 0 else h.reversed()
        lifts.append((_x_on(M0, z), h))
    lifts.sort(key=lambda t: t[0])
    (x_lo, h_low), (x_hi, h_top) = lifts
    mids = []
    for g in (rep.b, rep.b @ rep.b):
        for h in (hA, hB):
            hh = h.image(g)
            if intersection(hh, l1) is not None and intersection(hh, l2) is not None:
                mids.append(_orient_left(hh, p))
    if not mids:
        raise ModularError("no lift of h between l1 and l2")
    return CrossSection(rep, M0, l0, l1, l2, (x_lo, x_hi), False,
                        h0=h_top, h1=h_low, h_mid=mids[0])


def _x_on(M0: Matrix2, z: complex) -> float:
    return math.log(abs(complex(mobius_apply(M0.inv(), z))))


# --- theta bounds --------------------------------------------------------------------


@dataclass(frozen=True)
class ThetaBounds:
    x: float
    theta0_s: float
    theta0_u: float
    theta1_s: float
    theta1_u: float

    @property
    def lower(self) -> float:
        return max(self.theta0_s, self.theta1_u)

    @property
    def upper(self) -> float:
        return min(self.theta1_s, self.theta0_u)

    def contains(self, theta: float) -> bool:
        return self.lower < theta < self.upper


def theta_bounds(section: CrossSection, x: float) -> ThetaBounds:
    if section.ideal:
        raise ModularError("theta bounds need a funnel (l > 0)")
    h0, h1 = section.h0, section.h1
    return ThetaBounds(x, section.angle_towards(x, h0.v), section.angle_from(x, h0.u),
                       section.angle_towards(x, h1.v), section.angle_from(x, h1.u))


def endpoints_of_corners(section: CrossSection) -> dict:
    return dict(a0=section.h0.u, b0=section.h0.v, a1=section.h1.u, b1=section.h1.v)


def in_core(section: CrossSection, pt: SectionPoint) -> bool:
    lo, hi = section.trims
    if not (lo < pt.x < hi):
        return False
    return theta_bounds(section, pt.x).contains(pt.theta)


# --- first return --------------------------------------------------------------------


@dataclass(frozen=True)
class ReturnStep:
    point: SectionPoint
    letter: str
    time: float
    reidentification: Matrix2
    exit: str


def _crossing_time(f: HyperbolicFrame, line: GeodesicLine, tmax: float) -> float:
    def side(t):
        return line.side(geodesic_flow(f, t).base_point)

    if side(0.0) <= 0:
        return 0.0
    hi = 1.0
    while side(hi) > 0:
        hi *= 2
        if hi > tmax:
            raise ModularError(f"no crossing before tmax={tmax}")
    return brentq(side, 0.0, hi, xtol=1e-12, rtol=4 * np.finfo(float).eps, maxiter=200)


def first_return(rep: Representation, section: CrossSection, pt: SectionPoint,
                 tmax: float = 50.0) -> ReturnStep:
    if section.ideal:
        raise ModularError("first return needs a compact section (l > 0)")
    lo, hi = section.trims
    if min(abs(pt.x - lo), abs(pt.x - hi)) < 1e-12:
        raise CornerOrbit(f"x = {pt.x} is a trim endpoint; the corner orbit is tangent there")
    if not in_core(section, pt):
        raise Wandering(f"{pt} lies outside the core rectangle", 0.0)
    f = section.frame(pt)
    fwd = f.forward_endpoint
    if section.h_mid.side(fwd) < 0:
        t = _crossing_time(f, section.h_mid, tmax)
        raise Wandering("orbit crosses the funnel geodesic between l1 and l2", t)
    if section.l1.side(fwd) < 0:
        exit_, line, A = "l1", section.l1, rep.a @ rep.b_inv
    elif section.l2.side(fwd) < 0:
        exit_, line, A = "l2", section.l2, rep.a @ rep.b
    else:
        raise Wandering("forward endpoint lies behind no exit side", 0.0)
    t = _crossing_time(f, line, tmax)
    g = geodesic_flow(f, t)
    back = HyperbolicFrame(A @ g.g)
    return ReturnStep(section.coords(back), EXIT_LETTER[exit_], t, A, exit_)


def itinerary(rep: Representation, section: CrossSection, pt: SectionPoint, n: int,
              tmax: float = 50.0) -> str:
    letters = []
    for _ in range(n):
        step = first_return(rep, section, pt, tmax)
        letters.append(step.letter)
        pt = step.point
    return "".join(letters)


def orbit_steps(rep, section, pt, n, tmax=50.0) -> list:
    out = []
    for _ in range(n):
        step = first_return(rep, section, pt, tmax)
        out.append(step)
        pt = step.point
    return out


# --- periodic geodesics ----------------------------------------------------------------


@dataclass(frozen=True)
class PeriodicSeed:
    point: SectionPoint
    word: str  # the rotation of the input word read from this point
    translation: Matrix2
    length: float


def seed_periodic(rep: Representation, section: CrossSection, w: str) -> PeriodicSeed:
    """Section point on the axis of a·M_w·a for the first rotation of w whose axis
    crosses the core rectangle."""
    w = str(w)
    for k in range(len(w)):
        wk = w[k:] + w[:k]
        H = rep.forward_translation(wk)
        ax = axis(H)
        z = intersection(section.l0, ax)
        if z is None:
            continue
        x = section.x_of(z)
        pt = SectionPoint(x, section.angle_towards(x, ax.v))
        if section.ideal or in_core(section, pt):
            return PeriodicSeed(pt, wk, H, closed_geodesic_length(H))
    raise ModularError(f"no rotation of {w} has an axis through the core rectangle")


# --- leaves -------------------------------------------------------------------------


def _leaf_points(section: CrossSection, endpoint, kind: str, m: int):
    lo, hi = section.trims

    def pt_at(x):
        th = (section.angle_from(x, endpoint) if kind == "unstable"
              else section.angle_towards(x, endpoint))
        return SectionPoint(x, th)

    grid = np.linspace(lo, hi, 2001)[1:-1]
    inside = [x for x in grid if in_core(section, pt_at(x))]
    if not inside:
        return []
    # refine the ends of the inside range so samples fill it
    a, b = inside[0], inside[-1]
    if m == 1:
        return [pt_at((a + b) / 2)]
    return [p for p in (pt_at(x) for x in np.linspace(a, b, m)) if in_core(section, p)]


def _clusters(values, tol):
    order = np.argsort(values)
    groups = [[order[0]]]
    for i, j in zip(order[:-1], order[1:]):
        if values[j] - values[i] > tol:
            groups.append([j])
        else:
            groups[-1].append(j)
    return groups


@dataclass
class LeafReport:
    kind: str
    endpoint: float
    samples: int
    returned: int
    clusters: list  # [{endpoint, dispersion, size, orientation_preserved}]

    @property
    def ok(self) -> bool:
        want = 2 if self.kind == "unstable" else 1
        if self.returned < 2:
            return True
        return (len(self.clusters) == want
                and all(c["dispersion"] < 1e-8 and c["orientation_preserved"]
                        for c in self.clusters))


def verify_two_leaf_image(rep: Representation, section: CrossSection, m: int = 64,
                          endpoint=None, kind: str = "unstable",
                          cluster_gap: float = 1e-6) -> LeafReport:
    """Flow a sampled leaf to its first return and cluster the images by leaf.

    An unstable leaf (fixed backward endpoint) should come back as two unstable
    leaves, each traversed in the same direction; a stable leaf (fixed forward
    endpoint) as part of a single stable leaf.
    """
    if section.ideal:
        raise ModularError("leaf images need l > 0")
    if endpoint is None:
        endpoint = (unstable_leaf_endpoints(section, 1) if kind == "unstable"
                    else stable_leaf_endpoints(section, 1))[0]
    pts = _leaf_points(section, endpoint, kind, m)
    xs, ends, xps = [], [], []
    for pt in pts:
        try:
            step = first_return(rep, section, pt)
        except Wandering:
            continue
        f = section.frame(step.point)
        e = f.backward_endpoint if kind == "unstable" else f.forward_endpoint
        if e is INF:
            e = math.inf
        xs.append(pt.x)
        ends.append(float(e))
        xps.append(step.point.x)
    clusters = []
    if ends:
        vals = np.array(ends)
        for g in _clusters(vals, cluster_gap):
            g = sorted(g, key=lambda i: xs[i])
            xp = np.array([xps[i] for i in g])
            clusters.append(dict(endpoint=float(np.mean(vals[g])),
                                 dispersion=float(np.ptp(vals[g])), size=len(g),
                                 orientation_preserved=bool(np.all(np.diff(xp) > 0))))
    return LeafReport(kind, float(endpoint) if endpoint is not INF else math.inf, len(pts),
                      len(ends), clusters)


def unstable_leaf_endpoints(section: CrossSection, n: int) -> list:
    """n backward endpoints spread across the open arc of core unstable leaves."""
    a0, a1 = section.h0.u, section.h1.u
    lo, hi = sorted((a0, a1))
    return [lo + (hi - lo) * (k + 1) / (n + 1) for k in range(n)]


def stable_leaf_endpoints(section: CrossSection, n: int) -> list:
    """n forward endpoints between b1 and the funnel lift between l1 and l2; these
    leaves leave through l1 without wandering."""
    b1 = section.h1.v
    m = section.h_mid
    near = min((e for e in (m.u, m.v) if e is not INF), key=lambda e: abs(e - b1))
    lo, hi = sorted((b1, near))
    return [lo + (hi - lo) * (k + 1) / (n + 1) for k in range(n)]


# --- export ---------------------------------------------------------------------------


def export_returns_csv(path, rep: Representation, section: CrossSection, points):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x", "theta", "x_next", "theta_next", "letter", "time"])
        for pt in points:
            try:
                st = first_return(rep, section, pt)
            except Wandering:
                continue
            w.writerow([repr(pt.x), repr(pt.theta), repr(st.point.x), repr(st.point.theta),
                        st.letter, repr(st.time)])


def itinerary_json(word: str) -> str:
    return json.dumps(list(word))
