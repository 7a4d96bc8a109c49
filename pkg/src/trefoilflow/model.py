"""Piecewise-affine skew-product return map on R = [-1, 1]^2 for the family X_r.

x > 0 carries letter R and x < 0 letter L.  A point that leaves R is absorbed
by the sink of the wing it just traversed: starting from x > 0 it is
``escaped_right_sink``, from x < 0 ``escaped_left_sink``.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from enum import Enum
from itertools import product

import numpy as np

R_MIN, R_MAX = -0.25, 0.25


class ModelError(ValueError):
    pass


class Status(str, Enum):
    ALIVE = "alive"
    ESCAPED_RIGHT = "escaped_right_sink"
    ESCAPED_LEFT = "escaped_left_sink"
    ON_DISCONTINUITY = "on_discontinuity"


@dataclass(frozen=True)
class ModelParams:
    r: float = 0.1
    nu: float = 0.3
    delta: float = 0.6

    def __post_init__(self):
        if not (R_MIN <= self.r <= R_MAX):
            raise ModelError(f"r={self.r} outside [{R_MIN}, {R_MAX}]")
        if not (0 < self.nu < 0.5):
            raise ModelError(f"nu={self.nu} outside (0, 1/2)")
        if self.nu + self.delta > 1 or self.delta - self.nu < 0:
            raise ModelError("need nu + delta <= 1 and delta >= nu")

    @property
    def mu(self) -> float:
        return 2.0 + self.r + min(0.0, self.r)

    @property
    def gap(self) -> float:
        """Half-width of the escaping gap around x = 0 (zero unless r > 0)."""
        return max(self.r, 0.0) / self.mu


@dataclass(frozen=True)
class ReturnMapPoint:
    x: float
    y: float
    status: Status = Status.ALIVE

    @property
    def alive(self) -> bool:
        return self.status is Status.ALIVE


def interval_map(x: float, mp: ModelParams) -> float:
    """f_r(x) = mu x - 1 - r for x > 0, extended as an odd function."""
    if x == 0:
        raise ModelError("on_discontinuity: x = 0")
    if x > 0:
        return mp.mu * x - 1.0 - mp.r
    return -(mp.mu * (-x) - 1.0 - mp.r)


def tip(mp: ModelParams, side: int = +1) -> float:
    """One-sided limit f_r(0+) (side=+1) or f_r(0-) (side=-1)."""
    return -side * (1.0 + mp.r)


def return_map(pt: ReturnMapPoint, mp: ModelParams) -> ReturnMapPoint:
    if not pt.alive:
        return pt
    if pt.x == 0:
        return ReturnMapPoint(pt.x, pt.y, Status.ON_DISCONTINUITY)
    s = 1.0 if pt.x > 0 else -1.0
    x1 = interval_map(pt.x, mp)
    y1 = mp.nu * pt.y + s * mp.delta
    if abs(x1) > 1:
        return ReturnMapPoint(x1, y1, Status.ESCAPED_RIGHT if s > 0 else Status.ESCAPED_LEFT)
    return ReturnMapPoint(x1, y1)


def orbit(pt: ReturnMapPoint, mp: ModelParams, n: int) -> list:
    out = [pt]
    for _ in range(n):
        pt = return_map(pt, mp)
        out.append(pt)
        if not pt.alive:
            break
    return out


def itinerary(pt: ReturnMapPoint, mp: ModelParams, n: int) -> str:
    """Letters of the first n alive iterates (shorter if the orbit dies)."""
    letters = []
    for _ in range(n):
        if not pt.alive or pt.x == 0:
            break
        letters.append("R" if pt.x > 0 else "L")
        pt = return_map(pt, mp)
    return "".join(letters)


# --- periodic orbits -----------------------------------------------------------


def _inverse_branch(letter: str, x: float, mp: ModelParams) -> float:
    if letter == "R":
        return (x + 1.0 + mp.r) / mp.mu
    return (x - 1.0 - mp.r) / mp.mu


def periodic_orbit_from_word(w, mp: ModelParams, tol: float = 1e-12,
                             max_iter: int = 10_000) -> ReturnMapPoint:
    """Periodic point with itinerary ``w``: inverse branches in x, forward contraction in y."""
    w = str(w)
    if not w or set(w) - set("LR"):
        raise ModelError(f"bad word {w!r}")
    if mp.r < 0:
        raise ModelError("word realization needs the full shift (r >= 0)")
    x = 0.0
    for _ in range(max_iter):
        x_new = x
        for letter in reversed(w):
            x_new = _inverse_branch(letter, x_new, mp)
        if abs(x_new - x) < tol:
            x = x_new
            break
        x = x_new
    y = 0.0
    for _ in range(max_iter):
        y_new = y
        for letter in w:
            y_new = mp.nu * y_new + (mp.delta if letter == "R" else -mp.delta)
        if abs(y_new - y) < tol:
            y = y_new
            break
        y = y_new
    return ReturnMapPoint(x, y)


def periodic_orbit_points(w, mp: ModelParams) -> list:
    """The |w| points of the orbit, starting at the point coded by w."""
    w = str(w)
    return [periodic_orbit_from_word(w[i:] + w[:i], mp) for i in range(len(w))]


def realized_words(mp: ModelParams, n: int, tol: float = 1e-9) -> dict:
    """For every word of length n, build its periodic point and read its itinerary back.

    Returns the number of words, how many round-trip, and how many distinct
    periodic points they give (points closer than ``tol`` count once).
    """
    words = all_words(n)
    xs = []
    realized = 0
    for w in words:
        pt = periodic_orbit_from_word(w, mp)
        if itinerary(pt, mp, n) == w:
            realized += 1
        xs.append((pt.x, pt.y))
    P = np.array(sorted(xs))
    distinct = 1 + int(np.sum(np.max(np.abs(np.diff(P, axis=0)), axis=1) > tol)) if len(P) else 0
    return dict(words=len(words), realized=realized, distinct=distinct)


# --- lap counting and survivors --------------------------------------------------


def _map_interval(a: float, b: float, mp: ModelParams):
    """Image of a subinterval of one side of 0 (an open/closed distinction is ignored)."""
    return sorted((interval_map(a, mp) if a != 0 else tip(mp, 1 if b > 0 else -1),
                   interval_map(b, mp) if b != 0 else tip(mp, 1 if a > 0 else -1)))


def _split_at_zero(intervals):
    out = []
    for a, b in intervals:
        if a < 0 < b:
            out.append((a, 0.0))
            out.append((0.0, b))
        elif b > a:
            out.append((a, b))
    return out


def lap_counts(mp: ModelParams, n: int) -> list:
    """Number of monotone branches of f_r^k on its survivors, k = 1..n."""
    pieces = [(-1.0, 0.0), (0.0, 1.0)]
    counts = []
    for _ in range(n):
        counts.append(len(pieces))
        nxt = []
        for a, b in pieces:
            lo, hi = _map_interval(a, b, mp)
            lo, hi = max(lo, -1.0), min(hi, 1.0)
            if hi > lo:
                nxt.append((lo, hi))
        pieces = _split_at_zero(nxt)
    return counts


def entropy_estimate(mp: ModelParams, depth: int = 16) -> float:
    """log(lap number of f^depth) / depth."""
    return math.log(lap_counts(mp, depth)[-1]) / depth


def survivor_intervals(mp: ModelParams, n: int) -> list:
    """x-intervals of points whose first n iterates stay in [-1, 1] away from the gap."""
    ivs = [(-1.0, 1.0)]
    for _ in range(n):
        nxt = []
        for a, b in ivs:
            # pull back each piece through both inverse branches
            for letter in "LR":
                lo = _inverse_branch(letter, a, mp)
                hi = _inverse_branch(letter, b, mp)
                if letter == "R":
                    lo = max(lo, 0.0)
                else:
                    hi = min(hi, 0.0)
                if hi > lo:
                    nxt.append((lo, hi))
        ivs = sorted(nxt)
    return ivs


# --- regime classification -------------------------------------------------------


@dataclass
class RegimeReport:
    regime: str
    inventory: dict
    witnesses: dict = field(default_factory=dict)


def _union(intervals, eps=0.0):
    out = []
    for a, b in sorted(intervals):
        if out and a <= out[-1][1] + eps:
            out[-1] = (out[-1][0], max(out[-1][1], b))
        else:
            out.append((a, b))
    return out


def _eventually_onto(a: float, b: float, mp: ModelParams, core, max_iter: int = 200):
    """Iterate the image of [a, b] until it covers ``core``; return the step count or None."""
    ivs = [(a, b)]
    for k in range(max_iter):
        u = _union(ivs, 1e-15)
        if any(lo <= core[0] + 1e-12 and hi >= core[1] - 1e-12 for lo, hi in u):
            return k
        nxt = []
        for lo, hi in _split_at_zero(u):
            nxt.append(tuple(_map_interval(lo, hi, mp)))
        ivs = nxt
    return None


def classify_regime(mp: ModelParams, depth: int = 10) -> RegimeReport:
    if not (1 <= depth <= 24):
        raise ModelError("depth must be in [1, 24]")
    r = mp.r
    if r < 0:
        top = max(abs(tip(mp)), abs(interval_map(1.0, mp)))
        trapped = top < 1.0
        core = (tip(mp, +1), tip(mp, -1))
        width = (core[1] - core[0]) / 2 ** depth
        worst = 0
        for k in range(2 ** depth):
            a = core[0] + k * width
            steps = _eventually_onto(a, a + width, mp, core)
            if steps is None:
                return RegimeReport("unresolved", {}, dict(failing_interval=[a, a + width],
                                                           trapped=trapped))
            worst = max(worst, steps)
        if not trapped:
            return RegimeReport("unresolved", {}, dict(sup_abs_image=top))
        # the affine branches' fixed points sit outside R when the bases are pulled in
        corners = [dict(x=periodic_fixed(mp, s), inside_section=abs(periodic_fixed(mp, s)) <= 1)
                   for s in (+1, -1)]
        return RegimeReport(
            "lorenz_attractor",
            dict(sinks=2, sources=1, periodic_saddles=2, lorenz_attractors=1),
            dict(sup_abs_image=top, core=list(core), cover_depth=depth,
                 max_steps_to_cover=worst,
                 branch_fixed_points=corners))
    if r == 0:
        plus, minus = tip(mp, +1), tip(mp, -1)
        ok = plus == -1.0 and minus == 1.0 and interval_map(1.0, mp) == 1.0
        if not ok:
            return RegimeReport("unresolved", {}, dict(tip_plus=plus, tip_minus=minus))
        return RegimeReport(
            "boundary_heteroclinic",
            dict(sinks=2, sources=1, singular_hyperbolic_classes=1),
            dict(tip_plus=plus, tip_minus=minus, corner_fixed=[1.0, -1.0]))
    g = mp.gap
    # the gap escapes: its closure maps onto [-1-r, -1] on the right half
    edge = interval_map(g, mp)
    inner = [g * k / 16 for k in range(1, 16)]
    gap_ok = abs(edge + 1.0) < 1e-12 and all(interval_map(x, mp) < -1 for x in inner)
    ivs = survivor_intervals(mp, depth)
    lengths = [hi - lo for lo, hi in ivs]
    cantor_ok = len(ivs) == 2 ** depth and max(lengths) <= 2.0 / mp.mu ** depth * (1 + 1e-9)
    if not (gap_ok and cantor_ok):
        return RegimeReport("unresolved", {}, dict(gap=[-g, g], survivors=len(ivs)))
    return RegimeReport(
        "fake_horseshoe",
        dict(sinks=2, sources=1, saddles=1, hyperbolic_basic_sets=1),
        dict(gap=[-g, g], survivor_intervals=len(ivs), max_survivor_length=max(lengths),
             tip_plus=tip(mp, +1), tip_status=Status.ESCAPED_RIGHT.value))


def periodic_fixed(mp: ModelParams, side: int) -> float:
    """Fixed point of the affine branch on the given side: x = (1 + r)/(mu - 1)."""
    return side * (1.0 + mp.r) / (mp.mu - 1.0)


# --- horseshoe ------------------------------------------------------------------


@dataclass
class Horseshoe:
    rectangles: list  # [((x0, x1), (y0, y1)), ...] for letters L, R
    transition: np.ndarray
    x_orientation_preserved: bool
    y_orientation_preserved: bool
    entropy: float


def horseshoe_markov(mp: ModelParams, depth: int = 16) -> Horseshoe:
    if mp.r <= 0:
        raise ModelError("the horseshoe exists only for r > 0")
    g = mp.gap
    rects = [((-1.0, -g), (-1.0, 1.0)), ((g, 1.0), (-1.0, 1.0))]
    T = np.zeros((2, 2), dtype=int)
    for i, ((x0, x1), _) in enumerate(rects):
        lo, hi = sorted((interval_map(x0, mp), interval_map(x1, mp)))
        for j, ((u0, u1), _) in enumerate(rects):
            # full crossing: the image spans the whole x-range of the target rectangle
            if lo <= u0 + 1e-12 and hi >= u1 - 1e-12:
                T[i, j] = 1
    x_pres = all(interval_map(x1, mp) > interval_map(x0, mp) for (x0, x1), _ in rects)
    # y' = nu y + const has positive slope on both rectangles
    y_pres = mp.nu > 0
    return Horseshoe(rects, T, x_pres, y_pres, entropy_estimate(mp, depth))


# --- kneading -------------------------------------------------------------------


@dataclass
class KneadingData:
    plus: str
    minus: str
    escape_step: dict
    escape_status: dict
    truncated: bool = False


def kneading(mp: ModelParams, n: int = 32) -> KneadingData:
    """Itineraries of f_r(0+) and f_r(0-).

    The orbit of 0+ is first the tip value itself; if the tip lies outside R the
    escape happens at step 0, into the sink of the wing it came through.
    """
    if not (1 <= n <= 64):
        raise ModelError("n must be in [1, 64]")
    seqs, steps, statuses = {}, {}, {}
    truncated = False
    for side, key in ((+1, "plus"), (-1, "minus")):
        x = tip(mp, side)
        letters = []
        steps[key] = None
        statuses[key] = Status.ALIVE.value
        if abs(x) > 1:
            steps[key] = 0
            statuses[key] = (Status.ESCAPED_RIGHT if side > 0 else Status.ESCAPED_LEFT).value
        else:
            pt = ReturnMapPoint(x, 0.0)
            for k in range(n):
                if pt.x == 0:
                    truncated = True
                    statuses[key] = Status.ON_DISCONTINUITY.value
                    break
                letters.append("R" if pt.x > 0 else "L")
                pt = return_map(pt, mp)
                if not pt.alive:
                    steps[key] = k + 1
                    statuses[key] = pt.status.value
                    break
        seqs[key] = "".join(letters)
    return KneadingData(seqs["plus"], seqs["minus"], steps, statuses, truncated)


# --- export ---------------------------------------------------------------------


def export_graph_csv(path, mp: ModelParams, n: int = 401):
    xs = np.linspace(-1, 1, n)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x", "f"])
        for x in xs:
            if x != 0:
                w.writerow([repr(float(x)), repr(interval_map(float(x), mp))])


def export_survivors_csv(path, mp: ModelParams, n: int):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["lo", "hi"])
        for lo, hi in survivor_intervals(mp, n):
            w.writerow([repr(lo), repr(hi)])


def export_periodic_csv(path, mp: ModelParams, max_len: int):
    from .knots.words import cyclic_classes

    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["word", "x", "y", "period"])
        for n in range(1, max_len + 1):
            for word in cyclic_classes(n, primitive=True, mixed=False):
                p = periodic_orbit_from_word(word.symbols, mp)
                w.writerow([word.symbols, repr(p.x), repr(p.y), n])


def all_words(n: int):
    return ["".join(t) for t in product("LR", repeat=n)]
