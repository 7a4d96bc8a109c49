"""PSL(2,R) kinematics on the upper half-plane.

Frames of the unit tangent bundle are stored as unimodular matrices ``g``: the
frame sits at ``g·i`` and points along the image of the upward unit vector at
``i``.  With this convention the geodesic flow is right multiplication by
``diag(e^{t/2}, e^{-t/2})`` and the group acts on the left, so the two commute.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence, Union


class Infinity:
    """The point at infinity of the extended real line (a singleton)."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INF"

    def __reduce__(self):
        return (Infinity, ())


INF = Infinity()

Point = Union[complex, float, Infinity]

DET_TOL = 1e-12
MAX_FLOW_TIME = 700.0


class HyperbolicError(ValueError):
    pass


class NotHyperbolic(HyperbolicError):
    pass


class NonDiscreteGroup(HyperbolicError):
    pass


def is_inf(z) -> bool:
    return z is INF


@dataclass(frozen=True)
class Matrix2:
    """A 2x2 real matrix, used projectively as an element of PSL(2,R).

    Integer entries are kept as Python ints, so products of integer matrices
    stay exact.
    """

    a: float
    b: float
    c: float
    d: float

    @classmethod
    def identity(cls) -> "Matrix2":
        return cls(1, 0, 0, 1)

    @classmethod
    def diag(cls, x, y) -> "Matrix2":
        return cls(x, 0, 0, y)

    @classmethod
    def rotation(cls, alpha: float) -> "Matrix2":
        """The element of SO(2) rotating tangent vectors at ``i`` by ``-2*alpha``."""
        ca, sa = math.cos(alpha), math.sin(alpha)
        return cls(ca, -sa, sa, ca)

    def __matmul__(self, o: "Matrix2") -> "Matrix2":
        return Matrix2(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )

    def __neg__(self) -> "Matrix2":
        return Matrix2(-self.a, -self.b, -self.c, -self.d)

    def __pow__(self, k: int) -> "Matrix2":
        base = self if k >= 0 else self.inv()
        out = Matrix2.identity()
        for _ in range(abs(k)):
            out = out @ base
        return out

    def det(self):
        return self.a * self.d - self.b * self.c

    def trace(self):
        return self.a + self.d

    def inv(self) -> "Matrix2":
        dt = self.det()
        if isinstance(dt, int) and abs(dt) == 1:
            return Matrix2(self.d * dt, -self.b * dt, -self.c * dt, self.a * dt)
        return Matrix2(self.d / dt, -self.b / dt, -self.c / dt, self.a / dt)

    def normalized(self) -> "Matrix2":
        """Rescale to determinant one."""
        dt = self.det()
        if dt <= 0:
            raise HyperbolicError(f"determinant {dt} is not positive")
        if dt == 1:
            return self
        s = math.sqrt(dt)
        return Matrix2(self.a / s, self.b / s, self.c / s, self.d / s)

    def canonical(self) -> "Matrix2":
        """Sign-normalized representative: first nonzero entry positive."""
        for e in (self.a, self.b, self.c, self.d):
            if e != 0:
                return self if e > 0 else -self
        return self

    def proj_equal(self, o: "Matrix2", tol: float = 1e-10) -> bool:
        p, q = self.canonical(), o.canonical()
        return all(abs(x - y) <= tol for x, y in zip(p.entries(), q.entries()))

    def entries(self) -> tuple:
        return (self.a, self.b, self.c, self.d)

    def __call__(self, z: Point) -> Point:
        return mobius_apply(self, z)


def mobius_apply(M: Matrix2, z: Point) -> Point:
    """(az+b)/(cz+d), with the point at infinity handled projectively."""
    if z is INF:
        return INF if M.c == 0 else M.a / M.c
    den = M.c * z + M.d
    if den == 0:
        return INF
    return (M.a * z + M.b) / den


S = Matrix2(0, -1, 1, 0)
T = Matrix2(1, 1, 0, 1)


# --- frames and the geodesic flow -------------------------------------------


@dataclass(frozen=True)
class HyperbolicFrame:
    g: Matrix2

    @property
    def base_point(self) -> complex:
        return complex(mobius_apply(self.g, 1j))

    @property
    def forward_endpoint(self) -> Point:
        return real_point(mobius_apply(self.g, INF))

    @property
    def backward_endpoint(self) -> Point:
        return real_point(mobius_apply(self.g, 0.0))

    @property
    def direction(self) -> float:
        """Euclidean angle of the unit vector, measured from the positive real axis."""
        g = self.g
        # derivative of the Mobius map at i is (ci+d)^-2; the reference vector points up
        w = (g.c * 1j + g.d) ** -2
        return math.atan2(w.imag, w.real) + math.pi / 2

    def geodesic(self) -> "GeodesicLine":
        return GeodesicLine(self.backward_endpoint, self.forward_endpoint)


def real_point(z: Point) -> Point:
    if z is INF:
        return INF
    return float(z.real) if isinstance(z, complex) else float(z)


def frame_at(z: complex, angle: float) -> HyperbolicFrame:
    """Frame at ``z`` whose vector makes Euclidean angle ``angle`` with the real axis."""
    x, y = z.real, z.imag
    if y <= 0:
        raise HyperbolicError("base point must lie in the upper half-plane")
    r = math.sqrt(y)
    N = Matrix2(r, x / r, 0.0, 1.0 / r)
    return HyperbolicFrame(N @ Matrix2.rotation((math.pi / 2 - angle) / 2))


def geodesic_flow(f: HyperbolicFrame, t: float) -> HyperbolicFrame:
    if abs(t) > MAX_FLOW_TIME:
        raise HyperbolicError(f"flow time {t} exceeds overflow guard {MAX_FLOW_TIME}")
    e = math.exp(t / 2)
    g = f.g @ Matrix2(e, 0.0, 0.0, 1.0 / e)
    if abs(g.det() - 1) > 1e-14:
        g = g.normalized()
    return HyperbolicFrame(g)


def distance(z: complex, w: complex) -> float:
    return math.acosh(1 + abs(z - w) ** 2 / (2 * z.imag * w.imag))


# --- geodesics ---------------------------------------------------------------


@dataclass(frozen=True)
class GeodesicLine:
    """Oriented geodesic from ``u`` (backward end) to ``v`` (forward end)."""

    u: Point
    v: Point

    def __post_init__(self):
        if self.u is INF and self.v is INF or (
            self.u is not INF and self.v is not INF and self.u == self.v
        ):
            raise HyperbolicError("geodesic endpoints must be distinct")

    def reversed(self) -> "GeodesicLine":
        return GeodesicLine(self.v, self.u)

    def image(self, M: Matrix2) -> "GeodesicLine":
        return GeodesicLine(real_point(M(self.u)), real_point(M(self.v)))

    def standard_map(self) -> Matrix2:
        """An element of SL(2,R) taking 0 to ``u`` and infinity to ``v``."""
        u, v = self.u, self.v
        if v is INF:
            return Matrix2(1.0, u, 0.0, 1.0)
        if u is INF:
            return Matrix2(v, -1.0, 1.0, 0.0)
        # columns (v, 1) and (u, 1) scaled to unit determinant
        det = v - u
        s = math.sqrt(abs(det))
        if det > 0:
            return Matrix2(v / s, u / s, 1.0 / s, 1.0 / s)
        return Matrix2(-v / s, u / s, -1.0 / s, 1.0 / s)

    def frame(self, s: float = 0.0) -> HyperbolicFrame:
        """Unit tangent frame along the line, ``s`` a signed arclength parameter."""
        return geodesic_flow(HyperbolicFrame(self.standard_map()), s)

    def side(self, z: Point) -> float:
        """sinh of the signed distance from ``z`` to the line; positive on the left.

        For an ideal point only the sign is meaningful (+inf / -inf / 0).
        """
        w = mobius_apply(self.standard_map().inv(), z)
        if w is INF:
            return 0.0
        if isinstance(w, complex) and w.imag > 0:
            return -w.real / w.imag
        w = w.real if isinstance(w, complex) else w
        return 0.0 if w == 0 else (-math.inf if w > 0 else math.inf)

    def contains_ideal(self, x: Point, tol: float = 1e-12) -> bool:
        for e in (self.u, self.v):
            if e is INF and x is INF:
                return True
            if e is not INF and x is not INF and abs(e - x) <= tol * max(1.0, abs(e)):
                return True
        return False


def fixed_points(M: Matrix2) -> list:
    """Real fixed points of the Mobius action of a hyperbolic or parabolic M."""
    a, b, c, d = M.entries()
    if c == 0:
        pts = [INF]
        if a != d:
            pts.append(b / (d - a))
        return pts
    disc = (d - a) ** 2 + 4 * b * c
    if disc < -1e-12 * (a * a + b * b + c * c + d * d):
        raise NotHyperbolic("elliptic element has no real fixed points")
    r = math.sqrt(max(disc, 0.0))
    return [((a - d) - r) / (2 * c), ((a - d) + r) / (2 * c)]


def _derivative_at(M: Matrix2, x: Point) -> float:
    if x is INF:
        # in the chart w = 1/z the map reads w -> d w / (a + b w)
        return M.d / M.a
    return M.det() / (M.c * x + M.d) ** 2


def axis(M: Matrix2) -> GeodesicLine:
    """Axis of a hyperbolic element, ordered (repelling, attracting)."""
    if abs(M.trace()) <= 2 * math.sqrt(abs(M.det())):
        raise NotHyperbolic(f"|trace| = {abs(M.trace())} <= 2; element is not hyperbolic")
    p, q = fixed_points(M)
    if abs(_derivative_at(M, p)) < 1:
        return GeodesicLine(real_point(q), real_point(p))
    return GeodesicLine(real_point(p), real_point(q))


def closed_geodesic_length(M: Matrix2) -> float:
    tr = abs(M.trace()) / math.sqrt(abs(M.det()))
    if tr <= 2:
        raise NotHyperbolic(f"|trace| = {tr} <= 2; element is not hyperbolic")
    return 2 * math.acosh(tr / 2)


def intersection(g1: GeodesicLine, g2: GeodesicLine):
    """Crossing point of two geodesics, or None if they do not cross."""
    M = g1.standard_map()
    Mi = M.inv()
    u, v = mobius_apply(Mi, g2.u), mobius_apply(Mi, g2.v)
    if u is INF or v is INF:
        return None
    u, v = float(u.real if isinstance(u, complex) else u), float(
        v.real if isinstance(v, complex) else v)
    if u * v >= 0:
        return None
    c, r = (u + v) / 2, abs(u - v) / 2
    return complex(mobius_apply(M, 1j * math.sqrt(r * r - c * c)))


# --- fundamental domains -----------------------------------------------------


def reduce_to_fundamental_domain(
    z: complex,
    generators: Sequence[Matrix2] | None = None,
    max_steps: int = 10_000,
    center: complex | None = None,
    word_cap: int = 12,
):
    """Move ``z`` into a fundamental domain; return ``(z', w)`` with ``z' = w·z``.

    Without ``generators`` this is the classical reduction for PSL(2,Z) into
    ``{|Re z| <= 1/2, |z| >= 1}``.  With generators, it performs a greedy
    Dirichlet-domain descent towards ``center`` using words of length up to
    three per move, at most ``word_cap`` moves.
    """
    if z.imag <= 0:
        raise HyperbolicError("point must lie in the upper half-plane")
    if generators is None:
        return _reduce_modular(z, max_steps)
    return _reduce_dirichlet(z, list(generators), center, word_cap, max_steps)


def _reduce_modular(z: complex, max_steps: int):
    w = Matrix2.identity()
    for _ in range(max_steps):
        n = math.floor(z.real + 0.5)
        if n != 0:
            Tn = Matrix2(1, -n, 0, 1)
            z = z - n
            w = Tn @ w
        if abs(z) < 1 - 1e-15:
            z = -1 / z
            w = S @ w
            continue
        return z, w
    raise NonDiscreteGroup("fundamental-domain reduction did not terminate")


def _reduce_dirichlet(z, gens, center, word_cap, max_steps):
    pool = []
    letters = []
    for g in gens:
        letters.append(g)
        ginv = g.inv()
        if not ginv.proj_equal(g):
            letters.append(ginv)
    frontier = [Matrix2.identity()]
    for _ in range(3):
        frontier = [x @ y for x in frontier for y in letters]
        pool.extend(frontier)
    if center is None:
        center = 0.3 + 1.7j
    w = Matrix2.identity()
    d = distance(z, center)
    moves = 0
    for _ in range(max_steps):
        best = None
        for g in pool:
            zz = mobius_apply(g, z)
            dd = distance(zz, center)
            if dd < d - 1e-12 and (best is None or dd < best[0]):
                best = (dd, g, zz)
        if best is None:
            return z, w
        moves += 1
        if moves > word_cap:
            raise NonDiscreteGroup("Dirichlet reduction exceeded the word-length cap")
        d, g, z = best
        w = g @ w
    raise NonDiscreteGroup("fundamental-domain reduction did not terminate")


def in_modular_domain(z: complex, tol: float = 1e-12) -> bool:
    return abs(z.real) <= 0.5 + tol and abs(z) >= 1 - tol


def words_to_matrix(word: Iterable[Matrix2]) -> Matrix2:
    out = Matrix2.identity()
    for m in word:
        out = out @ m
    return out
