"""The classical Lorenz system: equilibria, spectra, separatrices, T-point and trefoil.

Numerically, the unstable branch ``+`` of the origin (the one leaving along
``x > 0``) makes one turn around C+ and lands on C-; the ``-`` branch mirrors it
onto C+.  ``CONNECTION_TARGET`` records that pairing.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import brentq

from . import kernels

BETA_CLASSICAL = 8.0 / 3.0

# branch of W^u(origin) -> sign of the equilibrium it connects to at the T-point
CONNECTION_TARGET = {+1: -1, -1: +1}

DEFAULT_EPS = 1e-7
DEFAULT_TOL = 1e-10
TRUNCATION_RADIUS = 1e-4
CLOSURE_RADIUS = 500.0


class LorenzError(RuntimeError):
    pass


class IntegrationError(LorenzError):
    def __init__(self, msg, last_state=None, last_time=None):
        super().__init__(msg)
        self.last_state = last_state
        self.last_time = last_time


class WrongRegime(LorenzError):
    pass


class NoCrossing(LorenzError):
    pass


class NotAtTPoint(LorenzError):
    pass


class TPointDivergence(LorenzError):
    def __init__(self, msg, history):
        super().__init__(msg)
        self.history = history


@dataclass(frozen=True)
class LorenzParams:
    sigma: float = 10.0
    rho: float = 28.0
    beta: float = BETA_CLASSICAL

    def __post_init__(self):
        if not (self.sigma > 0 and self.rho > 0 and self.beta > 0):
            raise ValueError(f"Lorenz parameters must be positive: {self}")

    def replace(self, **kw) -> "LorenzParams":
        d = dict(sigma=self.sigma, rho=self.rho, beta=self.beta)
        d.update(kw)
        return LorenzParams(**d)


def vector_field(state, p: LorenzParams) -> np.ndarray:
    x, y, z = state
    return np.array([p.sigma * (y - x), x * (p.rho - z) - y, x * y - p.beta * z])


def jacobian(state, p: LorenzParams) -> np.ndarray:
    x, y, z = state
    return np.array([[-p.sigma, p.sigma, 0.0],
                     [p.rho - z, -1.0, -x],
                     [y, x, -p.beta]])


def equilibria(p: LorenzParams) -> list:
    """Origin, then C+ and C- when rho > 1."""
    out = [np.zeros(3)]
    if p.rho > 1:
        c = math.sqrt(p.beta * (p.rho - 1))
        out.append(np.array([c, c, p.rho - 1]))
        out.append(np.array([-c, -c, p.rho - 1]))
    return out


def c_point(p: LorenzParams, sign: int) -> np.ndarray:
    if p.rho <= 1:
        raise WrongRegime("C+- exist only for rho > 1")
    return equilibria(p)[1 if sign > 0 else 2]


def mirror(state):
    """The flow's symmetry (x, y, z) -> (-x, -y, z)."""
    s = np.asarray(state, dtype=float)
    out = s.copy()
    out[..., 0] *= -1
    out[..., 1] *= -1
    return out


# --- spectra -----------------------------------------------------------------


@dataclass(frozen=True)
class EigenData:
    lambda1: float
    lambda2: float
    lambda3: float
    ordered: bool  # lambda3 < lambda2 < 0 < lambda1 + lambda2 < lambda1
    v1: np.ndarray = field(repr=False, compare=False, default=None)


def eigen_origin(p: LorenzParams) -> EigenData:
    s = p.sigma
    disc = math.sqrt((s + 1) ** 2 + 4 * s * (p.rho - 1))
    l1 = (-(s + 1) + disc) / 2
    l3 = (-(s + 1) - disc) / 2
    l2 = -p.beta
    ordered = l3 < l2 < 0 < l1 + l2 < l1
    v1 = np.array([s, l1 + s, 0.0])
    v1 /= np.linalg.norm(v1)
    return EigenData(l1, l2, l3, ordered, v1)


@dataclass(frozen=True)
class SaddleFocusSpectrum:
    real: float
    pair: complex  # the member with positive imaginary part
    v_stable: np.ndarray = field(repr=False, compare=False)


def eigen_c(p: LorenzParams, sign: int = +1) -> SaddleFocusSpectrum:
    """Spectrum at C+ (sign=+1) or C- (sign=-1): one real eigenvalue and a complex pair."""
    C = c_point(p, sign)
    w, V = np.linalg.eig(jacobian(C, p))
    real_idx = [i for i in range(3) if abs(w[i].imag) < 1e-12 * max(1.0, abs(w[i]))]
    cplx_idx = [i for i in range(3) if i not in real_idx]
    if len(real_idx) != 1:
        raise WrongRegime(f"spectrum at C is not (real, complex pair): {w}")
    k = real_idx[0]
    pair = w[cplx_idx[0]]
    if pair.imag < 0:
        pair = pair.conjugate()
    v = V[:, k].real
    v = v / np.linalg.norm(v)
    return SaddleFocusSpectrum(float(w[k].real), complex(pair), v)


def characteristic_c(p: LorenzParams) -> tuple:
    """Coefficients (1, a2, a1, a0) of the characteristic cubic at C+-."""
    s, r, b = p.sigma, p.rho, p.beta
    return (1.0, s + b + 1, b * (s + r), 2 * s * b * (r - 1))


# --- integration ---------------------------------------------------------------


@dataclass
class Trajectory:
    """Accepted integrator steps with DOPRI5 dense output.

    ``t`` is monotone in the direction of integration (decreasing for
    backward runs).
    """

    t: np.ndarray
    y: np.ndarray
    dense: np.ndarray
    steps: int
    rejected: int
    max_error: float
    status: int
    params: LorenzParams

    def __len__(self):
        return len(self.t)

    @property
    def final(self) -> np.ndarray:
        return self.y[-1]

    def _step_eval(self, k: int, theta):
        y0, r2, r3, r4, r5 = self.dense[k]
        th1 = 1.0 - theta
        return y0 + theta * (r2 + th1 * (r3 + theta * (r4 + th1 * r5)))

    def __call__(self, tt: float) -> np.ndarray:
        t = self.t
        forward = t[-1] >= t[0]
        if forward:
            k = int(np.searchsorted(t, tt, side="right")) - 1
        else:
            k = int(np.searchsorted(-t, -tt, side="right")) - 1
        k = min(max(k, 0), len(self.dense) - 1)
        h = t[k + 1] - t[k]
        return self._step_eval(k, (tt - t[k]) / h)

    def sample(self, per_step: int = 4) -> np.ndarray:
        """States at every step point plus ``per_step - 1`` dense points inside each step."""
        if len(self.dense) == 0:
            return self.y.copy()
        thetas = np.arange(per_step) / per_step
        pts = [self._step_eval(k, th) for k in range(len(self.dense)) for th in thetas]
        pts.append(self.y[-1])
        return np.array(pts)

    def crossings(self, fn, root_tol: float = 1e-13):
        """Times and states where the scalar ``fn(state)`` changes sign between steps."""
        vals = np.array([fn(y) for y in self.y])
        out = []
        for k in np.nonzero(np.sign(vals[1:]) * np.sign(vals[:-1]) < 0)[0]:
            g = lambda th: fn(self._step_eval(k, th))
            th = brentq(g, 0.0, 1.0, xtol=root_tol)
            t = self.t[k] + th * (self.t[k + 1] - self.t[k])
            out.append((float(t), self._step_eval(k, th)))
        return out

    def to_csv(self, path, per_step: int = 1):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "x", "y", "z"])
            if per_step <= 1:
                for t, y in zip(self.t, self.y):
                    w.writerow([repr(float(t))] + [repr(float(v)) for v in y])
            else:
                for k in range(len(self.dense)):
                    for j in range(per_step):
                        th = j / per_step
                        t = self.t[k] + th * (self.t[k + 1] - self.t[k])
                        w.writerow([repr(float(t))]
                                   + [repr(float(v)) for v in self._step_eval(k, th)])
                w.writerow([repr(float(self.t[-1]))] + [repr(float(v)) for v in self.y[-1]])


def integrate(state, p: LorenzParams, T: float, tol: float = DEFAULT_TOL, *,
              stop_radius: float = 0.0, stop_point=None, stop_dist: float = 0.0,
              max_steps: int = 2_000_000) -> Trajectory:
    if not (1e-13 <= tol <= 1e-6):
        raise ValueError(f"tol={tol} outside [1e-13, 1e-6]")
    state = np.asarray(state, dtype=float)
    if not np.all(np.isfinite(state)):
        raise ValueError("non-finite initial state")
    ts, ys, dense, n, nrej, maxerr, status = kernels.dopri5_lorenz(
        state, p.sigma, p.rho, p.beta, float(T), tol, stop_radius, stop_point, stop_dist,
        0.0, max_steps)
    traj = Trajectory(ts, ys, dense, n, nrej, maxerr, status, p)
    if status == kernels._purepy.STATUS_UNDERFLOW:
        raise IntegrationError("step size underflow", ys[-1], ts[-1])
    if status == kernels._purepy.STATUS_MAXSTEPS:
        raise IntegrationError("step budget exhausted", ys[-1], ts[-1])
    return traj


# --- invariant manifolds -----------------------------------------------------


def unstable_separatrix(p: LorenzParams, branch: int = +1, eps: float = DEFAULT_EPS,
                        T: float = 4.0, tol: float = DEFAULT_TOL, **stop) -> Trajectory:
    """Branch ``+1`` leaves the origin along ``+v1`` (x > 0), ``-1`` along ``-v1``."""
    if not (1e-9 <= eps <= 1e-5):
        raise ValueError(f"eps={eps} outside [1e-9, 1e-5]")
    v1 = eigen_origin(p).v1
    return integrate(branch * eps * v1, p, T, tol, **stop)


def stable_separatrix(p: LorenzParams, which: int = +1, side: str = "inner",
                      eps: float = DEFAULT_EPS, T: float = 4.0, tol: float = DEFAULT_TOL,
                      **stop) -> Trajectory:
    """Backward orbit along the 1D stable manifold of C+ (which=+1) or C- (which=-1).

    ``side="inner"`` seeds towards the z-axis (the heteroclinic side),
    ``"outer"`` away from it (the branch coming in from infinity).
    """
    if not (1e-9 <= eps <= 1e-5):
        raise ValueError(f"eps={eps} outside [1e-9, 1e-5]")
    spectrum = eigen_c(p, which)
    if not (spectrum.real < 0 and spectrum.pair.real > 0):
        raise WrongRegime(
            f"C{'+' if which > 0 else '-'} spectrum {spectrum.real}, {spectrum.pair} is not "
            "(negative real, unstable complex pair)")
    C = c_point(p, which)
    v = spectrum.v_stable
    inward = -np.sign(C[0]) * v[0] > 0
    if (side == "inner") != inward:
        v = -v
    return integrate(C + eps * v, p, -abs(T), tol, **stop)


def stable_separatrix_Cplus(p: LorenzParams, eps: float = DEFAULT_EPS, T: float = 4.0,
                            tol: float = DEFAULT_TOL, side: str = "inner") -> Trajectory:
    return stable_separatrix(p, +1, side, eps, T, tol)


# --- T-point -----------------------------------------------------------------


@dataclass(frozen=True)
class MissVector:
    dx: float
    dy: float

    @property
    def norm(self) -> float:
        return math.hypot(self.dx, self.dy)

    def as_array(self) -> np.ndarray:
        return np.array([self.dx, self.dy])


def _section_point(traj: Trajectory, p: LorenzParams, branch: int, guard: float = 1.0):
    """First crossing of z = rho - 1 (in integration order) with z increasing and
    branch·x > 0, away from the equilibria."""
    level = p.rho - 1
    eq = equilibria(p)
    for _, y in traj.crossings(lambda s: s[2] - level):
        f = vector_field(y, p)
        if f[2] <= 0 or branch * y[0] <= 0:
            continue
        if min(np.linalg.norm(y - e) for e in eq) < guard:
            continue
        return y
    raise NoCrossing(f"no admissible crossing of z = rho - 1 at {p}")


def miss_distance(p: LorenzParams, eps: float = DEFAULT_EPS, tol: float = DEFAULT_TOL,
                  branch: int = +1, T: float = 4.0) -> MissVector:
    """Gap in the plane z = rho - 1 between W^u(0) and the W^s of its target equilibrium.

    The branch ``-1`` result is reported in mirrored coordinates, so by symmetry it
    coincides with the branch ``+1`` result.
    """
    target = CONNECTION_TARGET[branch]
    wu = unstable_separatrix(p, branch, eps, T, tol, stop_radius=1e3)
    ws = stable_separatrix(p, target, "inner", eps, T, tol, stop_radius=1e3)
    d = _section_point(wu, p, branch) - _section_point(ws, p, branch)
    if branch < 0:
        d = -d
    return MissVector(float(d[0]), float(d[1]))


@dataclass
class TPointResult:
    params: LorenzParams
    miss: MissVector
    iterations: int
    history: list
    jacobian: np.ndarray

    @property
    def condition(self) -> float:
        return float(np.linalg.cond(self.jacobian))


def _miss_rs(rho, sigma, beta, eps, tol):
    return miss_distance(LorenzParams(sigma, rho, beta), eps, tol).as_array()


def miss_jacobian(rho, sigma, beta=BETA_CLASSICAL, eps=DEFAULT_EPS, tol=DEFAULT_TOL,
                  step=1e-6, base=None):
    """Forward-difference Jacobian of the miss vector in (rho, sigma)."""
    m0 = _miss_rs(rho, sigma, beta, eps, tol) if base is None else base
    jr = (_miss_rs(rho + step, sigma, beta, eps, tol) - m0) / step
    js = (_miss_rs(rho, sigma + step, beta, eps, tol) - m0) / step
    return np.column_stack([jr, js])


def find_tpoint(initial: LorenzParams = LorenzParams(10.0, 30.0), tol: float = 1e-9,
                integrator_tol: float = DEFAULT_TOL, eps: float = DEFAULT_EPS,
                max_iter: int = 100, fd_step: float = 1e-6) -> TPointResult:
    """Newton on the miss vector in (rho, sigma) with beta frozen.

    Jacobian by forward differences; a backtracking line search halves the step
    until the miss norm decreases.
    """
    beta = initial.beta
    x = np.array([initial.rho, initial.sigma], dtype=float)
    m = _miss_rs(x[0], x[1], beta, eps, integrator_tol)
    history = [dict(iteration=0, rho=float(x[0]), sigma=float(x[1]),
                    miss=float(np.linalg.norm(m)))]
    J = np.eye(2)
    for it in range(1, max_iter + 1):
        if np.linalg.norm(m) < tol:
            J = miss_jacobian(x[0], x[1], beta, eps, integrator_tol, fd_step, m)
            return TPointResult(LorenzParams(float(x[1]), float(x[0]), beta), MissVector(float(m[0]), float(m[1])), it - 1,
                                history, J)
        J = miss_jacobian(x[0], x[1], beta, eps, integrator_tol, fd_step, m)
        try:
            dx = -np.linalg.solve(J, m)
        except np.linalg.LinAlgError:
            dx = -np.linalg.lstsq(J, m, rcond=None)[0]
        lam = 1.0
        # keep steps inside the region where both crossings exist
        cap = 2.0
        if np.linalg.norm(dx) > cap:
            dx *= cap / np.linalg.norm(dx)
        accepted = False
        for _ in range(30):
            trial = x + lam * dx
            try:
                mt = _miss_rs(trial[0], trial[1], beta, eps, integrator_tol)
            except (NoCrossing, WrongRegime, IntegrationError):
                lam /= 2
                continue
            if np.linalg.norm(mt) < (1 - 1e-4 * lam) * np.linalg.norm(m) or lam < 1e-6:
                accepted = True
                break
            lam /= 2
        if not accepted:
            raise TPointDivergence("line search failed", history)
        x, m = trial, mt
        history.append(dict(iteration=it, rho=float(x[0]), sigma=float(x[1]),
                            miss=float(np.linalg.norm(m)), step=lam))
    raise TPointDivergence(f"no convergence after {max_iter} iterations", history)


# --- Hopf threshold ------------------------------------------------------------


def hopf_threshold(sigma: float, beta: float = BETA_CLASSICAL) -> float:
    """rho at which the complex pair of C+- crosses the imaginary axis."""
    if sigma <= beta + 1:
        raise ValueError("no Hopf threshold for sigma <= beta + 1")
    return sigma * (sigma + beta + 3) / (sigma - beta - 1)


def _max_real_part(rho, sigma, beta):
    roots = np.roots(characteristic_c(LorenzParams(sigma, rho, beta)))
    return float(np.max(roots.real))


def hopf_threshold_numeric(sigma: float, beta: float = BETA_CLASSICAL,
                           xtol: float = 1e-12) -> float:
    """Locate the sign change of the leading real part at C+- by bracketing and bisection."""
    if sigma <= beta + 1:
        raise ValueError("no Hopf threshold for sigma <= beta + 1")
    lo = 1.0 + 1e-3
    if _max_real_part(lo, sigma, beta) >= 0:
        raise LorenzError("C+- already unstable at rho = 1")
    hi = 2.0
    while _max_real_part(hi, sigma, beta) < 0:
        lo, hi = hi, hi * 2
        if hi > 1e12:
            raise LorenzError("no eigenvalue crossing found")
    return brentq(_max_real_part, lo, hi, args=(sigma, beta), xtol=xtol,
                  rtol=4 * np.finfo(float).eps, maxiter=500)


# --- trefoil -------------------------------------------------------------------


@dataclass(frozen=True)
class Polyline3:
    points: np.ndarray
    closed: bool = True

    def __post_init__(self):
        P = np.asarray(self.points, dtype=float)
        object.__setattr__(self, "points", P)
        if P.ndim != 2 or P.shape[1] != 3 or len(P) < 2:
            raise ValueError("polyline needs an (N, 3) array with N >= 2")
        if np.any(np.all(P[1:] == P[:-1], axis=1)):
            raise ValueError("consecutive duplicate points")
        if self.closed and not np.array_equal(P[0], P[-1]):
            raise ValueError("closed polyline must end at its first point")

    def __len__(self):
        return len(self.points)

    @classmethod
    def closed_from(cls, pts) -> "Polyline3":
        P = _dedupe(np.asarray(pts, dtype=float))
        if not np.array_equal(P[0], P[-1]):
            P = np.vstack([P, P[:1]])
        return cls(P, True)

    def to_csv(self, path):
        P = self.points
        s = np.concatenate([[0.0], np.cumsum(np.linalg.norm(np.diff(P, axis=0), axis=1))])
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "x", "y", "z"])
            for t, q in zip(s, P):
                w.writerow([repr(float(t))] + [repr(float(v)) for v in q])


def _dedupe(P):
    keep = np.ones(len(P), dtype=bool)
    keep[1:] = np.any(P[1:] != P[:-1], axis=1)
    return P[keep]


def _great_arc(a, b, n):
    """Points on the great-circle arc from a to b (same radius), endpoints included."""
    R = np.linalg.norm(a)
    ua, ub = a / R, b / R
    ang = math.acos(max(-1.0, min(1.0, float(ua @ ub))))
    if ang < 1e-15:
        return np.array([a, b])
    ts = np.linspace(0.0, 1.0, n)
    s = math.sin(ang)
    return np.array([R * (math.sin((1 - t) * ang) * ua + math.sin(t * ang) * ub) / s
                     for t in ts])


def _exit_point(traj: Trajectory, radius: float) -> tuple:
    """Trajectory samples up to, and the exact point of, the first exit from the ball."""
    hits = traj.crossings(lambda s: float(s @ s) - radius * radius)
    if not hits:
        raise NoCrossing(f"orbit did not reach radius {radius}")
    t_exit, y_exit = hits[0]
    forward = traj.t[-1] >= traj.t[0]
    keep = traj.t < t_exit if forward else traj.t > t_exit
    return traj, keep, y_exit


def _samples_until(traj: Trajectory, keep_mask, endpoint, per_step):
    pts = traj.sample(per_step)
    # sample() emits per_step points per step; a step is kept if its start is kept
    nstep = len(traj.dense)
    mask = np.repeat(keep_mask[:nstep], per_step)
    body = pts[:-1][mask]
    return np.vstack([body, endpoint[None, :]])


def assemble_trefoil(p: LorenzParams, radius: float = CLOSURE_RADIUS,
                     eps: float = DEFAULT_EPS, tol: float = DEFAULT_TOL,
                     near: float = TRUNCATION_RADIUS, per_step: int = 4,
                     arc_points: int = 200) -> Polyline3:
    """Closed polyline through 0, C-, infinity (realized on a sphere), C+.

    Pieces: W^u_+(0) into C-, the outer stable branch of C- out to the sphere of
    radius ``radius``, two great-circle arcs through the pole (0, 0, radius),
    the outer stable branch of C+ back in, and W^u_-(0) from C+ back to 0.
    """
    legs = {}
    for branch in (+1, -1):
        target = CONNECTION_TARGET[branch]
        C = c_point(p, target)
        wu = unstable_separatrix(p, branch, eps, 20.0, tol, stop_point=C, stop_dist=near,
                                 stop_radius=1e3)
        if wu.status != kernels._purepy.STATUS_NEAR:
            dmin = float(np.min(np.linalg.norm(wu.y - C, axis=1)))
            raise NotAtTPoint(
                f"W^u branch {branch:+d} comes no closer than {dmin:.3g} to its target")
        heteroclinic = np.vstack([np.zeros(3), wu.sample(per_step), C])
        ws = stable_separatrix(p, target, "outer", eps, 20.0, tol,
                               stop_radius=radius * 1.01)
        traj, keep, exit_pt = _exit_point(ws, radius)
        outer = np.vstack([C, _samples_until(traj, keep, exit_pt, per_step)])
        legs[branch] = (heteroclinic, outer)
    h_plus, out_minus = legs[+1]    # 0 -> C-, C- -> sphere
    h_minus, out_plus = legs[-1]    # 0 -> C+, C+ -> sphere
    pole = np.array([0.0, 0.0, radius])
    arc = np.vstack([_great_arc(out_minus[-1], pole, arc_points),
                     _great_arc(pole, out_plus[-1], arc_points)[1:]])
    pts = np.vstack([h_plus, out_minus[1:], arc[1:], out_plus[::-1][1:], h_minus[::-1][1:]])
    poly = Polyline3.closed_from(pts)
    if len(poly) < 1000:
        raise LorenzError(f"trefoil polyline too coarse ({len(poly)} vertices)")
    return poly


def certify_trefoil(p: LorenzParams, radii=(500.0, 1000.0), directions: int = 3,
                    seed: int = 0, tol: float = DEFAULT_TOL) -> dict:
    """Alexander polynomial of the assembled curve for each closure radius and
    several random projection directions."""
    from .knots.diagram import polyline_to_diagram
    from .knots.alexander import alexander_from_diagram

    rng = np.random.default_rng(seed)
    results = []
    for R in radii:
        poly = assemble_trefoil(p, radius=R, tol=tol)
        for _ in range(directions):
            d = polyline_to_diagram(poly, rng=rng)
            results.append(dict(radius=R, direction=list(map(float, d.direction)),
                                crossings=len(d.crossings), raw_crossings=d.raw_crossings,
                                alexander=list(alexander_from_diagram(d).coeffs),
                                vertices=len(poly)))
    polys = {tuple(r["alexander"]) for r in results}
    return dict(results=results, alexander=list(next(iter(polys))) if len(polys) == 1 else None,
                consistent=len(polys) == 1)
