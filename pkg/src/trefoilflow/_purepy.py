"""Pure-Python implementations of the hot kernels.

These mirror ``_core.pyx`` call for call; ``kernels`` picks one at import.
"""
from __future__ import annotations

import math

import numpy as np

# Dormand-Prince 5(4) tableau with Hairer's dense-output coefficients
A21 = 1 / 5
A31, A32 = 3 / 40, 9 / 40
A41, A42, A43 = 44 / 45, -56 / 15, 32 / 9
A51, A52, A53, A54 = 19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729
A61, A62, A63, A64, A65 = 9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656
A71, A73, A74, A75, A76 = 35 / 384, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84
E1, E3, E4, E5, E6, E7 = (71 / 57600, -71 / 16695, 71 / 1920, -17253 / 339200,
                          22 / 525, -1 / 40)
D1, D3, D4, D5, D6, D7 = (-12715105075 / 11282082432, 87487479700 / 32700410799,
                          -10690763975 / 1880347072, 701980252875 / 199316789632,
                          -1453857185 / 822651844, 69997945 / 29380423)

STATUS_DONE = 0
STATUS_RADIUS = 1
STATUS_NEAR = 2
STATUS_UNDERFLOW = -1
STATUS_MAXSTEPS = -2


def dopri5_lorenz(y0, sigma, rho, beta, t_end, tol, stop_radius=0.0,
                  stop_point=None, stop_dist=0.0, h0=0.0, max_steps=2_000_000):
    """Integrate the Lorenz field with adaptive DOPRI5.

    Returns ``(t, y, dense, nsteps, nreject, maxerr, status)`` where ``dense``
    holds the five continuous-extension vectors of every accepted step.
    """
    s, r, b = float(sigma), float(rho), float(beta)

    def f(x, y, z):
        return s * (y - x), x * (r - z) - y, x * y - b * z

    x0, x1, x2 = (float(v) for v in y0)
    direction = 1.0 if t_end >= 0 else -1.0
    t = 0.0
    h = abs(h0) if h0 else min(1e-3, abs(t_end)) or 1e-3
    h *= direction
    sp = None if stop_point is None else tuple(float(v) for v in stop_point)
    r2 = stop_radius * stop_radius
    d2 = stop_dist * stop_dist

    ts = [0.0]
    ys = [(x0, x1, x2)]
    dense = []
    nsteps = nreject = 0
    maxerr = 0.0
    status = STATUS_DONE
    facmax = 10.0
    k1 = f(x0, x1, x2)
    if t_end == 0:
        return _pack(ts, ys, dense, 0, 0, 0.0, STATUS_DONE)

    while True:
        if direction * (t + h - t_end) > 0:
            h = t_end - t
        if nsteps >= max_steps:
            status = STATUS_MAXSTEPS
            break
        y = (x0, x1, x2)
        k2 = f(*(y[i] + h * A21 * k1[i] for i in range(3)))
        k3 = f(*(y[i] + h * (A31 * k1[i] + A32 * k2[i]) for i in range(3)))
        k4 = f(*(y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]) for i in range(3)))
        k5 = f(*(y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i])
                 for i in range(3)))
        k6 = f(*(y[i] + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i]
                             + A65 * k5[i]) for i in range(3)))
        yn = tuple(y[i] + h * (A71 * k1[i] + A73 * k3[i] + A74 * k4[i] + A75 * k5[i]
                               + A76 * k6[i]) for i in range(3))
        k7 = f(*yn)
        acc = 0.0
        for i in range(3):
            ei = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i]
                      + E7 * k7[i])
            sk = tol + tol * max(abs(y[i]), abs(yn[i]))
            acc += (ei / sk) ** 2
        err = math.sqrt(acc / 3.0)
        nsteps += 1
        if err <= 1.0:
            rc2 = [yn[i] - y[i] for i in range(3)]
            rc3 = [h * k1[i] - rc2[i] for i in range(3)]
            rc4 = [rc2[i] - h * k7[i] - rc3[i] for i in range(3)]
            rc5 = [h * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i]
                        + D7 * k7[i]) for i in range(3)]
            dense.append((y, rc2, rc3, rc4, rc5))
            t += h
            x0, x1, x2 = yn
            k1 = k7
            ts.append(t)
            ys.append(yn)
            maxerr = max(maxerr, err)
            facmax = 10.0
            if r2 > 0 and x0 * x0 + x1 * x1 + x2 * x2 > r2:
                status = STATUS_RADIUS
                break
            if sp is not None and d2 > 0:
                dd = (x0 - sp[0]) ** 2 + (x1 - sp[1]) ** 2 + (x2 - sp[2]) ** 2
                if dd < d2:
                    status = STATUS_NEAR
                    break
            if direction * (t - t_end) >= 0:
                break
            fac = 0.9 * err ** -0.2 if err > 0 else facmax
            h *= min(facmax, max(0.2, fac))
        else:
            nreject += 1
            facmax = 1.0
            h *= max(0.2, 0.9 * err ** -0.2)
        if abs(h) < 1e-14 * max(1.0, abs(t)):
            status = STATUS_UNDERFLOW
            break
    return _pack(ts, ys, dense, nsteps, nreject, maxerr, status)


def _pack(ts, ys, dense, nsteps, nreject, maxerr, status):
    d = np.array(dense, dtype=float).reshape(len(dense), 5, 3)
    return (np.array(ts), np.array(ys, dtype=float).reshape(-1, 3), d,
            nsteps, nreject, maxerr, status)


def segment_crossings(P, eps=1e-9):
    """All proper crossings between non-adjacent segments of a closed 2D polyline.

    ``P`` is ``(N, 2)`` with ``P[-1] == P[0]``; segment ``k`` joins ``P[k]`` and
    ``P[k+1]``.  Returns ``(i, j, s, t, degenerate)`` with ``i < j`` and the
    crossing at ``P[i] + s (P[i+1]-P[i]) = P[j] + t (P[j+1]-P[j])``.
    ``degenerate`` counts near-touching pairs (crossing parameter within
    ``eps`` of an endpoint, or near-parallel overlap).
    """
    P = np.asarray(P, dtype=float)
    m = len(P) - 1
    A = P[:-1]
    D = P[1:] - P[:-1]
    lo = np.minimum(P[:-1], P[1:])
    hi = np.maximum(P[:-1], P[1:])
    out_i, out_j, out_s, out_t = [], [], [], []
    degenerate = 0
    for i in range(m - 2):
        j0 = i + 2
        j1 = m if i > 0 else m - 1
        if j0 >= j1:
            continue
        js = np.arange(j0, j1)
        box = ((lo[js, 0] <= hi[i, 0]) & (hi[js, 0] >= lo[i, 0])
               & (lo[js, 1] <= hi[i, 1]) & (hi[js, 1] >= lo[i, 1]))
        js = js[box]
        if js.size == 0:
            continue
        d1 = D[i]
        d2 = D[js]
        w = A[js] - A[i]
        den = d1[0] * d2[:, 1] - d1[1] * d2[:, 0]
        num_s = w[:, 0] * d2[:, 1] - w[:, 1] * d2[:, 0]
        num_t = w[:, 0] * d1[1] - w[:, 1] * d1[0]
        scale = np.hypot(*d1) * np.hypot(d2[:, 0], d2[:, 1])
        par = np.abs(den) <= 1e-14 * scale
        if np.any(par):
            # collinear overlap is a degeneracy; disjoint parallels are harmless
            cross_w = np.abs(w[par, 0] * d1[1] - w[par, 1] * d1[0])
            degenerate += int(np.sum(cross_w <= eps * np.hypot(*d1)))
        ok = ~par
        s = np.where(ok, num_s / np.where(ok, den, 1.0), -1.0)
        t = np.where(ok, num_t / np.where(ok, den, 1.0), -1.0)
        near = ok & (s > -eps) & (s < 1 + eps) & (t > -eps) & (t < 1 + eps)
        inside = ok & (s > eps) & (s < 1 - eps) & (t > eps) & (t < 1 - eps)
        degenerate += int(np.sum(near & ~inside))
        for j, ss, tt in zip(js[inside], s[inside], t[inside]):
            out_i.append(i)
            out_j.append(int(j))
            out_s.append(float(ss))
            out_t.append(float(tt))
    return (np.array(out_i, dtype=np.int64), np.array(out_j, dtype=np.int64),
            np.array(out_s), np.array(out_t), degenerate)
