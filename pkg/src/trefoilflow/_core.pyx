# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: DOPRI5 for the Lorenz field and 2D segment crossings.

Same signatures and return conventions as ``_purepy``.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, fabs, hypot

cnp.import_array()

cdef double A21 = 1.0 / 5
cdef double A31 = 3.0 / 40, A32 = 9.0 / 40
cdef double A41 = 44.0 / 45, A42 = -56.0 / 15, A43 = 32.0 / 9
cdef double A51 = 19372.0 / 6561, A52 = -25360.0 / 2187, A53 = 64448.0 / 6561, A54 = -212.0 / 729
cdef double A61 = 9017.0 / 3168, A62 = -355.0 / 33, A63 = 46732.0 / 5247, A64 = 49.0 / 176
cdef double A65 = -5103.0 / 18656
cdef double A71 = 35.0 / 384, A73 = 500.0 / 1113, A74 = 125.0 / 192, A75 = -2187.0 / 6784
cdef double A76 = 11.0 / 84
cdef double E1 = 71.0 / 57600, E3 = -71.0 / 16695, E4 = 71.0 / 1920, E5 = -17253.0 / 339200
cdef double E6 = 22.0 / 525, E7 = -1.0 / 40
cdef double D1 = -12715105075.0 / 11282082432, D3 = 87487479700.0 / 32700410799
cdef double D4 = -10690763975.0 / 1880347072, D5 = 701980252875.0 / 199316789632
cdef double D6 = -1453857185.0 / 822651844, D7 = 69997945.0 / 29380423


cdef inline void lorenz(double s, double r, double b, double* y, double* out) noexcept nogil:
    out[0] = s * (y[1] - y[0])
    out[1] = y[0] * (r - y[2]) - y[1]
    out[2] = y[0] * y[1] - b * y[2]


def dopri5_lorenz(y0, double sigma, double rho, double beta, double t_end, double tol,
                  double stop_radius=0.0, stop_point=None, double stop_dist=0.0,
                  double h0=0.0, long max_steps=2000000):
    cdef double y[3]
    cdef double yn[3]
    cdef double tmp[3]
    cdef double k1[3]
    cdef double k2[3]
    cdef double k3[3]
    cdef double k4[3]
    cdef double k5[3]
    cdef double k6[3]
    cdef double k7[3]
    cdef double sp[3]
    cdef int i
    cdef bint have_sp = stop_point is not None
    cdef double direction = 1.0 if t_end >= 0 else -1.0
    cdef double t = 0.0, h, err, acc, ei, sk, fac, facmax = 10.0, dd
    cdef double r2 = stop_radius * stop_radius, d2 = stop_dist * stop_dist
    cdef long nsteps = 0, nreject = 0, cap = 1024, n = 0
    cdef double maxerr = 0.0
    cdef int status = 0

    for i in range(3):
        y[i] = float(y0[i])
        if have_sp:
            sp[i] = float(stop_point[i])

    ts = np.empty(cap + 1)
    ys = np.empty((cap + 1, 3))
    dense = np.empty((cap, 5, 3))
    cdef double[::1] tv = ts
    cdef double[:, ::1] yv = ys
    cdef double[:, :, ::1] dv = dense
    tv[0] = 0.0
    for i in range(3):
        yv[0, i] = y[i]
    if t_end == 0:
        return ts[:1].copy(), ys[:1].copy(), dense[:0].copy(), 0, 0, 0.0, 0

    if h0 != 0:
        h = fabs(h0)
    else:
        h = 1e-3 if fabs(t_end) > 1e-3 else fabs(t_end)
    h *= direction
    lorenz(sigma, rho, beta, y, k1)

    while True:
        if direction * (t + h - t_end) > 0:
            h = t_end - t
        if nsteps >= max_steps:
            status = -2
            break
        for i in range(3):
            tmp[i] = y[i] + h * A21 * k1[i]
        lorenz(sigma, rho, beta, tmp, k2)
        for i in range(3):
            tmp[i] = y[i] + h * (A31 * k1[i] + A32 * k2[i])
        lorenz(sigma, rho, beta, tmp, k3)
        for i in range(3):
            tmp[i] = y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i])
        lorenz(sigma, rho, beta, tmp, k4)
        for i in range(3):
            tmp[i] = y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i])
        lorenz(sigma, rho, beta, tmp, k5)
        for i in range(3):
            tmp[i] = y[i] + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i]
                                 + A65 * k5[i])
        lorenz(sigma, rho, beta, tmp, k6)
        for i in range(3):
            yn[i] = y[i] + h * (A71 * k1[i] + A73 * k3[i] + A74 * k4[i] + A75 * k5[i]
                                + A76 * k6[i])
        lorenz(sigma, rho, beta, yn, k7)
        acc = 0.0
        for i in range(3):
            ei = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i]
                      + E7 * k7[i])
            sk = tol + tol * (fabs(y[i]) if fabs(y[i]) > fabs(yn[i]) else fabs(yn[i]))
            acc += (ei / sk) * (ei / sk)
        err = sqrt(acc / 3.0)
        nsteps += 1
        if err <= 1.0:
            if n >= cap:
                cap *= 2
                ts = np.resize(ts, cap + 1)
                ys = np.resize(ys, (cap + 1, 3))
                dense = np.resize(dense, (cap, 5, 3))
                tv = ts
                yv = ys
                dv = dense
            for i in range(3):
                dv[n, 0, i] = y[i]
                dv[n, 1, i] = yn[i] - y[i]
                dv[n, 2, i] = h * k1[i] - dv[n, 1, i]
                dv[n, 3, i] = dv[n, 1, i] - h * k7[i] - dv[n, 2, i]
                dv[n, 4, i] = h * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i]
                                   + D6 * k6[i] + D7 * k7[i])
                y[i] = yn[i]
                k1[i] = k7[i]
            n += 1
            t += h
            tv[n] = t
            for i in range(3):
                yv[n, i] = y[i]
            if err > maxerr:
                maxerr = err
            facmax = 10.0
            if r2 > 0 and y[0] * y[0] + y[1] * y[1] + y[2] * y[2] > r2:
                status = 1
                break
            if have_sp and d2 > 0:
                dd = ((y[0] - sp[0]) * (y[0] - sp[0]) + (y[1] - sp[1]) * (y[1] - sp[1])
                      + (y[2] - sp[2]) * (y[2] - sp[2]))
                if dd < d2:
                    status = 2
                    break
            if direction * (t - t_end) >= 0:
                break
            fac = 0.9 * err ** -0.2 if err > 0 else facmax
            if fac > facmax:
                fac = facmax
            if fac < 0.2:
                fac = 0.2
            h *= fac
        else:
            nreject += 1
            facmax = 1.0
            fac = 0.9 * err ** -0.2
            h *= fac if fac > 0.2 else 0.2
        if fabs(h) < 1e-14 * (fabs(t) if fabs(t) > 1.0 else 1.0):
            status = -1
            break
    return (ts[:n + 1].copy(), ys[:n + 1].copy(), dense[:n].copy(), nsteps, nreject,
            maxerr, status)


def segment_crossings(P, double eps=1e-9):
    cdef double[:, ::1] p = np.ascontiguousarray(P, dtype=float)
    cdef long m = p.shape[0] - 1
    cdef long i, j, j1
    cdef double ax, ay, dx1, dy1, bx, by, dx2, dy2, wx, wy, den, s, t, scale
    cdef double lox1, hix1, loy1, hiy1
    cdef long degenerate = 0
    out_i, out_j, out_s, out_t = [], [], [], []
    for i in range(m - 2):
        ax = p[i, 0]
        ay = p[i, 1]
        dx1 = p[i + 1, 0] - ax
        dy1 = p[i + 1, 1] - ay
        lox1 = ax if dx1 > 0 else ax + dx1
        hix1 = ax + dx1 if dx1 > 0 else ax
        loy1 = ay if dy1 > 0 else ay + dy1
        hiy1 = ay + dy1 if dy1 > 0 else ay
        j1 = m if i > 0 else m - 1
        for j in range(i + 2, j1):
            bx = p[j, 0]
            by = p[j, 1]
            dx2 = p[j + 1, 0] - bx
            dy2 = p[j + 1, 1] - by
            if (bx if dx2 > 0 else bx + dx2) > hix1 or (bx + dx2 if dx2 > 0 else bx) < lox1:
                continue
            if (by if dy2 > 0 else by + dy2) > hiy1 or (by + dy2 if dy2 > 0 else by) < loy1:
                continue
            wx = bx - ax
            wy = by - ay
            den = dx1 * dy2 - dy1 * dx2
            scale = hypot(dx1, dy1) * hypot(dx2, dy2)
            if fabs(den) <= 1e-14 * scale:
                if fabs(wx * dy1 - wy * dx1) <= eps * hypot(dx1, dy1):
                    degenerate += 1
                continue
            s = (wx * dy2 - wy * dx2) / den
            t = (wx * dy1 - wy * dx1) / den
            if s > -eps and s < 1 + eps and t > -eps and t < 1 + eps:
                if s > eps and s < 1 - eps and t > eps and t < 1 - eps:
                    out_i.append(i)
                    out_j.append(j)
                    out_s.append(s)
                    out_t.append(t)
                else:
                    degenerate += 1
    return (np.array(out_i, dtype=np.int64), np.array(out_j, dtype=np.int64),
            np.array(out_s, dtype=float), np.array(out_t, dtype=float), degenerate)
