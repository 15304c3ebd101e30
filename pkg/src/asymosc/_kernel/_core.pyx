# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernel: coupled field evaluation and adaptive 4(5) integration.

Twin of ``pure.py`` with identical tableau and step control; see that module
for the algorithm description.
"""

import numpy as np

from libc.math cimport cos, sin, tanh, exp, sqrt, fabs, fmax



cdef double C2 = 1.0 / 5.0
cdef double C3 = 3.0 / 10.0
cdef double C4 = 4.0 / 5.0
cdef double C5 = 8.0 / 9.0
cdef double A21 = 1.0 / 5.0
cdef double A31 = 3.0 / 40.0, A32 = 9.0 / 40.0
cdef double A41 = 44.0 / 45.0, A42 = -56.0 / 15.0, A43 = 32.0 / 9.0
cdef double A51 = 19372.0 / 6561.0, A52 = -25360.0 / 2187.0
cdef double A53 = 64448.0 / 6561.0, A54 = -212.0 / 729.0
cdef double A61 = 9017.0 / 3168.0, A62 = -355.0 / 33.0, A63 = 46732.0 / 5247.0
cdef double A64 = 49.0 / 176.0, A65 = -5103.0 / 18656.0
cdef double B1 = 35.0 / 384.0, B3 = 500.0 / 1113.0, B4 = 125.0 / 192.0
cdef double B5 = -2187.0 / 6784.0, B6 = 11.0 / 84.0
cdef double E1 = 71.0 / 57600.0, E3 = -71.0 / 16695.0, E4 = 71.0 / 1920.0
cdef double E5 = -17253.0 / 339200.0, E6 = 22.0 / 525.0, E7 = -1.0 / 40.0

STATUS_OK = 0
STATUS_STEP_UNDERFLOW = 1


cdef struct Forcing:
    double const
    int nterms
    double * ks
    double * ac
    double * bs


cdef inline double forcing_value(double t, Forcing * f) nogil:
    cdef double v = f.const
    cdef double kt
    cdef int j
    for j in range(f.nterms):
        kt = f.ks[j] * t
        v += f.ac[j] * cos(kt) + f.bs[j] * sin(kt)
    return v


cdef inline double coupling_value(double x, double limit, double amp) nogil:
    cdef double v = limit * tanh(x)
    if amp != 0.0:
        v += amp * x * exp(-x * x)
    return v


cdef inline void field(double t, double * y, double * out,
                       double a1, double b1, double a2, double b2,
                       Forcing * f1, Forcing * f2,
                       double c1l, double c1p, double c2l, double c2p) nogil:
    cdef double x1 = y[0]
    cdef double x2 = y[1]
    out[0] = y[2]
    out[1] = y[3]
    out[2] = forcing_value(t, f1) - (a1 * x1 if x1 > 0.0 else b1 * x1) \
        - coupling_value(x2, c1l, c1p)
    out[3] = forcing_value(t, f2) - (a2 * x2 if x2 > 0.0 else b2 * x2) \
        - coupling_value(x1, c2l, c2p)


def rhs(double t, y, pars):
    """Field value at ``(t, y)``; mirrors the pure backend for testing."""
    cdef double yv[4]
    cdef double out[4]
    a1, b1, a2, b2, f1, f2, c1, c2 = pars
    cdef double[::1] f1k = np.ascontiguousarray(f1[1], dtype=np.float64)
    cdef double[::1] f1a = np.ascontiguousarray(f1[2], dtype=np.float64)
    cdef double[::1] f1b = np.ascontiguousarray(f1[3], dtype=np.float64)
    cdef double[::1] f2k = np.ascontiguousarray(f2[1], dtype=np.float64)
    cdef double[::1] f2a = np.ascontiguousarray(f2[2], dtype=np.float64)
    cdef double[::1] f2b = np.ascontiguousarray(f2[3], dtype=np.float64)
    cdef Forcing fs1, fs2
    fs1.const = f1[0]; fs1.nterms = f1k.shape[0]
    fs2.const = f2[0]; fs2.nterms = f2k.shape[0]
    if fs1.nterms: fs1.ks = &f1k[0]; fs1.ac = &f1a[0]; fs1.bs = &f1b[0]
    if fs2.nterms: fs2.ks = &f2k[0]; fs2.ac = &f2a[0]; fs2.bs = &f2b[0]
    cdef int i
    for i in range(4):
        yv[i] = y[i]
    field(t, yv, out, a1, b1, a2, b2, &fs1, &fs2, c1[0], c1[1], c2[0], c2[1])
    return (out[0], out[1], out[2], out[3])


def integrate_system(pars, y0, double t0, double t1, double rtol, double atol,
                     double max_step, bint record):
    """Integrate the coupled field from ``t0`` to ``t1`` (either direction).

    Same contract as the pure backend: returns ``(y_end, ts, ys, status)``.
    """
    a1_, b1_, a2_, b2_, f1, f2, c1, c2 = pars
    cdef double a1 = a1_, b1 = b1_, a2 = a2_, b2 = b2_
    cdef double c1l = c1[0], c1p = c1[1], c2l = c2[0], c2p = c2[1]
    cdef double[::1] f1k = np.ascontiguousarray(f1[1], dtype=np.float64)
    cdef double[::1] f1a = np.ascontiguousarray(f1[2], dtype=np.float64)
    cdef double[::1] f1b = np.ascontiguousarray(f1[3], dtype=np.float64)
    cdef double[::1] f2k = np.ascontiguousarray(f2[1], dtype=np.float64)
    cdef double[::1] f2a = np.ascontiguousarray(f2[2], dtype=np.float64)
    cdef double[::1] f2b = np.ascontiguousarray(f2[3], dtype=np.float64)
    cdef Forcing fs1, fs2
    fs1.const = f1[0]; fs1.nterms = f1k.shape[0]
    fs2.const = f2[0]; fs2.nterms = f2k.shape[0]
    if fs1.nterms: fs1.ks = &f1k[0]; fs1.ac = &f1a[0]; fs1.bs = &f1b[0]
    if fs2.nterms: fs2.ks = &f2k[0]; fs2.ac = &f2a[0]; fs2.bs = &f2b[0]

    cdef double t = t0
    cdef double y[4]
    cdef double ytmp[4]
    cdef double ynew[4]
    cdef double k1[4]
    cdef double k2[4]
    cdef double k3[4]
    cdef double k4[4]
    cdef double k5[4]
    cdef double k6[4]
    cdef double k7[4]
    cdef int i
    for i in range(4):
        y[i] = y0[i]

    cdef double direction = 1.0 if t1 >= t0 else -1.0
    cdef double span = fabs(t1 - t0)

    ts_list = [t0] if record else None
    ys_list = [(y[0], y[1], y[2], y[3])] if record else None

    if span == 0.0:
        out0 = np.array([y[0], y[1], y[2], y[3]])
        return out0, (np.array(ts_list) if record else None), \
            (np.array(ys_list) if record else None), STATUS_OK

    cdef double h = direction * (max_step if max_step < span / 100.0 else span / 100.0)
    cdef double min_h = 1e-14 * fmax(fmax(fabs(t0), fabs(t1)), 1.0)
    cdef double err, e, sc, r, factor
    cdef int status = STATUS_OK

    field(t, y, k1, a1, b1, a2, b2, &fs1, &fs2, c1l, c1p, c2l, c2p)

    while (t1 - t) * direction > 0.0:
        if fabs(h) > max_step:
            h = direction * max_step
        if (t + h - t1) * direction > 0.0:
            h = t1 - t
        if fabs(h) < min_h:
            status = STATUS_STEP_UNDERFLOW
            break

        for i in range(4):
            ytmp[i] = y[i] + h * A21 * k1[i]
        field(t + C2 * h, ytmp, k2, a1, b1, a2, b2, &fs1, &fs2, c1l, c1p, c2l, c2p)
        for i in range(4):
            ytmp[i] = y[i] + h * (A31 * k1[i] + A32 * k2[i])
        field(t + C3 * h, ytmp, k3, a1, b1, a2, b2, &fs1, &fs2, c1l, c1p, c2l, c2p)
        for i in range(4):
            ytmp[i] = y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i])
        field(t + C4 * h, ytmp, k4, a1, b1, a2, b2, &fs1, &fs2, c1l, c1p, c2l, c2p)
        for i in range(4):
            ytmp[i] = y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i])
        field(t + C5 * h, ytmp, k5, a1, b1, a2, b2, &fs1, &fs2, c1l, c1p, c2l, c2p)
        for i in range(4):
            ytmp[i] = y[i] + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i]
                                  + A64 * k4[i] + A65 * k5[i])
        field(t + h, ytmp, k6, a1, b1, a2, b2, &fs1, &fs2, c1l, c1p, c2l, c2p)
        for i in range(4):
            ynew[i] = y[i] + h * (B1 * k1[i] + B3 * k3[i] + B4 * k4[i]
                                  + B5 * k5[i] + B6 * k6[i])
        field(t + h, ynew, k7, a1, b1, a2, b2, &fs1, &fs2, c1l, c1p, c2l, c2p)

        err = 0.0
        for i in range(4):
            e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i]
                     + E5 * k5[i] + E6 * k6[i] + E7 * k7[i])
            sc = atol + rtol * fmax(fabs(y[i]), fabs(ynew[i]))
            r = e / sc
            err += r * r
        err = sqrt(err / 4.0)

        if err <= 1.0:
            t = t + h
            for i in range(4):
                y[i] = ynew[i]
                k1[i] = k7[i]
            if record:
                ts_list.append(t)
                ys_list.append((y[0], y[1], y[2], y[3]))
            if err == 0.0:
                factor = 5.0
            else:
                factor = 0.9 * err ** -0.2
                if factor > 5.0:
                    factor = 5.0
                elif factor < 0.2:
                    factor = 0.2
        else:
            factor = 0.9 * err ** -0.2
            if factor < 0.1:
                factor = 0.1
        h *= factor

    y_end = np.array([y[0], y[1], y[2], y[3]])
    ts = np.array(ts_list) if record else None
    ys = np.array(ys_list) if record else None
    return y_end, ts, ys, status
