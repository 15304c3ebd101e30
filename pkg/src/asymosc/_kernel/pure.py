"""Pure-Python kernel: coupled field evaluation and adaptive 4(5) integration.

Twin of the compiled core.  Same Dormand-Prince tableau, same PI-free step
control, same first-same-as-last reuse, so the two backends produce
matching trajectories up to floating-point noise.  Plain floats and tuples
are used throughout; this is several times faster here than numpy scalars.
"""

from __future__ import annotations

import math

import numpy as np

# Dormand-Prince 5(4) tableau.
_C2, _C3, _C4, _C5 = 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0
_A21 = 1.0 / 5.0
_A31, _A32 = 3.0 / 40.0, 9.0 / 40.0
_A41, _A42, _A43 = 44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0
_A51, _A52, _A53, _A54 = 19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0
_A61, _A62, _A63, _A64, _A65 = (
    9017.0 / 3168.0,
    -355.0 / 33.0,
    46732.0 / 5247.0,
    49.0 / 176.0,
    -5103.0 / 18656.0,
)
_B1, _B3, _B4, _B5, _B6 = 35.0 / 384.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0
# Difference between the 5th-order solution and the embedded 4th-order one.
_E1, _E3, _E4, _E5, _E6, _E7 = (
    71.0 / 57600.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
)

STATUS_OK = 0
STATUS_STEP_UNDERFLOW = 1


def _forcing_value(t, const, ks, ac, bs):
    v = const
    for j in range(len(ks)):
        kt = ks[j] * t
        v += ac[j] * math.cos(kt) + bs[j] * math.sin(kt)
    return v


def _coupling_value(x, limit, amp):
    v = limit * math.tanh(x)
    if amp != 0.0:
        v += amp * x * math.exp(-x * x)
    return v


def rhs(t, y, pars):
    """Field value at ``(t, y)`` with ``y = (x1, x2, y1, y2)``."""
    (a1, b1, a2, b2, f1, f2, c1, c2) = pars
    x1, x2, v1, v2 = y
    p1 = _forcing_value(t, *f1)
    p2 = _forcing_value(t, *f2)
    acc1 = p1 - (a1 * x1 if x1 > 0.0 else b1 * x1) - _coupling_value(x2, *c1)
    acc2 = p2 - (a2 * x2 if x2 > 0.0 else b2 * x2) - _coupling_value(x1, *c2)
    return (v1, v2, acc1, acc2)


def pack_params(a1, b1, a2, b2, f1c, f1k, f1a, f1b, f2c, f2k, f2a, f2b, c1l, c1p, c2l, c2p):
    """Normalize raw system data into the tuple layout ``rhs`` expects."""
    return (
        float(a1),
        float(b1),
        float(a2),
        float(b2),
        (float(f1c), tuple(map(float, f1k)), tuple(map(float, f1a)), tuple(map(float, f1b))),
        (float(f2c), tuple(map(float, f2k)), tuple(map(float, f2a)), tuple(map(float, f2b))),
        (float(c1l), float(c1p)),
        (float(c2l), float(c2p)),
    )


def integrate_system(pars, y0, t0, t1, rtol, atol, max_step, record):
    """Integrate the coupled field from ``t0`` to ``t1`` (either direction).

    Returns ``(y_end, ts, ys, status)``; ``ts``/``ys`` hold every accepted
    step (including both endpoints) when ``record`` is true, else ``None``.
    """
    t = float(t0)
    t1 = float(t1)
    y = tuple(float(v) for v in y0)
    direction = 1.0 if t1 >= t else -1.0
    span = abs(t1 - t)
    if span == 0.0:
        ts = np.array([t]) if record else None
        ys = np.array([y]) if record else None
        return np.array(y), ts, ys, STATUS_OK

    ts_list = [t] if record else None
    ys_list = [y] if record else None

    h = direction * min(max_step, span / 100.0)
    k1 = rhs(t, y, pars)
    min_h = 1e-14 * max(abs(t), abs(t1), 1.0)

    while (t1 - t) * direction > 0.0:
        if abs(h) > max_step:
            h = direction * max_step
        if (t + h - t1) * direction > 0.0:
            h = t1 - t
        if abs(h) < min_h:
            ts = np.array(ts_list) if record else None
            ys = np.array(ys_list) if record else None
            return np.array(y), ts, ys, STATUS_STEP_UNDERFLOW

        k2 = rhs(t + _C2 * h, _axpy(y, h, [(k1, _A21)]), pars)
        k3 = rhs(t + _C3 * h, _axpy(y, h, [(k1, _A31), (k2, _A32)]), pars)
        k4 = rhs(t + _C4 * h, _axpy(y, h, [(k1, _A41), (k2, _A42), (k3, _A43)]), pars)
        k5 = rhs(
            t + _C5 * h,
            _axpy(y, h, [(k1, _A51), (k2, _A52), (k3, _A53), (k4, _A54)]),
            pars,
        )
        k6 = rhs(
            t + h,
            _axpy(y, h, [(k1, _A61), (k2, _A62), (k3, _A63), (k4, _A64), (k5, _A65)]),
            pars,
        )
        y_new = _axpy(y, h, [(k1, _B1), (k3, _B3), (k4, _B4), (k5, _B5), (k6, _B6)])
        k7 = rhs(t + h, y_new, pars)

        err = 0.0
        for i in range(4):
            e = h * (
                _E1 * k1[i] + _E3 * k3[i] + _E4 * k4[i] + _E5 * k5[i] + _E6 * k6[i] + _E7 * k7[i]
            )
            sc = atol + rtol * max(abs(y[i]), abs(y_new[i]))
            r = e / sc
            err += r * r
        err = math.sqrt(err / 4.0)

        if err <= 1.0:
            t = t + h
            y = y_new
            k1 = k7
            if record:
                ts_list.append(t)
                ys_list.append(y)
            factor = 5.0 if err == 0.0 else min(5.0, max(0.2, 0.9 * err**-0.2))
        else:
            factor = max(0.1, 0.9 * err**-0.2)
        h *= factor

    ts = np.array(ts_list) if record else None
    ys = np.array(ys_list) if record else None
    return np.array(y), ts, ys, STATUS_OK


def _axpy(y, h, terms):
    out = []
    for i in range(4):
        s = 0.0
        for k, a in terms:
            s += a * k[i]
        out.append(y[i] + h * s)
    return tuple(out)
