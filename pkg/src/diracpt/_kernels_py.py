"""Pure-Python Dormand-Prince 5(4) integrator for traceless 2x2 systems.

Integrates ``Y' = [[a11, a12], [a21, -a11]] Y`` for one or two complex
columns. The compiled module ``_kernels`` implements the same algorithm; this
file is the fallback and the reference for it.

Coefficient modes (``mp`` is a complex vector):

* ``DIRAC``:  mp = [E, m, cV, cS, cP];  with (V, S, P) = (cV, cS, cP) f
  a11 = P, a12 = i(E - V + m + S), a21 = i(E - V - m - S)
* ``SCHRO``:  mp = [2m, alpha, beta, gamma, delta]
  a11 = 0, a12 = 1, a21 = 2m (alpha f + beta f^2 + gamma f' + delta)

With ``kind == CALLBACK`` the shape is replaced by ``coef_fn(xs)`` returning
the three coefficient arrays at the points ``xs``.
"""

from __future__ import annotations

import math

import numpy as np

from . import shapes
from .errors import EvaluationPole, NumericalError, StepLimitExceeded

DIRAC = 0
SCHRO = 1

# Dormand-Prince 5(4) tableau
C2, C3, C4, C5 = 1 / 5, 3 / 10, 4 / 5, 8 / 9
A21 = 1 / 5
A31, A32 = 3 / 40, 9 / 40
A41, A42, A43 = 44 / 45, -56 / 15, 32 / 9
A51, A52, A53, A54 = 19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729
A61, A62, A63, A64, A65 = 9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656
A71, A73, A74, A75, A76 = 35 / 384, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84
E1, E3, E4, E5, E6, E7 = (71 / 57600, -71 / 16695, 71 / 1920, -17253 / 339200,
                          22 / 525, -1 / 40)

# PI step control (Hairer's DOPRI5 defaults)
BETA = 0.04
EXPO1 = 0.2 - BETA * 0.75
SAFE = 0.9
FAC_MIN = 0.2
FAC_MAX = 10.0

BIG = 1e100
SMALL = 1e-100

BACKEND = "python"


def coefficients(kind, sp, mode, mp, coef_fn, xs):
    """Coefficient arrays ``(a11, a12, a21)`` at the points ``xs``."""
    xs = np.asarray(xs, dtype=float)
    if kind == shapes.CALLBACK:
        a11, a12, a21 = coef_fn(xs)
        return (np.broadcast_to(np.asarray(a11, complex), xs.shape),
                np.broadcast_to(np.asarray(a12, complex), xs.shape),
                np.broadcast_to(np.asarray(a21, complex), xs.shape))
    f, df = shapes.value_and_derivative(kind, sp, xs)
    if mode == DIRAC:
        E, m, cV, cS, cP = mp[0], mp[1], mp[2], mp[3], mp[4]
        V, S = cV * f, cS * f
        return cP * f, 1j * (E - V + m + S), 1j * (E - V - m - S)
    two_m, al, be, ga, de = mp[0], mp[1], mp[2], mp[3], mp[4]
    return (np.zeros_like(f), np.ones_like(f),
            two_m * (al * f + be * f * f + ga * df + de))


def integrate(kind, sp, mode, mp, coef_fn, x0, x1, y0, rtol, atol,
              max_steps=1_000_000, h0=0.0, stops=None):
    """Integrate from ``x0`` to ``x1``.

    Returns ``(y, logscale, nsteps, nrejected, wdrift, samples, sample_logscale)``
    where the true state is ``y[:, j] * exp(logscale[j])``. ``stops`` are
    points (ordered from x0 towards x1) where the state is recorded.
    """
    sp = [float(v) for v in np.asarray(sp, float).ravel()]
    mp = [complex(v) for v in np.asarray(mp, complex).ravel()]
    y0 = np.asarray(y0, dtype=complex)
    ncol = y0.shape[1]
    u = [complex(v) for v in y0[0]]
    v = [complex(w) for w in y0[1]]
    ls = [0.0] * ncol
    x0, x1 = float(x0), float(x1)
    sgn = 1.0 if x1 >= x0 else -1.0
    span = abs(x1 - x0)

    stops = [] if stops is None else [float(s) for s in stops]
    samples = np.zeros((len(stops), 2, ncol), complex)
    slog = np.zeros((len(stops), ncol))
    si = 0
    while si < len(stops) and stops[si] == x0:
        samples[si, 0], samples[si, 1] = u, v
        si += 1

    def coef(xs):
        a, b, c = coefficients(kind, sp, mode, mp, coef_fn, xs)
        return a.tolist(), b.tolist(), c.tolist()

    def rhs(a11, a12, a21, uu, vv):
        return ([a11 * p + a12 * q for p, q in zip(uu, vv)],
                [a21 * p - a11 * q for p, q in zip(uu, vv)])

    W0 = u[0] * v[1] - u[1] * v[0] if ncol == 2 else 0j
    drift = 0.0

    c0 = coef([x0])
    a11, a12, a21 = c0[0][0], c0[1][0], c0[2][0]
    k1u, k1v = rhs(a11, a12, a21, u, v)
    x = x0
    if h0 > 0.0:
        h = min(h0, span)
    else:
        scale = max(1.0, abs(a11), math.sqrt(abs(a12 * a21)))
        h = min(span, 0.01 / scale)
    facold = 1e-4
    last_rejected = False
    nsteps = nrej = 0
    done = span == 0.0

    while not done:
        if nsteps + nrej >= max_steps:
            raise StepLimitExceeded(f"exceeded {max_steps} steps at x={x:.6g}")
        target = x1
        if si < len(stops) and sgn * (stops[si] - x1) < 0:
            target = stops[si]
        h_free = h
        clamped = False
        if h >= abs(target - x) * (1.0 - 1e-12):
            h = abs(target - x)
            clamped = True
        hs = sgn * h

        xs = [x + C2 * hs, x + C3 * hs, x + C4 * hs, x + C5 * hs, x + hs]
        if clamped:
            xs[4] = target
        cc = coef(xs)
        uu = [p + hs * A21 * q for p, q in zip(u, k1u)]
        vv = [p + hs * A21 * q for p, q in zip(v, k1v)]
        k2u, k2v = rhs(cc[0][0], cc[1][0], cc[2][0], uu, vv)
        uu = [p + hs * (A31 * a + A32 * b) for p, a, b in zip(u, k1u, k2u)]
        vv = [p + hs * (A31 * a + A32 * b) for p, a, b in zip(v, k1v, k2v)]
        k3u, k3v = rhs(cc[0][1], cc[1][1], cc[2][1], uu, vv)
        uu = [p + hs * (A41 * a + A42 * b + A43 * c) for p, a, b, c in zip(u, k1u, k2u, k3u)]
        vv = [p + hs * (A41 * a + A42 * b + A43 * c) for p, a, b, c in zip(v, k1v, k2v, k3v)]
        k4u, k4v = rhs(cc[0][2], cc[1][2], cc[2][2], uu, vv)
        uu = [p + hs * (A51 * a + A52 * b + A53 * c + A54 * d)
              for p, a, b, c, d in zip(u, k1u, k2u, k3u, k4u)]
        vv = [p + hs * (A51 * a + A52 * b + A53 * c + A54 * d)
              for p, a, b, c, d in zip(v, k1v, k2v, k3v, k4v)]
        k5u, k5v = rhs(cc[0][3], cc[1][3], cc[2][3], uu, vv)
        uu = [p + hs * (A61 * a + A62 * b + A63 * c + A64 * d + A65 * e)
              for p, a, b, c, d, e in zip(u, k1u, k2u, k3u, k4u, k5u)]
        vv = [p + hs * (A61 * a + A62 * b + A63 * c + A64 * d + A65 * e)
              for p, a, b, c, d, e in zip(v, k1v, k2v, k3v, k4v, k5v)]
        b11, b12, b21 = cc[0][4], cc[1][4], cc[2][4]
        k6u, k6v = rhs(b11, b12, b21, uu, vv)
        un = [p + hs * (A71 * a + A73 * c + A74 * d + A75 * e + A76 * g)
              for p, a, c, d, e, g in zip(u, k1u, k3u, k4u, k5u, k6u)]
        vn = [p + hs * (A71 * a + A73 * c + A74 * d + A75 * e + A76 * g)
              for p, a, c, d, e, g in zip(v, k1v, k3v, k4v, k5v, k6v)]
        k7u, k7v = rhs(b11, b12, b21, un, vn)

        err = 0.0
        for comps in ((u, un, k1u, k3u, k4u, k5u, k6u, k7u),
                      (v, vn, k1v, k3v, k4v, k5v, k6v, k7v)):
            yo, yn, q1, q3, q4, q5, q6, q7 = comps
            for j in range(ncol):
                e = hs * (E1 * q1[j] + E3 * q3[j] + E4 * q4[j] + E5 * q5[j]
                          + E6 * q6[j] + E7 * q7[j])
                sc = atol + rtol * max(abs(yo[j]), abs(yn[j]))
                err += (abs(e) / sc) ** 2
        err = math.sqrt(err / (2 * ncol))
        if not math.isfinite(err):
            if any(not (math.isfinite(w.real) and math.isfinite(w.imag)) for w in un + vn):
                raise NumericalError(f"non-finite state near x={x:.6g}")
            err = 1e10

        fac11 = err ** EXPO1 if err > 0 else 0.0
        if err <= 1.0:
            fac = fac11 / facold ** BETA if err > 0 else 0.0
            fac = max(1.0 / FAC_MAX, min(1.0 / FAC_MIN, fac / SAFE))
            hnew = h / fac
            facold = max(err, 1e-4)
            nsteps += 1
            x = target if clamped else x + hs
            u, v = un, vn
            k1u, k1v = k7u, k7v
            a11, a12, a21 = b11, b12, b21
            for j in range(ncol):
                s = max(abs(u[j]), abs(v[j]))
                if s > BIG or (0.0 < s < SMALL):
                    u[j] /= s
                    v[j] /= s
                    k1u[j] /= s
                    k1v[j] /= s
                    ls[j] += math.log(s)
            if ncol == 2:
                W = u[0] * v[1] - u[1] * v[0]
                ref = W0 * math.exp(-(ls[0] + ls[1])) if (ls[0] + ls[1]) < 700 else 0j
                if W0 != 0 and ref != 0:
                    drift = max(drift, abs(W - ref) / abs(ref))
            if clamped and target != x1:
                samples[si, 0], samples[si, 1] = u, v
                slog[si] = ls
                si += 1
                while si < len(stops) and stops[si] == x:
                    samples[si, 0], samples[si, 1] = u, v
                    slog[si] = ls
                    si += 1
                hnew = max(hnew, h_free)
            elif clamped:
                done = True
                while si < len(stops) and stops[si] == x1:
                    samples[si, 0], samples[si, 1] = u, v
                    slog[si] = ls
                    si += 1
            if last_rejected:
                hnew = min(hnew, h)
            last_rejected = False
            h = hnew
        else:
            h = h / min(1.0 / FAC_MIN, fac11 / SAFE)
            nrej += 1
            last_rejected = True
        if h < 1e-14 * max(1.0, abs(x)):
            raise NumericalError(f"step size underflow near x={x:.6g}")

    y = np.array([u, v], dtype=complex)
    return y, np.array(ls), nsteps, nrej, drift, samples, slog
