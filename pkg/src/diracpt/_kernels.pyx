# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled Dormand-Prince 5(4) integrator for traceless 2x2 systems.

Same algorithm, tableau, step control and return layout as ``_kernels_py``.
Catalog shapes are evaluated in C with the GIL released; callback systems
re-acquire it once per step attempt.
"""

import numpy as np
cimport numpy as cnp

from libc.math cimport sqrt, fabs, log, exp, pow, isfinite

from .errors import EvaluationPole, NumericalError, StepLimitExceeded

cnp.import_array()

cdef extern from "complex.h" nogil:
    double complex ctanh(double complex)
    double complex ccosh(double complex)
    double complex csinh(double complex)
    double cabs(double complex)

BACKEND = "compiled"

# shape codes and modes, kept in sync with shapes.py / _kernels_py.py
cdef enum:
    CALLBACK = 0
    FREE = 1
    SCARF = 2
    CENTRIFUGAL = 3
    NOGAMI_TOYAMA = 4
    SUPER_SCARF = 5
    SCALAR_ONE_BOUND = 6

cdef enum:
    DIRAC = 0

cdef double POLE_EPS = 1e-300
cdef double BIG = 1e100
cdef double SMALL = 1e-100

cdef double C2 = 1.0 / 5, C3 = 3.0 / 10, C4 = 4.0 / 5, C5 = 8.0 / 9
cdef double A21 = 1.0 / 5
cdef double A31 = 3.0 / 40, A32 = 9.0 / 40
cdef double A41 = 44.0 / 45, A42 = -56.0 / 15, A43 = 32.0 / 9
cdef double A51 = 19372.0 / 6561, A52 = -25360.0 / 2187, A53 = 64448.0 / 6561, A54 = -212.0 / 729
cdef double A61 = 9017.0 / 3168, A62 = -355.0 / 33, A63 = 46732.0 / 5247, A64 = 49.0 / 176, A65 = -5103.0 / 18656
cdef double A71 = 35.0 / 384, A73 = 500.0 / 1113, A74 = 125.0 / 192, A75 = -2187.0 / 6784, A76 = 11.0 / 84
cdef double E1 = 71.0 / 57600, E3 = -71.0 / 16695, E4 = 71.0 / 1920, E5 = -17253.0 / 339200
cdef double E6 = 22.0 / 525, E7 = -1.0 / 40

cdef double BETA = 0.04
cdef double EXPO1 = 0.2 - 0.04 * 0.75
cdef double SAFE = 0.9
cdef double FAC_MIN = 0.2
cdef double FAC_MAX = 10.0


cdef struct System:
    int kind
    int mode
    double sp[4]
    double complex mp[5]


cdef inline int shape_eval(System* s, double x, double complex* f, double complex* df) noexcept nogil:
    """f and f' for a catalog shape; returns 1 on a vanishing denominator."""
    cdef double complex z, t, th, den, sech2, dth, dden, arg, c, zz
    cdef double A, B, lam, kap, EB, m
    cdef double complex I = 1j
    if s.kind == FREE:
        f[0] = 0
        df[0] = 0
        return 0
    if s.kind == SCARF:
        A = s.sp[0]
        B = s.sp[1]
        c = ccosh(x + 0j)
        t = ctanh(x + 0j)
        f[0] = -A / (c * c) + I * B * t / c
        df[0] = 2.0 * A * t / (c * c) + I * B * (1.0 - 2.0 * t * t) / c
        return 0
    if s.kind == CENTRIFUGAL:
        z = x + I * s.sp[0]
        if cabs(z) < POLE_EPS:
            return 1
        zz = 1.0 / (z * z)
        f[0] = zz
        df[0] = -2.0 * zz / z
        return 0
    if s.kind == NOGAMI_TOYAMA:
        lam = s.sp[0]
        z = x + I * s.sp[1]
        if cabs(ccosh(z)) < POLE_EPS:
            return 1
        t = ctanh(z)
        if lam == 1.0:
            f[0] = t
            df[0] = 1.0 - t * t
            return 0
        th = ctanh(lam * z)
        den = t * th - lam
        if cabs(den) < POLE_EPS:
            return 1
        sech2 = 1.0 - t * t
        dth = lam * (1.0 - th * th)
        dden = sech2 * th + t * dth
        f[0] = t + (lam * lam - 1.0) * th / den
        df[0] = sech2 + (lam * lam - 1.0) * (dth * den - th * dden) / (den * den)
        return 0
    if s.kind == SUPER_SCARF:
        t = ctanh(x + 0j)
        c = 1.0 / ccosh(x + 0j)
        f[0] = s.sp[0] * t + I * s.sp[1] * c
        df[0] = s.sp[0] * c * c - I * s.sp[1] * c * t
        return 0
    if s.kind == SCALAR_ONE_BOUND:
        kap = s.sp[0]
        EB = s.sp[1]
        m = s.sp[2]
        arg = 2.0 * kap * (x + I * s.sp[3])
        den = m + EB * ccosh(arg)
        if cabs(den) < POLE_EPS:
            return 1
        f[0] = -2.0 * kap * kap / den
        df[0] = 4.0 * kap * kap * kap * EB * csinh(arg) / (den * den)
        return 0
    return 2


cdef inline int coef_eval(System* s, double x, double complex* a11, double complex* a12,
                          double complex* a21) noexcept nogil:
    cdef double complex f, df, V, S
    cdef int rc = shape_eval(s, x, &f, &df)
    if rc:
        return rc
    if s.mode == DIRAC:
        V = s.mp[2] * f
        S = s.mp[3] * f
        a11[0] = s.mp[4] * f
        a12[0] = 1j * (s.mp[0] - V + s.mp[1] + S)
        a21[0] = 1j * (s.mp[0] - V - s.mp[1] - S)
    else:
        a11[0] = 0
        a12[0] = 1
        a21[0] = s.mp[0] * (s.mp[1] * f + s.mp[2] * f * f + s.mp[3] * df + s.mp[4])
    return 0


cdef int callback_eval(object coef_fn, double* xs, int n, double complex* a11,
                       double complex* a12, double complex* a21) except -1:
    cdef int i
    arr = np.empty(n, dtype=float)
    for i in range(n):
        arr[i] = xs[i]
    r11, r12, r21 = coef_fn(arr)
    b11 = np.broadcast_to(np.asarray(r11, dtype=complex), (n,))
    b12 = np.broadcast_to(np.asarray(r12, dtype=complex), (n,))
    b21 = np.broadcast_to(np.asarray(r21, dtype=complex), (n,))
    for i in range(n):
        a11[i] = b11[i]
        a12[i] = b12[i]
        a21[i] = b21[i]
    return 0


cdef inline void rhs(double complex a11, double complex a12, double complex a21,
                     double complex* u, double complex* v, double complex* ku,
                     double complex* kv, int ncol) noexcept nogil:
    cdef int j
    for j in range(ncol):
        ku[j] = a11 * u[j] + a12 * v[j]
        kv[j] = a21 * u[j] - a11 * v[j]


def coefficients(int kind, sp, int mode, mp, coef_fn, xs):
    """Coefficient arrays ``(a11, a12, a21)`` at the points ``xs`` (for tests)."""
    cdef System s
    cdef int i, n, rc
    cdef double complex c11, c12, c21
    xs = np.ascontiguousarray(xs, dtype=float).ravel()
    n = xs.shape[0]
    if kind == CALLBACK:
        from ._kernels_py import coefficients as pyc
        return pyc(kind, sp, mode, mp, coef_fn, xs)
    _fill(&s, kind, mode, sp, mp)
    o11 = np.empty(n, complex)
    o12 = np.empty(n, complex)
    o21 = np.empty(n, complex)
    for i in range(n):
        rc = coef_eval(&s, xs[i], &c11, &c12, &c21)
        if rc == 1:
            raise EvaluationPole(f"vanishing denominator at x={xs[i]!r}")
        if rc:
            raise ValueError(f"unknown shape code {kind}")
        o11[i] = c11
        o12[i] = c12
        o21[i] = c21
    return o11, o12, o21


cdef void _fill(System* s, int kind, int mode, sp, mp):
    cdef int i
    s.kind = kind
    s.mode = mode
    spa = np.zeros(4)
    spv = np.asarray(sp, float).ravel()
    spa[:min(4, spv.shape[0])] = spv[:4]
    mpa = np.zeros(5, complex)
    mpv = np.asarray(mp, complex).ravel()
    mpa[:min(5, mpv.shape[0])] = mpv[:5]
    for i in range(4):
        s.sp[i] = spa[i]
    for i in range(5):
        s.mp[i] = mpa[i]


def integrate(int kind, sp, int mode, mp, coef_fn, double x0, double x1, y0,
              double rtol, double atol, long max_steps=1000000, double h0=0.0, stops=None):
    """Integrate from ``x0`` to ``x1``; see ``_kernels_py.integrate``."""
    cdef System s
    cdef int ncol, j, i, si, nstops, rc = 0, status = 0
    cdef double complex u[2], v[2], un[2], vn[2], uu[2], vv[2]
    cdef double complex k1u[2], k1v[2], k2u[2], k2v[2], k3u[2], k3v[2], k4u[2], k4v[2]
    cdef double complex k5u[2], k5v[2], k6u[2], k6v[2], k7u[2], k7v[2]
    cdef double complex c11[5], c12[5], c21[5], a11, a12, a21, W0, W, ref, e
    cdef double ls[2], xs[5]
    cdef double x, sgn, span, h, h_free, hs, hnew, target, err, sc, fac, fac11, facold, drift, sv, lsum
    cdef long nsteps = 0, nrej = 0
    cdef bint clamped, last_rejected = False, done, use_cb = kind == CALLBACK
    cdef double[::1] stv
    cdef double complex[:, :, ::1] smv
    cdef double[:, ::1] slv

    _fill(&s, kind, mode, sp, mp)
    y0a = np.asarray(y0, dtype=complex)
    ncol = y0a.shape[1]
    if ncol < 1 or ncol > 2:
        raise ValueError("y0 must have one or two columns")
    for j in range(ncol):
        u[j] = y0a[0, j]
        v[j] = y0a[1, j]
        ls[j] = 0.0
    sgn = 1.0 if x1 >= x0 else -1.0
    span = fabs(x1 - x0)

    st = np.ascontiguousarray([] if stops is None else stops, dtype=float).ravel()
    nstops = st.shape[0]
    samples = np.zeros((nstops, 2, ncol), complex)
    slog = np.zeros((nstops, ncol))
    stv = st
    smv = samples
    slv = slog
    si = 0
    while si < nstops and stv[si] == x0:
        for j in range(ncol):
            smv[si, 0, j] = u[j]
            smv[si, 1, j] = v[j]
        si += 1

    W0 = u[0] * v[1] - u[1] * v[0] if ncol == 2 else 0
    drift = 0.0

    xs[0] = x0
    if use_cb:
        callback_eval(coef_fn, xs, 1, c11, c12, c21)
    else:
        rc = coef_eval(&s, x0, &c11[0], &c12[0], &c21[0])
        if rc:
            raise EvaluationPole(f"vanishing denominator at x={x0!r}")
    a11 = c11[0]
    a12 = c12[0]
    a21 = c21[0]
    rhs(a11, a12, a21, u, v, k1u, k1v, ncol)
    x = x0
    if h0 > 0.0:
        h = min(h0, span)
    else:
        sv = max(1.0, max(cabs(a11), sqrt(cabs(a12 * a21))))
        h = min(span, 0.01 / sv)
    facold = 1e-4
    done = span == 0.0

    while not done:
        if nsteps + nrej >= max_steps:
            status = 3
            break
        target = x1
        if si < nstops and sgn * (stv[si] - x1) < 0:
            target = stv[si]
        h_free = h
        clamped = False
        if h >= fabs(target - x) * (1.0 - 1e-12):
            h = fabs(target - x)
            clamped = True
        hs = sgn * h
        xs[0] = x + C2 * hs
        xs[1] = x + C3 * hs
        xs[2] = x + C4 * hs
        xs[3] = x + C5 * hs
        xs[4] = target if clamped else x + hs
        if use_cb:
            callback_eval(coef_fn, xs, 5, c11, c12, c21)
        else:
            with nogil:
                for i in range(5):
                    rc = coef_eval(&s, xs[i], &c11[i], &c12[i], &c21[i])
                    if rc:
                        break
            if rc:
                status = 1
                break
        with nogil:
            for j in range(ncol):
                uu[j] = u[j] + hs * A21 * k1u[j]
                vv[j] = v[j] + hs * A21 * k1v[j]
            rhs(c11[0], c12[0], c21[0], uu, vv, k2u, k2v, ncol)
            for j in range(ncol):
                uu[j] = u[j] + hs * (A31 * k1u[j] + A32 * k2u[j])
                vv[j] = v[j] + hs * (A31 * k1v[j] + A32 * k2v[j])
            rhs(c11[1], c12[1], c21[1], uu, vv, k3u, k3v, ncol)
            for j in range(ncol):
                uu[j] = u[j] + hs * (A41 * k1u[j] + A42 * k2u[j] + A43 * k3u[j])
                vv[j] = v[j] + hs * (A41 * k1v[j] + A42 * k2v[j] + A43 * k3v[j])
            rhs(c11[2], c12[2], c21[2], uu, vv, k4u, k4v, ncol)
            for j in range(ncol):
                uu[j] = u[j] + hs * (A51 * k1u[j] + A52 * k2u[j] + A53 * k3u[j] + A54 * k4u[j])
                vv[j] = v[j] + hs * (A51 * k1v[j] + A52 * k2v[j] + A53 * k3v[j] + A54 * k4v[j])
            rhs(c11[3], c12[3], c21[3], uu, vv, k5u, k5v, ncol)
            for j in range(ncol):
                uu[j] = u[j] + hs * (A61 * k1u[j] + A62 * k2u[j] + A63 * k3u[j] + A64 * k4u[j]
                                     + A65 * k5u[j])
                vv[j] = v[j] + hs * (A61 * k1v[j] + A62 * k2v[j] + A63 * k3v[j] + A64 * k4v[j]
                                     + A65 * k5v[j])
            rhs(c11[4], c12[4], c21[4], uu, vv, k6u, k6v, ncol)
            for j in range(ncol):
                un[j] = u[j] + hs * (A71 * k1u[j] + A73 * k3u[j] + A74 * k4u[j] + A75 * k5u[j]
                                     + A76 * k6u[j])
                vn[j] = v[j] + hs * (A71 * k1v[j] + A73 * k3v[j] + A74 * k4v[j] + A75 * k5v[j]
                                     + A76 * k6v[j])
            rhs(c11[4], c12[4], c21[4], un, vn, k7u, k7v, ncol)

            err = 0.0
            for j in range(ncol):
                e = hs * (E1 * k1u[j] + E3 * k3u[j] + E4 * k4u[j] + E5 * k5u[j]
                          + E6 * k6u[j] + E7 * k7u[j])
                sc = atol + rtol * max(cabs(u[j]), cabs(un[j]))
                err += (cabs(e) / sc) ** 2
            for j in range(ncol):
                e = hs * (E1 * k1v[j] + E3 * k3v[j] + E4 * k4v[j] + E5 * k5v[j]
                          + E6 * k6v[j] + E7 * k7v[j])
                sc = atol + rtol * max(cabs(v[j]), cabs(vn[j]))
                err += (cabs(e) / sc) ** 2
            err = sqrt(err / (2 * ncol))
        if not isfinite(err):
            for j in range(ncol):
                if not (isfinite(un[j].real) and isfinite(un[j].imag)
                        and isfinite(vn[j].real) and isfinite(vn[j].imag)):
                    status = 2
            if status:
                break
            err = 1e10

        fac11 = pow(err, EXPO1) if err > 0 else 0.0
        if err <= 1.0:
            if err > 0:
                fac = fac11 / pow(facold, BETA)
            else:
                fac = 0.0
            fac = max(1.0 / FAC_MAX, min(1.0 / FAC_MIN, fac / SAFE))
            hnew = h / fac
            facold = max(err, 1e-4)
            nsteps += 1
            x = target if clamped else x + hs
            for j in range(ncol):
                u[j] = un[j]
                v[j] = vn[j]
                k1u[j] = k7u[j]
                k1v[j] = k7v[j]
            a11 = c11[4]
            a12 = c12[4]
            a21 = c21[4]
            for j in range(ncol):
                sv = max(cabs(u[j]), cabs(v[j]))
                if sv > BIG or (0.0 < sv < SMALL):
                    u[j] = u[j] / sv
                    v[j] = v[j] / sv
                    k1u[j] = k1u[j] / sv
                    k1v[j] = k1v[j] / sv
                    ls[j] += log(sv)
            if ncol == 2:
                W = u[0] * v[1] - u[1] * v[0]
                lsum = ls[0] + ls[1]
                if lsum < 700:
                    ref = W0 * exp(-lsum)
                    if cabs(W0) != 0 and cabs(ref) != 0:
                        drift = max(drift, cabs(W - ref) / cabs(ref))
            if clamped and target != x1:
                while si < nstops and stv[si] == x:
                    for j in range(ncol):
                        smv[si, 0, j] = u[j]
                        smv[si, 1, j] = v[j]
                        slv[si, j] = ls[j]
                    si += 1
                hnew = max(hnew, h_free)
            elif clamped:
                done = True
                while si < nstops and stv[si] == x1:
                    for j in range(ncol):
                        smv[si, 0, j] = u[j]
                        smv[si, 1, j] = v[j]
                        slv[si, j] = ls[j]
                    si += 1
            if last_rejected:
                hnew = min(hnew, h)
            last_rejected = False
            h = hnew
        else:
            h = h / min(1.0 / FAC_MIN, fac11 / SAFE)
            nrej += 1
            last_rejected = True
        if h < 1e-14 * max(1.0, fabs(x)):
            status = 4
            break

    if status == 1:
        raise EvaluationPole(f"vanishing denominator near x={x!r}")
    if status == 2:
        raise NumericalError(f"non-finite state near x={x:.6g}")
    if status == 3:
        raise StepLimitExceeded(f"exceeded {max_steps} steps at x={x:.6g}")
    if status == 4:
        raise NumericalError(f"step size underflow near x={x:.6g}")
    y = np.empty((2, ncol), complex)
    for j in range(ncol):
        y[0, j] = u[j]
        y[1, j] = v[j]
    return y, np.array([ls[j] for j in range(ncol)]), nsteps, nrej, drift, samples, slog
