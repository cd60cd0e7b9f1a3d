"""Catalog shape functions f(x) and their derivatives.

Every catalog potential is ``(V, S, P) = (cV, cS, cP) * f(x)`` for one of the
shapes below. The integer codes and parameter layouts are shared with the
compiled kernel, which re-implements the same formulas in C; the numpy
versions here serve the fallback kernel, grids, and tests.
"""

from __future__ import annotations

import numpy as np

from .errors import EvaluationPole

CALLBACK = 0
FREE = 1
SCARF = 2             # p = [A, B]: f = -A sech^2 x + iB sinh x / cosh^2 x
CENTRIFUGAL = 3       # p = [eps]: f = 1/(x + i eps)^2
NOGAMI_TOYAMA = 4     # p = [lam, eps]
SUPER_SCARF = 5       # p = [n, l]: f = n tanh x + i l sech x
SCALAR_ONE_BOUND = 6  # p = [kappa, E_B, m, eps]

NPARAM = 4
POLE_EPS = 1e-300

NAMES = {FREE: "free", SCARF: "scarf", CENTRIFUGAL: "centrifugal",
         NOGAMI_TOYAMA: "nogami_toyama", SUPER_SCARF: "super_scarf",
         SCALAR_ONE_BOUND: "scalar_one_bound"}


def sech(z):
    """1/cosh z for complex ``z`` without overflow at large |Re z|."""
    z = np.asarray(z, dtype=complex)
    w = np.where(z.real < 0, -z, z)
    e = np.exp(-w)
    return 2.0 * e / (1.0 + e * e)


def _den(d, what):
    if np.any(np.abs(d) < POLE_EPS):
        raise EvaluationPole(f"{what}: denominator vanishes")
    return d


def value_and_derivative(kind: int, p, x):
    """Return ``(f, f')`` at real ``x`` (scalar or array) as complex arrays."""
    x = np.asarray(x, dtype=float)
    if kind == FREE:
        z = np.zeros(x.shape, complex)
        return z, z.copy()
    if kind == SCARF:
        A, B = p[0], p[1]
        c = np.cosh(x)
        t = np.tanh(x)
        s2 = 1.0 / (c * c)
        f = -A * s2 + 1j * B * t / c
        df = 2.0 * A * s2 * t + 1j * B * (1.0 - 2.0 * t * t) / c
        return f, df
    if kind == CENTRIFUGAL:
        z = _den(x + 1j * p[0], "centrifugal")
        f = 1.0 / (z * z)
        return f, -2.0 * f / z
    if kind == NOGAMI_TOYAMA:
        # (lam^2-1)/(tanh z - lam coth(lam z)) rewritten with tanh(lam z):
        # no removable pole at z = 0 and no overflow for large |x|
        lam, eps = p[0], p[1]
        z = x + 1j * eps
        _den(np.cosh(z), "nogami_toyama tanh")
        t = np.tanh(z)
        if lam == 1.0:
            return t, 1.0 - t * t
        th = np.tanh(lam * z)
        den = _den(t * th - lam, "nogami_toyama")
        sech2 = 1.0 - t * t
        dth = lam * (1.0 - th * th)
        dden = sech2 * th + t * dth
        f = t + (lam * lam - 1.0) * th / den
        df = sech2 + (lam * lam - 1.0) * (dth * den - th * dden) / (den * den)
        return f, df
    if kind == SUPER_SCARF:
        n, l = p[0], p[1]
        t = np.tanh(x)
        sech = 1.0 / np.cosh(x)
        f = n * t + 1j * l * sech
        df = n * sech * sech - 1j * l * sech * t
        return f, df
    if kind == SCALAR_ONE_BOUND:
        kap, EB, m, eps = p[0], p[1], p[2], p[3]
        z = x + 1j * eps
        arg = 2.0 * kap * z
        den = _den(m + EB * np.cosh(arg), "scalar_one_bound")
        f = -2.0 * kap * kap / den
        df = 4.0 * kap ** 3 * EB * np.sinh(arg) / (den * den)
        return f, df
    raise ValueError(f"unknown shape code {kind}")


def limits(kind: int, p) -> tuple[complex, complex]:
    """``(f(-inf), f(+inf))``."""
    if kind == NOGAMI_TOYAMA:
        return complex(p[0]), complex(-p[0])
    if kind == SUPER_SCARF:
        return complex(-p[0]), complex(p[0])
    return 0j, 0j


def denominators(kind: int, p, x) -> list[np.ndarray]:
    """Moduli of every denominator in the shape, for pole screening."""
    x = np.asarray(x, dtype=float)
    if kind == CENTRIFUGAL:
        return [np.abs(x + 1j * p[0])]
    if kind == NOGAMI_TOYAMA:
        lam, eps = p[0], p[1]
        z = x + 1j * eps
        out = [np.abs(np.cosh(z)), np.abs(np.cosh(lam * z))]
        if lam != 1.0:
            # at lam = 1 the numerator lam^2 - 1 cancels this factor
            out.append(np.abs(np.tanh(z) * np.tanh(lam * z) - lam))
        return out
    if kind == SCALAR_ONE_BOUND:
        kap, EB, m, eps = p[0], p[1], p[2], p[3]
        return [np.abs(m + EB * np.cosh(2.0 * kap * (x + 1j * eps)))]
    return []
