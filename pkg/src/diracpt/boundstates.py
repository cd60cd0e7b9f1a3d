"""Discrete spectra: shooting, transmission poles and threshold states.

Both searches use the same matching determinant: the solution decaying at
-inf and the one decaying at +inf are carried to x = 0 and their Wronskian
is taken. For shooting the parameter is the effective energy of a reduced
Schroedinger-like equation; for transmission poles it is the decay momentum
kappa of the Dirac spinor (k = i kappa), where a zero of the Wronskian is a
pole of T. Real-axis sign changes of the (normalized) determinant's real and
imaginary parts give brackets; each is polished by a complex secant step and
kept only if the converged root is real to within ``imag_tol``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np
from scipy import integrate, optimize

from . import shapes
from .core import BoundStateRecord, principal_sqrt
from .errors import NoBracket, NonConvergence, NormalizationFailure, UnsupportedModel
from .integrator import (IntegratorConfig, LinearSystem, ReducedEquation, SCHRO, dirac_system)
from .potentials import PotentialModel

__all__ = ["BoundStateRecord", "shoot", "transmission_poles", "zero_energy_classify",
           "ZeroEnergyReport", "schrodinger_system"]

GRID_POINTS = 4001
IMAG_TOL = 1e-6
SCAN_POINTS = 241


# ---------------------------------------------------------------- matching engine

def _eigvec(a11, a12, a21, lam):
    """Eigenvector of [[a11, a12], [a21, -a11]] for eigenvalue ``lam``.

    The form (a12, lam - a11) is analytic in the energy; switching forms
    during a scan would flip signs of the determinant, so the alternative
    is used only when a12 vanishes.
    """
    if abs(a12) > 1e-12 * max(1.0, abs(a11), abs(a21)):
        return np.array([a12, lam - a11], complex)
    return np.array([lam + a11, a21], complex)


def _decaying(system: LinearSystem, side: str):
    a11, a12, a21 = system.asymptotic(side)
    lam = principal_sqrt(a11 * a11 + a12 * a21)
    return lam, _eigvec(a11, a12, a21, lam if side == "-" else -lam)


@dataclass
class _Match:
    D: complex          # Wronskian of the scaled states at x = 0
    logscale: float     # true Wronskian = D * exp(logscale)
    norm: float         # |yL(0)| |yR(0)| of the scaled states
    left: tuple = ()
    right: tuple = ()


def _match(system: LinearSystem, L: float, cfg: IntegratorConfig, stops_left=None,
           stops_right=None) -> _Match:
    _, vl = _decaying(system, "-")
    _, vr = _decaying(system, "+")
    yl, lsl, *_, sl, sll = system.propagate(-L, 0.0, vl.reshape(2, 1), cfg, stops_left)
    yr, lsr, *_, sr, slr = system.propagate(L, 0.0, vr.reshape(2, 1), cfg, stops_right)
    a, b = yl[:, 0], yr[:, 0]
    D = a[0] * b[1] - a[1] * b[0]
    return _Match(complex(D), float(lsl[0] + lsr[0]), float(np.linalg.norm(a) * np.linalg.norm(b)),
                  (a, lsl[0], sl, sll), (b, lsr[0], sr, slr))


def _find_roots(system_at: Callable, lo: float, hi: float, L: float, cfg: IntegratorConfig,
                n_scan: int, imag_tol: float, max_iter: int = 60):
    ts = np.linspace(lo, hi, n_scan)
    vals = np.array([_normalized(system_at(t), L, cfg) for t in ts])
    brackets = []
    for part in (np.real, np.imag):
        v = part(vals)
        for i in np.nonzero(np.sign(v[:-1]) * np.sign(v[1:]) < 0)[0]:
            brackets.append((ts[i], ts[i + 1], part))
    roots = []
    for a, b, part in sorted(brackets, key=lambda t: t[0]):
        g = lambda t: part(_normalized(system_at(t), L, cfg))
        try:
            t0 = optimize.brentq(g, a, b, xtol=1e-14, rtol=1e-15, maxiter=200)
        except ValueError:
            continue
        t = _secant(system_at, t0, L, cfg, max_iter)
        if t is None or abs(t.imag) > imag_tol or not (lo - 1e-9 <= t.real <= hi + 1e-9):
            continue
        # a genuine level does not move when the box grows; roots produced
        # by truncating a slowly decaying (e.g. power-law) state do
        t2 = _secant(system_at, t.real, 1.5 * L, cfg, max_iter)
        if t2 is None or abs(t2 - t) > 1e-6 * max(1.0, abs(t)):
            continue
        if all(abs(t - r) > 1e-7 * max(1.0, abs(t)) for r in roots):
            roots.append(t)
    return sorted(roots, key=lambda t: t.real)


def _normalized(system: LinearSystem, L: float, cfg: IntegratorConfig) -> complex:
    m = _match(system, L, cfg)
    return m.D / m.norm if m.norm > 0 else 0j


def _secant(system_at: Callable, t0: float, L: float, cfg: IntegratorConfig, max_iter: int):
    """Complex secant on the (analytic) true Wronskian, scaled by a fixed reference."""
    m0 = _match(system_at(t0), L, cfg)
    ref = m0.logscale
    F = lambda t: (lambda mm: mm.D * math.exp(mm.logscale - ref))(_match(system_at(t), L, cfg))
    h = 1e-7 * max(1.0, abs(t0))
    x0, x1 = complex(t0), complex(t0 + h)
    f0, f1 = m0.D, F(x1)
    for _ in range(max_iter):
        if f1 == f0:
            return x1
        x2 = x1 - f1 * (x1 - x0) / (f1 - f0)
        if abs(x2 - x1) <= 1e-14 * max(1.0, abs(x2)):
            return x2
        x0, f0 = x1, f1
        x1, f1 = x2, F(x2)
        if not np.isfinite(f1):
            return None
    raise NonConvergence(f"secant did not converge near {t0:.10g}")


def _samples(system: LinearSystem, L: float, cfg: IntegratorConfig, grid: np.ndarray):
    """Eigen-solution on ``grid`` (which must contain 0), joined at x = 0."""
    left = grid[grid <= 0.0]
    right = grid[grid >= 0.0][::-1]
    m = _match(system, L, cfg, left, right)
    _, _, sl, sll = m.left
    _, _, sr, slr = m.right
    yl = sl[:, :, 0] * np.exp(sll[:, 0] - sll[-1, 0])[:, None]
    yr = sr[:, :, 0] * np.exp(slr[:, 0] - slr[-1, 0])[:, None]
    a0, b0 = yl[-1], yr[-1]
    s = np.vdot(b0, a0) / np.vdot(b0, b0)
    y = np.concatenate([yl[:-1], (s * yr)[::-1]], axis=0) if grid[grid == 0.0].size else \
        np.concatenate([yl, (s * yr)[::-1]], axis=0)
    return y.T      # (2, n)


def _normalize(x: np.ndarray, psi: np.ndarray) -> tuple[np.ndarray, float]:
    dens = np.sum(np.abs(psi) ** 2, axis=0)
    nrm = float(integrate.simpson(dens, x=x))
    if not (nrm > 0 and math.isfinite(nrm)):
        raise NormalizationFailure("state has zero or non-finite norm")
    psi = psi / math.sqrt(nrm)
    i = int(np.argmax(np.abs(psi[0]) + np.abs(psi[1])))
    comp = psi[0, i] if abs(psi[0, i]) >= abs(psi[1, i]) else psi[1, i]
    psi = psi * (abs(comp) / comp)
    return psi, float(integrate.simpson(np.sum(np.abs(psi) ** 2, axis=0), x=x))


def _node_info(psi: np.ndarray) -> str:
    a = np.abs(psi[0]) + np.abs(psi[1])
    inner = a[len(a) // 8: -len(a) // 8] if len(a) > 16 else a
    return f"min/max |psi| on the real axis = {inner.min() / inner.max():.2e} (nodes are off axis)"


def _grid(L: float, grid) -> np.ndarray:
    if grid is None:
        return np.linspace(-L, L, GRID_POINTS)
    g = np.asarray(grid, float)
    if g[0] != -g[-1] or not np.any(g == 0.0):
        raise ValueError("grid must be symmetric and contain x = 0")
    return g


# ---------------------------------------------------------------- shooting

def schrodinger_system(U: Callable, U_limits: tuple[complex, complex], m: float, eps: complex) -> LinearSystem:
    """phi'' = 2m (U - eps) phi for a plain callable U."""
    two_m = 2.0 * m
    um, up = U_limits

    def coef_fn(xs):
        u = np.asarray(U(xs), complex)
        return np.zeros_like(u), np.ones_like(u), two_m * (u - eps)

    def limits_fn(side):
        return 0j, 1.0 + 0j, two_m * ((um if side == "-" else up) - eps)

    return LinearSystem(shapes.CALLBACK, np.zeros(shapes.NPARAM), SCHRO, np.zeros(5, complex),
                        coef_fn, limits_fn)


def _reconstruct(red: ReducedEquation, E: complex, x, phi, dphi):
    """Full Dirac spinor (upper, lower) from a reduced-equation solution."""
    m = red.m
    model = red.model
    zero = np.zeros_like(phi)
    if red.which == "pseudoscalar1":
        P = model.eval(x)[2]
        return phi, -1j * (dphi - P * phi) / (m + E)
    if red.which == "pseudoscalar2":
        if abs(m - E) < 1e-9 * m:
            return zero, phi
        P = model.eval(x)[2]
        return 1j * (dphi + P * phi) / (m - E), phi
    if red.which in ("scalar1", "scalar2"):
        W = m + model.eval(x)[1]
        if abs(E) < 1e-12:
            p1, p2 = (phi, zero) if red.which == "scalar1" else (zero, phi)
        elif red.which == "scalar1":
            p1, p2 = phi, (dphi + W * phi) / E
        else:
            p1, p2 = (-dphi + W * phi) / E, phi
        r = math.sqrt(0.5)
        return r * (p1 + p2), 1j * r * (p1 - p2)
    if red.which == "spin":
        return phi, -1j * dphi / (E + m)
    return 1j * dphi / (m - E), phi


def shoot(U_eff, m: float | None = None, eps_bracket: tuple[float, float] | None = None, grid=None,
          *, U_limits: tuple[complex, complex] | None = None, L: float | None = None,
          cfg: IntegratorConfig | None = None, n_scan: int = SCAN_POINTS,
          imag_tol: float = IMAG_TOL, energy_sign: float = 1.0) -> list[BoundStateRecord]:
    """Bound states of -phi'' + 2m U phi = 2m eps phi below the continuum.

    ``U_eff`` is a :class:`ReducedEquation` (its ``eps`` is scanned; spinors
    are rebuilt from the reduction) or a callable U(x) with ``U_limits``.
    Returned records carry the positive-energy branch E = sqrt(m^2 + 2m eps)
    unless ``energy_sign`` is negative; a zero mode of the lower-component
    equation is reported at E = -m, the only energy where it solves the
    Dirac system.
    """
    cfg = cfg or IntegratorConfig()
    if isinstance(U_eff, ReducedEquation):
        red = U_eff
        if red.which in ("spin", "pseudospin"):
            raise UnsupportedModel("energy-dependent reductions: use transmission_poles")
        m = red.m
        system_at = lambda e: replace(red, eps=e).system()
        Ulim = red.U_limits()
        Ufun = red.U
        L = L or red.model.tail.default_L()
    else:
        if U_limits is None or m is None:
            raise ValueError("a callable U needs U_limits and m")
        red = None
        Ulim = U_limits
        Ufun = U_eff
        system_at = lambda e: schrodinger_system(U_eff, U_limits, m, e)
        L = L or 20.0
    thr = min(complex(u).real for u in Ulim)
    if eps_bracket is None:
        xs = np.linspace(-L, L, 2001)
        umin = float(np.min(np.real(Ufun(xs))))
        if not umin < thr:
            return []
        span = thr - umin
        eps_bracket = (umin - 0.05 * span - 1e-3, thr - 1e-6 * max(1.0, span))
    lo, hi = eps_bracket
    if not lo < hi:
        raise NoBracket(f"empty bracket [{lo:g}, {hi:g}]")
    if hi >= thr:
        raise NoBracket("bracket must lie below the continuum threshold")
    roots = _find_roots(system_at, lo, hi, L, cfg, n_scan, imag_tol)
    x = _grid(L, grid)
    out = []
    for eps in roots:
        y = _samples(system_at(eps), L, cfg, x)
        E = energy_sign * principal_sqrt(m * m + 2 * m * eps)
        if red is not None and red.which == "pseudoscalar2" and abs(eps) <= 1e-9 * m:
            # a lower-component zero mode solves the Dirac equation only at E = -m
            E = -m + 0j
        if red is not None:
            psi = np.array(_reconstruct(red, E, x, y[0], y[1]))
        else:
            psi = np.array([y[0], np.zeros_like(y[0])])
        psi, nrm = _normalize(x, psi)
        kap = principal_sqrt(2 * m * (thr - eps))
        out.append(BoundStateRecord(E, kap, eps, "Bound", "shoot", nrm, _node_info(psi), x, psi,
                                    abs(eps.imag), red.which if red is not None else ""))
    return out


# ---------------------------------------------------------------- transmission poles

def _energy(model: PotentialModel, m: float, kappa: complex, branch: float) -> complex:
    V, S, P = model.limits.side("+")
    return V + branch * np.sqrt((m + S) ** 2 + P * P - kappa * kappa + 0j)


def transmission_poles(model: PotentialModel, kappa_bracket: tuple[float, float] | None = None,
                       m: float | None = None, *, branch: float = 1.0,
                       cfg: IntegratorConfig | None = None, L: float | None = None, grid=None,
                       n_scan: int = SCAN_POINTS, imag_tol: float = IMAG_TOL) -> list[BoundStateRecord]:
    """Poles of T_LR on k = i kappa, found on the full Dirac system.

    The energy follows from kappa on the chosen branch:
    E = V + branch sqrt((m + S)^2 + P^2 - kappa^2) (limits at +inf).
    """
    cfg = cfg or IntegratorConfig()
    m = model.params.get("m", 1.0) if m is None else m
    V, S, P = model.limits.side("+")
    kmax = abs(principal_sqrt((m + S) ** 2 + P * P))
    if kappa_bracket is None:
        kappa_bracket = (1e-2, kmax * (1 - 1e-9))
    lo, hi = kappa_bracket
    if not 0 < lo < hi:
        raise NoBracket(f"bad kappa bracket [{lo:g}, {hi:g}]")
    if L is None:
        # decaying solutions are resolved long before an algebraic tail is
        # negligible, and the long box only slows the scan
        L = model.tail.default_L() if model.tail.kind != "algebraic" else 40.0
    system_at = lambda kap: dirac_system(model, _energy(model, m, kap, branch), m)
    roots = _find_roots(system_at, lo, hi, L, cfg, n_scan, imag_tol)
    x = _grid(L, grid)
    out = []
    for kap in roots:
        E = _energy(model, m, kap, branch)
        psi, nrm = _normalize(x, _samples(system_at(kap), L, cfg, x))
        out.append(BoundStateRecord(E, kap, (E * E - m * m) / (2 * m), "Bound", "transmission_pole",
                                    nrm, _node_info(psi), x, psi, abs(kap.imag)))
    return out


# ---------------------------------------------------------------- k = 0

@dataclass(frozen=True)
class ZeroEnergyReport:
    kind: str | None          # "ZeroMode", "HalfBound" or None
    E: float | None
    normalizable: bool
    detail: str = ""
    zero_mode: object = None


def _is_zero(model: PotentialModel) -> bool:
    if model.couplings is not None:
        return model.shape == shapes.FREE or all(c == 0 for c in model.couplings)
    return not any(model.components_present())


def zero_energy_classify(model: PotentialModel, m: float | None = None,
                         cfg: IntegratorConfig | None = None) -> ZeroEnergyReport:
    """Classify threshold (k = 0) states.

    Centrifugal models use the closed-form zero-mode analysis (E = m for
    V = S, the mirror at E = -m for V = -S). Models with constant asymptotics
    are integrated at each threshold energy: the solution bounded at -inf is
    carried to +inf and reported half-bound when it stays bounded there.
    Solutions at k = 0 are then constant or linear, so never normalizable.
    """
    from . import analytic
    m = model.params.get("m", 1.0) if m is None else m
    if _is_zero(model):
        return ZeroEnergyReport(None, None, False, "zero potential")
    if model.kind == "centrifugal":
        mode = model.params.get("mode", "spin")
        rep = analytic.centrifugal_zero_mode(model.params["c_prime"], m, model.eps, mode)
        if rep.bound_exists:
            return ZeroEnergyReport("ZeroMode", rep.E, rep.normalizable, rep.note, rep)
        return ZeroEnergyReport(None, None, False, rep.note or "coupling of the wrong sign", rep)
    if model.tail.kind == "algebraic":
        raise UnsupportedModel("k = 0 analysis for general algebraic tails is not implemented")
    cfg = cfg or IntegratorConfig()
    V, S, P = model.limits.side("+")
    found = []
    for branch in (1.0, -1.0):
        E = V + branch * principal_sqrt((m + S) ** 2 + P * P)
        sysm = dirac_system(model, E, m)
        L = model.tail.default_L()
        A0 = np.array([[sysm.asymptotic("-")[0], sysm.asymptotic("-")[1]],
                       [sysm.asymptotic("-")[2], -sysm.asymptotic("-")[0]]])
        A1 = np.array([[sysm.asymptotic("+")[0], sysm.asymptotic("+")[1]],
                       [sysm.asymptotic("+")[2], -sysm.asymptotic("+")[0]]])
        v0 = _eigvec(A0[0, 0], A0[0, 1], A0[1, 0], 0j)
        xs = np.linspace(-L, L, 201)
        y, ls, *_, samp, slog = sysm.propagate(-L, L, v0.reshape(2, 1), cfg, xs)
        path = samp[:, :, 0] * np.exp(slog)
        if np.max(np.abs(path - v0)) <= 1e-8 * np.linalg.norm(v0):
            # the potential does not act on this solution (free motion, or
            # V = S at E = -m): not a state of the potential
            continue
        v1 = _eigvec(A1[0, 0], A1[0, 1], A1[1, 0], 0j)
        w1 = np.linalg.lstsq(A1, v1, rcond=None)[0]
        c = np.linalg.solve(np.column_stack([v1, w1 + L * v1]), y[:, 0])
        if abs(c[1]) * L <= 1e-6 * abs(c[0]):
            found.append(float(np.real(E)))
    if found:
        return ZeroEnergyReport("HalfBound", found[0], False,
                                f"bounded threshold solution at E = {', '.join(f'{e:g}' for e in found)}")
    return ZeroEnergyReport(None, None, False, "no bounded threshold solution")
