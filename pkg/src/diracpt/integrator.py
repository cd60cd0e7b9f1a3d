"""Numerical scattering for the 1D Dirac equation and its reduced forms.

Two independent solutions are launched at ``x = -L`` as pure progressive and
pure regressive waves, carried to ``x = +L`` with the adaptive 5(4) stepper in
:mod:`diracpt.kernels`, and decomposed there in the asymptotic basis. For
potentials with algebraic tails the basis is the first-order adiabatic one
(local momentum, local channel ratios and the matching amplitude factor),
which removes the slow 1/L truncation error, and results at L and 2L are
Richardson-extrapolated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from . import kernels, shapes
from .core import (PT_TOL, AsymptoticChannel, PhysicalParams, ScatteringResult,
                   SolutionCoefficients, SpinorState, channel_ratios, coefficients_to_scattering,
                   principal_sqrt)
from .errors import (ConfigError, NotScattering, SingularBasis, WrongPotentialClass)
from .potentials import PotentialModel, Tail

DIRAC = kernels.DIRAC
SCHRO = kernels.SCHRO

_GL_T, _GL_W = np.polynomial.legendre.leggauss(96)
_GL_T = 0.5 * (_GL_T + 1.0)
_GL_W = 0.5 * _GL_W


@dataclass(frozen=True)
class IntegratorConfig:
    """Integration box and tolerances.

    ``L=None`` picks the box from the model's tail class. ``richardson=None``
    enables extrapolation for algebraic tails only. ``richardson_order`` is the
    power p of the leading 1/L^p error that the extrapolation removes: 3 with
    the adiabatic basis, 1 with bare plane waves.
    """

    L: float | None = None
    rtol: float = 1e-11
    atol: float = 1e-13
    max_steps: int = 2_000_000
    richardson: bool | None = None
    richardson_order: int | None = None
    adiabatic: bool = True
    pt_tol: float = PT_TOL

    def __post_init__(self):
        if self.L is not None and not self.L > 0:
            raise ConfigError("box half-width L must be positive")
        if not (self.rtol > 0 and self.atol > 0):
            raise ConfigError("tolerances must be positive")
        if self.max_steps < 1:
            raise ConfigError("max_steps must be positive")

    def box(self, tail: Tail) -> float:
        return float(self.L) if self.L is not None else tail.default_L()

    def use_richardson(self, tail: Tail) -> bool:
        return (tail.kind == "algebraic") if self.richardson is None else bool(self.richardson)

    def use_adiabatic(self, tail: Tail) -> bool:
        # exponential tails are negligible at the default box; plane waves suffice
        return self.adiabatic and tail.kind == "algebraic"

    def order(self, tail: Tail) -> int:
        if self.richardson_order is not None:
            return int(self.richardson_order)
        return 3 if self.use_adiabatic(tail) else 1


def default_box(tail: Tail) -> float:
    return tail.default_L()


@dataclass(frozen=True)
class LinearSystem:
    """Traceless first-order system ``Y' = [[a11, a12], [a21, -a11]] Y``.

    ``f_limits`` are the shape values at -inf and +inf, used to derive the
    asymptotic coefficients.
    """

    kind: int
    sp: np.ndarray
    mode: int
    mp: np.ndarray
    coef_fn: Callable | None = None
    limits_fn: Callable | None = None

    def coef(self, xs):
        xs = np.atleast_1d(np.asarray(xs, float))
        a11, a12, a21 = kernels.coefficients(self.kind, self.sp, self.mode, self.mp, self.coef_fn, xs)
        return (np.asarray(a11, complex).reshape(xs.shape), np.asarray(a12, complex).reshape(xs.shape),
                np.asarray(a21, complex).reshape(xs.shape))

    def asymptotic(self, side: str) -> tuple[complex, complex, complex]:
        return self.limits_fn(side)

    def propagate(self, x0, x1, y0, cfg: IntegratorConfig, stops=None):
        return kernels.integrate(self.kind, self.sp, self.mode, self.mp, self.coef_fn,
                                 float(x0), float(x1), np.asarray(y0, complex), cfg.rtol, cfg.atol,
                                 cfg.max_steps, 0.0, stops)


def dirac_system(model: PotentialModel, E: complex, m: float) -> LinearSystem:
    """Dirac system at (possibly complex) energy ``E``."""
    E = complex(E)
    lim = model.limits

    def limits_fn(side):
        V, S, P = lim.side(side)
        return P, 1j * (E - V + m + S), 1j * (E - V - m - S)

    ks = model.kernel_shape()
    if ks is not None:
        code, sp, (cV, cS, cP) = ks
        mp = np.array([E, m, cV, cS, cP], complex)
        return LinearSystem(code, sp, DIRAC, mp, None, limits_fn)

    def coef_fn(xs):
        V, S, P = model.eval(xs)
        return P, 1j * (E - V + m + S), 1j * (E - V - m - S)

    return LinearSystem(shapes.CALLBACK, np.zeros(shapes.NPARAM), DIRAC, np.zeros(5, complex),
                        coef_fn, limits_fn)


def rhs(model: PotentialModel, params: PhysicalParams, state: SpinorState) -> tuple[complex, complex]:
    """``(psi1', psi2')`` of the Dirac system at ``state.x``."""
    V, S, P = (complex(np.asarray(c).ravel()[0]) for c in model.eval(np.array([state.x])))
    E, m = params.E, params.m
    d1 = P * state.psi1 + 1j * (E - V + m + S) * state.psi2
    d2 = -P * state.psi2 + 1j * (E - V - m - S) * state.psi1
    return d1, d2


# ---------------------------------------------------------------- asymptotic basis

def _local(system: LinearSystem, xs, k_ref: complex):
    """Local momentum (branch continuous with ``k_ref``) and channel ratios."""
    a11, a12, a21 = system.coef(xs)
    k = np.sqrt(-(a11 * a11 + a12 * a21) + 0j)
    flip = (k * np.conj(k_ref)).real < 0
    k = np.where(flip, -k, k)
    rp = (1j * k - a11) / a12
    rm = (-1j * k - a11) / a12
    return k, rp, rm, a12


def _tail_integrals(system: LinearSystem, x: float, k_inf: complex):
    """Integrals over the outer tail beyond ``x``: (int (k - k_inf), int g+, int g-).

    The tail is [x, inf) for x > 0 and (-inf, x] for x < 0; the substitution
    y = x / t maps it to t in (0, 1].
    """
    X = abs(x)
    sgn = 1.0 if x > 0 else -1.0
    t = _GL_T
    ys = sgn * X / t
    jac = X / (t * t) * _GL_W
    k, rp, rm, a12 = _local(system, ys, k_inf)
    h = 1e-3 * ys
    drp = np.zeros_like(rp)
    drm = np.zeros_like(rm)
    for c, s in ((8.0, 1.0), (-8.0, -1.0), (-1.0, 2.0), (1.0, -2.0)):
        _, p, q, _ = _local(system, ys + s * h, k_inf)
        drp += c * p
        drm += c * q
    drp /= 12.0 * h
    drm /= 12.0 * h
    lam = 1j * k
    gp = a12 * drp / (2.0 * lam)
    gm = -a12 * drm / (2.0 * lam)
    return (np.sum((k - k_inf) * jac), np.sum(gp * jac), np.sum(gm * jac))


def basis_matrix(system: LinearSystem, x: float, k_inf: complex, C: complex, D: complex,
                 adiabatic: bool = False) -> np.ndarray:
    """Columns: progressive and regressive asymptotic solutions at ``x``."""
    if not adiabatic:
        e = np.exp(1j * k_inf * x)
        return np.array([[e, 1.0 / e], [C * e, D / e]], complex)
    k, rp, rm, _ = _local(system, np.array([x]), k_inf)
    Ik, Ip, Im = _tail_integrals(system, x, k_inf)
    if x > 0:
        phase = k_inf * x - Ik
        cp, cm = np.exp(Ip), np.exp(Im)
    else:
        phase = k_inf * x + Ik
        cp, cm = np.exp(-Ip), np.exp(-Im)
    e = np.exp(1j * phase)
    return np.array([[cp * e, cm / e], [cp * rp[0] * e, cm * rm[0] / e]], complex)


# ---------------------------------------------------------------- matching

@dataclass
class TwoSolutionRun:
    coefficients: SolutionCoefficients
    drift: float
    steps: int
    rejected: int
    L: float


def _match(system: LinearSystem, channel: AsymptoticChannel, L: float, cfg: IntegratorConfig,
           adiabatic: bool) -> TwoSolutionRun:
    ch = channel
    if abs(ch.C_plus - ch.D_plus) <= 1e-14 * max(1.0, abs(ch.C_plus)):
        raise SingularBasis("progressive and regressive channels coincide at +inf (k+ = 0)")
    if abs(ch.C_minus - ch.D_minus) <= 1e-14 * max(1.0, abs(ch.C_minus)):
        raise SingularBasis("progressive and regressive channels coincide at -inf (k- = 0)")
    B0 = basis_matrix(system, -L, ch.k_minus, ch.C_minus, ch.D_minus, adiabatic)
    y, ls, nst, nrej, drift, _, _ = system.propagate(-L, L, B0, cfg)
    B1 = basis_matrix(system, L, ch.k_plus, ch.C_plus, ch.D_plus, adiabatic)
    if abs(np.linalg.det(B1)) <= 1e-14 * np.max(np.abs(B1)) ** 2:
        raise SingularBasis("asymptotic basis is singular at +L")
    ab = np.linalg.solve(B1, y) * np.exp(ls)[None, :]
    c = SolutionCoefficients(a1_minus=1.0 + 0j, a1_plus=complex(ab[0, 0]),
                             b1_minus=0j, b1_plus=complex(ab[1, 0]),
                             a2_minus=0j, a2_plus=complex(ab[0, 1]),
                             b2_minus=1.0 + 0j, b2_plus=complex(ab[1, 1]))
    return TwoSolutionRun(c, float(drift), int(nst), int(nrej), L)


def _extrapolate(c1: SolutionCoefficients, c2: SolutionCoefficients, p: int) -> SolutionCoefficients:
    w = 2.0 ** p
    t = tuple((w * b - a) / (w - 1.0) for a, b in zip(c1.as_tuple(), c2.as_tuple()))
    return SolutionCoefficients.from_tuple(t)


def _scattering_channel(params: PhysicalParams, model: PotentialModel) -> AsymptoticChannel:
    ch = channel_ratios(params, model.limits)
    for k in (ch.k_minus, ch.k_plus):
        if abs(k.imag) > 1e-12 * max(1.0, abs(k)) or k.real <= 0.0:
            raise NotScattering(f"E={params.E:g} is not in the scattering regime (k={k:.6g})")
    return ch


def _solve(system, channel, tail, cfg):
    L = cfg.box(tail)
    adiabatic = cfg.use_adiabatic(tail)
    run = _match(system, channel, L, cfg, adiabatic)
    info = {"L": L, "steps": run.steps, "rejected": run.rejected, "adiabatic": adiabatic,
            "richardson": False, "backend": kernels.BACKEND}
    coeffs, drift = run.coefficients, run.drift
    if cfg.use_richardson(tail):
        run2 = _match(system, channel, 2.0 * L, cfg, adiabatic)
        p = cfg.order(tail)
        coeffs = _extrapolate(run.coefficients, run2.coefficients, p)
        drift = max(drift, run2.drift)
        diff = max(abs(a - b) for a, b in zip(run.coefficients.as_tuple(), run2.coefficients.as_tuple()))
        info.update(richardson=True, order=p, L2=2.0 * L, steps=run.steps + run2.steps,
                    rejected=run.rejected + run2.rejected,
                    truncation_estimate=diff / (2.0 ** p - 1.0))
    return coeffs, drift, info


def integrate_two_solutions(model: PotentialModel, params: PhysicalParams,
                            cfg: IntegratorConfig | None = None) -> tuple[SolutionCoefficients, float]:
    """Coefficients of the two launched solutions at a single box size, and the Wronskian drift."""
    cfg = cfg or IntegratorConfig()
    ch = _scattering_channel(params, model)
    system = dirac_system(model, params.E, params.m)
    run = _match(system, ch, cfg.box(model.tail), cfg, cfg.use_adiabatic(model.tail))
    return run.coefficients, run.drift


def scatter(model: PotentialModel, params: PhysicalParams,
            cfg: IntegratorConfig | None = None) -> ScatteringResult:
    """T and R in both directions, with Wronskian and truncation diagnostics."""
    cfg = cfg or IntegratorConfig()
    ch = _scattering_channel(params, model)
    system = dirac_system(model, params.E, params.m)
    coeffs, drift, info = _solve(system, ch, model.tail, cfg)
    res = coefficients_to_scattering(coeffs, ch, cfg.pt_tol, drift)
    res.info.update(info)
    res.info["coefficients"] = coeffs
    return res


# ---------------------------------------------------------------- Schroedinger reductions

REDUCTIONS = ("spin", "pseudospin", "pseudoscalar1", "pseudoscalar2", "scalar1", "scalar2")


@dataclass(frozen=True)
class ReducedEquation:
    """``-phi'' + 2m U(x) phi = 2m eps phi`` with U = alpha f + beta f^2 + gamma f' + u0.

    ``U`` is evaluated from the catalog shape of ``model`` (or from its
    expressions), and ``eps`` is the effective energy.
    """

    model: PotentialModel
    which: str
    m: float
    E: complex
    eps: complex
    alpha: complex
    beta: complex
    gamma: complex
    u0: complex = 0j
    U_callback: Callable | None = field(default=None, repr=False)

    def U(self, x):
        if self.U_callback is not None:
            return self.U_callback(np.asarray(x, float))
        f, df = self.model.f(x)
        return self.alpha * f + self.beta * f * f + self.gamma * df + self.u0

    def U_limits(self) -> tuple[complex, complex]:
        if self.U_callback is not None:
            L = 1e6
            return complex(self.U_callback(np.array([-L]))[0]), complex(self.U_callback(np.array([L]))[0])
        fm, fp = shapes.limits(self.model.shape, self.model.shape_params)
        return tuple(self.alpha * f + self.beta * f * f + self.u0 for f in (fm, fp))

    def momenta(self) -> tuple[complex, complex]:
        return tuple(principal_sqrt(2.0 * self.m * (self.eps - u)) for u in self.U_limits())

    def system(self) -> LinearSystem:
        two_m = 2.0 * self.m
        um, up = self.U_limits()

        def limits_fn(side):
            u = um if side == "-" else up
            return 0j, 1.0 + 0j, two_m * (u - self.eps)

        if self.U_callback is None and self.model.is_catalog:
            sp = np.zeros(shapes.NPARAM)
            sp[:len(self.model.shape_params)] = self.model.shape_params
            mp = np.array([two_m, self.alpha, self.beta, self.gamma, self.u0 - self.eps], complex)
            return LinearSystem(self.model.shape, sp, SCHRO, mp, None, limits_fn)

        def coef_fn(xs):
            u = self.U(xs)
            return np.zeros_like(u), np.ones_like(u), two_m * (u - self.eps)

        return LinearSystem(shapes.CALLBACK, np.zeros(shapes.NPARAM), SCHRO, np.zeros(5, complex),
                            coef_fn, limits_fn)


def _require(cond: bool, msg: str):
    if not cond:
        raise WrongPotentialClass(msg)


def reduce_schrodinger(model: PotentialModel, params: PhysicalParams, which: str) -> ReducedEquation:
    """Second-order equation obeyed by one spinor component.

    ``which``: ``spin`` (V = S, upper component), ``pseudospin`` (V = -S, lower
    component), ``pseudoscalar1``/``pseudoscalar2`` (pure P, U = (P^2 +- P')/2m),
    ``scalar1``/``scalar2`` (pure S in the representation where the scalar
    partners decouple, U = ((m+S)^2 - m^2 -+ S')/2m).
    """
    if which not in REDUCTIONS:
        raise ConfigError(f"unknown reduction {which!r}; choose from {', '.join(REDUCTIONS)}")
    m, E = params.m, params.E
    eps = (E * E - m * m) / (2.0 * m)
    V, S, P = model.components_present()
    if model.couplings is not None:
        cV, cS, cP = model.couplings
        if which == "spin":
            _require(not P and cV == cS, "spin reduction needs V = S and P = 0")
            return ReducedEquation(model, which, m, E, eps, cV * (E + m) / m, 0j, 0j)
        if which == "pseudospin":
            _require(not P and cV == -cS, "pseudo-spin reduction needs V = -S and P = 0")
            return ReducedEquation(model, which, m, E, eps, cV * (E - m) / m, 0j, 0j)
        if which.startswith("pseudoscalar"):
            _require(not V and not S and P, "pseudoscalar reduction needs pure P")
            sgn = 1.0 if which.endswith("1") else -1.0
            return ReducedEquation(model, which, m, E, eps, 0j, cP * cP / (2 * m), sgn * cP / (2 * m))
        _require(not V and not P and S, "scalar reduction needs pure S")
        sgn = 1.0 if which.endswith("1") else -1.0
        return ReducedEquation(model, which, m, E, eps, cS, cS * cS / (2 * m), -sgn * cS / (2 * m))

    # expression models: U built from sampled V, S, P and their derivatives
    grid = np.linspace(-10, 10, 101)
    Vg, Sg, Pg = model.eval(grid)
    close = lambda a, b: bool(np.max(np.abs(a - b)) <= 1e-12 * max(1.0, float(np.max(np.abs(a)))))
    if which == "spin":
        _require(not P and close(Vg, Sg), "spin reduction needs V = S and P = 0")
        U = lambda x: model.eval(x)[0] * (E + m) / m
    elif which == "pseudospin":
        _require(not P and close(Vg, -Sg), "pseudo-spin reduction needs V = -S and P = 0")
        U = lambda x: model.eval(x)[0] * (E - m) / m
    elif which.startswith("pseudoscalar"):
        _require(not V and not S and P, "pseudoscalar reduction needs pure P")
        sgn = 1.0 if which.endswith("1") else -1.0
        U = lambda x: (model.eval(x)[2] ** 2 + sgn * model.derivatives(x)[2]) / (2 * m)
    else:
        _require(not V and not P and S, "scalar reduction needs pure S")
        sgn = 1.0 if which.endswith("1") else -1.0
        U = lambda x: (2 * m * model.eval(x)[1] + model.eval(x)[1] ** 2
                       - sgn * model.derivatives(x)[1]) / (2 * m)
    return ReducedEquation(model, which, m, E, eps, 0j, 0j, 0j, U_callback=U)


def scatter_schrodinger(red: ReducedEquation, cfg: IntegratorConfig | None = None) -> ScatteringResult:
    """T and R of the reduced second-order equation; channels (1, +-ik)."""
    cfg = cfg or IntegratorConfig()
    km, kp = red.momenta()
    for k in (km, kp):
        if abs(k.imag) > 1e-12 * max(1.0, abs(k)) or k.real <= 0.0:
            raise NotScattering(f"effective energy {red.eps:g} is below the continuum")
    ch = AsymptoticChannel(km, kp, 1j * km, 1j * kp, -1j * km, -1j * kp)
    coeffs, drift, info = _solve(red.system(), ch, red.model.tail, cfg)
    res = coefficients_to_scattering(coeffs, ch, cfg.pt_tol, drift)
    res.info.update(info)
    res.info["coefficients"] = coeffs
    return res


def with_box(cfg: IntegratorConfig, L: float) -> IntegratorConfig:
    return replace(cfg, L=L)
