"""Asymptotic channels, T/R extraction and formalism diagnostics.

Conventions
-----------
The Dirac spinor is written in the Dirac representation, ``psi = (psi1, psi2)``.
Far from the scattering region the potentials tend to constants and the
solutions are plane waves ``(1, C) exp(ikx)`` (progressive) and
``(1, D) exp(-ikx)`` (regressive) with

    k^2 = (E - V)^2 - (m + S)^2 - P^2,
    C = ( k + iP) / (m + S + E - V),
    D = (-k + iP) / (m + S + E - V).

A general solution is ``a (1, C) e^{ikx} + b (1, D) e^{-ikx}`` on each side; the
eight numbers ``a_i±, b_i±`` of two independent solutions fix T and R.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from enum import Enum

from .errors import DegenerateChannel, NonPositiveMass, SingularMatching

ATOL = 1e-10
RTOL = 1e-8
PT_TOL = 1e-8


def tol(x: float, atol: float = ATOL, rtol: float = RTOL) -> float:
    """Absolute-plus-relative tolerance ``atol + rtol*|x|``."""
    return atol + rtol * abs(x)


def wrap_phase(a: float) -> float:
    """Reduce an angle to (-pi, pi]."""
    r = math.remainder(a, 2.0 * math.pi)
    if r <= -math.pi:
        r += 2.0 * math.pi
    return r


def principal_sqrt(z: complex) -> complex:
    """Square root on the branch Re >= 0, with Im >= 0 when Re == 0."""
    r = cmath.sqrt(complex(z) + 0.0)
    if r.real < 0.0 or (r.real == 0.0 and r.imag < 0.0):
        r = -r
    return r


@dataclass(frozen=True)
class PhysicalParams:
    m: float
    E: float

    def __post_init__(self):
        if not (self.m > 0.0) or not math.isfinite(self.m):
            raise NonPositiveMass(f"mass must be positive, got {self.m!r}")
        if not math.isfinite(self.E):
            raise ValueError(f"energy must be finite, got {self.E!r}")

    @property
    def eps_eff(self) -> float:
        return (self.E * self.E - self.m * self.m) / (2.0 * self.m)


@dataclass(frozen=True)
class AsymptoticLimits:
    V_minus: complex = 0j
    V_plus: complex = 0j
    S_minus: complex = 0j
    S_plus: complex = 0j
    P_minus: complex = 0j
    P_plus: complex = 0j

    def __post_init__(self):
        for name in ("V_minus", "V_plus", "S_minus", "S_plus", "P_minus", "P_plus"):
            object.__setattr__(self, name, complex(getattr(self, name)))

    def side(self, side: str) -> tuple[complex, complex, complex]:
        """``(V, S, P)`` at ``side`` in {'-', '+'}."""
        if side == "-":
            return self.V_minus, self.S_minus, self.P_minus
        if side == "+":
            return self.V_plus, self.S_plus, self.P_plus
        raise ValueError(f"side must be '-' or '+', got {side!r}")

    def pt_residual(self) -> float:
        return max(
            abs(self.V_plus - self.V_minus.conjugate()),
            abs(self.S_plus - self.S_minus.conjugate()),
            abs(self.P_plus + self.P_minus.conjugate()),
        )

    def is_pt_symmetric(self, atol: float = ATOL, rtol: float = RTOL) -> bool:
        scale = max(abs(v) for v in (self.V_plus, self.S_plus, self.P_plus))
        return self.pt_residual() <= tol(scale, atol, rtol)

    def as_dict(self) -> dict:
        return {n: getattr(self, n) for n in
                ("V_minus", "V_plus", "S_minus", "S_plus", "P_minus", "P_plus")}


@dataclass(frozen=True)
class AsymptoticChannel:
    k_minus: complex
    k_plus: complex
    C_minus: complex
    C_plus: complex
    D_minus: complex
    D_plus: complex


@dataclass(frozen=True)
class SpinorState:
    x: float
    psi1: complex
    psi2: complex


@dataclass(frozen=True)
class SolutionCoefficients:
    a1_minus: complex
    a1_plus: complex
    b1_minus: complex
    b1_plus: complex
    a2_minus: complex
    a2_plus: complex
    b2_minus: complex
    b2_plus: complex

    def as_tuple(self) -> tuple:
        return (self.a1_minus, self.a1_plus, self.b1_minus, self.b1_plus,
                self.a2_minus, self.a2_plus, self.b2_minus, self.b2_plus)

    @classmethod
    def from_tuple(cls, t) -> "SolutionCoefficients":
        return cls(*(complex(v) for v in t))


@dataclass(frozen=True)
class PtExactnessReport:
    holds: bool
    phi: float
    residual: float
    phi_regressive: float = 0.0


@dataclass(frozen=True)
class ScatteringResult:
    T_LR: complex
    R_LR: complex
    T_RL: complex
    R_RL: complex
    nu_phase: float
    unitarity_defect: float
    pt_exact: PtExactnessReport
    wronskian_drift: float | None = None
    channel: AsymptoticChannel | None = None
    info: dict = field(default_factory=dict, compare=False)


@dataclass
class BoundStateRecord:
    """A discrete level ``E`` with decay momentum ``kappa`` (k = i kappa).

    ``x`` and ``psi`` (shape (2, n)) hold the normalized spinor samples when
    available. ``kind`` is ``Bound``, ``ZeroMode`` or ``HalfBound``.
    """

    E: complex
    kappa: complex
    eps_eff: complex
    kind: str = "Bound"
    method: str = ""
    norm: float | None = None
    node_info: str = ""
    x: object = None
    psi: object = None
    imag_residual: float = 0.0
    partner: str = ""

    @property
    def norm_ok(self) -> bool:
        return self.norm is not None and abs(self.norm - 1.0) <= 1e-8

    def summary(self) -> dict:
        E = complex(self.E)
        return {"E": E.real, "E_imag": E.imag, "kappa": complex(self.kappa).real,
                "eps_eff": complex(self.eps_eff).real, "kind": self.kind,
                "norm_ok": self.norm_ok, "method": self.method, "partner": self.partner}


class PTBranch(Enum):
    ConjugatePair = "ConjugatePair"
    AntiConjugatePair = "AntiConjugatePair"
    NotPT = "NotPT"


def check_mass(m: float) -> None:
    if not (m > 0.0):
        raise NonPositiveMass(f"mass must be positive, got {m!r}")


def asymptotic_momentum(params: PhysicalParams, limits: AsymptoticLimits, side: str) -> complex:
    V, S, P = limits.side(side)
    E, m = params.E, params.m
    return principal_sqrt((E - V) ** 2 - (m + S) ** 2 - P * P)


def _ratios(E, m, V, S, P, k):
    d = m + S + E - V
    if abs(d) <= 1e-14 * max(1.0, abs(E), abs(m), abs(V), abs(S)):
        raise DegenerateChannel(f"m + S + E - V vanishes (E = {E!r})")
    return (k + 1j * P) / d, (-k + 1j * P) / d


def channel_ratios(params: PhysicalParams, limits: AsymptoticLimits,
                   k_minus: complex | None = None, k_plus: complex | None = None) -> AsymptoticChannel:
    """Plane-wave channel data; momenta default to :func:`asymptotic_momentum`."""
    if k_minus is None:
        k_minus = asymptotic_momentum(params, limits, "-")
    if k_plus is None:
        k_plus = asymptotic_momentum(params, limits, "+")
    Vm, Sm, Pm = limits.side("-")
    Vp, Sp, Pp = limits.side("+")
    Cm, Dm = _ratios(params.E, params.m, Vm, Sm, Pm, k_minus)
    Cp, Dp = _ratios(params.E, params.m, Vp, Sp, Pp, k_plus)
    return AsymptoticChannel(complex(k_minus), complex(k_plus), Cm, Cp, Dm, Dp)


def classify_pt_branch(channel: AsymptoticChannel, atol: float = ATOL, rtol: float = RTOL) -> PTBranch:
    km, kp = channel.k_minus, channel.k_plus
    t = tol(max(abs(km), abs(kp)), atol, rtol)
    if abs(km.conjugate() - kp) <= t:
        return PTBranch.ConjugatePair
    if abs(km.conjugate() + kp) <= t:
        return PTBranch.AntiConjugatePair
    return PTBranch.NotPT


def nu_phase(channel: AsymptoticChannel) -> float:
    """Phase of T_LR/T_RL fixed by the Wronskian.

    Equals ``2 arg(D- - C-)`` whenever the limits are PT-symmetric
    (then ``D+ - C+ = (D- - C-)*``); the ratio form also covers channels
    where that conjugation does not hold.
    """
    num = channel.D_minus - channel.C_minus
    den = channel.D_plus - channel.C_plus
    return wrap_phase(cmath.phase(num) - cmath.phase(den))


def pt_exactness(T_LR, R_LR, T_RL, R_RL, tolerance: float = PT_TOL) -> PtExactnessReport:
    """Test A±* = e^{iφ} A∓, B±* = e^{iφ} B∓ on progressive and regressive data.

    Progressive data are (A-, B-, A+, B+) = (1, R_LR, T_LR, 0), regressive
    data (0, T_RL, R_RL, 1). The phase is fixed by the transmitted amplitude.
    """
    phi = -cmath.phase(T_LR) if T_LR != 0 else 0.0
    phr = -cmath.phase(T_RL) if T_RL != 0 else 0.0
    e, er = cmath.exp(1j * phi), cmath.exp(1j * phr)
    Am, Bm, Ap, Bp = 1.0, R_LR, T_LR, 0.0
    res = max(abs(Ap.conjugate() - e * Am), abs(Am - e * Ap),
              abs(Bp - e * Bm), abs(Bm.conjugate() - e * Bp))
    Am, Bm, Ap, Bp = 0.0, T_RL, R_RL, 1.0
    res = max(res, abs(Ap.conjugate() - er * Am), abs(Am - er * Ap),
              abs(Bp - er * Bm), abs(Bm.conjugate() - er * Bp))
    if not math.isfinite(res):
        res = math.inf
    return PtExactnessReport(res <= tolerance, wrap_phase(phi), res, wrap_phase(phr))


def coefficients_to_scattering(c: SolutionCoefficients, channel: AsymptoticChannel,
                               pt_tol: float = PT_TOL,
                               wronskian_drift: float | None = None) -> ScatteringResult:
    den = c.b1_plus * c.a2_minus - c.a1_minus * c.b2_plus
    scale = max(abs(c.b1_plus * c.a2_minus), abs(c.a1_minus * c.b2_plus))
    if den == 0 or abs(den) <= 1e-13 * scale:
        raise SingularMatching("solutions are not independent (b1+ a2- = a1- b2+)")
    T_LR = (c.b1_plus * c.a2_plus - c.a1_plus * c.b2_plus) / den
    R_LR = (c.b1_plus * c.b2_minus - c.b1_minus * c.b2_plus) / den
    T_RL = (c.a2_minus * c.b1_minus - c.a1_minus * c.b2_minus) / den
    R_RL = (c.a1_plus * c.a2_minus - c.a1_minus * c.a2_plus) / den
    defect = max(abs(abs(T_LR) - 1.0), abs(abs(T_RL) - 1.0))
    return ScatteringResult(
        T_LR=T_LR, R_LR=R_LR, T_RL=T_RL, R_RL=R_RL,
        nu_phase=nu_phase(channel),
        unitarity_defect=defect,
        pt_exact=pt_exactness(T_LR, R_LR, T_RL, R_RL, pt_tol),
        wronskian_drift=wronskian_drift,
        channel=channel,
    )


def wronskian(spinor_a: SpinorState, spinor_b: SpinorState) -> complex:
    if spinor_a.x != spinor_b.x:
        raise ValueError("spinors must be sampled at the same x")
    return spinor_a.psi1 * spinor_b.psi2 - spinor_b.psi1 * spinor_a.psi2
