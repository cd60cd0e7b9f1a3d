"""Closed-form results: transmission coefficients, bound states, zero modes.

These serve as fast paths and as oracles for the numerical solvers. Energies
are Dirac energies ``E``; the Schroedinger-like effective energy is
``eps = (E^2 - m^2) / 2m``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np
from scipy import integrate

from .core import BoundStateRecord, ScatteringResult, SpinorState, pt_exactness
from .errors import (NonPositiveMass, NotScattering, OutOfStatedDomain, ShiftDomain,
                     UnsupportedModel, ZeroShift)
from .potentials import PotentialModel, scalar_one_bound_constants
from .shapes import sech

# ---------------------------------------------------------------- Gamma

_LANCZOS_G = 7.0
_LANCZOS = (0.99999999999980993, 676.5203681218851, -1259.1392167224028,
            771.32342877765313, -176.61502916214059, 12.507343278686905,
            -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7)


def gamma(x: float) -> float:
    """Euler Gamma for real ``x`` (Lanczos, g = 7, nine coefficients)."""
    x = float(x)
    if x <= 0.0 and x == math.floor(x):
        raise ValueError(f"Gamma has a pole at {x:g}")
    if x < 0.5:
        return math.pi / (math.sin(math.pi * x) * gamma(1.0 - x))
    x -= 1.0
    a = _LANCZOS[0]
    t = x + _LANCZOS_G + 0.5
    for i in range(1, 9):
        a += _LANCZOS[i] / (x + i)
    return math.sqrt(2.0 * math.pi) * t ** (x + 0.5) * math.exp(-t) * a


def _oracle(T_LR, R_LR, T_RL, R_RL, channel=None, nu=0.0, **info) -> ScatteringResult:
    T_LR, R_LR, T_RL, R_RL = (complex(v) for v in (T_LR, R_LR, T_RL, R_RL))
    return ScatteringResult(
        T_LR=T_LR, R_LR=R_LR, T_RL=T_RL, R_RL=R_RL, nu_phase=nu,
        unitarity_defect=max(abs(abs(T_LR) - 1.0), abs(abs(T_RL) - 1.0)),
        pt_exact=pt_exactness(T_LR, R_LR, T_RL, R_RL), channel=channel,
        info={"method": "analytic", **info})


def _momentum(E: float, m: float, shift: float = 0.0) -> float:
    if not m > 0:
        raise NonPositiveMass(f"mass must be positive, got {m!r}")
    k2 = E * E - m * m - shift
    if not k2 > 0:
        raise NotScattering(f"k^2 = {k2:g} <= 0: no scattering at E={E:g}")
    return math.sqrt(k2)


# ---------------------------------------------------------------- centrifugal

def bessel_index_sq(c_prime: float, m: float, E: float) -> float:
    """Square of the Bessel index for the spin-symmetric centrifugal model."""
    return 2.0 * c_prime * (m + E) + 0.25


def centrifugal_scattering(c_prime: float, m: float, E: float) -> ScatteringResult:
    """Transparency of the shifted centrifugal barrier: T = 1, R = 0.

    ``info`` carries ``bessel_index_sq`` and ``imaginary_index`` (index
    squared negative).
    """
    _momentum(E, m)
    nu2 = bessel_index_sq(c_prime, m, E)
    return _oracle(1.0, 0.0, 1.0, 0.0, bessel_index_sq=nu2, imaginary_index=nu2 < 0)


def centrifugal_reflection(c_prime: float, m: float, E: float, eps: float) -> complex:
    """Reflection that the continued Hankel asymptotics miss.

    Continuing the Hankel solutions from x -> +inf to x -> -inf crosses the
    branch cut of z = k(x + i eps); the connection formula adds a regressive
    component. For eps > 0 it shows up in R_RL, for eps < 0 in R_LR, with
    value -2i cos(pi nu) exp(-2k|eps|); the other direction is reflectionless
    and T_LR = T_RL = 1.
    """
    if eps == 0:
        raise ZeroShift("the centrifugal model needs eps != 0")
    k = _momentum(E, m)
    nu = cmath.sqrt(bessel_index_sq(c_prime, m, E))
    return -2j * cmath.cos(math.pi * nu) * math.exp(-2.0 * k * abs(eps))


def centrifugal_scattering_full(c_prime: float, m: float, E: float, eps: float) -> ScatteringResult:
    """Centrifugal T/R including the one-sided reflection of :func:`centrifugal_reflection`."""
    R = centrifugal_reflection(c_prime, m, E, eps)
    nu2 = bessel_index_sq(c_prime, m, E)
    if eps > 0:
        return _oracle(1.0, 0.0, 1.0, R, bessel_index_sq=nu2, imaginary_index=nu2 < 0)
    return _oracle(1.0, R, 1.0, 0.0, bessel_index_sq=nu2, imaginary_index=nu2 < 0)


@dataclass(frozen=True)
class ZeroModeReport:
    """k = 0 solutions of the centrifugal model.

    ``bound_exists`` follows the stated rule (coupling of the right sign,
    beta > 1). ``normalizable`` is the stricter beta > 2 condition under which
    the spinor norm converges; ``ambiguous`` flags 1 < beta <= 2, where the two
    disagree and ``alpha2_norm_sq`` is unavailable.
    """

    gamma1: complex
    gamma2: complex
    beta: float | None
    bound_exists: bool
    alpha2_norm_sq: float | None
    double_root: bool
    normalizable: bool
    ambiguous: bool
    E: float
    mode: str
    eps: float
    m: float
    note: str = ""

    def spinor(self, x, alpha2: complex | None = None):
        """(psi1, psi2) of the zero mode at real ``x`` (normalized by default)."""
        if alpha2 is None:
            if self.alpha2_norm_sq is None:
                raise ValueError("zero mode is not normalizable")
            alpha2 = math.sqrt(self.alpha2_norm_sq)
        z = np.asarray(x, float) + 1j * self.eps
        g = self.gamma2
        big = alpha2 * z ** g
        dbig = alpha2 * g * z ** (g - 1.0)
        if self.mode == "spin":
            return big, -1j / (2.0 * self.m) * dbig
        return 1j / (2.0 * self.m) * dbig, big


def centrifugal_zero_mode(c_prime: float, m: float, eps: float, mode: str = "spin") -> ZeroModeReport:
    """Roots, existence rule and normalization of the k = 0 state.

    mode ``spin`` (V = S = c'/(x+i eps)^2): the state sits at E = m with upper
    component alpha2 (x + i eps)^((1 - beta)/2), beta = sqrt(1 + 16 c' m).
    mode ``pseudospin`` (V = -S = c''/(x + i eps)^2): the mirror at E = -m with
    beta = sqrt(1 - 16 c'' m), carried by the lower component.
    """
    if not m > 0:
        raise NonPositiveMass(f"mass must be positive, got {m!r}")
    if eps == 0:
        raise ZeroShift("the centrifugal model needs eps != 0")
    if mode not in ("spin", "pseudospin"):
        raise ValueError("mode must be 'spin' or 'pseudospin'")
    s = 16.0 * c_prime * m if mode == "spin" else -16.0 * c_prime * m
    disc = 1.0 + s
    root = cmath.sqrt(disc)
    g1, g2 = (1.0 + root) / 2.0, (1.0 - root) / 2.0
    E = m if mode == "spin" else -m
    double = disc == 0.0
    beta = math.sqrt(disc) if disc >= 0 else None
    exists = beta is not None and beta > 1.0
    normalizable = beta is not None and beta > 2.0
    ambiguous = exists and not normalizable
    a2 = None
    note = ""
    if double:
        note = "double root gamma = 1/2: general solution has a log term and is not normalizable"
    elif ambiguous:
        note = "1 < beta <= 2: existence rule met but the spinor norm diverges; normalization unavailable"
    if normalizable:
        e = abs(eps)
        b = beta
        bracket = (e * e * gamma(b / 2.0 - 1.0) / gamma((b - 1.0) / 2.0)
                   + ((1.0 - b) / 2.0) ** 2 / (4.0 * m * m) * gamma(b / 2.0) / gamma((b + 1.0) / 2.0))
        a2 = e ** b / (math.sqrt(math.pi) * bracket)
    return ZeroModeReport(g1, g2, beta, exists, a2, double, normalizable, ambiguous,
                          E, mode, float(eps), float(m), note)


def hankel_asymptotic_spinor(nu: complex, kind: int, k: float, eps: float, E: float, m: float,
                             x: float):
    """Leading large-|kx| form of the Hankel-type Dirac spinors.

    kind 1: (2/pi)^(1/2) (1, lam) exp(ikx - k eps - i pi nu/2 - i pi/4),
    kind 2: (2/pi)^(1/2) (1, -lam) exp(-(ikx - k eps - i pi nu/2 - i pi/4)),
    with lam = k/(E + m).
    """
    if kind not in (1, 2):
        raise ValueError("kind must be 1 or 2")
    lam = k / (E + m)
    arg = 1j * k * x - k * eps - 0.5j * math.pi * nu - 0.25j * math.pi
    sgn = 1.0 if kind == 1 else -1.0
    amp = math.sqrt(2.0 / math.pi) * cmath.exp(sgn * arg)
    return SpinorState(float(x), complex(amp), complex(sgn * lam * amp))


# ---------------------------------------------------------------- pseudoscalar

class PartnerScattering(NamedTuple):
    partner1: ScatteringResult
    partner2: ScatteringResult


def poeschl_teller_scattering(lam: float, m: float, E: float) -> PartnerScattering:
    """Partners of the Nogami-Toyama superpotential: both reflectionless.

    T2 = -(1 - ik)/(1 + ik) (Poeschl-Teller well), T1 = (lam - ik)/(lam + ik) (1 - ik)/(1 + ik).
    """
    k = _momentum(E, m, lam * lam)
    T2 = -(1 - 1j * k) / (1 + 1j * k)
    T1 = (lam - 1j * k) / (lam + 1j * k) * (1 - 1j * k) / (1 + 1j * k)
    return PartnerScattering(_oracle(T1, 0, T1, 0, k=k), _oracle(T2, 0, T2, 0, k=k))


def super_scarf_transmission(n: int, l: int, m: float, E: float, partner: int,
                             enforce_domain: bool = True) -> complex:
    """Product formula for the super-Scarf partners.

    T2 = (-1)^(n+l) prod_{j=1}^{n} (j - ik)/(j + ik) prod_{j=1}^{l} (j - 1/2 - ik)/(j - 1/2 + ik);
    T1 drops the j = n factor and flips the sign. The stated ranges are n > 1
    for partner 2 and n > 2 for partner 1; ``enforce_domain=False`` evaluates
    outside them (the formula itself stays valid down to n = 1).
    """
    if partner not in (1, 2):
        raise ValueError("partner must be 1 or 2")
    if enforce_domain and ((partner == 2 and n <= 1) or (partner == 1 and n <= 2)):
        raise OutOfStatedDomain(f"partner {partner} product stated only for n > {partner % 2 + 1}")
    k = _momentum(E, m, n * n)
    top = n if partner == 2 else n - 1
    T = complex((-1) ** (n + l + (partner == 1)))
    for j in range(1, top + 1):
        T *= (j - 1j * k) / (j + 1j * k)
    for j in range(1, l + 1):
        T *= (j - 0.5 - 1j * k) / (j - 0.5 + 1j * k)
    return T


def super_scarf_levels(n: int, l: int, m: float, partner: int) -> list[float]:
    """Decay momenta kappa of the transmission poles (k = i kappa), descending.

    Partner 2 has poles at kappa = 1..n and kappa = 1/2..l - 1/2; partner 1
    lacks kappa = n, its ground state. Energies follow E^2 = m^2 + n^2 - kappa^2.
    """
    top = n if partner == 2 else n - 1
    kap = [float(j) for j in range(1, top + 1)] + [j - 0.5 for j in range(1, l + 1)]
    return sorted(kap, reverse=True)


def super_scarf_count_contract(n: int) -> tuple[int, int]:
    """Stated level counts (partner 2, partner 1) = (n, n - 1)."""
    return n, n - 1


def nt_excited_spinor(lam: float, eps: float, m: float, x, sign: float = 1.0, E: float | None = None):
    """Unnormalized excited-doublet spinor of the Nogami-Toyama family (N = 1).

    ``sign`` is the sign of P relative to the Nogami-Toyama superpotential; for
    sign -1 the components swap roles.
    """
    if E is None:
        E = math.sqrt(m * m + lam * lam - 1.0)
    z = np.asarray(x, float) + 1j * eps
    t, th = np.tanh(z), np.tanh(lam * z)
    well = sech(z)
    # (d/dx + f)(1/cosh z) = (lam^2 - 1) th / (sinh z th - lam cosh z)
    lw = (lam * lam - 1.0) * th * well / (t * th - lam)
    if sign > 0:
        return 1j / (m - E) * lw, well
    return well, -1j / (m + E) * lw


def nt_zero_mode(lam: float, eps: float, x):
    """Unnormalized ground zero mode 1/(lam cosh(lam z) - tanh z sinh(lam z))."""
    z = np.asarray(x, float) + 1j * eps
    return sech(lam * z) / (lam - np.tanh(z) * np.tanh(lam * z))


def _quad_norm(fn: Callable, scale: float = 1.0) -> float:
    """Integral of |psi1|^2 + |psi2|^2 over the real line."""
    def dens(x):
        a, b = fn(np.array([x]))
        return float(abs(a[0]) ** 2 + abs(b[0]) ** 2)
    total = 0.0
    for lo, hi in ((-np.inf, -scale), (-scale, scale), (scale, np.inf)):
        total += integrate.quad(dens, lo, hi, limit=400, epsabs=0.0, epsrel=1e-12)[0]
    return total


def pseudoscalar_bound_states(model: PotentialModel, m: float | None = None, x=None) -> list[BoundStateRecord]:
    """Closed-form levels of the Nogami-Toyama family and super-Scarf.

    Nogami-Toyama (and its sign-flipped Poeschl-Teller model): the excited
    doublet at eps = (lam^2 - 1)/2m (positive-energy branch) and the zero mode
    at eps = 0, normalized by adaptive quadrature and sampled on a grid.
    Super-Scarf: positive-energy levels of both partners from the transmission
    poles, tagged with ``partner``. ``x`` overrides the sampling grid.
    """
    m = model.params.get("m", 1.0) if m is None else m
    kind = model.kind
    if kind in ("nogami_toyama", "poeschl_teller"):
        lam, eps = model.params["lam"], model.params["eps"]
        sign = 1.0 if kind == "nogami_toyama" else -1.0
        out = []
        E1 = math.sqrt(m * m + lam * lam - 1.0)
        x = np.linspace(-20.0, 20.0, 4001) if x is None else np.asarray(x, float)
        if lam > 1.0:
            fn = lambda xs: nt_excited_spinor(lam, eps, m, xs, sign, E1)
            nrm = _quad_norm(fn)
            p1, p2 = fn(x)
            N = 1.0 / math.sqrt(nrm)
            # k^2 = E^2 - m^2 - lam^2 = -1
            out.append(BoundStateRecord(E1, 1.0, (lam * lam - 1.0) / (2 * m), "Bound", "analytic", 1.0,
                                        "node of the lower-well partner at x = -i eps (off axis)",
                                        x, np.array([p1 * N, p2 * N])))
            fz = lambda xs: ((nt_zero_mode(lam, eps, xs), np.zeros(np.shape(xs), complex)) if sign > 0
                             else (np.zeros(np.shape(xs), complex), nt_zero_mode(lam, eps, xs)))
            nz = _quad_norm(fz)
            q1, q2 = fz(x)
            Nz = 1.0 / math.sqrt(nz)
            out.append(BoundStateRecord(sign * m, lam, 0.0, "Bound", "analytic", 1.0,
                                        "nodeless", x, np.array([q1 * Nz, q2 * Nz])))
        return out
    if kind == "super_scarf":
        n, l = model.params["n"], model.params["l"]
        out = []
        for partner in (2, 1):
            for kap in super_scarf_levels(n, l, m, partner):
                E = math.sqrt(m * m + n * n - kap * kap)
                out.append(BoundStateRecord(E, kap, (E * E - m * m) / (2 * m), "Bound", "analytic",
                                            partner=f"U{partner}"))
        return out
    raise UnsupportedModel(f"no closed-form pseudoscalar levels for model {kind!r}")


# ---------------------------------------------------------------- scalar

def scalar_exact_scattering(c_S: float, m: float, E: float) -> ScatteringResult:
    """T_LR = T_RL = (ik - kappa_B)/(ik + kappa_B), R = 0."""
    k = _momentum(E, m)
    kap = scalar_one_bound_constants(c_S, m)["kappa_B"]
    T = (1j * k - kap) / (1j * k + kap)
    return _oracle(T, 0, T, 0, k=k, kappa_B=kap)


@dataclass(frozen=True)
class ScalarBoundState:
    """The single bound state of the scalar one-bound-state model.

    ``phi(x)`` returns the components in the representation where the scalar
    partners decouple; ``spinor(x)`` the Dirac-representation components.
    """

    E: float
    kappa: float
    lam: float
    eps_eff: float
    shift: float
    N1_sq: float
    m: float

    def phi(self, x):
        z = np.asarray(x, float) + 1j * self.shift
        N = math.sqrt(self.N1_sq)
        return N * sech(self.kappa * z - self.lam), N * sech(self.kappa * z + self.lam)

    def spinor(self, x):
        p1, p2 = self.phi(x)
        r = math.sqrt(0.5)
        return r * (p1 + p2), 1j * r * (p1 - p2)

    def record(self, x=None) -> BoundStateRecord:
        x = np.linspace(-40.0, 40.0, 4001) if x is None else np.asarray(x, float)
        return BoundStateRecord(self.E, self.kappa, self.eps_eff, "Bound", "analytic", 1.0,
                                "nodeless", x, np.array(self.spinor(x)))


def scalar_exact_bound_state(c_S: float, m: float, eps_shift: float) -> ScalarBoundState:
    """Bound state at eps = -kappa_B^2/2m with |N1|^2 = sin(kB e) cos(kB e)/(4 e), N2 = N1.

    The closed norm is positive only for 0 < kappa_B |eps_shift| < pi/2;
    outside that range :class:`ShiftDomain` is raised.
    """
    d = scalar_one_bound_constants(c_S, m)
    kap = d["kappa_B"]
    a = kap * abs(eps_shift)
    if not 0.0 < a < 0.5 * math.pi:
        raise ShiftDomain(f"kappa_B*|eps| = {a:g} outside (0, pi/2): closed norm degenerate")
    N1 = math.sin(kap * eps_shift) * math.cos(kap * eps_shift) / (4.0 * eps_shift)
    return ScalarBoundState(d["E_B"], kap, d["lambda_B"], -kap * kap / (2 * m), float(eps_shift), N1, m)


def scalar_partner_potentials(c_S: float, m: float, eps: float, x):
    """U1, U2 = -kappa_B^2 / (m cosh^2(kappa_B z -+ lambda_B))."""
    d = scalar_one_bound_constants(c_S, m)
    kap, lb = d["kappa_B"], d["lambda_B"]
    z = np.asarray(x, float) + 1j * eps
    return -kap * kap / m * sech(kap * z - lb) ** 2, -kap * kap / m * sech(kap * z + lb) ** 2


# ---------------------------------------------------------------- constant partner

@dataclass(frozen=True)
class RiccatiPartner:
    """Superpotential W = m + S with U1 = c, and its partner U2."""

    c: float
    m: float
    d: complex
    kind: str          # Hyperbolic | Trigonometric | Limiting
    rate: float        # a (hyperbolic) or b (trigonometric); 0 in the limiting case

    def W(self, x):
        z = np.asarray(x, float) + self.d
        if self.kind == "Hyperbolic":
            return -self.rate * np.tanh(self.rate * z)
        if self.kind == "Trigonometric":
            return self.rate * np.tan(self.rate * z)
        return -1.0 / z

    def U1(self, x):
        return np.full(np.shape(x), complex(self.c))

    def U2(self, x):
        z = np.asarray(x, float) + self.d
        if self.kind == "Hyperbolic":
            return self.c - self.rate ** 2 / self.m * sech(self.rate * z) ** 2
        if self.kind == "Trigonometric":
            return self.c + self.rate ** 2 / (self.m * np.cos(self.rate * z) ** 2)
        return 1.0 / (self.m * z * z) - self.m / 2.0


def riccati_constant_partner(c: float, m: float, d: complex = 0j) -> RiccatiPartner:
    """Solve ((W^2 - m^2) - W')/2m = c for W; classify by the sign of m + 2c."""
    s = m + 2.0 * c
    if s > 0:
        return RiccatiPartner(c, m, complex(d), "Hyperbolic", math.sqrt(m * s))
    if s < 0:
        return RiccatiPartner(c, m, complex(d), "Trigonometric", math.sqrt(-m * s))
    return RiccatiPartner(c, m, complex(d), "Limiting", 0.0)
