"""Pseudo-supersymmetric partners generated by a pseudoscalar or scalar superpotential.

Conventions (kept exactly as in the reduced Dirac equations):

pseudoscalar, W = P:
    L = (d/dx + W)/sqrt(2m),  M = (-d/dx + W)/sqrt(2m)
    H1 = LM = -d^2/2m + (W^2 + W')/2m,  H2 = ML = -d^2/2m + (W^2 - W')/2m
scalar, W = m + S (the effective mass):
    L = (-d/dx + W)/sqrt(2m), M = (d/dx + W)/sqrt(2m)
    LM = H1 + m/2, ML = H2 + m/2 with U1,2 = ((m + S)^2 - m^2 -+ S')/2m

The upper component sees U1 in both cases. Note that in the pseudoscalar
case this labelling is the reverse of the one used in the original
Nogami-Toyama construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .core import AsymptoticChannel, ScatteringResult, pt_exactness
from .errors import GridTooCoarse, SingularMap, ThresholdEnergy, WrongPotentialClass
from .potentials import PotentialModel

PSEUDOSCALAR = "pseudoscalar"
SCALAR = "scalar"


@dataclass(frozen=True)
class OperatorDescriptor:
    """``(sign d/dx + W)/sqrt(2m)``."""

    sign: float
    m: float

    def __str__(self):
        d = "d/dx" if self.sign > 0 else "-d/dx"
        return f"({d} + W)/sqrt(2m)"


@dataclass(frozen=True)
class SusyPair:
    model: PotentialModel
    kind: str
    m: float
    L_op: OperatorDescriptor
    M_op: OperatorDescriptor

    @property
    def offset(self) -> float:
        """Constant c with LM = H1 + c and ML = H2 + c."""
        return 0.0 if self.kind == PSEUDOSCALAR else 0.5 * self.m

    def W(self, x):
        V, S, P = self.model.eval(x)
        return P if self.kind == PSEUDOSCALAR else self.m + S

    def dW(self, x):
        dV, dS, dP = self.model.derivatives(x)
        return dP if self.kind == PSEUDOSCALAR else dS

    def U1(self, x):
        W, dW = self.W(x), self.dW(x)
        if self.kind == PSEUDOSCALAR:
            return (W * W + dW) / (2 * self.m)
        return (W * W - self.m ** 2 - dW) / (2 * self.m)

    def U2(self, x):
        W, dW = self.W(x), self.dW(x)
        if self.kind == PSEUDOSCALAR:
            return (W * W - dW) / (2 * self.m)
        return (W * W - self.m ** 2 + dW) / (2 * self.m)

    def W_limits(self) -> tuple[complex, complex]:
        lim = self.model.limits
        if self.kind == PSEUDOSCALAR:
            return lim.P_minus, lim.P_plus
        return self.m + lim.S_minus, self.m + lim.S_plus

    def zero_mode_partner(self) -> int | None:
        """Partner owning a normalizable zero mode, judged from the tails of W.

        M psi = 0 gives psi = exp(+-int W) and L psi = 0 the opposite sign;
        whichever decays on both sides belongs to the partner LM (1) or ML (2).
        """
        Wm, Wp = (w.real for w in self.W_limits())
        s = self.M_op.sign
        # M psi = 0  <=>  psi' = -(W / s) psi
        if s * Wp > 0 > s * Wm:
            return 1
        if s * Wp < 0 < s * Wm:
            return 2
        return None

    @property
    def exact(self) -> bool:
        """Unbroken (exact) supersymmetry: a normalizable zero mode exists."""
        return self.zero_mode_partner() is not None


def build_pair(model: PotentialModel, kind: str | None = None) -> SusyPair:
    """Partner data for a pure-P (pseudoscalar) or pure-S (scalar) model."""
    m = model.params.get("m", 1.0)
    V, S, P = model.components_present()
    if kind is None:
        kind = PSEUDOSCALAR if (P and not V and not S) else SCALAR if (S and not V and not P) else None
    if kind == PSEUDOSCALAR and P and not V and not S:
        return SusyPair(model, kind, m, OperatorDescriptor(1.0, m), OperatorDescriptor(-1.0, m))
    if kind == SCALAR and S and not V and not P:
        return SusyPair(model, kind, m, OperatorDescriptor(-1.0, m), OperatorDescriptor(1.0, m))
    raise WrongPotentialClass("superpotential pairs need a pure pseudoscalar or pure scalar model")


def map_partner_scattering(result2: ScatteringResult, P_minus: complex, P_plus: complex,
                           k_minus: complex, k_plus: complex) -> ScatteringResult:
    """Partner-1 coefficients from partner-2 ones via the superpotential limits."""
    km, kp = complex(k_minus), complex(k_plus)
    dens = (1j * km + P_minus, -1j * kp + P_plus)
    for d in dens:
        if abs(d) <= 1e-14 * max(1.0, abs(km), abs(kp)):
            raise SingularMap("partner map is singular at this momentum (+-ik = -+P)")
    R_LR = (-1j * km + P_minus) / (1j * km + P_minus) * result2.R_LR
    T_LR = (1j * kp + P_plus) / (1j * km + P_minus) * result2.T_LR
    R_RL = (1j * kp + P_plus) / (-1j * kp + P_plus) * result2.R_RL
    T_RL = (-1j * km + P_minus) / (-1j * kp + P_plus) * result2.T_RL
    return ScatteringResult(
        T_LR=T_LR, R_LR=R_LR, T_RL=T_RL, R_RL=R_RL, nu_phase=result2.nu_phase,
        unitarity_defect=max(abs(abs(T_LR) - 1), abs(abs(T_RL) - 1)),
        pt_exact=pt_exactness(T_LR, R_LR, T_RL, R_RL),
        wronskian_drift=result2.wronskian_drift, channel=result2.channel,
        info={"method": "partner map"})


def _d1(fn: Callable, x, h: float):
    return (-fn(x + 2 * h) + 8 * fn(x + h) - 8 * fn(x - h) + fn(x - 2 * h)) / (12 * h)


def _d2(fn: Callable, x, h: float):
    return (-fn(x + 2 * h) + 16 * fn(x + h) - 30 * fn(x) + 16 * fn(x - h) - fn(x - 2 * h)) / (12 * h * h)


def apply_operator(op: OperatorDescriptor, W: Callable, fn: Callable, h: float) -> Callable:
    """Callable ``x -> (sign f' + W f)/sqrt(2m)`` with a 4th-order derivative."""
    c = 1.0 / math.sqrt(2.0 * op.m)
    return lambda x: c * (op.sign * _d1(fn, x, h) + W(x) * fn(x))


def _factorization_residual(pair: SusyPair, fn: Callable, x, h: float) -> float:
    x = np.asarray(x, float)
    m = pair.m
    LMf = apply_operator(pair.L_op, pair.W, apply_operator(pair.M_op, pair.W, fn, h), h)(x)
    MLf = apply_operator(pair.M_op, pair.W, apply_operator(pair.L_op, pair.W, fn, h), h)(x)
    f = fn(x)
    kin = -_d2(fn, x, h) / (2 * m)
    H1f = kin + pair.U1(x) * f + pair.offset * f
    H2f = kin + pair.U2(x) * f + pair.offset * f
    scale = max(float(np.max(np.abs(H1f))), float(np.max(np.abs(H2f))), 1e-300)
    return float(max(np.max(np.abs(LMf - H1f)), np.max(np.abs(MLf - H2f))) / scale)


def verify_factorization(pair: SusyPair, test_fn: Callable, x=None, h: float = 1e-3,
                         tol: float = 1e-6) -> float:
    """Max relative residual of LM f = (H1 + c) f and ML f = (H2 + c) f on ``x``.

    The check is repeated at h/2. A residual above ``tol`` that drops by more
    than a factor 4 under halving is a discretization artefact and raises
    :class:`GridTooCoarse`; one that does not is returned as a genuine failure.
    """
    if x is None:
        x = np.linspace(-5.0, 5.0, 201)
    r = _factorization_residual(pair, test_fn, x, h)
    if r > tol:
        r2 = _factorization_residual(pair, test_fn, x, h / 2)
        if r2 < r / 4:
            raise GridTooCoarse(f"residual {r:.3g} at h={h:g} falls to {r2:.3g} at h/2")
    return r


def operator_residual(op: OperatorDescriptor, W: Callable, fn: Callable, x, h: float = 1e-3) -> float:
    """max |op f| / max |f| on ``x``, e.g. to confirm a zero mode."""
    x = np.asarray(x, float)
    out = apply_operator(op, W, fn, h)(x)
    return float(np.max(np.abs(out)) / max(float(np.max(np.abs(fn(x)))), 1e-300))


def _fd_samples(y, x):
    """First derivative of uniform samples: 4th order inside, 2nd order at the edges."""
    y = np.asarray(y, complex)
    h = x[1] - x[0]
    d = np.gradient(y, h, edge_order=2)
    if len(y) >= 5:
        d[2:-2] = (-y[4:] + 8 * y[3:-1] - 8 * y[1:-3] + y[:-4]) / (12 * h)
    return d


def intertwine_bound_state(pair: SusyPair, psi2, m: float, E: complex, x=None, dpsi2=None):
    """Upper component from the lower one.

    pseudoscalar: psi1 = i sqrt(2m)/(m - E) L psi2 = i (psi2' + W psi2)/(m - E)
    scalar:       psi1 = (-psi2' + W psi2)/E

    ``psi2`` is either a callable or samples on the uniform grid ``x``; with
    samples, ``dpsi2`` may supply the exact derivative.
    """
    if pair.kind == PSEUDOSCALAR and E == m:
        raise ThresholdEnergy("E = m: the intertwining constant diverges")
    if pair.kind == SCALAR and E == 0:
        raise ThresholdEnergy("E = 0: the intertwining constant diverges")
    if callable(psi2):
        xs = np.asarray(x, float)
        f, df = psi2(xs), _d1(psi2, xs, 1e-4)
    else:
        xs = np.asarray(x, float)
        f = np.asarray(psi2, complex)
        df = _fd_samples(f, xs) if dpsi2 is None else np.asarray(dpsi2, complex)
    W = pair.W(xs)
    if pair.kind == PSEUDOSCALAR:
        return 1j * (df + W * f) / (m - E)
    return (-df + W * f) / E


def partner_channel(k_minus: complex, k_plus: complex) -> AsymptoticChannel:
    """Schroedinger channels (1, +-ik) used for partner-potential results."""
    return AsymptoticChannel(k_minus, k_plus, 1j * k_minus, 1j * k_plus, -1j * k_minus, -1j * k_plus)

