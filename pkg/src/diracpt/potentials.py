"""Potential models: the catalog families and user expressions.

A model provides ``(V, S, P)`` at real ``x``, its asymptotic limits, a tail
class (used to size the integration box) and a PT self-check. Catalog models
are ``(cV, cS, cP) * f(x)`` for a shape ``f`` from :mod:`diracpt.shapes`, so
the compiled kernel can evaluate them without Python callbacks.

Catalog (name: parameters, defaults)

=================  ==============================================================
free               m=1
scarf_dirac        l=1, n=1, c=1, mode=spin|pseudospin, m=1
centrifugal        c_prime=0.5, eps=0.1, m=1, mode=spin|pseudospin
nogami_toyama      lam=2, eps=0.1, m=1          (pseudoscalar, P(+-inf) = -+lam)
poeschl_teller     lam=2, eps=0.1, m=1          (P = -P_NT, upper component sees
                                                 the Poeschl-Teller well)
super_scarf        n=2, l=1, m=1                (pseudoscalar, P(+-inf) = +-n)
scalar_one_bound   c_S=1, eps=0.1, m=1          (scalar, one bound state)
=================  ==============================================================
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np

from . import shapes
from .core import AsymptoticLimits
from .errors import (ConfigError, LimitMismatch, NotPTSymmetric, PoleOnAxis,
                     UnknownModel, ZeroShift)
from .exprdsl import Expression

SCHEMA = "dirac1d-pt/1"
DEFAULT_EPS = 0.1
PT_GRID = np.linspace(-10.0, 10.0, 101)
PT_TOL = 1e-10
POLE_SCREEN_STEP = 1e-3
POLE_SCREEN_TOL = 1e-8


@dataclass(frozen=True)
class Tail:
    kind: str               # exponential | algebraic | constant
    rate: float = 0.0       # exponential decay rate, or algebraic power

    def __post_init__(self):
        if self.kind not in ("exponential", "algebraic", "constant"):
            raise ConfigError(f"unknown tail kind {self.kind!r}")
        if self.kind != "constant" and not self.rate > 0:
            raise ConfigError("tail rate/power must be positive")

    @classmethod
    def exponential(cls, rate: float) -> "Tail":
        return cls("exponential", float(rate))

    @classmethod
    def algebraic(cls, power: float) -> "Tail":
        return cls("algebraic", float(power))

    @classmethod
    def constant(cls) -> "Tail":
        return cls("constant", 0.0)

    def bound(self, L: float) -> float:
        """Size of the tail correction at distance ``L``."""
        if self.kind == "exponential":
            return math.exp(-self.rate * L)
        if self.kind == "algebraic":
            return L ** (-self.rate)
        return 0.0

    def default_L(self) -> float:
        if self.kind == "exponential":
            return max(12.0, 30.0 / self.rate)
        if self.kind == "algebraic":
            return 200.0
        return 12.0

    def as_dict(self) -> dict:
        d = {"kind": self.kind}
        if self.kind == "exponential":
            d["rate"] = self.rate
        elif self.kind == "algebraic":
            d["power"] = self.rate
        return d

    @classmethod
    def from_dict(cls, d: Mapping) -> "Tail":
        kind = d.get("kind", "exponential")
        if kind == "exponential":
            return cls.exponential(d.get("rate", 1.0))
        if kind == "algebraic":
            return cls.algebraic(d.get("power", 2.0))
        return cls.constant()


@dataclass(frozen=True, eq=False)
class PotentialModel:
    """Complex potential triple with limits, tail class and PT metadata."""

    label: str
    kind: str
    params: dict
    limits: AsymptoticLimits
    tail: Tail
    eps: float = 0.0
    couplings: tuple[float, float, float] | None = None   # (cV, cS, cP) for shape models
    shape: int = shapes.CALLBACK
    shape_params: tuple[float, ...] = ()
    expressions: tuple[Expression, Expression, Expression] | None = None
    derived: dict = field(default_factory=dict)
    pt_symmetric: bool = True

    # -- evaluation
    def f(self, x):
        """Catalog shape f and f' at ``x``."""
        if self.shape == shapes.CALLBACK:
            raise TypeError("expression models have no catalog shape")
        return shapes.value_and_derivative(self.shape, self.shape_params, x)

    def eval(self, x):
        """``(V, S, P)`` at ``x`` (scalar or array)."""
        if self.shape != shapes.CALLBACK:
            f, _ = self.f(x)
            cV, cS, cP = self.couplings
            return cV * f, cS * f, cP * f
        xa = np.asarray(x, dtype=float)
        out = tuple(np.broadcast_to(np.asarray(e(xa), complex), xa.shape).copy()
                    for e in self.expressions)
        return out

    def derivatives(self, x):
        """``(V', S', P')``: analytic for catalog shapes, central differences otherwise."""
        if self.shape != shapes.CALLBACK:
            _, df = self.f(x)
            cV, cS, cP = self.couplings
            return cV * df, cS * df, cP * df
        xa = np.asarray(x, dtype=float)
        h = 1e-6 * np.maximum(1.0, np.abs(xa))
        hi, lo = self.eval(xa + h), self.eval(xa - h)
        return tuple((a - b) / (2.0 * h) for a, b in zip(hi, lo))

    @property
    def is_catalog(self) -> bool:
        return self.shape != shapes.CALLBACK

    @property
    def m(self) -> float | None:
        return self.params.get("m")

    def kernel_shape(self):
        """``(code, params, couplings)`` for the compiled kernel, or None."""
        if self.shape == shapes.CALLBACK:
            return None
        sp = np.zeros(shapes.NPARAM)
        sp[:len(self.shape_params)] = self.shape_params
        return self.shape, sp, self.couplings

    # -- classification
    def components_present(self, grid=None, tol: float = 1e-14) -> tuple[bool, bool, bool]:
        if self.couplings is not None:
            return tuple(c != 0 for c in self.couplings)
        g = PT_GRID if grid is None else grid
        return tuple(bool(np.max(np.abs(c)) > tol) for c in self.eval(g))

    # -- checks
    def pt_residual(self, grid=PT_GRID) -> float:
        """Max of |V*(-x) - V(x)|, |S*(-x) - S(x)|, |P*(-x) + P(x)|, scaled by max(1, |g|)."""
        g = np.asarray(grid, float)
        V, S, P = self.eval(g)
        Vr, Sr, Pr = self.eval(-g)
        res = 0.0
        for a, b, sgn in ((V, Vr, 1.0), (S, Sr, 1.0), (P, Pr, -1.0)):
            scale = np.maximum(1.0, np.abs(a))
            res = max(res, float(np.max(np.abs(np.conj(b) - sgn * a) / scale)))
        return res

    def check_pt(self, tol: float = PT_TOL) -> float:
        r = self.pt_residual()
        if self.pt_symmetric and r > tol:
            raise NotPTSymmetric(f"{self.label}: PT residual {r:.3g} exceeds {tol:g}")
        return r

    def limit_residual(self, L: float | None = None) -> tuple[float, float]:
        """(residual, allowed) for sampled values at +-L against declared limits."""
        if L is None:
            L = self.tail.default_L()
        lo, hi = self.eval(np.array([-L])), self.eval(np.array([L]))
        lim = self.limits
        res = max(abs(lo[0][0] - lim.V_minus), abs(lo[1][0] - lim.S_minus), abs(lo[2][0] - lim.P_minus),
                  abs(hi[0][0] - lim.V_plus), abs(hi[1][0] - lim.S_plus), abs(hi[2][0] - lim.P_plus))
        scale = 1.0 + max(abs(v) for v in lim.as_dict().values())
        allowed = max(10.0 * self.tail.bound(L), 1e-9) * scale
        return float(res), allowed

    def screen_poles(self, L: float | None = None) -> None:
        if L is None:
            L = self.tail.default_L() * (2.0 if self.tail.kind == "algebraic" else 1.0)
        if self.shape == shapes.CALLBACK:
            return
        n = int(round(2 * L / POLE_SCREEN_STEP)) + 1
        x = np.linspace(-L, L, n)
        for d in shapes.denominators(self.shape, self.shape_params, x):
            i = int(np.argmin(d))
            if d[i] < POLE_SCREEN_TOL:
                raise PoleOnAxis(f"{self.label}: denominator {d[i]:.3g} near x={x[i]:.6g}")

    # -- DSL and serialization
    def dsl_sources(self) -> tuple[str, str, str, dict]:
        """Source strings reproducing this model in the expression language."""
        if self.expressions is not None:
            return (*(e.source for e in self.expressions), dict(self.expressions[0].bindings))
        src = _SHAPE_SOURCES[self.shape]
        cV, cS, cP = self.couplings
        names = _SHAPE_PARAMS[self.shape]
        b = {k: v for k, v in zip(names, self.shape_params)}

        def scaled(c):
            if c == 0:
                return "0"
            return f"({repr(abs(float(c)))})*({src})" if c > 0 else f"-({repr(abs(float(c)))})*({src})"

        return scaled(cV), scaled(cS), scaled(cP), b

    def to_dict(self) -> dict:
        params = dict(self.params)
        if self.expressions is not None:
            V, S, P, b = self.dsl_sources()
            params = {"V": V, "S": S, "P": P,
                      "bindings": {k: _cx(v) for k, v in b.items()}}
        return {
            "schema": SCHEMA,
            "label": self.label,
            "kind": self.kind,
            "params": params,
            "limits": {k: _cx(v) for k, v in self.limits.as_dict().items()},
            "tail": self.tail.as_dict(),
            "eps": self.eps,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def _cx(z: complex):
    z = complex(z)
    return [z.real, z.imag]


def _uncx(v) -> complex:
    if isinstance(v, (list, tuple)):
        return complex(v[0], v[1])
    return complex(v)


_SHAPE_SOURCES = {
    shapes.FREE: "0",
    shapes.SCARF: "-A/cosh(x)^2 + i*B*sinh(x)/cosh(x)^2",
    shapes.CENTRIFUGAL: "1/(x+i*eps)^2",
    shapes.NOGAMI_TOYAMA: "tanh(x+i*eps) + (lam^2-1)/(tanh(x+i*eps) - lam*coth(lam*(x+i*eps)))",
    shapes.SUPER_SCARF: "n*tanh(x) + i*l/cosh(x)",
    shapes.SCALAR_ONE_BOUND: "-2*kap^2/(m + EB*cosh(2*kap*(x+i*eps)))",
}
_SHAPE_PARAMS = {
    shapes.FREE: (),
    shapes.SCARF: ("A", "B"),
    shapes.CENTRIFUGAL: ("eps",),
    shapes.NOGAMI_TOYAMA: ("lam", "eps"),
    shapes.SUPER_SCARF: ("n", "l"),
    shapes.SCALAR_ONE_BOUND: ("kap", "EB", "m", "eps"),
}


def _finish(model: PotentialModel, screen: bool = True) -> PotentialModel:
    if screen:
        model.screen_poles()
    model.check_pt()
    return model


def _check_m(m: float) -> float:
    m = float(m)
    if not m > 0:
        raise ConfigError(f"mass must be positive, got {m!r}")
    return m


# ---------------------------------------------------------------- catalog

def make_free(m: float = 1.0) -> PotentialModel:
    m = _check_m(m)
    return PotentialModel("free", "free", {"m": m}, AsymptoticLimits(), Tail.constant(),
                          couplings=(0.0, 0.0, 0.0), shape=shapes.FREE)


def scarf_f_coefficients(l: int, n: int, m: float) -> tuple[float, float]:
    """(A, B) with f = -A sech^2 x + iB sinh x / cosh^2 x."""
    return (l * l + n * (n + 1)) / (2.0 * m), l * (2 * n + 1) / (2.0 * m)


def make_scarf_vector_scalar(l: int = 1, n: int = 1, c: float = 1.0, mode: str = "spin",
                             m: float = 1.0) -> PotentialModel:
    """Hyperbolic Scarf shape as V = c f, S = +-c f (spin / pseudo-spin symmetric)."""
    m = _check_m(m)
    if int(l) != l or int(n) != n:
        raise ConfigError("l and n must be integers")
    if mode not in ("spin", "pseudospin"):
        raise ConfigError("mode must be 'spin' or 'pseudospin'")
    A, B = scarf_f_coefficients(int(l), int(n), m)
    cS = c if mode == "spin" else -c
    return _finish(PotentialModel(
        "scarf_dirac", "scarf_dirac", {"l": int(l), "n": int(n), "c": float(c), "mode": mode, "m": m},
        AsymptoticLimits(), Tail.exponential(1.0),
        couplings=(float(c), float(cS), 0.0), shape=shapes.SCARF, shape_params=(A, B)))


def make_centrifugal(eps: float = DEFAULT_EPS, c_prime: float = 0.5, m: float = 1.0,
                     mode: str = "spin") -> PotentialModel:
    """V = S = c'/(x + i eps)^2 (mode 'spin'), or V = -S = c''/(x + i eps)^2 ('pseudospin')."""
    m = _check_m(m)
    if eps == 0:
        raise ZeroShift("the centrifugal potential needs a non-zero shift eps")
    if mode not in ("spin", "pseudospin"):
        raise ConfigError("mode must be 'spin' or 'pseudospin'")
    c = float(c_prime)
    cS = c if mode == "spin" else -c
    return _finish(PotentialModel(
        "centrifugal", "centrifugal", {"c_prime": c, "eps": float(eps), "m": m, "mode": mode},
        AsymptoticLimits(), Tail.algebraic(2.0), eps=float(eps),
        couplings=(c, cS, 0.0), shape=shapes.CENTRIFUGAL, shape_params=(float(eps),)))


def _nt(lam, eps, m, sign, label):
    m = _check_m(m)
    lam = float(lam)
    if lam < 1.0:
        raise ConfigError("lambda must be >= 1")
    lim = AsymptoticLimits(P_minus=sign * lam, P_plus=-sign * lam)
    return _finish(PotentialModel(
        label, label, {"lam": lam, "eps": float(eps), "m": m}, lim, Tail.exponential(2.0),
        eps=float(eps), couplings=(0.0, 0.0, float(sign)), shape=shapes.NOGAMI_TOYAMA,
        shape_params=(lam, float(eps))))


def make_nogami_toyama(lam: float = 2.0, eps: float = DEFAULT_EPS, m: float = 1.0) -> PotentialModel:
    """Pseudoscalar P = tanh z + (lam^2-1)/(tanh z - lam coth(lam z)), z = x + i eps."""
    return _nt(lam, eps, m, 1.0, "nogami_toyama")


def make_poeschl_teller(lam: float = 2.0, eps: float = DEFAULT_EPS, m: float = 1.0) -> PotentialModel:
    """P = -P_NT: the upper component then sees (lam^2 - 2 sech^2 z)/(2m).

    This is the Dirac model whose Schroedinger partner U1 is the reflectionless
    Poeschl-Teller well generated by the Nogami-Toyama superpotential.
    """
    return _nt(lam, eps, m, -1.0, "poeschl_teller")


def make_super_scarf(n: int = 2, l: int = 1, m: float = 1.0) -> PotentialModel:
    """Pseudoscalar P = n tanh x + i l / cosh x."""
    m = _check_m(m)
    if int(l) != l or int(n) != n:
        raise ConfigError("l and n must be integers")
    n, l = int(n), int(l)
    lim = AsymptoticLimits(P_minus=-n, P_plus=n)
    return _finish(PotentialModel(
        "super_scarf", "super_scarf", {"n": n, "l": l, "m": m}, lim, Tail.exponential(1.0),
        couplings=(0.0, 0.0, 1.0), shape=shapes.SUPER_SCARF, shape_params=(float(n), float(l))))


def scalar_one_bound_constants(c_S: float, m: float) -> dict:
    r = math.sqrt(c_S * c_S + 4.0)
    EB = 2.0 * m / r
    kap = c_S * m / r
    return {"E_B": EB, "kappa_B": kap, "lambda_B": 0.5 * math.acosh(m / EB)}


def make_scalar_one_bound(c_S: float = 1.0, eps: float = DEFAULT_EPS, m: float = 1.0) -> PotentialModel:
    """S = -2 kappa_B^2 / (m + E_B cosh(2 kappa_B (x + i eps)))."""
    m = _check_m(m)
    if not c_S > 0:
        raise ConfigError("c_S must be positive")
    d = scalar_one_bound_constants(float(c_S), m)
    return _finish(PotentialModel(
        "scalar_one_bound", "scalar_one_bound", {"c_S": float(c_S), "eps": float(eps), "m": m},
        AsymptoticLimits(), Tail.exponential(2.0 * d["kappa_B"]), eps=float(eps),
        couplings=(0.0, 1.0, 0.0), shape=shapes.SCALAR_ONE_BOUND,
        shape_params=(d["kappa_B"], d["E_B"], m, float(eps)), derived=d))


def make_from_expressions(V_src: str, S_src: str, P_src: str,
                          limits: AsymptoticLimits | None = None,
                          tail: Tail | None = None,
                          bindings: Mapping[str, complex] | None = None,
                          eps: float = 0.0, label: str = "expression",
                          m: float | None = None, pt_symmetric: bool = True,
                          L_check: float | None = None) -> PotentialModel:
    """Model from three DSL sources; declared limits are checked at +-L_check."""
    b = dict(bindings or {})
    exprs = tuple(Expression.compile(s or "0", b) for s in (V_src, S_src, P_src))
    limits = limits or AsymptoticLimits()
    tail = tail or Tail.exponential(1.0)
    params = {"V": V_src, "S": S_src, "P": P_src}
    if m is not None:
        params["m"] = _check_m(m)
    model = PotentialModel(label, "expression", params, limits, tail, eps=float(eps),
                           expressions=exprs, pt_symmetric=pt_symmetric)
    res, allowed = model.limit_residual(L_check)
    if not res <= allowed:
        raise LimitMismatch(f"sampled tails differ from declared limits by {res:.3g} (allowed {allowed:.3g})")
    if pt_symmetric:
        model.check_pt()
    return model


# ---------------------------------------------------------------- registry

@dataclass(frozen=True)
class CatalogEntry:
    name: str
    factory: Callable[..., PotentialModel]
    defaults: dict
    description: str


CATALOG: dict[str, CatalogEntry] = {
    e.name: e for e in (
        CatalogEntry("free", make_free, {"m": 1.0}, "zero potential"),
        CatalogEntry("scarf_dirac", make_scarf_vector_scalar,
                     {"l": 1, "n": 1, "c": 1.0, "mode": "spin", "m": 1.0},
                     "hyperbolic Scarf shape as vector+scalar (spin or pseudo-spin symmetric)"),
        CatalogEntry("centrifugal", make_centrifugal,
                     {"c_prime": 0.5, "eps": DEFAULT_EPS, "m": 1.0, "mode": "spin"},
                     "regularized centrifugal c'/(x+i eps)^2 as vector+scalar"),
        CatalogEntry("nogami_toyama", make_nogami_toyama,
                     {"lam": 2.0, "eps": DEFAULT_EPS, "m": 1.0},
                     "Nogami-Toyama pseudoscalar superpotential"),
        CatalogEntry("poeschl_teller", make_poeschl_teller,
                     {"lam": 2.0, "eps": DEFAULT_EPS, "m": 1.0},
                     "P = -P_NT; upper component sees the Poeschl-Teller well"),
        CatalogEntry("super_scarf", make_super_scarf, {"n": 2, "l": 1, "m": 1.0},
                     "pseudoscalar n tanh x + i l sech x"),
        CatalogEntry("scalar_one_bound", make_scalar_one_bound,
                     {"c_S": 1.0, "eps": DEFAULT_EPS, "m": 1.0},
                     "scalar potential with one bound state"),
    )
}

_INT_PARAMS = {"l", "n"}
_STR_PARAMS = {"mode"}


def coerce_params(name: str, raw: Mapping[str, object]) -> dict:
    """Validate and type-convert catalog parameters (strings allowed)."""
    if name not in CATALOG:
        raise UnknownModel(f"unknown model {name!r}; choose from {', '.join(sorted(CATALOG))}")
    entry = CATALOG[name]
    out = dict(entry.defaults)
    for k, v in raw.items():
        if k not in entry.defaults:
            raise ConfigError(f"model {name!r} has no parameter {k!r} "
                              f"(parameters: {', '.join(entry.defaults)})")
        try:
            if k in _STR_PARAMS:
                out[k] = str(v)
            elif k in _INT_PARAMS:
                fv = float(v)
                if fv != int(fv):
                    raise ValueError
                out[k] = int(fv)
            else:
                out[k] = float(v)
        except (TypeError, ValueError):
            raise ConfigError(f"bad value {v!r} for parameter {k!r}") from None
    return out


def make_model(name: str, **params) -> PotentialModel:
    params = coerce_params(name, params)
    return CATALOG[name].factory(**params)


def model_from_dict(d: Mapping) -> PotentialModel:
    kind = d.get("kind")
    params = d.get("params", {})
    if kind == "expression":
        lim = AsymptoticLimits(**{k: _uncx(v) for k, v in d.get("limits", {}).items()})
        b = {k: _uncx(v) for k, v in params.get("bindings", {}).items()}
        return make_from_expressions(params.get("V", "0"), params.get("S", "0"), params.get("P", "0"),
                                     lim, Tail.from_dict(d.get("tail", {})), b,
                                     eps=d.get("eps", 0.0), label=d.get("label", "expression"),
                                     m=params.get("m"))
    return make_model(kind, **params)
