import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import energy_for_k
from diracpt import _kernels_py, integrator, kernels
from diracpt.core import PhysicalParams
from diracpt.errors import ConfigError, NotScattering, WrongPotentialClass
from diracpt.integrator import (IntegratorConfig, ReducedEquation, reduce_schrodinger, scatter,
                                scatter_schrodinger)
from diracpt.potentials import make_model


def test_free_particle_is_transparent():
    r = scatter(make_model("free"), PhysicalParams(1.0, 1.7))
    assert abs(r.T_LR - 1) < 1e-9 and abs(r.T_RL - 1) < 1e-9
    assert abs(r.R_LR) < 1e-9 and abs(r.R_RL) < 1e-9
    assert r.pt_exact.holds


@given(st.floats(0.15, 3.0))
@settings(max_examples=15, deadline=None)
def test_poeschl_teller_unit_transmission(k):
    model = make_model("poeschl_teller", lam=2.0)
    r = scatter(model, PhysicalParams(1.0, energy_for_k(model, k)))
    assert abs(abs(r.T_LR) - 1) <= 1e-8
    assert abs(r.T_LR / r.T_RL - cmath.exp(1j * r.nu_phase)) <= 1e-8
    assert r.wronskian_drift <= 1e-8


@given(st.floats(0.2, 2.5), st.integers(1, 3))
@settings(max_examples=10, deadline=None)
def test_super_scarf_phase_ratio(k, n):
    model = make_model("super_scarf", n=n, l=1)
    r = scatter(model, PhysicalParams(1.0, energy_for_k(model, k)))
    assert abs(r.T_LR / r.T_RL - cmath.exp(1j * r.nu_phase)) <= 1e-8
    if r.pt_exact.holds:
        assert max(abs(r.R_LR), abs(r.R_RL), r.unitarity_defect) <= 1e-6


def test_spin_reduction_matches_dirac():
    model = make_model("scarf_dirac", l=1, n=1, c=1.0)
    p = PhysicalParams(1.0, 1.8)
    d = scatter(model, p)
    s = scatter_schrodinger(reduce_schrodinger(model, p, "spin"))
    # the upper component carries the same reflection and transmission amplitudes
    assert abs(abs(d.T_LR) - abs(s.T_LR)) < 1e-7
    assert abs(abs(d.R_LR) - abs(s.R_LR)) < 1e-7


def test_expression_and_catalog_agree():
    from diracpt.potentials import make_from_expressions
    model = make_model("nogami_toyama", lam=2.0)
    V, S, P, b = model.dsl_sources()
    twin = make_from_expressions(V, S, P, model.limits, model.tail, b, eps=model.eps)
    p = PhysicalParams(1.0, energy_for_k(model, 1.1))
    a, c = scatter(model, p), scatter(twin, p)
    assert abs(a.T_LR - c.T_LR) < 1e-8 and abs(a.R_RL - c.R_RL) < 1e-8


def test_reduction_class_checks():
    p = PhysicalParams(1.0, 2.0)
    with pytest.raises(WrongPotentialClass):
        reduce_schrodinger(make_model("nogami_toyama"), p, "spin")
    with pytest.raises(WrongPotentialClass):
        reduce_schrodinger(make_model("scarf_dirac"), p, "pseudoscalar1")
    with pytest.raises(ConfigError):
        reduce_schrodinger(make_model("scarf_dirac"), p, "bogus")


def test_below_continuum_is_not_scattering():
    red = reduce_schrodinger(make_model("nogami_toyama", lam=2.0), PhysicalParams(1.0, 1.5), "pseudoscalar2")
    with pytest.raises(NotScattering):
        scatter_schrodinger(red)


def test_config_validation():
    with pytest.raises(ConfigError):
        IntegratorConfig(L=-1)
    with pytest.raises(ConfigError):
        IntegratorConfig(rtol=0)


def test_richardson_improves_algebraic_tail():
    model = make_model("centrifugal", c_prime=0.5)
    p = PhysicalParams(1.0, 1.5)
    raw = scatter(model, p, IntegratorConfig(richardson=False, adiabatic=False))
    ext = scatter(model, p)
    assert abs(ext.T_LR - 1) < abs(raw.T_LR - 1)
    assert abs(ext.T_LR - 1) <= 1e-4


@pytest.mark.skipif(kernels.BACKEND != "compiled", reason="compiled extension not built")
@pytest.mark.parametrize("name,kw,E", [("poeschl_teller", {"lam": 2.0}, 2.5),
                                        ("scarf_dirac", {}, 1.5),
                                        ("scalar_one_bound", {}, 1.5)])
def test_backends_agree(name, kw, E):
    from diracpt import _kernels
    model = make_model(name, **kw)
    system = integrator.dirac_system(model, E, 1.0)
    cfg = IntegratorConfig()
    L = cfg.box(model.tail)
    y0 = np.eye(2, dtype=complex)
    out = []
    for be in (_kernels, _kernels_py):
        y, ls, *_ = be.integrate(system.kind, system.sp, system.mode, system.mp, system.coef_fn,
                                 -L, L, y0, cfg.rtol, cfg.atol, int(cfg.max_steps), 0.0, None)
        out.append(y * np.exp(ls))
    assert np.max(np.abs(out[0] - out[1])) / np.max(np.abs(out[1])) < 1e-9


def test_nonrelativistic_scarf_reflectionless():
    model = make_model("scarf_dirac", l=1, n=1, c=1.0)
    for k in (0.4, 1.2):
        r = scatter_schrodinger(ReducedEquation(model, "spin", 1.0, 0j, k * k / 2, 1.0, 0j, 0j))
        assert max(abs(r.R_LR), abs(r.R_RL)) <= 1e-6
