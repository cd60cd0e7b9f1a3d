import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate

from conftest import momentum
from diracpt import analytic
from diracpt.errors import OutOfStatedDomain, ShiftDomain, ZeroShift
from diracpt.potentials import make_model


@given(st.floats(0.05, 30))
def test_gamma_matches_math(x):
    assert abs(analytic.gamma(x) - math.gamma(x)) <= 1e-13 * math.gamma(x)


@given(st.floats(-4.9, -0.05).filter(lambda v: abs(v - round(v)) > 1e-3))
def test_gamma_reflection(x):
    assert abs(analytic.gamma(x) - math.gamma(x)) <= 1e-12 * abs(math.gamma(x))


def test_gamma_pole():
    with pytest.raises(ValueError):
        analytic.gamma(-2.0)


def test_poeschl_teller_oracle():
    ps = analytic.poeschl_teller_scattering(2.0, 1.0, 2.5)
    k = momentum(2.5, 1.0, 4.0)
    assert abs(ps.partner2.T_LR + (1 - 1j * k) / (1 + 1j * k)) < 1e-15
    assert abs(abs(ps.partner1.T_LR) - 1) < 1e-15


def test_super_scarf_product_domain():
    with pytest.raises(OutOfStatedDomain):
        analytic.super_scarf_transmission(2, 1, 1.0, 3.0, 1)
    T = analytic.super_scarf_transmission(2, 1, 1.0, 3.0, 1, enforce_domain=False)
    assert abs(abs(T) - 1) < 1e-14
    assert analytic.super_scarf_levels(2, 1, 1.0, 2) == [2.0, 1.0, 0.5]
    assert analytic.super_scarf_levels(2, 1, 1.0, 1) == [1.0, 0.5]


def test_centrifugal_zero_mode_beta_and_norm():
    zm = analytic.centrifugal_zero_mode(1.0, 1.0, 0.1)
    assert zm.beta == pytest.approx(math.sqrt(17), abs=1e-14)
    assert zm.bound_exists and zm.normalizable and not zm.ambiguous

    def dens(x):
        a, b = zm.spinor(np.array([x]))
        return abs(a[0]) ** 2 + abs(b[0]) ** 2

    q = sum(integrate.quad(dens, lo, hi, epsabs=0, epsrel=1e-12, limit=400)[0]
            for lo, hi in ((-np.inf, -1), (-1, 1), (1, np.inf)))
    assert abs(q - 1) <= 1e-8


def test_centrifugal_zero_mode_regimes():
    amb = analytic.centrifugal_zero_mode(0.1, 1.0, 0.1)   # beta = sqrt(2.6)
    assert amb.ambiguous and amb.alpha2_norm_sq is None
    with pytest.raises(ValueError):
        amb.spinor(np.zeros(1))
    assert not analytic.centrifugal_zero_mode(-0.5, 1.0, 0.1).bound_exists
    assert analytic.centrifugal_zero_mode(-1 / 16, 1.0, 0.1).double_root
    mirror = analytic.centrifugal_zero_mode(-1.0, 1.0, 0.1, "pseudospin")
    assert mirror.E == -1.0 and mirror.beta == pytest.approx(math.sqrt(17))
    with pytest.raises(ZeroShift):
        analytic.centrifugal_zero_mode(1.0, 1.0, 0.0)


def test_centrifugal_transparency_oracle():
    r = analytic.centrifugal_scattering(0.5, 1.0, 1.5)
    assert r.T_LR == 1 and r.R_LR == 0


def test_scalar_bound_state_norm():
    bs = analytic.scalar_exact_bound_state(1.0, 1.0, 0.3)
    assert bs.kappa == pytest.approx(1 / math.sqrt(5), abs=1e-15)
    x = np.linspace(-60, 60, 2401)
    p1, p2 = bs.phi(x)
    k, e = bs.kappa, 0.3
    assert bs.N1_sq == pytest.approx(math.sin(k * e) * math.cos(k * e) / (4 * e), rel=1e-15)
    assert np.all(np.isfinite(p1)) and np.all(np.isfinite(p2))
    with pytest.raises(ShiftDomain):
        analytic.scalar_exact_bound_state(1.0, 1.0, 0.0)
    with pytest.raises(ShiftDomain):
        analytic.scalar_exact_bound_state(1.0, 1.0, 4.0)


def test_scalar_scattering_oracle():
    k = 0.7
    E = math.sqrt(1 + k * k)
    r = analytic.scalar_exact_scattering(1.0, 1.0, E)
    kb = 1 / math.sqrt(5)
    assert abs(r.T_LR - (1j * k - kb) / (1j * k + kb)) < 1e-15


@pytest.mark.parametrize("c", [0.4, -0.2, -0.5, -0.9])
def test_riccati_constant_partner(c):
    rp = analytic.riccati_constant_partner(c, 1.0, 0.2j)
    x = np.linspace(-1.0, 1.0, 41)
    h = 1e-4
    W = rp.W(x)
    dW = (-rp.W(x + 2 * h) + 8 * rp.W(x + h) - 8 * rp.W(x - h) + rp.W(x - 2 * h)) / (12 * h)
    U1 = (W * W - 1.0 - dW) / 2.0
    U2 = (W * W - 1.0 + dW) / 2.0
    assert np.max(np.abs(U1 - c)) < 1e-8
    assert np.max(np.abs(U2 - rp.U2(x))) < 1e-8


def test_pseudoscalar_closed_forms_normalized():
    recs = analytic.pseudoscalar_bound_states(make_model("nogami_toyama", lam=2.0))
    assert sorted(round(r.eps_eff.real, 12) for r in recs) == [0.0, 1.5]
    for r in recs:
        dens = np.sum(np.abs(r.psi) ** 2, axis=0)
        assert integrate.simpson(dens, x=r.x) == pytest.approx(1.0, abs=1e-8)
