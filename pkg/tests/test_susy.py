import numpy as np
import pytest

from conftest import energy_for_k
from diracpt import susy
from diracpt.core import PhysicalParams
from diracpt.errors import SingularMap, ThresholdEnergy, WrongPotentialClass
from diracpt.integrator import reduce_schrodinger, scatter_schrodinger
from diracpt.potentials import make_model

X = np.linspace(-4.0, 4.0, 161)


def gauss(xs):
    xs = np.asarray(xs)
    return np.exp(-0.5 * xs ** 2) * (1 + 0.3j * xs)


@pytest.mark.parametrize("name,kw,zero", [("nogami_toyama", {"lam": 2.0}, 1),
                                          ("poeschl_teller", {"lam": 2.0}, 2),
                                          ("super_scarf", {"n": 2, "l": 1}, 2),
                                          ("scalar_one_bound", {}, None)])
def test_pair_structure(name, kw, zero):
    pair = susy.build_pair(make_model(name, **kw))
    assert pair.zero_mode_partner() == zero
    assert pair.exact == (zero is not None)
    assert susy.verify_factorization(pair, gauss) <= 1e-6
    dW = (pair.W(X + 1e-4) - pair.W(X - 1e-4)) / 2e-4
    sign = 1.0 if pair.kind == susy.PSEUDOSCALAR else -1.0
    assert np.max(np.abs(pair.U1(X) - pair.U2(X) - sign * dW / pair.m)) <= 1e-7


def test_wrong_class():
    with pytest.raises(WrongPotentialClass):
        susy.build_pair(make_model("scarf_dirac"))


def test_partner_map_matches_direct():
    model = make_model("nogami_toyama", lam=2.0)
    pair = susy.build_pair(model)
    Pm, Pp = pair.W_limits()
    for k in (0.5, 1.7):
        p = PhysicalParams(1.0, energy_for_k(model, k))
        red2 = reduce_schrodinger(model, p, "pseudoscalar2")
        km, kp = red2.momenta()
        mapped = susy.map_partner_scattering(scatter_schrodinger(red2), Pm, Pp, km, kp)
        direct = scatter_schrodinger(reduce_schrodinger(model, p, "pseudoscalar1"))
        assert abs(mapped.T_LR - direct.T_LR) <= 1e-6
        assert abs(mapped.T_RL - direct.T_RL) <= 1e-6


def test_partner_map_singular():
    from diracpt.core import ScatteringResult
    with pytest.raises(SingularMap):
        susy.map_partner_scattering(None, -1j, 1.0, 1.0, 1.0)


def test_zero_mode_annihilated():
    pair = susy.build_pair(make_model("nogami_toyama", lam=2.0, eps=0.0))
    # NT zero mode lives in partner 1: M psi = 0 with psi = exp(-int W)
    from diracpt.analytic import nt_zero_mode
    psi = lambda xs: nt_zero_mode(2.0, 0.0, xs)
    assert susy.operator_residual(pair.M_op, pair.W, psi, X) < 1e-8


def test_intertwining_threshold():
    pair = susy.build_pair(make_model("nogami_toyama"))
    with pytest.raises(ThresholdEnergy):
        susy.intertwine_bound_state(pair, gauss, 1.0, 1.0, X)
