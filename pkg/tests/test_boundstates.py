import math

import numpy as np
import pytest

from diracpt import boundstates
from diracpt.core import PhysicalParams
from diracpt.errors import NoBracket, UnsupportedModel, WrongPotentialClass
from diracpt.integrator import reduce_schrodinger
from diracpt.potentials import make_model


def levels(model, which, E=1.5):
    return sorted(r.eps_eff.real for r in boundstates.shoot(reduce_schrodinger(model, PhysicalParams(1.0, E), which)))


def test_poeschl_teller_well_level():
    (eps,) = levels(make_model("poeschl_teller", lam=2.0), "pseudoscalar1")
    assert eps == pytest.approx(1.5, abs=1e-10)


def test_nogami_toyama_two_levels():
    nt = make_model("nogami_toyama", lam=2.0)
    found = levels(nt, "pseudoscalar1") + levels(nt, "pseudoscalar2")
    assert sorted({round(e, 8) for e in found}) == [0.0, 1.5]


def test_records_are_normalized():
    recs = boundstates.shoot(reduce_schrodinger(make_model("scalar_one_bound"), PhysicalParams(1.0, 1.5), "scalar1"))
    assert len(recs) == 1
    r = recs[0]
    assert r.kind == "Bound" and r.method == "shoot"
    from scipy.integrate import simpson
    assert simpson(np.sum(np.abs(r.psi) ** 2, axis=0), x=r.x) == pytest.approx(1.0, abs=1e-10)


def test_scalar_pole_and_shoot_agree():
    model = make_model("scalar_one_bound")
    poles = [p for p in boundstates.transmission_poles(model) if p.E.real > 0]
    shot = boundstates.shoot(reduce_schrodinger(model, PhysicalParams(1.0, 1.5), "scalar1"))
    assert len(poles) == 1
    assert poles[0].kappa == pytest.approx(1 / math.sqrt(5), abs=1e-10)
    assert abs(poles[0].E - shot[0].E) < 1e-8


@pytest.mark.parametrize("name,kw", [("free", {}), ("centrifugal", {"c_prime": 1.0}),
                                     ("scarf_dirac", {"l": 1, "n": 1, "c": -1.0})])
def test_no_spurious_poles(name, kw):
    assert boundstates.transmission_poles(make_model(name, **kw)) == []


def test_empty_bracket():
    red = reduce_schrodinger(make_model("nogami_toyama"), PhysicalParams(1.0, 1.5), "pseudoscalar2")
    with pytest.raises(NoBracket):
        boundstates.shoot(red, eps_bracket=(5.0, 6.0))


def test_energy_dependent_reduction_unsupported():
    red = reduce_schrodinger(make_model("scarf_dirac"), PhysicalParams(1.0, 1.5), "spin")
    with pytest.raises(UnsupportedModel):
        boundstates.shoot(red)


def test_zero_energy_classification():
    assert boundstates.zero_energy_classify(make_model("free")).kind is None
    z = boundstates.zero_energy_classify(make_model("centrifugal", c_prime=1.0))
    assert z.kind == "ZeroMode" and z.E == 1.0 and z.normalizable
    z = boundstates.zero_energy_classify(make_model("poeschl_teller", lam=2.0))
    assert z.kind == "HalfBound"
