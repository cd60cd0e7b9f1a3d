import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from diracpt import potentials as pot
from diracpt.core import AsymptoticLimits
from diracpt.errors import (ConfigError, LimitMismatch, NotPTSymmetric, UnknownModel, ZeroShift)

GRID = np.linspace(-6.0, 6.0, 241)

CATALOG_CASES = [
    ("free", {}),
    ("scarf_dirac", {"l": 1, "n": 1, "c": 1.0}),
    ("scarf_dirac", {"l": 2, "n": 3, "c": 0.5, "mode": "pseudospin"}),
    ("centrifugal", {"c_prime": 1.0}),
    ("centrifugal", {"c_prime": -0.5, "eps": -0.2, "mode": "pseudospin"}),
    ("nogami_toyama", {"lam": 2.0}),
    ("poeschl_teller", {"lam": 3.0, "eps": 0.3}),
    ("super_scarf", {"n": 2, "l": 1}),
    ("scalar_one_bound", {"c_S": 1.0}),
    ("scalar_one_bound", {"c_S": 0.7, "eps": 0.3}),
]


@pytest.mark.parametrize("name,kw", CATALOG_CASES)
def test_catalog_is_pt_symmetric(name, kw):
    model = pot.make_model(name, **kw)
    assert model.pt_residual() <= 1e-10
    assert model.limits.is_pt_symmetric()


@pytest.mark.parametrize("name,kw", CATALOG_CASES)
def test_catalog_limits_match_samples(name, kw):
    model = pot.make_model(name, **kw)
    res, allowed = model.limit_residual()
    assert res <= allowed


@pytest.mark.parametrize("name,kw", CATALOG_CASES)
def test_catalog_reexpressed_in_dsl(name, kw):
    """Every catalog potential has a DSL form agreeing to 1e-12."""
    model = pot.make_model(name, **kw)
    V, S, P, b = model.dsl_sources()
    twin = pot.make_from_expressions(V, S, P, model.limits, model.tail, b, eps=model.eps,
                                     m=model.params.get("m"))
    for a, c in zip(model.eval(GRID), twin.eval(GRID)):
        assert np.max(np.abs(a - c) / np.maximum(1, np.abs(a))) <= 1e-12


@pytest.mark.parametrize("name,kw", CATALOG_CASES)
def test_serialization_round_trip(name, kw):
    model = pot.make_model(name, **kw)
    d = json.loads(model.to_json())
    assert d["schema"] == pot.SCHEMA
    back = pot.model_from_dict(d)
    for a, c in zip(model.eval(GRID), back.eval(GRID)):
        assert np.array_equal(a, c)


def test_expression_model_round_trip():
    model = pot.make_from_expressions("a/cosh(x)^2", "0", "b*tanh(x) + i*b/cosh(x)",
                                      AsymptoticLimits(P_minus=-0.5, P_plus=0.5),
                                      pot.Tail.exponential(1.0), {"a": -1.0, "b": 0.5})
    back = pot.model_from_dict(json.loads(model.to_json()))
    for a, c in zip(model.eval(GRID), back.eval(GRID)):
        assert np.allclose(a, c, rtol=0, atol=1e-15)


def test_derivatives_match_finite_differences():
    model = pot.make_model("nogami_toyama", lam=2.0)
    h = 1e-5
    d = model.derivatives(GRID)
    fp, fm = model.eval(GRID + h), model.eval(GRID - h)
    for dc, a, b in zip(d, fp, fm):
        assert np.max(np.abs(dc - (a - b) / (2 * h))) < 1e-7


@given(st.integers(0, 4), st.integers(0, 4), st.floats(0.1, 2.0))
@settings(max_examples=30, deadline=None)
def test_scarf_family_pt_symmetric(l, n, c):
    model = pot.make_model("scarf_dirac", l=l, n=n, c=c)
    assert model.pt_residual() <= 1e-10


@given(st.floats(1.0, 4.0), st.floats(-0.4, 0.4).filter(lambda e: abs(e) > 1e-3))
@settings(max_examples=30, deadline=None)
def test_nogami_toyama_family_pt_symmetric(lam, eps):
    model = pot.make_model("nogami_toyama", lam=lam, eps=eps)
    assert model.pt_residual() <= 1e-10


def test_errors():
    with pytest.raises(UnknownModel):
        pot.make_model("nope")
    with pytest.raises(ConfigError):
        pot.make_model("free", lam=2)
    with pytest.raises(ConfigError):
        pot.make_model("nogami_toyama", lam=0.5)
    with pytest.raises(ZeroShift):
        pot.make_model("centrifugal", eps=0.0)
    with pytest.raises(LimitMismatch):
        pot.make_from_expressions("tanh(x)", "0", "0")
    with pytest.raises(NotPTSymmetric):
        pot.make_from_expressions("i/cosh(x+1)^2", "0", "0", tail=pot.Tail.exponential(2.0))


def test_string_parameters_are_coerced():
    model = pot.make_model("super_scarf", n="3", l="1")
    assert model.params["n"] == 3 and isinstance(model.params["n"], int)
