import cmath
import math
import random

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from diracpt import exprdsl
from diracpt.errors import (EvaluationPole, ExprSyntaxError, UnboundParameter,
                            UnknownFunction, UnknownIdentifier)
from diracpt.exprdsl import BinOp, Call, Const, Neg, Num, Param, Var

mpmath.mp.dps = 50

CORPUS_SEED = 20240917
CORPUS_SIZE = 500
SAMPLE_X = (-1.7, -0.35, 0.0, 0.6, 2.2)
BINDINGS = {"a": 0.75 - 0.5j, "b": 1.3}


# ---------------------------------------------------------------- reference evaluator

class Skip(Exception):
    """Sample too close to a branch cut or pole for a meaningful comparison."""


def _near_cut(z):
    return z.real < 0 and abs(z.imag) <= 1e-8 * abs(z)


def mp_eval(node, x, b):
    """(value, scale): 50-digit value and a first-order error scale.

    The scale bounds how far a double evaluation may legitimately drift:
    sums add the magnitudes of their terms, products propagate relative
    sizes, functions multiply by |f'|. Agreement is then judged relative to it.
    """
    if isinstance(node, Num):
        v = mpmath.mpc(node.value)
        return v, abs(v)
    if isinstance(node, Var):
        v = mpmath.mpc(x)
        return v, abs(v)
    if isinstance(node, Const):
        v = mpmath.mpc(0, 1) if node.name == "i" else mpmath.mpc(mpmath.pi)
        return v, abs(v)
    if isinstance(node, Param):
        v = mpmath.mpc(b[node.name])
        return v, abs(v)
    if isinstance(node, Neg):
        v, s = mp_eval(node.operand, x, b)
        return -v, s
    if isinstance(node, Call):
        a, s = mp_eval(node.arg, x, b)
        f = node.func
        if f in ("ln", "sqrt") and (_near_cut(a) or abs(a) < 1e-8):
            raise Skip
        if f == "coth" and abs(mpmath.sinh(a)) < 1e-8:
            raise Skip
        if f == "abs":
            return mpmath.mpc(abs(a)), s + abs(a)
        fn = {"exp": mpmath.exp, "ln": mpmath.log, "sin": mpmath.sin, "cos": mpmath.cos,
              "sinh": mpmath.sinh, "cosh": mpmath.cosh, "tanh": mpmath.tanh,
              "coth": mpmath.coth, "sqrt": mpmath.sqrt}[f]
        v = fn(a)
        d = abs(mpmath.diff(fn, a)) if f != "sqrt" else abs(0.5 / v)
        return v, d * s + abs(v)
    lv, ls = mp_eval(node.left, x, b)
    rv, rs = mp_eval(node.right, x, b)
    if node.op == "+":
        return lv + rv, ls + rs + abs(lv + rv)
    if node.op == "-":
        return lv - rv, ls + rs + abs(lv - rv)
    if node.op == "*":
        v = lv * rv
        return v, ls * abs(rv) + abs(lv) * rs + abs(v)
    if node.op == "/":
        if abs(rv) < 1e-8:
            raise Skip
        v = lv / rv
        return v, (ls * abs(rv) + abs(lv) * rs) / abs(rv) ** 2 + abs(v)
    # power
    if rv.imag == 0 and rv.real == int(rv.real) and abs(rv.real) <= 64:
        n = int(rv.real)
        if n < 0 and abs(lv) < 1e-8:
            raise Skip
        v = lv ** n
        return v, abs(n) * abs(v) / max(abs(lv), mpmath.mpf(1e-300)) * ls + abs(v)
    if _near_cut(lv) or abs(lv) < 1e-8:
        raise Skip
    lg = mpmath.log(lv)
    v = mpmath.exp(rv * lg)
    return v, abs(v) * (abs(rv) * ls / abs(lv) + abs(lg) * rs) + abs(v)


# ---------------------------------------------------------------- corpus

def random_ast(rng: random.Random, depth: int):
    if depth == 0 or rng.random() < 0.25:
        r = rng.random()
        if r < 0.35:
            return Var()
        if r < 0.7:
            return Num(rng.choice([0.5, 1.0, 2.0, 3.0, 0.25, 1.5, 2.5e-1, 7.0, 1e-2]))
        if r < 0.85:
            return Const(rng.choice(["i", "pi"]))
        return Param(rng.choice(sorted(BINDINGS)))
    r = rng.random()
    if r < 0.15:
        return Neg(random_ast(rng, depth - 1))
    if r < 0.45:
        return Call(rng.choice(exprdsl.FUNCTIONS), random_ast(rng, depth - 1))
    op = rng.choice("+-*/^")
    if op == "^":
        # keep powers tame: small integer or simple real exponents
        return BinOp("^", random_ast(rng, depth - 1), Num(rng.choice([2.0, 3.0, 0.5, 1.5])))
    return BinOp(op, random_ast(rng, depth - 1), random_ast(rng, depth - 1))


def corpus():
    rng = random.Random(CORPUS_SEED)
    return [random_ast(rng, rng.randint(1, 4)) for _ in range(CORPUS_SIZE)]


def test_corpus_round_trip():
    for ast in corpus():
        src = exprdsl.to_source(ast)
        back = exprdsl.parse(src)
        assert back == ast, src
        assert exprdsl.to_source(back) == src


def test_corpus_matches_reference_evaluator():
    compared = 0
    for ast in corpus():
        src = exprdsl.to_source(ast)
        for x in SAMPLE_X:
            try:
                ref, scale = mp_eval(ast, x, BINDINGS)
            except (Skip, ZeroDivisionError, ValueError):
                continue
            if not (abs(ref) < 1e100 and scale < 1e100):
                continue
            try:
                got = exprdsl.evaluate(ast, x, BINDINGS)
            except EvaluationPole:
                continue
            err = abs(complex(ref) - got)
            assert err <= 1e-13 * max(float(scale), 1e-300), (src, x, got, complex(ref), float(scale))
            compared += 1
    assert compared > 1500


def test_vector_and_scalar_evaluators_agree():
    xs = np.array(SAMPLE_X)
    for ast in corpus()[:200]:
        try:
            vec = exprdsl.evaluate_array(ast, xs, BINDINGS)
        except EvaluationPole:
            continue
        for x, v in zip(xs, vec):
            try:
                s = exprdsl.evaluate(ast, x, BINDINGS)
            except EvaluationPole:
                continue
            if np.isfinite(v) and cmath.isfinite(s):
                assert abs(v - s) <= 1e-12 * max(1.0, abs(s)), exprdsl.to_source(ast)


# ---------------------------------------------------------------- properties

leaf = st.one_of(st.just(Var()), st.sampled_from([Num(1.0), Num(2.5), Num(0.125)]),
                 st.sampled_from([Const("i"), Const("pi")]), st.sampled_from([Param("a"), Param("b")]))
asts = st.recursive(
    leaf,
    lambda kids: st.one_of(
        st.builds(Neg, kids),
        st.builds(Call, st.sampled_from(exprdsl.FUNCTIONS), kids),
        st.builds(BinOp, st.sampled_from(list("+-*/^")), kids, kids)),
    max_leaves=12)


@given(asts)
@settings(max_examples=300, deadline=None)
def test_printer_parser_round_trip(ast):
    assert exprdsl.parse(exprdsl.to_source(ast)) == ast


@given(st.floats(-5, 5), st.floats(-3, 3))
def test_polynomial_evaluation(x, c):
    e = exprdsl.Expression.compile("c*x^2 - 3*x + 1", {"c": c})
    assert abs(e(x) - (c * x * x - 3 * x + 1)) <= 1e-12 * (1 + abs(c) * x * x + 3 * abs(x))


# ---------------------------------------------------------------- semantics and errors

@pytest.mark.parametrize("src,value", [
    ("-2^2", -4), ("2^-1", 0.5), ("2^3^2", 512), ("1-2-3", -4), ("8/4/2", 1),
    ("2*pi", 2 * math.pi), ("i^2", -1), ("sqrt(-4)", 2j), ("ln(-1)", 1j * math.pi),
    ("coth(1)", math.cosh(1) / math.sinh(1)), ("abs(3+4*i)", 5), ("1.5e2", 150), (".5", 0.5),
])
def test_semantics(src, value):
    assert abs(exprdsl.evaluate(exprdsl.parse(src), 0.0) - value) <= 1e-14 * max(1, abs(value))


def test_signed_zero_is_normalized_before_cuts():
    # -0.0 imaginary part would otherwise put sqrt on the lower branch
    node = exprdsl.parse("sqrt(-1 - 0*i)")
    assert exprdsl.evaluate(node, 0.0) == 1j


@pytest.mark.parametrize("src,offset", [("1+", 2), ("(x", 2), ("x*)", 2), ("2 3", 2), ("", 0)])
def test_syntax_errors_carry_offsets(src, offset):
    with pytest.raises(ExprSyntaxError) as info:
        exprdsl.parse(src)
    assert info.value.offset == offset
    assert info.value.expected


def test_unknown_function_and_identifier():
    with pytest.raises(UnknownFunction):
        exprdsl.parse("sech(x)")
    with pytest.raises(UnknownIdentifier):
        exprdsl.parse("x + y", params={"a"})
    with pytest.raises(UnboundParameter):
        exprdsl.Expression.compile("a*x")


def test_poles_raise():
    for src in ("1/x", "coth(x)", "ln(x)", "x^-2"):
        with pytest.raises(EvaluationPole):
            exprdsl.evaluate(exprdsl.parse(src), 0.0)
        with pytest.raises(EvaluationPole):
            exprdsl.evaluate_array(exprdsl.parse(src), np.array([0.0, 1.0]))
