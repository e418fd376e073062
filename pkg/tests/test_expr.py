from __future__ import annotations

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from opencospan.errors import DivisionByZero, UnboundVariable
from opencospan.expr import (
    Add,
    Const,
    Div,
    Mul,
    Neg,
    Pow,
    Sub,
    Time,
    Var,
    canonical,
    compile_exprs,
    equivalent,
    exact_str,
    parse,
)

names = st.sampled_from(["a", "b", "c", "H+", "r_1"])
leaves = st.one_of(
    st.integers(-3, 3).map(lambda n: Const(float(n))),
    st.sampled_from([0.5, 1.25, -2.5]).map(Const),
    names.map(Var),
    st.just(Time()),
)


def _tree(children):
    return st.one_of(
        st.tuples(children, children).map(lambda p: Add(*p)),
        st.tuples(children, children).map(lambda p: Sub(*p)),
        st.tuples(children, children).map(lambda p: Mul(*p)),
        children.map(Neg),
        st.tuples(children, st.integers(0, 3)).map(lambda p: Pow(*p)),
    )


exprs = st.recursive(leaves, _tree, max_leaves=8)


def _env(seed: float):
    return {"a": 0.3 + seed, "b": -1.1, "c": 0.7, "H+": 1.3, "r_1": 0.9}


@settings(max_examples=200, deadline=None)
@given(exprs)
def test_print_parse_round_trip(e):
    back = parse(exact_str(e))
    env = _env(0.0)
    assert back.evaluate(env, 0.4) == pytest.approx(e.evaluate(env, 0.4), rel=1e-12, abs=1e-12)
    assert parse(exact_str(back)) == back


@settings(max_examples=200, deadline=None)
@given(exprs)
def test_normal_form_evaluates_the_same(e):
    c = canonical(e)
    for s in (0.0, 0.37):
        env = _env(s)
        a, b = e.evaluate(env, 0.4), c.evaluate(env, 0.4)
        assert b == pytest.approx(a, rel=1e-9, abs=1e-9)


@settings(max_examples=100, deadline=None)
@given(exprs)
def test_normal_form_is_idempotent(e):
    c = canonical(e)
    assert str(canonical(c)) == str(c)
    assert equivalent(e, c)


@given(exprs, exprs)
def test_equivalence_is_symmetric(e1, e2):
    assert equivalent(e1, e2) == equivalent(e2, e1)


def test_binomial():
    assert equivalent(parse("(a + b)^2"), parse("a^2 + 2*a*b + b^2"))
    assert not equivalent(parse("(a + b)^2"), parse("a^2 + b^2"))


def test_canonical_order_degree_first():
    assert str(canonical(parse("a + b*c + 3"))) == "b*c + a + 3"
    assert str(canonical(parse("x*y - y*x"))) == "0"


def test_params_lead_products():
    e = canonical(parse("2*H2^2*O2*r_1"), first=["r_1"])
    assert str(e) == "2*r_1*H2^2*O2"


def test_bracketed_names():
    e = parse("-[H+]*[OH-]*r + I1")
    assert e.variables() == {"H+", "OH-", "r", "I1"}
    assert str(e) == "-[H+]*[OH-]*r + I1"
    assert parse(str(e)) == e


def test_time_symbol():
    e = parse("2*t + [t]")
    assert e.uses_time() and e.variables() == {"t"}
    assert e.evaluate({"t": 5.0}, 1.0) == 7.0


def test_caret_and_double_star():
    assert parse("a**2") == parse("a^2")
    with pytest.raises(ValueError):
        parse("a^b")
    with pytest.raises(ValueError):
        Pow(Var("a"), -1)


def test_division_rules():
    with pytest.raises(DivisionByZero):
        Div(Var("a"), Const(0.0))
    e = parse("p/m")
    assert e.to_poly() is None
    with pytest.raises(DivisionByZero):
        e.evaluate({"p": 1.0, "m": 0.0})
    # division by a nonzero constant stays polynomial
    assert parse("a/2").to_poly() is not None


def test_non_polynomial_equivalence_falls_back_to_sampling():
    assert equivalent(parse("p/m + p/m"), parse("2*p/m"))
    assert not equivalent(parse("p/m"), parse("m/p"))
    assert equivalent(parse("a/m"), parse("b/m"), bindings={"a": 1.0, "b": 1.0})


def test_unbound_variable():
    with pytest.raises(UnboundVariable):
        parse("a + b").evaluate({"a": 1.0})
    with pytest.raises(UnboundVariable):
        compile_exprs([parse("a + b")], ["a"])


@settings(max_examples=100, deadline=None)
@given(exprs)
def test_compiled_matches_interpreter(e):
    order = ["a", "b", "c", "H+"]
    f = compile_exprs([e], order, {"r_1": 0.9})
    env = _env(0.0)
    x = [env[v] for v in order]
    assert f(x, 0.4)[0] == pytest.approx(e.evaluate(env, 0.4), rel=1e-12, abs=1e-12)


def test_compiled_division_by_zero():
    f = compile_exprs([parse("1/a")], ["a"])
    with pytest.raises(DivisionByZero):
        f([0.0], 0.0)


def test_compiled_overflow_is_infinite():
    f = compile_exprs([parse("a^400")], ["a"])
    assert math.isinf(f([1e10], 0.0)[0])


def test_substitute_and_rename():
    e = parse("k*(q2 - q1)")
    assert str(e.rename({"q1": "x"})) == "k*(q2 - x)"
    assert e.substitute({"k": Const(2.0)}).evaluate({"q1": 1.0, "q2": 3.0}) == 4.0


def test_display_trims_digits():
    e = Mul(Const(1 / 3), Var("a"))
    assert str(e) == "0.333333333333*a"
    assert parse(exact_str(e)) == e


@given(st.floats(-1e6, 1e6, allow_nan=False))
def test_constants_round_trip_exactly(v):
    assert parse(exact_str(Const(v))).evaluate({}) == v
