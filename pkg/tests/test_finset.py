from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from opencospan.errors import CodomainMismatch, DomainMismatch
from opencospan.finset import (
    FinFunction,
    FinSet,
    bang,
    codiagonal,
    copair,
    coproduct,
    pushout,
    tagged_union,
    tensor_map,
)

from builders import random_function
from oracles import all_functions, closure_partition, cocones


labels = st.lists(st.sampled_from("abcdefgh"), unique=True, max_size=5)


@st.composite
def functions(draw, dom=None, min_cod=1):
    dom = draw(labels) if dom is None else dom
    cod = draw(st.lists(st.sampled_from("pqrstuvw"), unique=True, min_size=max(min_cod, 1 if dom else 0), max_size=5))
    mapping = {x: draw(st.sampled_from(cod)) for x in dom}
    return FinFunction(FinSet(dom), FinSet(cod), mapping)


@st.composite
def spans(draw):
    dom = draw(labels)
    return draw(functions(dom)), draw(functions(dom))


def test_finset_basics():
    a = FinSet(["x", "y"])
    assert list(a) == ["x", "y"]
    assert a == FinSet(["y", "x"])
    assert "x" in a and "z" not in a
    assert a.index("y") == 1
    with pytest.raises(ValueError):
        FinSet(["x", "x"])
    with pytest.raises(TypeError):
        FinSet([1])


def test_function_checks_totality_and_codomain():
    a, b = FinSet("xy"), FinSet("pq")
    with pytest.raises(DomainMismatch):
        FinFunction(a, b, {"x": "p"})
    with pytest.raises(CodomainMismatch):
        FinFunction(a, b, {"x": "p", "y": "z"})


def test_composition_is_diagrammatic():
    f = FinFunction(FinSet("xy"), FinSet("pq"), {"x": "p", "y": "p"})
    g = FinFunction(FinSet("pq"), FinSet("z"), {"p": "z", "q": "z"})
    h = f.then(g)
    assert h == g.after(f)
    assert h.mapping == {"x": "z", "y": "z"}
    with pytest.raises(DomainMismatch):
        g.then(f)


def test_coproduct_tags():
    total, inl, inr = coproduct(FinSet(["1", "2"]), FinSet(["3"]))
    assert list(total) == ["L.1", "L.2", "R.3"]
    assert inl("1") == "L.1" and inr("3") == "R.3"


def test_coproduct_with_empty():
    total, inl, inr = coproduct(FinSet(), FinSet(["x"]))
    assert len(total) == 1
    assert len(inl.dom) == 0


def test_tags_are_structural():
    # a user label that already looks tagged stays distinct from a real tag
    total, inl, inr = coproduct(FinSet(["R.a"]), FinSet(["a"]))
    assert len(total) == 2
    assert inl("R.a") != inr("a")


def test_tagged_union_strips_only_when_safe():
    u, l, r = tagged_union(FinSet(["α"]), FinSet(["β", "γ"]))
    assert list(u) == ["α", "β", "γ"]
    u, l, r = tagged_union(FinSet(["α"]), FinSet(["α"]))
    assert list(u) == ["L.α", "R.α"]


def test_copair_and_codiagonal():
    f = FinFunction(FinSet("a"), FinSet("xy"), {"a": "x"})
    g = FinFunction(FinSet("b"), FinSet("xy"), {"b": "y"})
    c = copair(f, g)
    assert c.mapping == {"L.a": "x", "R.b": "y"}
    nabla = codiagonal(FinSet("ab"))
    assert nabla.mapping == {"L.a": "a", "L.b": "b", "R.a": "a", "R.b": "b"}
    assert len(bang(FinSet("ab")).dom) == 0
    with pytest.raises(CodomainMismatch):
        copair(f, FinFunction(FinSet("b"), FinSet("z"), {"b": "z"}))


def test_tensor_map():
    f = FinFunction(FinSet("a"), FinSet("x"), {"a": "x"})
    g = FinFunction(FinSet("b"), FinSet("y"), {"b": "y"})
    assert tensor_map(f, g).mapping == {"L.a": "L.x", "R.b": "R.y"}


def test_pushout_glues_shared_label():
    # {a,b} and {b,c} glued along b
    shared = FinSet(["b"])
    f = FinFunction(shared, FinSet("ab"), {"b": "b"})
    g = FinFunction(shared, FinSet("bc"), {"b": "b"})
    po = pushout(f, g)
    assert list(po.apex) == ["a", "b", "c"]
    assert po.left_inj("b") == po.right_inj("b") == "b"


def test_pushout_over_empty_is_coproduct():
    empty = FinSet()
    f = FinFunction(empty, FinSet("xy"), {})
    g = FinFunction(empty, FinSet("z"), {})
    po = pushout(f, g)
    assert len(po.apex) == 3
    assert po.left_inj.is_injective() and po.right_inj.is_injective()
    total, _, _ = coproduct(f.cod, g.cod)
    assert po.quotient.dom == total and po.quotient.is_bijection()


def test_pushout_requires_shared_domain():
    f = FinFunction(FinSet("a"), FinSet("x"), {"a": "x"})
    g = FinFunction(FinSet("b"), FinSet("x"), {"b": "x"})
    with pytest.raises(DomainMismatch):
        pushout(f, g)


def test_pushout_labels_deterministic():
    f = FinFunction(FinSet(["1", "2"]), FinSet(["C", "D"]), {"1": "C", "2": "D"})
    g = FinFunction(FinSet(["1", "2"]), FinSet(["E"]), {"1": "E", "2": "E"})
    po = pushout(f, g)
    assert list(po.apex) == ["C"]
    assert pushout(f, g).apex.elements == po.apex.elements


def _partition(po):
    classes = {}
    for a in po.left_inj.dom:
        classes.setdefault(po.left_inj(a), set()).add(("L", a))
    for b in po.right_inj.dom:
        classes.setdefault(po.right_inj(b), set()).add(("R", b))
    return {frozenset(c) for c in classes.values()}


@settings(max_examples=200, deadline=None)
@given(spans())
def test_pushout_matches_closure_oracle(span):
    f, g = span
    po = pushout(f, g)
    assert _partition(po) == closure_partition(f, g)
    # the square commutes
    assert f.then(po.left_inj) == g.then(po.right_inj)
    # injections are jointly surjective
    assert po.left_inj.image() | po.right_inj.image() == set(po.apex)


@settings(max_examples=60, deadline=None)
@given(spans())
def test_pushout_universal_property_small(span):
    f, g = span
    if len(f.cod) + len(g.cod) > 6:
        return
    po = pushout(f, g)
    w = ["u", "v"]
    for h, k in cocones(f, g, w):
        # exactly one mediating map
        mediators = [
            u for u in all_functions(po.apex, w)
            if all(u[po.left_inj(a)] == h[a] for a in f.cod)
            and all(u[po.right_inj(b)] == k[b] for b in g.cod)
        ]
        assert len(mediators) == 1


@given(functions(), functions())
def test_coproduct_sizes(f, g):
    total, inl, inr = coproduct(f.dom, g.dom)
    assert len(total) == len(f.dom) + len(g.dom)
    assert inl.image().isdisjoint(inr.image())
    assert inl.image() | inr.image() == set(total)


def test_random_functions_compose_associatively():
    rng = random.Random(3)
    for _ in range(50):
        a, b, c, d = (list("abcd")[: rng.randint(0, 3)], list("pqr"), list("xy"), list("z"))
        f, g, h = random_function(rng, a, b), random_function(rng, b, c), random_function(rng, c, d)
        assert f.then(g).then(h) == f.then(g.then(h))
        assert FinFunction.identity(f.dom).then(f) == f == f.then(FinFunction.identity(f.cod))
