from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from opencospan.errors import FootMismatch, TypeMismatch
from opencospan.finset import FinFunction, FinSet
from opencospan.petri import PetriMorphism, PetriNet
from opencospan.rates import (
    OpenRatedNet,
    RatedMorphism,
    RatedNet,
    check_2cell_rated,
    check_rated_morphism,
    compose_open_rated,
    empty_decoration,
    iota_rated,
    iso_open_rated,
    laxator,
    tensor_open_rated,
)

from builders import cospan, hydroxide, leg, open_rated, random_open_rated


def _two_to_one(r1, r2, r3):
    p = RatedNet(PetriNet.build("AB", {"1": ({"A": 1}, {"B": 1}), "2": ({"A": 1}, {"B": 1})}), {"1": r1, "2": r2})
    q = RatedNet(PetriNet.build("AB", {"3": ({"A": 1}, {"B": 1})}), {"3": r3})
    mor = RatedMorphism(PetriMorphism(
        FinFunction.identity(p.places), FinFunction(p.transitions, q.transitions, {"1": "3", "2": "3"})
    ))
    return mor, p, q


def test_rates_sum_over_fibers():
    assert check_rated_morphism(*_two_to_one(0.5, 1.25, 1.75))
    assert not check_rated_morphism(*_two_to_one(0.5, 1.25, 2.0))


@given(st.floats(0, 10), st.floats(0, 10))
def test_rate_sum_property(r1, r2):
    assert check_rated_morphism(*_two_to_one(r1, r2, r1 + r2))


def test_rated_net_validation():
    net = PetriNet.build("A", {"t": ({"A": 1}, {})})
    with pytest.raises(TypeMismatch):
        RatedNet(net, {})
    with pytest.raises(ValueError):
        RatedNet(net, {"t": -1.0})
    with pytest.raises(ValueError):
        RatedNet(net, {"t": float("nan")})


def test_laxator_is_disjoint_union():
    d = hydroxide(2.0).decoration
    e = RatedNet(PetriNet.build("X", {"β": ({"X": 1}, {})}), {"β": 0.5})
    u = laxator(d, e)
    assert len(u.places) == 4 and set(u.transitions) == {"α", "β"}
    assert u.rate == {"α": 2.0, "β": 0.5}
    assert laxator(empty_decoration(FinSet()), empty_decoration(FinSet())).places == FinSet()


def test_decoration_must_live_on_apex():
    c = cospan(["1"], ["a"], [], {"1": "a"}, {})
    with pytest.raises(TypeMismatch):
        OpenRatedNet(c, empty_decoration(FinSet(["b"])))


def test_compose_pushes_decoration_forward():
    p = hydroxide(1.5)
    net = PetriNet.build(["W", "V"], {"ev": ({"W": 1}, {"V": 1})})
    q = open_rated(net, {"ev": 0.25}, ["3"], {"3": "W"}, [], {})
    pq = compose_open_rated(p, q)
    places = pq.decoration.places
    assert len(places) == 4
    assert len(pq.right) == 0
    # the water produced by α is the water consumed by ev
    assert pq.decoration.net.tgt["α"].support() == pq.decoration.net.src["ev"].support()
    assert pq.decoration.rate == {"α": 1.5, "ev": 0.25}


def test_compose_rejects_foot_mismatch():
    with pytest.raises(FootMismatch):
        compose_open_rated(hydroxide(), hydroxide())


def test_iota_has_no_transitions():
    c = cospan(["1"], ["a"], ["2"], {"1": "a"}, {"2": "a"})
    assert len(iota_rated(c).decoration.transitions) == 0


def test_projection_2cell_requires_summed_rate():
    small = hydroxide(3.0)
    big_net = PetriNet.build(
        ["H+", "OH-", "H2O", "D+", "OD-", "D2O"],
        {"α": ({"H+": 1, "OH-": 1}, {"H2O": 1}), "α′": ({"D+": 1, "OD-": 1}, {"D2O": 1})},
    )
    big = open_rated(big_net, {"α": 1.0, "α′": 2.0},
                     ["1", "2"], {"1": "H+", "2": "OH-"}, ["3"], {"3": "H2O"})
    apex = leg(big_net.places, small.decoration.places,
               {"H+": "H+", "OH-": "OH-", "H2O": "H2O", "D+": "H+", "OD-": "OH-", "D2O": "H2O"})
    trans = leg(big_net.transitions, small.decoration.transitions, {"α": "α", "α′": "α"})
    fl, fr = FinFunction.identity(big.left), FinFunction.identity(big.right)
    assert check_2cell_rated(big, small, fl, fr, apex, trans)
    wrong = hydroxide(2.5)
    assert not check_2cell_rated(big, wrong, fl, fr, apex, trans)


def test_iso_open_rated_compares_rates():
    assert iso_open_rated(hydroxide(1.0), hydroxide(1.0)) is not None
    assert iso_open_rated(hydroxide(1.0), hydroxide(1.1)) is None


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_composition_associative_up_to_iso(seed):
    rng = random.Random(seed)
    p = random_open_rated(rng, ["w"], ["x"], "p")
    q = random_open_rated(rng, ["x"], ["y"], "q")
    r = random_open_rated(rng, ["y"], ["z"], "r")
    lhs = compose_open_rated(compose_open_rated(p, q), r)
    rhs = compose_open_rated(p, compose_open_rated(q, r))
    assert iso_open_rated(lhs, rhs) is not None


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6))
def test_tensor_preserves_rates(seed):
    rng = random.Random(seed)
    p = random_open_rated(rng, ["a"], ["b"], "p")
    q = random_open_rated(rng, ["c"], ["d"], "q")
    pq = tensor_open_rated(p, q)
    assert sorted(pq.decoration.rate.values()) == sorted(
        list(p.decoration.rate.values()) + list(q.decoration.rate.values())
    )
    assert len(pq.decoration.places) == len(p.decoration.places) + len(q.decoration.places)
