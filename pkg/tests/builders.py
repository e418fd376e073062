"""Shared model builders for the test suite."""
from __future__ import annotations

import random

from opencospan.cospan import FinCospan
from opencospan.dynam import OpenDynam, VectorField
from opencospan.finset import FinFunction, FinSet
from opencospan.petri import OpenPetriNet, PetriNet
from opencospan.rates import OpenRatedNet, RatedNet


def leg(dom, cod, mapping) -> FinFunction:
    dom = dom if isinstance(dom, FinSet) else FinSet(dom)
    cod = cod if isinstance(cod, FinSet) else FinSet(cod)
    return FinFunction(dom, cod, mapping)


def cospan(left, apex, right, in_map, out_map) -> FinCospan:
    apex = FinSet(apex)
    return FinCospan.from_legs(leg(left, apex, in_map), leg(right, apex, out_map))


def open_net(net: PetriNet, left, in_map, right, out_map) -> OpenPetriNet:
    return OpenPetriNet(
        FinSet(left), FinSet(right), net,
        leg(left, net.places, in_map), leg(right, net.places, out_map),
    )


def open_rated(net: PetriNet, rates, left, in_map, right, out_map) -> OpenRatedNet:
    c = cospan(left, net.places, right, in_map, out_map)
    return OpenRatedNet(c, RatedNet(net, rates))


# -- nets from the worked examples --------------------------------------------------

def net_p() -> OpenPetriNet:
    net = PetriNet.build("ABCD", {"α": ({"A": 1, "B": 1}, {"C": 1, "D": 1})})
    return open_net(net, ["1", "2", "3"], {"1": "A", "2": "B", "3": "B"},
                    ["4", "5"], {"4": "C", "5": "D"})


def net_q() -> OpenPetriNet:
    net = PetriNet.build("EF", {"β": ({"E": 1}, {"F": 1}), "γ": ({"F": 1}, {"E": 1})})
    return open_net(net, ["4", "5"], {"4": "E", "5": "E"}, ["6"], {"6": "F"})


def ab_net() -> PetriNet:
    return PetriNet.build("ABC", {"α": ({"A": 1, "B": 1}, {"C": 1}), "β": ({"C": 1}, {"B": 2})})


def water(r1: float = 1.0) -> RatedNet:
    net = PetriNet.build(["H2", "O2", "H2O"], {"1": ({"H2": 2, "O2": 1}, {"H2O": 2})})
    return RatedNet(net, {"1": r1})


def peroxide(r1: float = 1.0, r2: float = 1.0) -> RatedNet:
    net = PetriNet.build(
        ["H2", "O2", "H2O2", "H2O"],
        {"1": ({"H2": 2, "O2": 1}, {"H2O": 2}), "2": ({"H2O2": 2}, {"O2": 1, "H2O": 2})},
    )
    return RatedNet(net, {"1": r1, "2": r2})


def hydroxide(r: float = 1.0) -> OpenRatedNet:
    net = PetriNet.build(["H+", "OH-", "H2O"], {"α": ({"H+": 1, "OH-": 1}, {"H2O": 1})})
    return open_rated(net, {"α": r}, ["1", "2"], {"1": "H+", "2": "OH-"}, ["3"], {"3": "H2O"})


def spring(a: int = 1, b: int = 2, k: float = 1.0, m: float = 1.0) -> OpenDynam:
    """Two rocks joined by a spring; left foot (q_a, p_a), right foot (q_b, p_b)."""
    qa, pa, qb, pb = f"q{a}", f"p{a}", f"q{b}", f"p{b}"
    scope = FinSet([qa, pa, qb, pb])
    c = FinCospan.from_legs(
        leg([qa, pa], scope, {qa: qa, pa: pa}), leg([qb, pb], scope, {qb: qb, pb: pb})
    )
    fld = VectorField(
        scope,
        {qa: f"{pa}/m{a}", pa: f"k*({qb} - {qa})", qb: f"{pb}/m{b}", pb: f"k*({qa} - {qb})"},
        {"k": k, f"m{a}": m, f"m{b}": m},
    )
    return OpenDynam(c, fld)


def decay_system() -> OpenDynam:
    """Closed one-variable system dx/dt = -x."""
    scope = FinSet(["x"])
    return OpenDynam(cospan([], scope, [], {}, {}), VectorField(scope, {"x": "-x"}))


def spring_energy(x, k=1.0, m=1.0) -> float:
    q1, p1, q2, p2 = x
    return (p1 * p1 + p2 * p2) / (2 * m) + 0.5 * k * (q1 - q2) ** 2


# -- random instances ----------------------------------------------------------------

def random_net(rng: random.Random, places, n_trans: int, max_arc: int = 2, prefix="t") -> PetriNet:
    places = list(places)

    def arcs():
        return {s: c for s in places if (c := rng.randint(0, max_arc)) and rng.random() < 0.5}

    return PetriNet.build(places, {f"{prefix}{i}": (arcs(), arcs()) for i in range(n_trans)})


def random_function(rng: random.Random, dom, cod) -> FinFunction:
    dom, cod = FinSet(dom), FinSet(cod)
    return FinFunction(dom, cod, {x: rng.choice(list(cod)) for x in dom})


def random_open_rated(rng: random.Random, left, right, tag: str) -> OpenRatedNet:
    places = [f"{tag}{i}" for i in range(rng.randint(1, 4))]
    net = random_net(rng, places, rng.randint(0, 3), prefix=f"{tag}t")
    rates = {t: round(rng.uniform(0.1, 3.0), 3) for t in net.transitions}
    return open_rated(
        net, rates,
        left, {x: rng.choice(places) for x in left},
        right, {y: rng.choice(places) for y in right},
    )


def ab_system(va: str = "a^2 - a*b", vb: str = "3*a*b - b") -> OpenDynam:
    scope = FinSet("ab")
    c = cospan(["a"], scope, ["b"], {"a": "a"}, {"b": "b"})
    return OpenDynam(c, VectorField(scope, {"a": va, "b": vb}))


def bc_system(wb: str = "-2*b*c", wc: str = "b + c^2") -> OpenDynam:
    scope = FinSet("bc")
    c = cospan(["b"], scope, ["c"], {"b": "b"}, {"c": "c"})
    return OpenDynam(c, VectorField(scope, {"b": wb, "c": wc}))


def random_composable_rated(rng: random.Random):
    """Two random open rated nets sharing a middle foot (≤ 4 places, ≤ 3 transitions each)."""
    left = [f"x{i}" for i in range(rng.randint(0, 2))]
    middle = [f"y{i}" for i in range(rng.randint(0, 2))]
    right = [f"z{i}" for i in range(rng.randint(0, 2))]
    return random_open_rated(rng, left, middle, "p"), random_open_rated(rng, middle, right, "q")


def compatible_spring_samples(rng: random.Random, k: float = 1.0):
    """A steady state of each spring in spring(1,2) ; spring(2,3) that glue together.

    The second sample is found by the solver, then shifted along the
    translation symmetry so rock 2 sits where the first sample put it, and
    re-solved from there.
    """
    from opencospan.numsim import steady_states

    p, q = spring(1, 2, k), spring(2, 3, k)
    force = rng.uniform(-3, 3)
    sp = rng.choice(steady_states(p, {"p1": force}, {"p2": force}))
    found = steady_states(q, {"p2": force}, {"p3": force})
    base = rng.choice(found)
    shift = sp.witness["q2"] - base.witness["q2"]
    start = {s: base.witness[s] + (shift if s.startswith("q") else 0.0) for s in q.scope}
    (sq,) = steady_states(q, {"p2": force}, {"p3": force}, starts=[start])
    return p, q, sp, sq
