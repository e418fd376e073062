"""Petri nets with rates and open rated nets as decorated cospans."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Optional

from . import cospan as csp
from .errors import FootMismatch, TypeMismatch
from .finset import FinFunction, FinSet
from .petri import (
    PetriMorphism,
    PetriNet,
    check_petri_morphism,
    disjoint_union,
    free_net,
    iso_nets,
)

RATE_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class RatedNet:
    net: PetriNet
    rate: Mapping[str, float]

    def __post_init__(self):
        if set(self.rate) != set(self.net.transitions):
            raise TypeMismatch("rates must be given for exactly the transitions")
        for t, r in self.rate.items():
            if not (isinstance(r, (int, float)) and math.isfinite(r) and r >= 0):
                raise ValueError(f"rate of {t!r} must be a finite nonnegative number, got {r!r}")

    @property
    def places(self) -> FinSet:
        return self.net.places

    @property
    def transitions(self) -> FinSet:
        return self.net.transitions

    def pushforward(self, f: FinFunction) -> RatedNet:
        """``F(f)``: relabel species along ``f``; transitions keep their rates."""
        return RatedNet(self.net.pushforward(f), dict(self.rate))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RatedNet):
            return NotImplemented
        return self.net == other.net and dict(self.rate) == dict(other.rate)

    __hash__ = None  # type: ignore[assignment]


def empty_decoration(a: FinSet) -> RatedNet:
    return RatedNet(free_net(a), {})


def laxator(d: RatedNet, e: RatedNet) -> RatedNet:
    """Disjoint union of two rated nets, living on the coproduct of species."""
    net, _, _ = disjoint_union(d.net, e.net)
    # disjoint_union orders transitions left then right
    names = list(net.transitions)
    rates = list(d.rate[t] for t in d.transitions) + list(e.rate[t] for t in e.transitions)
    return RatedNet(net, dict(zip(names, rates)))


@dataclass(frozen=True)
class RatedMorphism:
    underlying: PetriMorphism


def check_rated_morphism(m: RatedMorphism, p: RatedNet, p2: RatedNet, tol: float = RATE_TOL) -> bool:
    """Net morphism whose transition map sums rates over each fiber."""
    if not check_petri_morphism(m.underlying, p.net, p2.net):
        return False
    g = m.underlying.trans_map
    for u in p2.transitions:
        total = sum(p.rate[t] for t in g.fiber(u))
        if abs(total - p2.rate[u]) > tol:
            return False
    return True


@dataclass(frozen=True)
class OpenRatedNet:
    cospan: csp.FinCospan
    decoration: RatedNet

    def __post_init__(self):
        if self.decoration.places != self.cospan.apex:
            raise TypeMismatch("decoration species must equal the cospan apex")

    @property
    def left(self) -> FinSet:
        return self.cospan.left

    @property
    def right(self) -> FinSet:
        return self.cospan.right


def compose_open_rated(p: OpenRatedNet, q: OpenRatedNet) -> OpenRatedNet:
    if p.right != q.left:
        raise FootMismatch(p.right, q.left)
    composite, po = csp.compose_with_pushout(p.cospan, q.cospan)
    decoration = laxator(p.decoration, q.decoration).pushforward(po.quotient)
    return OpenRatedNet(composite, decoration)


def tensor_open_rated(p: OpenRatedNet, q: OpenRatedNet) -> OpenRatedNet:
    return OpenRatedNet(csp.tensor(p.cospan, q.cospan), laxator(p.decoration, q.decoration))


def iota_rated(c: csp.FinCospan) -> OpenRatedNet:
    return OpenRatedNet(c, empty_decoration(c.apex))


def check_2cell_rated(
    p: OpenRatedNet,
    q: OpenRatedNet,
    foot_left: FinFunction,
    foot_right: FinFunction,
    apex_map: FinFunction,
    trans_map: FinFunction,
    tol: float = RATE_TOL,
) -> bool:
    """Map of cospans plus a rated morphism ``F(apex_map)(d) -> d'``."""
    cell = csp.CospanMap(p.cospan, q.cospan, foot_left, foot_right, apex_map)
    if not cell.is_valid():
        return False
    pushed = p.decoration.pushforward(apex_map)
    mor = RatedMorphism(PetriMorphism(FinFunction.identity(q.cospan.apex), trans_map))
    return check_rated_morphism(mor, pushed, q.decoration, tol)


def iso_open_rated(
    p: OpenRatedNet, q: OpenRatedNet, tol: float = RATE_TOL
) -> Optional[tuple[FinFunction, FinFunction]]:
    """Species and transition bijections preserving legs, arcs and rates."""
    if p.left != q.left or p.right != q.right:
        return None
    pins = csp.leg_pins(
        [(p.cospan.in_leg, q.cospan.in_leg), (p.cospan.out_leg, q.cospan.out_leg)]
    )
    if pins is None:
        return None
    dp, dq = p.decoration, q.decoration

    def match(phi):
        remaining = list(dq.transitions)
        psi = {}
        for t in dp.transitions:
            key = (dp.net.src[t].pushforward(phi.__getitem__), dp.net.tgt[t].pushforward(phi.__getitem__))
            candidates = [
                u
                for u in remaining
                if (dq.net.src[u], dq.net.tgt[u]) == key and abs(dq.rate[u] - dp.rate[t]) <= tol
            ]
            if not candidates:
                return None
            pick = t if t in candidates else candidates[0]
            remaining.remove(pick)
            psi[t] = pick
        return psi

    return iso_nets(dp.net, dq.net, pins, transition_match=match)
