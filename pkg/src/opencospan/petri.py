"""Petri nets, their morphisms, and open Petri nets as structured cospans.

An open Petri net is stored with its legs landing directly in the place set
of the apex net; the free net on a foot has no transitions, so this carries
the same information as a cospan of nets.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Mapping, Optional

from . import cospan as csp
from .errors import FootMismatch, TypeMismatch
from .finset import (
    FinFunction,
    FinSet,
    coproduct,
    pushout,
    tagged_union,
    tensor_map,
)


class Multiset:
    """A finite formal sum of labels with natural-number multiplicities."""

    __slots__ = ("_counts", "_key")

    def __init__(self, counts: Mapping[str, int] | Iterable[str] = ()):
        if isinstance(counts, Mapping):
            items = dict(counts)
        else:
            items = Counter(counts)
        clean = {}
        for k, v in items.items():
            if not isinstance(v, int) or isinstance(v, bool):
                raise TypeError(f"multiplicity of {k!r} must be an int, got {v!r}")
            if v < 0:
                raise ValueError(f"negative multiplicity {v} for {k!r}")
            if v:
                clean[k] = v
        object.__setattr__(self, "_counts", clean)
        object.__setattr__(self, "_key", frozenset(clean.items()))

    def __setattr__(self, name, value):
        raise AttributeError("Multiset is immutable")

    def __getitem__(self, x: str) -> int:
        return self._counts.get(x, 0)

    def __iter__(self) -> Iterator[str]:
        return iter(self._counts)

    def __len__(self) -> int:
        return len(self._counts)

    def items(self):
        return self._counts.items()

    def support(self) -> set[str]:
        return set(self._counts)

    def size(self) -> int:
        return sum(self._counts.values())

    def as_dict(self) -> dict[str, int]:
        return dict(self._counts)

    def __add__(self, other: Multiset) -> Multiset:
        out = dict(self._counts)
        for k, v in other.items():
            out[k] = out.get(k, 0) + v
        return Multiset(out)

    def __sub__(self, other: Multiset) -> Multiset:
        out = dict(self._counts)
        for k, v in other.items():
            out[k] = out.get(k, 0) - v
        return Multiset(out)

    def __le__(self, other: Multiset) -> bool:
        return all(other[k] >= v for k, v in self._counts.items())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Multiset):
            return NotImplemented
        return self._key == other._key

    def __hash__(self) -> int:
        return hash(self._key)

    def pushforward(self, f: Callable[[str], str]) -> Multiset:
        """``N[f]``: relabel along ``f``, summing multiplicities."""
        out: dict[str, int] = {}
        for k, v in self._counts.items():
            y = f(k)
            out[y] = out.get(y, 0) + v
        return Multiset(out)

    def __repr__(self) -> str:
        if not self._counts:
            return "0"
        return " + ".join(k if v == 1 else f"{v}{k}" for k, v in sorted(self._counts.items()))


@dataclass(frozen=True, eq=False)
class PetriNet:
    places: FinSet
    transitions: FinSet
    src: Mapping[str, Multiset]
    tgt: Mapping[str, Multiset]

    def __post_init__(self):
        for name, arcs in (("src", self.src), ("tgt", self.tgt)):
            if set(arcs) != set(self.transitions):
                raise TypeMismatch(f"{name} must be defined exactly on the transitions")
            for tau, m in arcs.items():
                stray = m.support() - set(self.places)
                if stray:
                    raise TypeMismatch(
                        f"transition {tau!r} mentions unknown places {sorted(stray)}"
                    )

    @classmethod
    def build(
        cls,
        places: Iterable[str],
        transitions: Mapping[str, tuple[Mapping[str, int], Mapping[str, int]]],
    ) -> PetriNet:
        """Convenience constructor: ``{name: (inputs, outputs)}``."""
        return cls(
            FinSet(places),
            FinSet(transitions),
            {t: Multiset(io[0]) for t, io in transitions.items()},
            {t: Multiset(io[1]) for t, io in transitions.items()},
        )

    def pushforward(self, f: FinFunction, rename: Optional[FinFunction] = None) -> PetriNet:
        """Relabel places along ``f`` (and transitions along ``rename``)."""
        if f.dom != self.places:
            raise TypeMismatch("place map must start at this net's places")
        r = rename if rename is not None else FinFunction.identity(self.transitions)
        return PetriNet(
            f.cod,
            r.cod,
            {r(t): self.src[t].pushforward(f) for t in self.transitions},
            {r(t): self.tgt[t].pushforward(f) for t in self.transitions},
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PetriNet):
            return NotImplemented
        return (
            self.places == other.places
            and self.transitions == other.transitions
            and dict(self.src) == dict(other.src)
            and dict(self.tgt) == dict(other.tgt)
        )

    __hash__ = None  # type: ignore[assignment]


def free_net(a: FinSet) -> PetriNet:
    """The net with places ``a`` and no transitions."""
    return PetriNet(a, FinSet(), {}, {})


def disjoint_union(p: PetriNet, q: PetriNet) -> tuple[PetriNet, FinFunction, FinFunction]:
    """Side-by-side nets on the coproduct of place sets.

    Transitions are a tagged union (tags dropped when unambiguous).  Returns
    the net together with the place injections.
    """
    places, inl, inr = coproduct(p.places, q.places)
    trans, tl, tr = tagged_union(p.transitions, q.transitions)
    src = {tl(t): p.src[t].pushforward(inl) for t in p.transitions}
    src.update({tr(t): q.src[t].pushforward(inr) for t in q.transitions})
    tgt = {tl(t): p.tgt[t].pushforward(inl) for t in p.transitions}
    tgt.update({tr(t): q.tgt[t].pushforward(inr) for t in q.transitions})
    return PetriNet(places, trans, src, tgt), inl, inr


@dataclass(frozen=True)
class PetriMorphism:
    place_map: FinFunction
    trans_map: FinFunction


def check_petri_morphism(m: PetriMorphism, p: PetriNet, p2: PetriNet) -> bool:
    """True iff ``s'∘g = N[f]∘s`` and ``t'∘g = N[f]∘t``."""
    f, g = m.place_map, m.trans_map
    if f.dom != p.places or f.cod != p2.places:
        raise TypeMismatch("place map is not typed between the nets' places")
    if g.dom != p.transitions or g.cod != p2.transitions:
        raise TypeMismatch("transition map is not typed between the nets' transitions")
    return all(
        p2.src[g(t)] == p.src[t].pushforward(f) and p2.tgt[g(t)] == p.tgt[t].pushforward(f)
        for t in p.transitions
    )


def identity_morphism(p: PetriNet) -> PetriMorphism:
    return PetriMorphism(FinFunction.identity(p.places), FinFunction.identity(p.transitions))


@dataclass(frozen=True)
class OpenPetriNet:
    left: FinSet
    right: FinSet
    net: PetriNet
    in_leg: FinFunction
    out_leg: FinFunction

    def __post_init__(self):
        if self.in_leg.dom != self.left or self.in_leg.cod != self.net.places:
            raise TypeMismatch("in_leg must map the left foot into the places")
        if self.out_leg.dom != self.right or self.out_leg.cod != self.net.places:
            raise TypeMismatch("out_leg must map the right foot into the places")

    @property
    def cospan(self) -> csp.FinCospan:
        return csp.FinCospan(self.left, self.right, self.net.places, self.in_leg, self.out_leg)


def compose_open(p: OpenPetriNet, q: OpenPetriNet) -> OpenPetriNet:
    """Glue ``p`` then ``q`` along the shared foot."""
    if p.right != q.left:
        raise FootMismatch(p.right, q.left)
    po = pushout(p.out_leg, q.in_leg)
    union, _, _ = disjoint_union(p.net, q.net)
    net = union.pushforward(po.quotient)
    return OpenPetriNet(
        p.left, q.right, net, p.in_leg.then(po.left_inj), q.out_leg.then(po.right_inj)
    )


def tensor_open(p: OpenPetriNet, q: OpenPetriNet) -> OpenPetriNet:
    net, _, _ = disjoint_union(p.net, q.net)
    left, _, _ = coproduct(p.left, q.left)
    right, _, _ = coproduct(p.right, q.right)
    return OpenPetriNet(
        left, right, net, tensor_map(p.in_leg, q.in_leg), tensor_map(p.out_leg, q.out_leg)
    )


def iota_petri(c: csp.FinCospan) -> OpenPetriNet:
    """A cospan of finite sets as an open net with no transitions."""
    return OpenPetriNet(c.left, c.right, free_net(c.apex), c.in_leg, c.out_leg)


def check_2cell(
    p: OpenPetriNet,
    q: OpenPetriNet,
    foot_left: FinFunction,
    foot_right: FinFunction,
    alpha: PetriMorphism,
) -> bool:
    """True iff both foot squares commute and ``alpha`` is a net morphism."""
    if foot_left.dom != p.left or foot_left.cod != q.left:
        raise TypeMismatch("left foot map is not typed between the left feet")
    if foot_right.dom != p.right or foot_right.cod != q.right:
        raise TypeMismatch("right foot map is not typed between the right feet")
    if not check_petri_morphism(alpha, p.net, q.net):
        return False
    f = alpha.place_map
    return p.in_leg.then(f) == foot_left.then(q.in_leg) and p.out_leg.then(
        f
    ) == foot_right.then(q.out_leg)


def _place_signature(net: PetriNet, place: str) -> tuple:
    ins = sorted(net.src[t][place] for t in net.transitions if net.src[t][place])
    outs = sorted(net.tgt[t][place] for t in net.transitions if net.tgt[t][place])
    return tuple(ins), tuple(outs)


def iso_nets(
    p: PetriNet,
    q: PetriNet,
    pins: Mapping[str, str],
    transition_match=None,
) -> Optional[tuple[FinFunction, FinFunction]]:
    """Place and transition bijections making ``p`` and ``q`` equal.

    ``pins`` fixes some place images.  ``transition_match(phi)`` may replace
    the default arc-multiset matching; it returns a transition bijection or
    ``None``.
    """
    if len(p.places) != len(q.places) or len(p.transitions) != len(q.transitions):
        return None
    sig_p = {x: _place_signature(p, x) for x in p.places}
    sig_q = {y: _place_signature(q, y) for y in q.places}
    found: dict[str, dict[str, str]] = {}

    def match(phi: dict[str, str]) -> Optional[dict[str, str]]:
        buckets: dict[tuple, list[str]] = {}
        for u in q.transitions:
            buckets.setdefault((q.src[u], q.tgt[u]), []).append(u)
        psi = {}
        for t in p.transitions:
            key = (p.src[t].pushforward(phi.__getitem__), p.tgt[t].pushforward(phi.__getitem__))
            bucket = buckets.get(key)
            if not bucket:
                return None
            # prefer the transition with the same name when there is a choice
            pick = t if t in bucket else bucket[0]
            bucket.remove(pick)
            psi[t] = pick
        return psi

    matcher = transition_match or match

    def accept(phi: dict[str, str]) -> bool:
        psi = matcher(phi)
        if psi is None:
            return False
        found["phi"], found["psi"] = dict(phi), psi
        return True

    phi = csp.search_bijection(
        p.places, q.places, pins, lambda s, d: sig_p[s] == sig_q[d], accept
    )
    if phi is None:
        return None
    return (
        FinFunction(p.places, q.places, found["phi"]),
        FinFunction(p.transitions, q.transitions, found["psi"]),
    )


def iso_open(p: OpenPetriNet, q: OpenPetriNet) -> Optional[tuple[FinFunction, FinFunction]]:
    """Isomorphism of open nets: net iso commuting with both legs."""
    if p.left != q.left or p.right != q.right:
        return None
    pins = csp.leg_pins([(p.in_leg, q.in_leg), (p.out_leg, q.out_leg)])
    if pins is None:
        return None
    return iso_nets(p.net, q.net, pins)
