"""Token semantics: firing, bounded reachability, transport along morphisms."""
from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass

from .errors import InvalidMorphism, NotEnabled, TypeMismatch, UnknownTransition
from .petri import Multiset, PetriMorphism, PetriNet, check_petri_morphism

log = logging.getLogger(__name__)

DEFAULT_STATE_CAP = 10**6


def check_marking(net: PetriNet, m: Multiset) -> None:
    stray = m.support() - set(net.places)
    if stray:
        raise TypeMismatch(f"marking mentions unknown places {sorted(stray)}")


def enabled(net: PetriNet, m: Multiset) -> list[str]:
    return [t for t in net.transitions if net.src[t] <= m]


def fire(net: PetriNet, m: Multiset, tau: str) -> Multiset:
    """``m - s(tau) + t(tau)``; raises :class:`NotEnabled` if ``s(tau) > m``."""
    if tau not in net.transitions:
        raise UnknownTransition(tau)
    if not net.src[tau] <= m:
        raise NotEnabled(f"{tau} needs {net.src[tau]!r} but the marking is {m!r}")
    return m - net.src[tau] + net.tgt[tau]


@dataclass(frozen=True)
class FiringSequence:
    start: Multiset
    steps: tuple[str, ...]
    end: Multiset

    def __len__(self) -> int:
        return len(self.steps)

    def validate(self, net: PetriNet) -> bool:
        m = self.start
        try:
            for tau in self.steps:
                m = fire(net, m, tau)
        except (NotEnabled, UnknownTransition):
            return False
        return m == self.end

    def then(self, other: FiringSequence) -> FiringSequence:
        if self.end != other.start:
            raise ValueError("sequences do not meet")
        return FiringSequence(self.start, self.steps + other.steps, other.end)


def run(net: PetriNet, m: Multiset, steps) -> FiringSequence:
    end = m
    for tau in steps:
        end = fire(net, end, tau)
    return FiringSequence(m, tuple(steps), end)


def reachable(
    net: PetriNet,
    m: Multiset,
    target: Multiset,
    max_depth: int,
    state_cap: int = DEFAULT_STATE_CAP,
) -> FiringSequence | None:
    """Shortest firing sequence of length ``<= max_depth`` from ``m`` to ``target``.

    Breadth-first; transitions are tried in stored order, so the witness is
    deterministic.  Stops (returning ``None``) once ``state_cap`` markings
    have been visited.
    """
    if max_depth < 0:
        raise ValueError("max_depth must be >= 0")
    check_marking(net, m)
    check_marking(net, target)
    if m == target:
        return FiringSequence(m, (), m)
    parent: dict[Multiset, tuple[Multiset, str] | None] = {m: None}
    frontier = deque([(m, 0)])
    while frontier:
        cur, depth = frontier.popleft()
        if depth == max_depth:
            continue
        for tau in net.transitions:
            if not net.src[tau] <= cur:
                continue
            nxt = cur - net.src[tau] + net.tgt[tau]
            if nxt in parent:
                continue
            parent[nxt] = (cur, tau)
            if nxt == target:
                steps = []
                node = nxt
                while parent[node] is not None:
                    prev, t = parent[node]
                    steps.append(t)
                    node = prev
                return FiringSequence(m, tuple(reversed(steps)), target)
            if len(parent) >= state_cap:
                log.warning("reachability search stopped after %d markings", len(parent))
                return None
            frontier.append((nxt, depth + 1))
    return None


def transport_firing(
    mor: PetriMorphism, seq: FiringSequence, source: PetriNet, target: PetriNet
) -> FiringSequence:
    """Image of a firing sequence under a Petri net morphism."""
    try:
        valid = check_petri_morphism(mor, source, target)
    except TypeMismatch as exc:
        raise InvalidMorphism(str(exc)) from exc
    if not valid:
        raise InvalidMorphism("the maps do not commute with source and target arcs")
    if not seq.validate(source):
        raise InvalidMorphism("sequence is not a valid run of the source net")
    f = mor.place_map
    image = FiringSequence(
        seq.start.pushforward(f),
        tuple(mor.trans_map(t) for t in seq.steps),
        seq.end.pushforward(f),
    )
    if not image.validate(target):
        raise InvalidMorphism("transported sequence does not re-validate")
    return image
