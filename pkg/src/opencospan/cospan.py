"""Cospans of finite sets: composition, tensor, isomorphism and Frobenius laws.

Composition is diagrammatic: ``compose(p, q)`` runs ``p`` then ``q`` and needs
``p.right == q.left``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Optional

from .errors import FootMismatch, LawViolation, TypeMismatch
from .finset import (
    LEFT_TAG,
    RIGHT_TAG,
    FinFunction,
    FinSet,
    bang,
    codiagonal,
    coproduct,
    pushout,
    tensor_map,
)


@dataclass(frozen=True)
class FinCospan:
    left: FinSet
    right: FinSet
    apex: FinSet
    in_leg: FinFunction
    out_leg: FinFunction

    def __post_init__(self):
        if self.in_leg.dom != self.left or self.in_leg.cod != self.apex:
            raise TypeMismatch("in_leg must run from the left foot to the apex")
        if self.out_leg.dom != self.right or self.out_leg.cod != self.apex:
            raise TypeMismatch("out_leg must run from the right foot to the apex")

    @classmethod
    def from_legs(cls, in_leg: FinFunction, out_leg: FinFunction) -> FinCospan:
        return cls(in_leg.dom, out_leg.dom, in_leg.cod, in_leg, out_leg)


@dataclass(frozen=True)
class CospanMap:
    """A 2-cell between cospans: foot maps plus an apex map."""

    src: FinCospan
    dst: FinCospan
    foot_left: FinFunction
    foot_right: FinFunction
    apex_map: FinFunction

    def is_valid(self) -> bool:
        typed = (
            self.foot_left.dom == self.src.left
            and self.foot_left.cod == self.dst.left
            and self.foot_right.dom == self.src.right
            and self.foot_right.cod == self.dst.right
            and self.apex_map.dom == self.src.apex
            and self.apex_map.cod == self.dst.apex
        )
        if not typed:
            return False
        return (
            self.src.in_leg.then(self.apex_map) == self.foot_left.then(self.dst.in_leg)
            and self.src.out_leg.then(self.apex_map)
            == self.foot_right.then(self.dst.out_leg)
        )


def identity_cospan(a: FinSet) -> FinCospan:
    ident = FinFunction.identity(a)
    return FinCospan(a, a, a, ident, ident)


def compose_with_pushout(p: FinCospan, q: FinCospan):
    """Compose and also hand back the pushout used (decorations need it)."""
    if p.right != q.left:
        raise FootMismatch(p.right, q.left)
    po = pushout(p.out_leg, q.in_leg)
    composite = FinCospan(
        p.left,
        q.right,
        po.apex,
        p.in_leg.then(po.left_inj),
        q.out_leg.then(po.right_inj),
    )
    return composite, po


def compose(p: FinCospan, q: FinCospan) -> FinCospan:
    return compose_with_pushout(p, q)[0]


def compose_all(*cospans: FinCospan) -> FinCospan:
    """``c1 ; c2 ; ...`` left to right."""
    if not cospans:
        raise ValueError("compose_all needs at least one cospan")
    result = cospans[0]
    for c in cospans[1:]:
        result = compose(result, c)
    return result


def tensor(p: FinCospan, q: FinCospan) -> FinCospan:
    left, _, _ = coproduct(p.left, q.left)
    right, _, _ = coproduct(p.right, q.right)
    apex, _, _ = coproduct(p.apex, q.apex)
    return FinCospan(
        left, right, apex, tensor_map(p.in_leg, q.in_leg), tensor_map(p.out_leg, q.out_leg)
    )


def search_bijection(
    src: Iterable[str],
    dst: Iterable[str],
    pinned: Mapping[str, str],
    compatible: Callable[[str, str], bool] = lambda s, d: True,
    accept: Callable[[dict[str, str]], bool] = lambda m: True,
) -> Optional[dict[str, str]]:
    """Backtracking search for a bijection ``src -> dst`` extending ``pinned``.

    ``compatible`` prunes single assignments; ``accept`` judges a complete
    assignment.  Candidates with the same label are tried first, so
    identically-built objects are matched without real search.
    """
    src = list(src)
    dst = list(dst)
    if len(src) != len(dst):
        return None
    used = set(pinned.values())
    if len(used) != len(pinned):
        return None
    for s, d in pinned.items():
        if not compatible(s, d):
            return None
    free = [s for s in src if s not in pinned]
    dst_free = [d for d in dst if d not in used]
    dst_set = set(dst_free)
    assignment = dict(pinned)

    def rec(i: int) -> bool:
        if i == len(free):
            return accept(assignment)
        s = free[i]
        options = ([s] if s in dst_set else []) + [d for d in dst_free if d != s]
        for d in options:
            if d in used or not compatible(s, d):
                continue
            used.add(d)
            assignment[s] = d
            if rec(i + 1):
                return True
            used.discard(d)
            del assignment[s]
        return False

    return dict(assignment) if rec(0) else None


def leg_pins(
    pairs: Iterable[tuple[FinFunction, FinFunction]],
) -> Optional[dict[str, str]]:
    """Apex assignments forced by requiring ``phi ∘ f = g`` for each leg pair."""
    pins: dict[str, str] = {}
    for f, g in pairs:
        for x in f.dom:
            s, d = f(x), g(x)
            if pins.setdefault(s, d) != d:
                return None
    return pins


def iso_cospan(p: FinCospan, q: FinCospan) -> Optional[FinFunction]:
    """An apex bijection commuting with both legs, or ``None``."""
    if p.left != q.left or p.right != q.right or len(p.apex) != len(q.apex):
        return None
    pins = leg_pins([(p.in_leg, q.in_leg), (p.out_leg, q.out_leg)])
    if pins is None:
        return None
    found = search_bijection(p.apex, q.apex, pins)
    if found is None:
        return None
    return FinFunction(p.apex, q.apex, found)


def companion(f: FinFunction) -> FinCospan:
    """The cospan ``dom -f-> cod <-id- cod``."""
    return FinCospan(f.dom, f.cod, f.cod, f, FinFunction.identity(f.cod))


def conjoint(f: FinFunction) -> FinCospan:
    """The cospan ``cod -id-> cod <-f- dom``."""
    return FinCospan(f.cod, f.dom, f.cod, FinFunction.identity(f.cod), f)


# -- structural bijections ---------------------------------------------------


def associator(a: FinSet, b: FinSet, c: FinSet) -> FinFunction:
    """``(a + b) + c -> a + (b + c)``."""
    ab, _, _ = coproduct(a, b)
    src, _, _ = coproduct(ab, c)
    bc, _, _ = coproduct(b, c)
    dst, _, _ = coproduct(a, bc)
    L, R = LEFT_TAG, RIGHT_TAG
    mapping = {L + L + x: L + x for x in a}
    mapping.update({L + R + y: R + L + y for y in b})
    mapping.update({R + z: R + R + z for z in c})
    return FinFunction(src, dst, mapping)


def left_unitor(a: FinSet) -> FinFunction:
    """``∅ + a -> a``."""
    src, _, inr = coproduct(FinSet(), a)
    return inr.inverse()


def right_unitor(a: FinSet) -> FinFunction:
    """``a + ∅ -> a``."""
    src, inl, _ = coproduct(a, FinSet())
    return inl.inverse()


def swap(a: FinSet, b: FinSet) -> FinFunction:
    """``a + b -> b + a``."""
    src, _, _ = coproduct(a, b)
    dst, _, _ = coproduct(b, a)
    mapping = {LEFT_TAG + x: RIGHT_TAG + x for x in a}
    mapping.update({RIGHT_TAG + y: LEFT_TAG + y for y in b})
    return FinFunction(src, dst, mapping)


def symmetry_cospan(a: FinSet) -> FinCospan:
    """``s : a + a ⇸ a + a`` with the swap as in-leg and identity out-leg."""
    s = swap(a, a)
    return FinCospan(s.dom, s.cod, s.cod, s, FinFunction.identity(s.cod))


# -- Frobenius structure -----------------------------------------------------


def frobenius_generators(a: FinSet) -> dict[str, FinCospan]:
    nabla = codiagonal(a)
    ident = FinFunction.identity(a)
    empty = bang(a)
    return {
        "mu": FinCospan(nabla.dom, a, a, nabla, ident),
        "eta": FinCospan(FinSet(), a, a, empty, ident),
        "delta": FinCospan(a, nabla.dom, a, ident, nabla),
        "epsilon": FinCospan(a, FinSet(), a, ident, empty),
        "cup": FinCospan(nabla.dom, FinSet(), a, nabla, empty),
        "cap": FinCospan(FinSet(), nabla.dom, a, empty, nabla),
    }


FROBENIUS_LAWS = (
    "associativity",
    "left unit",
    "right unit",
    "commutativity",
    "frobenius (left)",
    "frobenius (right)",
    "special",
    "zigzag (left)",
    "zigzag (right)",
)


def frobenius_law_sides(a: FinSet) -> dict[str, tuple[FinCospan, FinCospan]]:
    """Both sides of every law, composed diagrammatically.

    Structural bijections (associators, unitors) are inserted as companion
    cospans so both sides have literally equal feet.
    """
    g = frobenius_generators(a)
    mu, eta, delta, eps, cup, cap = (
        g["mu"], g["eta"], g["delta"], g["epsilon"], g["cup"], g["cap"]
    )
    ident = identity_cospan(a)
    empty = FinSet()
    assoc = associator(a, a, a)
    lam, rho = left_unitor(a), right_unitor(a)

    return {
        "associativity": (
            compose_all(tensor(mu, ident), mu),
            compose_all(companion(assoc), tensor(ident, mu), mu),
        ),
        "left unit": (compose(tensor(eta, ident), mu), companion(lam)),
        "right unit": (compose(tensor(ident, eta), mu), companion(rho)),
        "commutativity": (compose(symmetry_cospan(a), mu), mu),
        "frobenius (left)": (
            compose_all(tensor(delta, ident), companion(assoc), tensor(ident, mu)),
            compose(mu, delta),
        ),
        "frobenius (right)": (
            compose_all(tensor(ident, delta), companion(assoc.inverse()), tensor(mu, ident)),
            compose(mu, delta),
        ),
        "special": (compose(delta, mu), ident),
        "zigzag (left)": (
            compose_all(
                companion(rho.inverse()),
                tensor(ident, cap),
                companion(assoc.inverse()),
                tensor(cup, ident),
                companion(lam),
            ),
            ident,
        ),
        "zigzag (right)": (
            compose_all(
                companion(lam.inverse()),
                tensor(cap, ident),
                companion(assoc),
                tensor(ident, cup),
                companion(rho),
            ),
            ident,
        ),
    }


def check_frobenius_laws(a: FinSet, strict: bool = True) -> dict[str, bool]:
    """Check the special commutative Frobenius laws up to cospan isomorphism.

    Returns ``{law: holds}``.  With ``strict`` a failing law raises
    :class:`LawViolation`.
    """
    if len(a) > 8:
        raise ValueError("law checks are limited to sets of size <= 8")
    report = {}
    for law, (lhs, rhs) in frobenius_law_sides(a).items():
        report[law] = iso_cospan(lhs, rhs) is not None
        if strict and not report[law]:
            raise LawViolation(law)
    return report
