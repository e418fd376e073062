"""Finite sets of labels, total functions between them, coproducts and pushouts.

Everything else in the package composes through :func:`pushout`.  Labels are
opaque strings; the coproduct ``a + b`` tags left elements with ``"L."`` and
right elements with ``"R."`` so two copies of the same label stay distinct.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping

from .errors import CodomainMismatch, DomainMismatch

LEFT_TAG = "L."
RIGHT_TAG = "R."


class FinSet:
    """An ordered collection of distinct labels.

    Equality is set equality; iteration follows the stored order.
    """

    __slots__ = ("_elements", "_index")

    def __init__(self, elements: Iterable[str] = ()):
        elems = tuple(elements)
        for e in elems:
            if not isinstance(e, str):
                raise TypeError(f"FinSet labels must be strings, got {e!r}")
        index = {e: i for i, e in enumerate(elems)}
        if len(index) != len(elems):
            dupes = sorted({e for e in elems if elems.count(e) > 1})
            raise ValueError(f"duplicate labels in FinSet: {dupes}")
        object.__setattr__(self, "_elements", elems)
        object.__setattr__(self, "_index", index)

    def __setattr__(self, name, value):
        raise AttributeError("FinSet is immutable")

    @property
    def elements(self) -> tuple[str, ...]:
        return self._elements

    def __iter__(self) -> Iterator[str]:
        return iter(self._elements)

    def __len__(self) -> int:
        return len(self._elements)

    def __contains__(self, x: object) -> bool:
        return x in self._index

    def index(self, x: str) -> int:
        return self._index[x]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FinSet):
            return NotImplemented
        return len(self) == len(other) and all(e in other._index for e in self._elements)

    def __hash__(self) -> int:
        return hash(frozenset(self._elements))

    def __repr__(self) -> str:
        return f"FinSet({list(self._elements)!r})"


class FinFunction:
    """A total function ``dom -> cod`` between finite sets."""

    __slots__ = ("dom", "cod", "_map")

    def __init__(self, dom: FinSet, cod: FinSet, mapping: Mapping[str, str]):
        if not isinstance(dom, FinSet):
            dom = FinSet(dom)
        if not isinstance(cod, FinSet):
            cod = FinSet(cod)
        missing = [x for x in dom if x not in mapping]
        if missing:
            raise DomainMismatch(f"function is not total, missing images for {missing}")
        extra = [x for x in mapping if x not in dom]
        if extra:
            raise DomainMismatch(f"mapping mentions labels outside the domain: {extra}")
        stray = [mapping[x] for x in dom if mapping[x] not in cod]
        if stray:
            raise CodomainMismatch(f"images outside the codomain: {stray}")
        object.__setattr__(self, "dom", dom)
        object.__setattr__(self, "cod", cod)
        object.__setattr__(self, "_map", {x: mapping[x] for x in dom})

    def __setattr__(self, name, value):
        raise AttributeError("FinFunction is immutable")

    @classmethod
    def identity(cls, a: FinSet) -> FinFunction:
        return cls(a, a, {x: x for x in a})

    def __call__(self, x: str) -> str:
        return self._map[x]

    @property
    def mapping(self) -> dict[str, str]:
        return dict(self._map)

    def items(self):
        return self._map.items()

    def then(self, g: FinFunction) -> FinFunction:
        """Diagrammatic composite: first ``self`` then ``g``."""
        if g.dom != self.cod:
            raise DomainMismatch(f"cannot compose: codomain {self.cod} != domain {g.dom}")
        return FinFunction(self.dom, g.cod, {x: g(y) for x, y in self._map.items()})

    def after(self, f: FinFunction) -> FinFunction:
        """Classical composite ``self ∘ f``."""
        return f.then(self)

    def image(self) -> set[str]:
        return set(self._map.values())

    def fiber(self, y: str) -> list[str]:
        return [x for x, z in self._map.items() if z == y]

    def is_injective(self) -> bool:
        return len(self.image()) == len(self.dom)

    def is_surjective(self) -> bool:
        return len(self.image()) == len(self.cod)

    def is_bijection(self) -> bool:
        return len(self.dom) == len(self.cod) and self.is_injective()

    def inverse(self) -> FinFunction:
        if not self.is_bijection():
            raise ValueError("only bijections have inverses")
        return FinFunction(self.cod, self.dom, {y: x for x, y in self._map.items()})

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FinFunction):
            return NotImplemented
        return self.dom == other.dom and self.cod == other.cod and self._map == other._map

    def __hash__(self) -> int:
        return hash((self.dom, self.cod, frozenset(self._map.items())))

    def __repr__(self) -> str:
        return f"FinFunction({self._map!r}, cod={list(self.cod)!r})"


def coproduct(a: FinSet, b: FinSet) -> tuple[FinSet, FinFunction, FinFunction]:
    """Disjoint union ``a + b`` with its two injections."""
    total = FinSet([LEFT_TAG + x for x in a] + [RIGHT_TAG + y for y in b])
    inl = FinFunction(a, total, {x: LEFT_TAG + x for x in a})
    inr = FinFunction(b, total, {y: RIGHT_TAG + y for y in b})
    return total, inl, inr


def untag(label: str) -> str:
    if label.startswith(LEFT_TAG) or label.startswith(RIGHT_TAG):
        return label[len(LEFT_TAG):]
    return label


def strip_if_unambiguous(labels: list[str]) -> list[str]:
    """Drop one level of coproduct tags if that keeps the labels distinct."""
    stripped = [untag(x) for x in labels]
    if len(set(stripped)) == len(stripped):
        return stripped
    return list(labels)


def tagged_union(a: FinSet, b: FinSet) -> tuple[FinSet, FinFunction, FinFunction]:
    """Coproduct whose labels have their tags dropped when that is unambiguous.

    Used for transition sets of composites, which are disjoint unions that
    should stay readable.
    """
    total, inl, inr = coproduct(a, b)
    names = strip_if_unambiguous(list(total))
    rename = dict(zip(total, names))
    union = FinSet(names)
    return (
        union,
        FinFunction(a, union, {x: rename[inl(x)] for x in a}),
        FinFunction(b, union, {y: rename[inr(y)] for y in b}),
    )


def copair(f: FinFunction, g: FinFunction) -> FinFunction:
    """``⟨f, g⟩ : a + b -> c``."""
    if f.cod != g.cod:
        raise CodomainMismatch(f"copair needs a common codomain: {f.cod} vs {g.cod}")
    total, inl, inr = coproduct(f.dom, g.dom)
    mapping = {inl(x): f(x) for x in f.dom}
    mapping.update({inr(y): g(y) for y in g.dom})
    return FinFunction(total, f.cod, mapping)


def tensor_map(f: FinFunction, g: FinFunction) -> FinFunction:
    """``f + g : a + b -> c + d``."""
    src, _, _ = coproduct(f.dom, g.dom)
    tgt, inl, inr = coproduct(f.cod, g.cod)
    mapping = {LEFT_TAG + x: inl(f(x)) for x in f.dom}
    mapping.update({RIGHT_TAG + y: inr(g(y)) for y in g.dom})
    return FinFunction(src, tgt, mapping)


def codiagonal(a: FinSet) -> FinFunction:
    total, _, _ = coproduct(a, a)
    return FinFunction(total, a, {z: untag(z) for z in total})


def bang(a: FinSet) -> FinFunction:
    return FinFunction(FinSet(), a, {})


class UnionFind:
    """Disjoint sets over hashable items, with path compression."""

    def __init__(self, items: Iterable[str]):
        self.parent = {x: x for x in items}

    def find(self, x: str) -> str:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, x: str, y: str) -> None:
        rx, ry = self.find(x), self.find(y)
        if rx == ry:
            return
        # the smaller label becomes the root so class names are canonical
        if ry < rx:
            rx, ry = ry, rx
        self.parent[ry] = rx


@dataclass(frozen=True)
class PushoutResult:
    apex: FinSet
    left_inj: FinFunction
    right_inj: FinFunction
    quotient: FinFunction


def pushout(f: FinFunction, g: FinFunction) -> PushoutResult:
    """Pushout of the span ``m <-f- b -g-> m'``.

    The apex is ``(m + m')/~`` with ``~`` generated by ``f(x) ~ g(x)``.  Each
    class is named by its lexicographically least tagged member, with tags
    dropped when the resulting names stay distinct.  Classes are ordered by
    the first coproduct element they contain.
    """
    if f.dom != g.dom:
        raise DomainMismatch(f"pushout legs need a shared domain: {f.dom} vs {g.dom}")
    total, inl, inr = coproduct(f.cod, g.cod)
    uf = UnionFind(total)
    for x in f.dom:
        uf.union(inl(f(x)), inr(g(x)))
    roots: list[str] = []
    seen = set()
    for z in total:
        r = uf.find(z)
        if r not in seen:
            seen.add(r)
            roots.append(r)
    names = dict(zip(roots, strip_if_unambiguous(roots)))
    apex = FinSet([names[r] for r in roots])
    quotient = FinFunction(total, apex, {z: names[uf.find(z)] for z in total})
    return PushoutResult(
        apex=apex,
        left_inj=inl.then(quotient),
        right_inj=inr.then(quotient),
        quotient=quotient,
    )
