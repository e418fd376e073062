"""Vector fields on R^S and open dynamical systems as decorated cospans.

A field maps every state variable to an :class:`~opencospan.expr.Expr`.
Named parameters (spring constants, masses, rate constants) stay symbolic
and are frozen to numbers only when the field is evaluated or compiled.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence, Union

import numpy as np

from . import cospan as csp
from .errors import FootMismatch, ScopeMismatch, ShapeMismatch, TypeMismatch
from .expr import ZERO, Const, Expr, compile_exprs, equivalent, parse, total
from .finset import LEFT_TAG, RIGHT_TAG, FinFunction, FinSet, coproduct

Flow = Union[float, Expr, str]


@dataclass(frozen=True, eq=False)
class VectorField:
    scope: FinSet
    components: Mapping[str, Expr]
    params: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self):
        comps = {k: parse(v) if isinstance(v, str) else v for k, v in self.components.items()}
        object.__setattr__(self, "components", comps)
        object.__setattr__(self, "params", {k: float(v) for k, v in self.params.items()})
        if set(comps) != set(self.scope):
            raise ScopeMismatch("a vector field needs exactly one component per variable")
        clash = set(self.params) & set(self.scope)
        if clash:
            raise ScopeMismatch(f"parameters shadow state variables: {sorted(clash)}")
        allowed = set(self.scope) | set(self.params)
        for k, e in comps.items():
            stray = e.variables() - allowed
            if stray:
                raise ScopeMismatch(f"component {k!r} uses unknown names {sorted(stray)}")

    @classmethod
    def zero(cls, scope: FinSet) -> VectorField:
        return cls(scope, {s: ZERO for s in scope})

    def __getitem__(self, s: str) -> Expr:
        return self.components[s]

    def __eq__(self, other: object) -> bool:
        """Structural equality; use :meth:`equivalent` for equality as functions."""
        if not isinstance(other, VectorField):
            return NotImplemented
        return (
            self.scope == other.scope
            and dict(self.params) == dict(other.params)
            and dict(self.components) == dict(other.components)
        )

    __hash__ = None  # type: ignore[assignment]

    def compile(self, params: Optional[Mapping[str, float]] = None):
        """``f(x, t) -> list`` with ``x`` in scope order."""
        values = dict(self.params)
        values.update(params or {})
        return compile_exprs([self.components[s] for s in self.scope], list(self.scope), values)

    def equivalent(self, other: VectorField, relabel: Optional[Mapping[str, str]] = None) -> bool:
        """Same field after binding parameters, with ``self``'s variables renamed."""
        relabel = dict(relabel or {s: s for s in self.scope})
        if set(relabel.values()) != set(other.scope) or set(relabel) != set(self.scope):
            return False
        for s in self.scope:
            lhs = self.components[s].substitute(
                {p: Const(v) for p, v in self.params.items()}
            ).rename(relabel)
            rhs = other.components[relabel[s]].substitute(
                {p: Const(v) for p, v in other.params.items()}
            )
            if not equivalent(lhs, rhs):
                return False
        return True


def eval_field(
    v: VectorField,
    x: Mapping[str, float] | Sequence[float],
    t: float = 0.0,
    params: Optional[Mapping[str, float]] = None,
) -> np.ndarray:
    """Evaluate componentwise; ``x`` is a label map or a vector in scope order."""
    if isinstance(x, Mapping):
        missing = [s for s in v.scope if s not in x]
        if missing:
            raise ShapeMismatch(f"no value for {missing}")
        xs = [float(x[s]) for s in v.scope]
    else:
        xs = [float(c) for c in x]
        if len(xs) != len(v.scope):
            raise ShapeMismatch(f"expected {len(v.scope)} values, got {len(xs)}")
    return np.array(v.compile(params)(xs, t), dtype=float)


def pushforward_field(f: FinFunction, v: VectorField) -> VectorField:
    """``D(f)(v) = f_* ∘ v ∘ f^*``: substitute along ``f`` and sum over fibers."""
    if f.dom != v.scope:
        raise ScopeMismatch(f"map starts at {f.dom}, field lives on {v.scope}")
    rename = dict(f.items())
    comps = {
        y: total(v.components[x].rename(rename) for x in f.fiber(y)) for y in f.cod
    }
    return VectorField(f.cod, comps, v.params)


def _merge_params(p: Mapping[str, float], q: Mapping[str, float]):
    """Union of parameter tables; a name bound to two values gets tagged per side."""
    clash = {k for k in set(p) & set(q) if p[k] != q[k]}
    left = {k: (LEFT_TAG + k if k in clash else k) for k in p}
    right = {k: (RIGHT_TAG + k if k in clash else k) for k in q}
    merged = {left[k]: v for k, v in p.items()}
    merged.update({right[k]: v for k, v in q.items()})
    return merged, left, right


def laxator(v: VectorField, w: VectorField) -> VectorField:
    """``i_* ∘ v ∘ i^* + i'_* ∘ w ∘ i'^*`` on ``S + S'``."""
    scope, inl, inr = coproduct(v.scope, w.scope)
    params, pl, pr = _merge_params(v.params, w.params)
    rl = dict(inl.items())
    rl.update({k: n for k, n in pl.items() if k != n})
    rr = dict(inr.items())
    rr.update({k: n for k, n in pr.items() if k != n})
    comps = {inl(s): v.components[s].rename(rl) for s in v.scope}
    comps.update({inr(s): w.components[s].rename(rr) for s in w.scope})
    return VectorField(scope, comps, params)


@dataclass(frozen=True)
class OpenDynam:
    cospan: csp.FinCospan
    field: VectorField

    def __post_init__(self):
        if self.field.scope != self.cospan.apex:
            raise TypeMismatch("field scope must equal the cospan apex")

    @property
    def left(self) -> FinSet:
        return self.cospan.left

    @property
    def right(self) -> FinSet:
        return self.cospan.right

    @property
    def scope(self) -> FinSet:
        return self.cospan.apex


def compose_open_dynam_with_pushout(p: OpenDynam, q: OpenDynam):
    if p.right != q.left:
        raise FootMismatch(p.right, q.left)
    composite, po = csp.compose_with_pushout(p.cospan, q.cospan)
    fld = pushforward_field(po.quotient, laxator(p.field, q.field))
    return OpenDynam(composite, fld), po


def compose_open_dynam(p: OpenDynam, q: OpenDynam) -> OpenDynam:
    return compose_open_dynam_with_pushout(p, q)[0]


def tensor_open_dynam(p: OpenDynam, q: OpenDynam) -> OpenDynam:
    return OpenDynam(csp.tensor(p.cospan, q.cospan), laxator(p.field, q.field))


def iota_dynam(c: csp.FinCospan) -> OpenDynam:
    """The empty decoration: the zero field on the apex."""
    return OpenDynam(c, VectorField.zero(c.apex))


def iso_open_dynam(p: OpenDynam, q: OpenDynam) -> Optional[FinFunction]:
    """Apex bijection commuting with the legs and carrying one field to the other."""
    if p.left != q.left or p.right != q.right or len(p.scope) != len(q.scope):
        return None
    pins = csp.leg_pins(
        [(p.cospan.in_leg, q.cospan.in_leg), (p.cospan.out_leg, q.cospan.out_leg)]
    )
    if pins is None:
        return None
    found = csp.search_bijection(
        p.scope, q.scope, pins, accept=lambda phi: p.field.equivalent(q.field, phi)
    )
    return None if found is None else FinFunction(p.scope, q.scope, found)


def _flow_values(
    foot: FinSet, flows: Optional[Mapping[str, Flow]], t: float, what: str
) -> dict[str, float]:
    flows = dict(flows or {})
    stray = set(flows) - set(foot)
    if stray:
        raise ShapeMismatch(f"{what} given for labels outside the foot: {sorted(stray)}")
    out = {}
    for x in foot:
        val = flows.get(x, 0.0)
        if isinstance(val, str):
            val = parse(val)
        out[x] = val.evaluate({}, t) if isinstance(val, Expr) else float(val)
    return out


def flow_vector(
    d: OpenDynam,
    inflow: Optional[Mapping[str, Flow]],
    outflow: Optional[Mapping[str, Flow]],
    t: float = 0.0,
) -> np.ndarray:
    """``i_*(I(t)) - o_*(O(t))`` in scope order."""
    idx = {s: k for k, s in enumerate(d.scope)}
    out = np.zeros(len(d.scope))
    for x, val in _flow_values(d.left, inflow, t, "inflow").items():
        out[idx[d.cospan.in_leg(x)]] += val
    for y, val in _flow_values(d.right, outflow, t, "outflow").items():
        out[idx[d.cospan.out_leg(y)]] -= val
    return out


def open_residual(
    d: OpenDynam,
    x: Mapping[str, float] | Sequence[float],
    inflow: Optional[Mapping[str, Flow]] = None,
    outflow: Optional[Mapping[str, Flow]] = None,
    t: float = 0.0,
    params: Optional[Mapping[str, float]] = None,
) -> np.ndarray:
    """``v(x) + i_*(I) - o_*(O)``: inflow enters positive, outflow negative."""
    return eval_field(d.field, x, t, params) + flow_vector(d, inflow, outflow, t)
