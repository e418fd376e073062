"""JSON encodings of finite sets, cospans, nets, fields and steady-state samples.

Every open-system file carries a ``"kind"`` discriminator: ``cospan``,
``open_petri``, ``open_rated`` or ``open_dynam``.  Plain nets (``petri``,
``rated``) are accepted wherever only a net is needed.
"""
from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Mapping, Union

from .cospan import FinCospan
from .dynam import OpenDynam, VectorField
from .errors import OpenCospanError, SchemaError
from .expr import exact_str
from .finset import FinFunction, FinSet
from .numsim import SteadySample
from .petri import Multiset, OpenPetriNet, PetriNet
from .rates import OpenRatedNet, RatedNet

OPEN_KINDS = ("cospan", "open_petri", "open_rated", "open_dynam")
NET_KINDS = ("petri", "rated")

Model = Union[FinCospan, OpenPetriNet, OpenRatedNet, OpenDynam, PetriNet, RatedNet]


def _need(obj: Mapping, key: str, what: str):
    if not isinstance(obj, Mapping):
        raise SchemaError(f"{what} must be a JSON object")
    if key not in obj:
        raise SchemaError(f"{what} is missing {key!r}")
    return obj[key]


def _str_list(value, what: str) -> list[str]:
    if not isinstance(value, list) or not all(isinstance(x, str) for x in value):
        raise SchemaError(f"{what} must be a list of strings")
    return value


# -- finite sets and functions ---------------------------------------------------

def finset_to_json(a: FinSet) -> dict:
    return {"elements": list(a)}


def finset_from_json(obj, what: str = "finite set") -> FinSet:
    elems = obj if isinstance(obj, list) else _need(obj, "elements", what)
    try:
        return FinSet(_str_list(elems, what))
    except ValueError as exc:
        raise SchemaError(f"{what}: {exc}") from exc


def finfunction_to_json(f: FinFunction) -> dict:
    return {"dom": finset_to_json(f.dom), "cod": finset_to_json(f.cod), "map": f.mapping}


def finfunction_from_json(obj, dom: FinSet | None = None, cod: FinSet | None = None,
                          what: str = "function") -> FinFunction:
    """Accepts the full ``{"dom","cod","map"}`` form or, when the ends are known, a bare map."""
    if isinstance(obj, Mapping) and "map" in obj:
        mapping = obj["map"]
        if "dom" in obj:
            dom = finset_from_json(obj["dom"], f"{what} domain")
        if "cod" in obj:
            cod = finset_from_json(obj["cod"], f"{what} codomain")
    else:
        mapping = obj
    if dom is None or cod is None:
        raise SchemaError(f"{what} needs its domain and codomain")
    if not isinstance(mapping, Mapping) or not all(
        isinstance(k, str) and isinstance(v, str) for k, v in mapping.items()
    ):
        raise SchemaError(f"{what} map must be an object from labels to labels")
    return FinFunction(dom, cod, dict(mapping))


def _legs_to_json(left: FinSet, right: FinSet, in_leg: FinFunction, out_leg: FinFunction) -> dict:
    return {
        "left": finset_to_json(left),
        "right": finset_to_json(right),
        "inLeg": finfunction_to_json(in_leg),
        "outLeg": finfunction_to_json(out_leg),
    }


def _legs_from_json(obj: Mapping, apex: FinSet):
    left = finset_from_json(_need(obj, "left", "open system"), "left foot")
    right = finset_from_json(_need(obj, "right", "open system"), "right foot")
    in_leg = finfunction_from_json(_need(obj, "inLeg", "open system"), left, apex, "inLeg")
    out_leg = finfunction_from_json(_need(obj, "outLeg", "open system"), right, apex, "outLeg")
    return left, right, in_leg, out_leg


def cospan_to_json(c: FinCospan) -> dict:
    out = {"kind": "cospan", "apex": finset_to_json(c.apex)}
    out.update(_legs_to_json(c.left, c.right, c.in_leg, c.out_leg))
    return out


def cospan_from_json(obj: Mapping) -> FinCospan:
    apex = finset_from_json(_need(obj, "apex", "cospan"), "apex")
    left, right, in_leg, out_leg = _legs_from_json(obj, apex)
    return FinCospan(left, right, apex, in_leg, out_leg)


# -- nets -------------------------------------------------------------------------

def _counts(value, what: str) -> Multiset:
    if not isinstance(value, Mapping) or not all(
        isinstance(k, str) and isinstance(v, int) and not isinstance(v, bool) and v >= 0
        for k, v in value.items()
    ):
        raise SchemaError(f"{what} must map places to natural numbers")
    return Multiset(value)


def net_to_json(net: PetriNet, rates: Mapping[str, float] | None = None) -> dict:
    transitions = []
    for t in net.transitions:
        entry: dict[str, Any] = {"name": t, "in": net.src[t].as_dict(), "out": net.tgt[t].as_dict()}
        if rates is not None:
            entry["rate"] = rates[t]
        transitions.append(entry)
    return {"places": list(net.places), "transitions": transitions}


def net_from_json(obj: Mapping, rated: bool = False) -> tuple[PetriNet, dict[str, float]]:
    places = FinSet(_str_list(_need(obj, "places", "net"), "places"))
    entries = _need(obj, "transitions", "net")
    if not isinstance(entries, list):
        raise SchemaError("transitions must be a list")
    names, src, tgt, rates = [], {}, {}, {}
    for entry in entries:
        name = _need(entry, "name", "transition")
        if not isinstance(name, str):
            raise SchemaError("transition names must be strings")
        names.append(name)
        src[name] = _counts(entry.get("in", {}), f"inputs of {name!r}")
        tgt[name] = _counts(entry.get("out", {}), f"outputs of {name!r}")
        if rated:
            r = _need(entry, "rate", f"transition {name!r}")
            if isinstance(r, bool) or not isinstance(r, (int, float)):
                raise SchemaError(f"rate of {name!r} must be a number")
            rates[name] = float(r)
    try:
        trans = FinSet(names)
    except ValueError as exc:
        raise SchemaError(str(exc)) from exc
    return PetriNet(places, trans, src, tgt), rates


# -- fields -----------------------------------------------------------------------

def field_to_json(v: VectorField) -> dict:
    return {
        "scope": list(v.scope),
        "components": {s: exact_str(v[s]) for s in v.scope},
        "params": dict(v.params),
    }


def field_from_json(obj: Mapping) -> VectorField:
    scope = FinSet(_str_list(_need(obj, "scope", "vector field"), "scope"))
    comps = _need(obj, "components", "vector field")
    if not isinstance(comps, Mapping) or not all(isinstance(e, str) for e in comps.values()):
        raise SchemaError("components must map variables to expression strings")
    params = obj.get("params", {})
    if not isinstance(params, Mapping) or not all(
        isinstance(v, (int, float)) and not isinstance(v, bool) for v in params.values()
    ):
        raise SchemaError("params must map names to numbers")
    try:
        return VectorField(scope, dict(comps), dict(params))
    except ValueError as exc:
        raise SchemaError(str(exc)) from exc


# -- dispatch ---------------------------------------------------------------------

def to_json(model: Model) -> dict:
    if isinstance(model, FinCospan):
        return cospan_to_json(model)
    if isinstance(model, OpenPetriNet):
        out = {"kind": "open_petri", **net_to_json(model.net)}
        out.update(_legs_to_json(model.left, model.right, model.in_leg, model.out_leg))
        return out
    if isinstance(model, OpenRatedNet):
        c = model.cospan
        out = {"kind": "open_rated", **net_to_json(model.decoration.net, model.decoration.rate)}
        out.update(_legs_to_json(c.left, c.right, c.in_leg, c.out_leg))
        return out
    if isinstance(model, OpenDynam):
        c = model.cospan
        out = {"kind": "open_dynam", **field_to_json(model.field)}
        out.update(_legs_to_json(c.left, c.right, c.in_leg, c.out_leg))
        return out
    if isinstance(model, RatedNet):
        return {"kind": "rated", **net_to_json(model.net, model.rate)}
    if isinstance(model, PetriNet):
        return {"kind": "petri", **net_to_json(model)}
    raise TypeError(f"cannot serialize {type(model).__name__}")


def from_json(obj: Any) -> Model:
    """Decode any supported value.  Raises :class:`SchemaError` on bad input."""
    kind = _need(obj, "kind", "model")
    try:
        if kind == "cospan":
            return cospan_from_json(obj)
        if kind in ("open_petri", "petri"):
            net, _ = net_from_json(obj)
            if kind == "petri":
                return net
            left, right, in_leg, out_leg = _legs_from_json(obj, net.places)
            return OpenPetriNet(left, right, net, in_leg, out_leg)
        if kind in ("open_rated", "rated"):
            net, rates = net_from_json(obj, rated=True)
            deco = RatedNet(net, rates)
            if kind == "rated":
                return deco
            left, right, in_leg, out_leg = _legs_from_json(obj, net.places)
            return OpenRatedNet(FinCospan(left, right, net.places, in_leg, out_leg), deco)
        if kind == "open_dynam":
            fld = field_from_json(obj)
            left, right, in_leg, out_leg = _legs_from_json(obj, fld.scope)
            return OpenDynam(FinCospan(left, right, fld.scope, in_leg, out_leg), fld)
    except SchemaError:
        raise
    except (OpenCospanError, ValueError, TypeError) as exc:
        raise SchemaError(f"{kind}: {exc}") from exc
    raise SchemaError(f"unknown kind {kind!r}")


def samples_to_json(samples) -> list[dict]:
    return [s.to_json() for s in samples]


def samples_from_json(obj) -> list[SteadySample]:
    if not isinstance(obj, list):
        raise SchemaError("samples must be a JSON array")
    try:
        return [SteadySample.from_json(s) for s in obj]
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"bad sample: {exc}") from exc


def dumps(value: Any) -> str:
    return json.dumps(value, indent=2, ensure_ascii=False) + "\n"


def load(path: Union[str, Path]) -> Model:
    """Read and decode a model file.  ``OSError``/``JSONDecodeError`` propagate."""
    with open(path, encoding="utf-8") as fh:
        return from_json(json.load(fh))


def save(model: Model, path: Union[str, Path]) -> None:
    Path(path).write_text(dumps(to_json(model)), encoding="utf-8")
