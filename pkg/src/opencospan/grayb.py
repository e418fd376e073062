"""Gray-boxing: rated nets to vector fields by the law of mass action."""
from __future__ import annotations

from .dynam import OpenDynam, VectorField
from .expr import Poly
from .rates import OpenRatedNet, RatedNet


def rate_symbol(transition: str) -> str:
    return f"r_{transition}"


def mass_action_polys(p: RatedNet) -> dict[str, Poly]:
    """``v_i = Σ_τ r(τ) (t(τ)_i - s(τ)_i) x^{s(τ)}`` with symbolic rate constants."""
    out = {s: Poly() for s in p.places}
    for tau in p.transitions:
        src, tgt = p.net.src[tau], p.net.tgt[tau]
        mono = tuple(sorted([(rate_symbol(tau), 1)] + list(src.items())))
        for s in src.support() | tgt.support():
            stoich = tgt[s] - src[s]
            if stoich:
                out[s] = out[s] + Poly({mono: float(stoich)})
    return out


def mass_action(p: RatedNet) -> VectorField:
    """The rate equation of ``p`` in polynomial normal form."""
    params = {rate_symbol(t): float(p.rate[t]) for t in p.transitions}
    clash = set(params) & set(p.places)
    if clash:
        raise ValueError(f"rate symbols collide with species names: {sorted(clash)}")
    polys = mass_action_polys(p)
    return VectorField(
        p.places, {s: polys[s].to_expr(first=params) for s in p.places}, params
    )


def gray_box(p: OpenRatedNet) -> OpenDynam:
    return OpenDynam(p.cospan, mass_action(p.decoration))


def rate_equations(p: RatedNet) -> list[str]:
    """One ``d[x]/dt = ...`` line per species, in scope order."""
    fld = mass_action(p)
    return [f"d[{s}]/dt = {fld[s]}" for s in p.places]
