"""Numerics for open dynamical systems.

* fixed-step RK4 for ``dx/dt = v(x) + i_*(I(t)) - o_*(O(t))``
* multi-start damped Newton for steady states, i.e. samples of the black box
* gluing of steady states along a shared foot
"""
from __future__ import annotations

import csv
import io
import itertools
import os
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

import numpy as np

from .dynam import Flow, OpenDynam, compose_open_dynam_with_pushout
from .errors import Mismatch, NonFiniteState, ShapeMismatch
from .expr import Const, Expr, compile_exprs, parse

STEADY_TOL = 1e-9
DEDUP_DIST = 1e-6
MAX_ITER = 100
MAX_HALVINGS = 40


def worker_count() -> int:
    raw = os.environ.get("OPENCOSPAN_THREADS")
    if raw is None:
        return 1
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


class _OpenRHS:
    """Compiled right-hand side of the open dynamical system equation."""

    def __init__(
        self,
        d: OpenDynam,
        inflow: Optional[Mapping[str, Flow]] = None,
        outflow: Optional[Mapping[str, Flow]] = None,
        params: Optional[Mapping[str, float]] = None,
    ):
        self.labels = list(d.scope)
        index = {s: k for k, s in enumerate(self.labels)}
        self.field = d.field.compile(params)
        in_exprs = self._flows(d.left, inflow, "inflow")
        out_exprs = self._flows(d.right, outflow, "outflow")
        self.in_idx = [index[d.cospan.in_leg(x)] for x in d.left]
        self.out_idx = [index[d.cospan.out_leg(y)] for y in d.right]
        self.inflow = compile_exprs(in_exprs, [])
        self.outflow = compile_exprs(out_exprs, [])
        self.time_dependent = any(e.uses_time() for e in in_exprs + out_exprs)
        self._cached_flow = None

    @staticmethod
    def _flows(foot, flows, what):
        flows = dict(flows or {})
        stray = set(flows) - set(foot)
        if stray:
            raise ShapeMismatch(f"{what} given for labels outside the foot: {sorted(stray)}")
        exprs: list[Expr] = []
        for x in foot:
            val = flows.get(x, 0.0)
            if isinstance(val, str):
                val = parse(val)
            exprs.append(val if isinstance(val, Expr) else Const(float(val)))
        for e in exprs:
            if e.variables():
                raise ShapeMismatch(f"{what} may depend on time only, got {e}")
        return exprs

    def flow(self, t: float) -> np.ndarray:
        if not self.time_dependent and self._cached_flow is not None:
            return self._cached_flow
        out = np.zeros(len(self.labels))
        for k, val in zip(self.in_idx, self.inflow([], t)):
            out[k] += val
        for k, val in zip(self.out_idx, self.outflow([], t)):
            out[k] -= val
        if not self.time_dependent:
            self._cached_flow = out
        return out

    def __call__(self, x: np.ndarray, t: float = 0.0) -> np.ndarray:
        return np.array(self.field(x.tolist(), t), dtype=float) + self.flow(t)


@dataclass(frozen=True)
class Trajectory:
    labels: tuple[str, ...]
    times: np.ndarray
    states: np.ndarray

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["t", *self.labels])
        for t, row in zip(self.times, self.states):
            writer.writerow([repr(float(t)), *(repr(float(v)) for v in row)])
        return buf.getvalue()

    def final(self) -> dict[str, float]:
        return dict(zip(self.labels, self.states[-1].tolist()))


def _as_vector(labels: Sequence[str], x) -> np.ndarray:
    if isinstance(x, Mapping):
        missing = [s for s in labels if s not in x]
        if missing:
            raise ShapeMismatch(f"no value for {missing}")
        return np.array([float(x[s]) for s in labels])
    arr = np.asarray(x, dtype=float)
    if arr.shape != (len(labels),):
        raise ShapeMismatch(f"expected {len(labels)} values, got shape {arr.shape}")
    return arr


def integrate(
    d: OpenDynam,
    x0,
    inflow: Optional[Mapping[str, Flow]] = None,
    outflow: Optional[Mapping[str, Flow]] = None,
    t0: float = 0.0,
    t1: float = 1.0,
    steps: int = 100,
    params: Optional[Mapping[str, float]] = None,
) -> Trajectory:
    """Classical RK4 with fixed step ``(t1 - t0) / steps``."""
    if steps < 1:
        raise ValueError("steps must be >= 1")
    if not t1 > t0:
        raise ValueError("t1 must exceed t0")
    rhs = _OpenRHS(d, inflow, outflow, params)
    h = (t1 - t0) / steps
    x = _as_vector(rhs.labels, x0)
    times = t0 + h * np.arange(steps + 1)
    states = np.empty((steps + 1, len(x)))
    states[0] = x
    with np.errstate(over="ignore", invalid="ignore"):
        for n in range(steps):
            t = times[n]
            k1 = rhs(x, t)
            k2 = rhs(x + 0.5 * h * k1, t + 0.5 * h)
            k3 = rhs(x + 0.5 * h * k2, t + 0.5 * h)
            k4 = rhs(x + h * k3, t + h)
            x = x + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
            if not np.all(np.isfinite(x)):
                raise NonFiniteState(float(times[n + 1]))
            states[n + 1] = x
    return Trajectory(tuple(rhs.labels), times, states)


@dataclass(frozen=True)
class SteadySample:
    in_boundary: dict[str, float]
    inflow: dict[str, float]
    out_boundary: dict[str, float]
    outflow: dict[str, float]
    witness: dict[str, float]
    residual_norm: float

    def to_json(self) -> dict:
        return {
            "inBoundary": self.in_boundary,
            "inflow": self.inflow,
            "outBoundary": self.out_boundary,
            "outflow": self.outflow,
            "witness": self.witness,
            "residualNorm": self.residual_norm,
        }

    @classmethod
    def from_json(cls, obj: Mapping) -> SteadySample:
        return cls(
            dict(obj["inBoundary"]),
            dict(obj["inflow"]),
            dict(obj["outBoundary"]),
            dict(obj["outflow"]),
            dict(obj["witness"]),
            float(obj["residualNorm"]),
        )


@dataclass(frozen=True)
class Grid:
    """Newton start points: a per-variable lattice, subsampled above ``cap``."""

    low: float = -5.0
    high: float = 5.0
    points: int = 3
    cap: int = 3**6
    seed: int = 0

    def starts(self, dim: int) -> list[np.ndarray]:
        axis = np.linspace(self.low, self.high, self.points) if self.points > 1 else np.array(
            [0.5 * (self.low + self.high)]
        )
        count = len(axis) ** dim
        if count <= self.cap:
            return [np.array(p) for p in itertools.product(axis, repeat=dim)]
        chosen = sorted(random.Random(self.seed).sample(range(count), self.cap))
        out = []
        for code in chosen:
            digits = []
            for _ in range(dim):
                code, r = divmod(code, len(axis))
                digits.append(axis[r])
            out.append(np.array(digits[::-1]))
        return out


def _fd_jacobian(f, x: np.ndarray, fx_len: int) -> np.ndarray:
    jac = np.empty((fx_len, len(x)))
    for i in range(len(x)):
        h = 1e-6 * max(1.0, abs(x[i]))
        e = np.zeros(len(x))
        e[i] = h
        jac[:, i] = (f(x + e) - f(x - e)) / (2 * h)
    return jac


def damped_newton(f, x0: np.ndarray, tol: float = STEADY_TOL) -> tuple[np.ndarray, float]:
    """Newton iteration with least-squares steps and backtracking.

    Least-squares steps let the iteration land on steady-state manifolds,
    where the Jacobian is singular.  Returns the final point and the
    infinity norm of its residual.
    """
    x = np.array(x0, dtype=float)
    with np.errstate(over="ignore", invalid="ignore"):
        r = f(x)
        nr = float(np.max(np.abs(r))) if len(r) else 0.0
        for _ in range(MAX_ITER):
            if not np.isfinite(nr) or nr <= tol * 1e-4:
                break
            jac = _fd_jacobian(f, x, len(r))
            if not np.all(np.isfinite(jac)):
                break
            step = np.linalg.lstsq(jac, -r, rcond=None)[0]
            lam = 1.0
            for _ in range(MAX_HALVINGS):
                xn = x + lam * step
                rn = f(xn)
                nrn = float(np.max(np.abs(rn)))
                if np.isfinite(nrn) and nrn < nr:
                    x, r, nr = xn, rn, nrn
                    break
                lam *= 0.5
            else:
                break
    return x, nr


def _restrict(d: OpenDynam, witness: Mapping[str, float]):
    ib = {x: witness[d.cospan.in_leg(x)] for x in d.left}
    ob = {y: witness[d.cospan.out_leg(y)] for y in d.right}
    return ib, ob


def _constant_flows(foot, flows) -> dict[str, float]:
    flows = dict(flows or {})
    stray = set(flows) - set(foot)
    if stray:
        raise ShapeMismatch(f"flows given for labels outside the foot: {sorted(stray)}")
    return {x: float(flows.get(x, 0.0)) for x in foot}


def steady_states(
    d: OpenDynam,
    inflow: Optional[Mapping[str, float]] = None,
    outflow: Optional[Mapping[str, float]] = None,
    grid: Optional[Grid] = None,
    starts: Optional[Sequence] = None,
    params: Optional[Mapping[str, float]] = None,
    tol: float = STEADY_TOL,
) -> list[SteadySample]:
    """Steady states with constant inflow ``I`` and outflow ``O``.

    Runs damped Newton from every start (the default grid unless ``starts``
    is given), keeps roots with residual ``<= tol``, merges roots closer than
    ``1e-6`` and returns them sorted by witness.
    """
    inflow = _constant_flows(d.left, inflow)
    outflow = _constant_flows(d.right, outflow)
    rhs = _OpenRHS(d, inflow, outflow, params)
    labels = rhs.labels
    if starts is None:
        points = (grid or Grid()).starts(len(labels))
    else:
        points = [_as_vector(labels, s) for s in starts]

    def solve(x0):
        return damped_newton(lambda x: rhs(x), x0, tol)

    workers = worker_count()
    if workers > 1 and len(points) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(solve, points))
    else:
        results = [solve(p) for p in points]

    roots: list[tuple[np.ndarray, float]] = []
    for x, nr in results:
        if nr > tol:
            continue
        if any(np.linalg.norm(x - y) < DEDUP_DIST for y, _ in roots):
            continue
        roots.append((x, nr))
    roots.sort(key=lambda item: tuple(item[0].tolist()))

    samples = []
    for x, nr in roots:
        witness = dict(zip(labels, x.tolist()))
        ib, ob = _restrict(d, witness)
        samples.append(SteadySample(ib, dict(inflow), ob, dict(outflow), witness, nr))
    return samples


def residual_norm(d: OpenDynam, sample: SteadySample, params=None) -> float:
    """Recompute ``||v(x) + i_*(I) - o_*(O)||_inf`` for a sample's witness."""
    rhs = _OpenRHS(d, sample.inflow, sample.outflow, params)
    r = rhs(_as_vector(rhs.labels, sample.witness))
    return float(np.max(np.abs(r))) if len(r) else 0.0


def in_black_box(d: OpenDynam, sample: SteadySample, tol: float = 1e-6, params=None) -> bool:
    """Membership of a sample's boundary data in the black box, via its witness."""
    ib, ob = _restrict(d, sample.witness)
    close = all(abs(ib[x] - sample.in_boundary[x]) <= tol for x in d.left) and all(
        abs(ob[y] - sample.out_boundary[y]) <= tol for y in d.right
    )
    return close and residual_norm(d, sample, params) <= tol


def glue_steady_states(
    p: OpenDynam,
    q: OpenDynam,
    sp: SteadySample,
    sq: SteadySample,
    tol: float = STEADY_TOL,
    params=None,
) -> SteadySample:
    """Glue a steady state of ``p`` with one of ``q`` into one of ``p ∘ q``.

    Needs ``sp``'s outflow to equal ``sq``'s inflow and their witnesses to
    agree on the shared foot.
    """
    composite, po = compose_open_dynam_with_pushout(p, q)
    shared = p.right
    flow_gap = max((abs(sp.outflow[y] - sq.inflow[y]) for y in shared), default=0.0)
    if flow_gap > tol:
        raise Mismatch(f"outflow of the first system differs from inflow of the second by {flow_gap:g}")
    state_gap = max(
        (abs(sp.witness[p.cospan.out_leg(y)] - sq.witness[q.cospan.in_leg(y)]) for y in shared),
        default=0.0,
    )
    if state_gap > tol:
        raise Mismatch(f"witnesses disagree on the shared foot by {state_gap:g}")

    glued: dict[str, float] = {}
    for s in p.scope:
        glued.setdefault(po.left_inj(s), sp.witness[s])
    for s in q.scope:
        glued.setdefault(po.right_inj(s), sq.witness[s])
    witness = {s: glued[s] for s in composite.scope}
    ib, ob = _restrict(composite, witness)
    sample = SteadySample(ib, dict(sp.inflow), ob, dict(sq.outflow), witness, 0.0)
    nr = residual_norm(composite, sample, params)
    if nr > 10 * tol:
        raise Mismatch(f"glued state has residual {nr:g}")
    return SteadySample(ib, dict(sp.inflow), ob, dict(sq.outflow), witness, nr)
