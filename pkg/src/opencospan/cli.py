"""Command-line interface.

Exit codes: 0 on success, 1 when the analysis answers "no" (unreachable
marking, failed law, invalid model), 2 on unusable input.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Callable, Mapping, Optional, Sequence

from . import cospan as csp
from . import serialize
from .dynam import OpenDynam, compose_open_dynam, iota_dynam, tensor_open_dynam
from .errors import NonFiniteState, OpenCospanError, SchemaError
from .finset import FinSet
from .grayb import gray_box, rate_equations
from .numsim import Grid, integrate, steady_states
from .petri import Multiset, OpenPetriNet, PetriNet, compose_open, iota_petri, tensor_open
from .rates import OpenRatedNet, RatedNet, compose_open_rated, iota_rated, tensor_open_rated
from .token import reachable


class InputError(Exception):
    """Bad command-line input; reported with exit code 2."""


# -- flag parsing -----------------------------------------------------------------

def parse_pairs(text: str, what: str) -> dict[str, str]:
    """``"a:1,b:2"`` to ``{"a": "1", "b": "2"}``; the last colon separates."""
    out: dict[str, str] = {}
    text = text.strip()
    if not text:
        return out
    for item in text.split(","):
        label, sep, value = item.strip().rpartition(":")
        if not sep or not label:
            raise InputError(f"bad {what} entry {item!r}; expected label:value")
        if label in out:
            raise InputError(f"{what} gives {label!r} twice")
        out[label] = value.strip()
    return out


def parse_marking(text: str) -> Multiset:
    if text.lstrip().startswith("{"):
        try:
            counts = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InputError(f"bad marking JSON: {exc}") from exc
    else:
        counts = {}
        for k, v in parse_pairs(text, "marking").items():
            try:
                counts[k] = int(v)
            except ValueError:
                raise InputError(f"token count for {k!r} must be an integer, got {v!r}") from None
    if not all(isinstance(v, int) and v >= 0 for v in counts.values()):
        raise InputError("token counts must be natural numbers")
    return Multiset(counts)


def parse_numbers(text: str, what: str) -> dict[str, float]:
    out = {}
    for k, v in parse_pairs(text, what).items():
        try:
            out[k] = float(v)
        except ValueError:
            raise InputError(f"{what} value for {k!r} must be a number, got {v!r}") from None
    return out


def parse_state(text: str, scope: FinSet) -> list[float]:
    """Either ``label:value,...`` covering the scope or bare values in scope order."""
    if ":" in text:
        values = parse_numbers(text, "--x0")
        missing = [s for s in scope if s not in values]
        stray = sorted(set(values) - set(scope))
        if missing or stray:
            raise InputError(f"--x0 must cover the scope exactly (missing {missing}, unknown {stray})")
        return [values[s] for s in scope]
    try:
        values = [float(v) for v in text.split(",")] if text.strip() else []
    except ValueError as exc:
        raise InputError(f"bad --x0: {exc}") from None
    if len(values) != len(scope):
        raise InputError(f"--x0 needs {len(scope)} values, got {len(values)}")
    return values


def parse_params(items: Optional[Sequence[str]]) -> dict[str, float]:
    out = {}
    for item in items or ():
        name, sep, value = item.partition("=")
        if not sep:
            raise InputError(f"bad --param {item!r}; expected name=value")
        try:
            out[name.strip()] = float(value)
        except ValueError:
            raise InputError(f"--param {name!r} needs a number") from None
    return out


def load_model(path: str | Path):
    try:
        return serialize.load(path)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror or exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from exc
    except SchemaError as exc:
        raise InputError(f"{path}: {exc}") from exc


def as_dynam(model, path) -> OpenDynam:
    if isinstance(model, OpenDynam):
        return model
    if isinstance(model, OpenRatedNet):
        return gray_box(model)
    raise InputError(f"{path} holds no open dynamical system or open rated net")


# -- wiring scripts ---------------------------------------------------------------

_OPS: dict[type, tuple[Callable, Callable, Callable]] = {
    csp.FinCospan: (csp.compose, csp.tensor, lambda c: c),
    OpenPetriNet: (compose_open, tensor_open, iota_petri),
    OpenRatedNet: (compose_open_rated, tensor_open_rated, iota_rated),
    OpenDynam: (compose_open_dynam, tensor_open_dynam, iota_dynam),
}
_IOTA_TARGETS = {
    "cospan": csp.FinCospan,
    "open_petri": OpenPetriNet,
    "open_rated": OpenRatedNet,
    "open_dynam": OpenDynam,
}


def _lift_pair(a, b):
    """Bring a bare cospan up to the kind of the other operand."""
    if type(a) is type(b):
        return a, b
    if isinstance(a, csp.FinCospan):
        return _OPS[type(b)][2](a), b
    if isinstance(b, csp.FinCospan):
        return a, _OPS[type(a)][2](b)
    raise InputError(f"cannot combine {type(a).__name__} with {type(b).__name__}")


def run_script(script: Mapping, base: Path):
    """Evaluate a wiring script and return the final value.

    ``{"systems": {name: path-or-object}, "steps": [...], "result": name}``.
    Steps: ``{"op": "compose"|"tensor", "args": [x, y]}``,
    ``{"op": "iota", "cospan": x, "into": kind}`` and
    ``{"op": "frobenius", "generator": g, "foot": [labels]}``; each may name
    its value with ``"as"``.  A step's value is also available as ``$<n>``
    (1-based) and the last one is the default result.
    """
    if not isinstance(script, Mapping):
        raise InputError("script must be a JSON object")
    env: dict[str, object] = {}
    for name, ref in (script.get("systems") or {}).items():
        if isinstance(ref, str):
            env[name] = load_model(base / ref)
        else:
            try:
                env[name] = serialize.from_json(ref)
            except SchemaError as exc:
                raise InputError(f"system {name!r}: {exc}") from exc

    def resolve(ref, step_no):
        if isinstance(ref, str):
            if ref not in env:
                raise InputError(f"step {step_no}: unknown system {ref!r}")
            return env[ref]
        try:
            return serialize.from_json(ref)
        except SchemaError as exc:
            raise InputError(f"step {step_no}: {exc}") from exc

    steps = script.get("steps") or []
    value = None
    for n, step in enumerate(steps, start=1):
        op = step.get("op") if isinstance(step, Mapping) else None
        label = f"step {n} ({op})"
        try:
            if op in ("compose", "tensor"):
                args = step.get("args")
                if not isinstance(args, list) or len(args) != 2:
                    raise InputError(f"{label}: needs two args")
                a, b = _lift_pair(resolve(args[0], n), resolve(args[1], n))
                value = _OPS[type(a)][0 if op == "compose" else 1](a, b)
            elif op == "iota":
                c = resolve(step.get("cospan"), n)
                if not isinstance(c, csp.FinCospan):
                    raise InputError(f"{label}: iota needs a cospan")
                into = step.get("into", "open_petri")
                if into not in _IOTA_TARGETS:
                    raise InputError(f"{label}: unknown target kind {into!r}")
                value = _OPS[_IOTA_TARGETS[into]][2](c)
            elif op == "frobenius":
                gens = csp.frobenius_generators(FinSet(step.get("foot") or []))
                gen = step.get("generator")
                if gen not in gens:
                    raise InputError(f"{label}: unknown generator {gen!r}")
                value = gens[gen]
            else:
                raise InputError(f"step {n}: unknown op {op!r}")
        except InputError:
            raise
        except (OpenCospanError, ValueError, TypeError) as exc:
            raise InputError(f"{label} failed: {exc}") from exc
        env[f"${n}"] = value
        if "as" in step:
            env[step["as"]] = value
    if "result" in script:
        return resolve(script["result"], "result")
    if value is None:
        raise InputError("script has no steps and no result")
    return value


# -- commands ---------------------------------------------------------------------

def cmd_compose(args) -> int:
    try:
        with open(args.script, encoding="utf-8") as fh:
            script = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {args.script}: {exc.strerror or exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{args.script} is not valid JSON: {exc}") from exc
    result = run_script(script, Path(args.script).parent)
    text = serialize.dumps(serialize.to_json(result))
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def cmd_ode(args) -> int:
    model = load_model(args.model)
    if isinstance(model, OpenRatedNet):
        model = model.decoration
    if not isinstance(model, RatedNet):
        raise InputError(f"{args.model} holds no rated net")
    for line in rate_equations(model):
        print(line)
    return 0


def cmd_simulate(args) -> int:
    d = as_dynam(load_model(args.model), args.model)
    x0 = parse_state(args.x0, d.scope)
    inflow = parse_pairs(args.inflow or "", "--inflow")
    outflow = parse_pairs(args.outflow or "", "--outflow")
    try:
        traj = integrate(d, x0, inflow, outflow, args.t0, args.t1, args.steps,
                         parse_params(args.param))
    except NonFiniteState as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OpenCospanError) as exc:
        raise InputError(str(exc)) from exc
    sys.stdout.write(traj.to_csv())
    return 0


def cmd_steady(args) -> int:
    d = as_dynam(load_model(args.model), args.model)
    grid = Grid(args.low, args.high, args.points, args.cap, args.seed)
    try:
        found = steady_states(
            d,
            parse_numbers(args.inflow or "", "--inflow"),
            parse_numbers(args.outflow or "", "--outflow"),
            grid=grid,
            params=parse_params(args.param),
        )
    except OpenCospanError as exc:
        raise InputError(str(exc)) from exc
    sys.stdout.write(serialize.dumps(serialize.samples_to_json(found)))
    return 0


def cmd_reach(args) -> int:
    model = load_model(args.model)
    if isinstance(model, OpenPetriNet):
        net = model.net
    elif isinstance(model, OpenRatedNet):
        net = model.decoration.net
    elif isinstance(model, RatedNet):
        net = model.net
    elif isinstance(model, PetriNet):
        net = model
    else:
        raise InputError(f"{args.model} holds no Petri net")
    if args.depth < 0:
        raise InputError("--depth must be >= 0")
    try:
        seq = reachable(net, parse_marking(args.source), parse_marking(args.target), args.depth)
    except OpenCospanError as exc:
        raise InputError(str(exc)) from exc
    if seq is None:
        print(f"unreachable within depth {args.depth}")
        return 1
    print(",".join(seq.steps) if seq.steps else "(empty sequence)")
    return 0


def cmd_check_laws(args) -> int:
    if not 0 <= args.set_size <= 8:
        raise InputError("--set-size must be between 0 and 8")
    foot = FinSet(f"x{i}" for i in range(1, args.set_size + 1))
    report = csp.check_frobenius_laws(foot, strict=False)
    for law, ok in report.items():
        print(f"{law}: {'ok' if ok else 'FAILED'}")
    failed = [law for law, ok in report.items() if not ok]
    if failed:
        print(f"{len(failed)} of {len(report)} laws fail: {', '.join(failed)}")
        return 1
    print(f"all {len(report)} laws hold (up to isomorphism)")
    return 0


def _describe(model) -> str:
    if isinstance(model, csp.FinCospan):
        return f"cospan: apex {len(model.apex)}, feet {len(model.left)} -> {len(model.right)}"
    if isinstance(model, OpenPetriNet):
        net = model.net
        return (f"open_petri: {len(net.places)} places, {len(net.transitions)} transitions, "
                f"feet {len(model.left)} -> {len(model.right)}")
    if isinstance(model, OpenRatedNet):
        net = model.decoration.net
        return (f"open_rated: {len(net.places)} places, {len(net.transitions)} transitions, "
                f"feet {len(model.left)} -> {len(model.right)}")
    if isinstance(model, OpenDynam):
        return (f"open_dynam: {len(model.scope)} variables, {len(model.field.params)} params, "
                f"feet {len(model.left)} -> {len(model.right)}")
    if isinstance(model, RatedNet):
        return f"rated: {len(model.places)} places, {len(model.transitions)} transitions"
    return f"petri: {len(model.places)} places, {len(model.transitions)} transitions"


def cmd_validate(args) -> int:
    try:
        with open(args.file, encoding="utf-8") as fh:
            obj = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {args.file}: {exc.strerror or exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{args.file} is not valid JSON: {exc}") from exc
    try:
        if isinstance(obj, list):
            samples = serialize.samples_from_json(obj)
            print(f"valid: {len(samples)} steady-state samples")
            return 0
        model = serialize.from_json(obj)
    except SchemaError as exc:
        print(f"invalid: {exc}")
        return 1
    print(f"valid {_describe(model)}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="opencospan", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compose", help="evaluate a wiring script")
    p.add_argument("script")
    p.add_argument("-o", "--output", help="output file (default: stdout)")
    p.set_defaults(func=cmd_compose)

    p = sub.add_parser("ode", help="print mass-action rate equations")
    p.add_argument("model")
    p.set_defaults(func=cmd_ode)

    p = sub.add_parser("simulate", help="integrate the open system equation (CSV)")
    p.add_argument("model")
    p.add_argument("--x0", required=True, help="label:value,... or values in scope order")
    p.add_argument("--t0", type=float, default=0.0)
    p.add_argument("--t1", type=float, required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--inflow", help="label:expr-in-t,... on the left foot")
    p.add_argument("--outflow", help="label:expr-in-t,... on the right foot")
    p.add_argument("--param", action="append", help="override a parameter, name=value")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("steady", help="find steady states for constant flows (JSON)")
    p.add_argument("model")
    p.add_argument("--inflow", help="label:value,... on the left foot")
    p.add_argument("--outflow", help="label:value,... on the right foot")
    p.add_argument("--low", type=float, default=Grid.low)
    p.add_argument("--high", type=float, default=Grid.high)
    p.add_argument("--points", type=int, default=Grid.points, help="grid points per variable")
    p.add_argument("--cap", type=int, default=Grid.cap, help="maximum number of starts")
    p.add_argument("--seed", type=int, default=Grid.seed, help="seed for subsampling starts")
    p.add_argument("--param", action="append", help="override a parameter, name=value")
    p.set_defaults(func=cmd_steady)

    p = sub.add_parser("reach", help="shortest firing sequence between markings")
    p.add_argument("model")
    p.add_argument("--from", dest="source", required=True, help='marking, e.g. "A:1,B:2"')
    p.add_argument("--to", dest="target", required=True)
    p.add_argument("--depth", type=int, required=True)
    p.set_defaults(func=cmd_reach)

    p = sub.add_parser("check-laws", help="verify the Frobenius laws on a set of size N")
    p.add_argument("--set-size", type=int, required=True)
    p.set_defaults(func=cmd_check_laws)

    p = sub.add_parser("validate", help="check a model or sample file")
    p.add_argument("file")
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
