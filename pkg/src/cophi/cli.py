"""cophi command line: load coalgebra/comodule files, run computations,
emit reports and graph dumps.

Batch tool: one command, one process, no interactive mode.  Reports are
deterministic given the full configuration including the seed; the json
format is the machine interface and the table format renders the same
content for reading.

Exit codes: 0 ok (a STABLE_UP_TO_HORIZON phi prints a warning banner on
stderr but still exits 0), 2 input error, 3 mathematical error,
4 inconsistency trap.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .checks import (
    INCONSISTENT,
    SocleNotSimpleError,
    TopNotSimpleError,
    check_qcf,
    check_semiperfect,
    cross_validate_theorem,
    nakayama_nu,
    simple_injectives,
)
from .coalg import (
    AWAY_FROM_ZERO,
    CYCLE,
    TOWARD_ZERO,
    CoalgebraPresentation,
    InfiniteTemplate,
    WindowUnsaturatedError,
)
from .comod import Comodule, ComoduleError, simple_comodule
from .exactlin import FieldContext
from .itfunc import OmegaTable, STATUS_STABLE, class_of, omega_bar, phi
from .kschmidt import DecompositionStuckError, FieldTooSmallError, IsoRegistry
from .rand import random_comodule, rng_from_seed

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_MATH = 3
EXIT_INCONSISTENT = 4

_MATH_ERRORS = (
    DecompositionStuckError,
    FieldTooSmallError,
    WindowUnsaturatedError,
    TopNotSimpleError,
    SocleNotSimpleError,
)


class InputError(Exception):
    pass


def _add_common(sub: argparse.ArgumentParser, coalgebra_required: bool = True) -> None:
    sub.add_argument("-c", "--coalgebra", required=coalgebra_required, help="coalgebra file")
    sub.add_argument("-m", "--comodule", help="comodule file")
    sub.add_argument("--side", choices=("left", "right"), help="comodule side")
    sub.add_argument("--field", type=int, default=101, help="prime modulus (default 101)")
    sub.add_argument("--window", type=int, default=20, help="template window (default 20)")
    sub.add_argument("--horizon", type=int, default=64, help="stabilization horizon (default 64)")
    sub.add_argument("--seed", type=int, default=0, help="seed recorded in every report")
    sub.add_argument("--attempts", type=int, default=32, help="randomized attempt budget")
    sub.add_argument("--format", choices=("json", "table"), default="json", dest="fmt")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cophi",
        description="exact comodule computations over path-truncated quiver coalgebras",
    )
    parser.add_argument("--version", action="version", version=f"cophi {__version__}")
    subs = parser.add_subparsers(dest="command", required=True)

    p_phi = subs.add_parser("phi", help="rank-stabilization invariant of a comodule")
    _add_common(p_phi)

    p_check = subs.add_parser("check", help="structural scans of a presentation")
    p_check.add_argument(
        "which",
        choices=("semiperfect", "qcf", "theorem", "nakayama", "simple-injectives"),
    )
    _add_common(p_check)
    p_check.add_argument("--with-mu", action="store_true", help="also tabulate soc(P(S))")
    p_check.add_argument("--samples", type=int, default=20, help="sampler size for theorem")
    p_check.add_argument("--max-dim", type=int, default=6, help="sampler dimension cap")

    p_ex = subs.add_parser("example", help="write ready-to-run input files")
    p_ex.add_argument("which", choices=("paper-left", "paper-right", "cycle"))
    p_ex.add_argument("--n", type=int, default=3, help="cycle length")
    p_ex.add_argument("-o", "--outdir", default=".", help="output directory")
    p_ex.add_argument("--window", type=int, default=20)

    p_dot = subs.add_parser("export-dot", help="emit the quiver or an orbit graph as DOT")
    _add_common(p_dot)
    p_dot.add_argument("--orbit", action="store_true", help="emit the orbit graph of -m")
    return parser


def _load_coalgebra(path: str) -> CoalgebraPresentation:
    try:
        return CoalgebraPresentation.load(path)
    except FileNotFoundError as e:
        raise InputError(f"coalgebra file not found: {path}") from e
    except (json.JSONDecodeError, KeyError, ValueError, TypeError) as e:
        raise InputError(f"bad coalgebra file {path}: {e}") from e


def _load_comodule(path: str | None, coalg: CoalgebraPresentation, ctx: FieldContext) -> Comodule:
    if path is None:
        raise InputError("a comodule file (-m) is required")
    try:
        return Comodule.load(coalg, ctx, path)
    except FileNotFoundError as e:
        raise InputError(f"comodule file not found: {path}") from e
    except (json.JSONDecodeError, KeyError, ValueError, TypeError, ComoduleError) as e:
        raise InputError(f"bad comodule file {path}: {e}") from e


def _field(args) -> FieldContext:
    try:
        return FieldContext(args.field)
    except ValueError as e:
        raise InputError(str(e)) from e


def _config_block(args) -> dict:
    return {
        "field": args.field,
        "window": args.window,
        "horizon": getattr(args, "horizon", None),
        "seed": args.seed,
        "attempts": getattr(args, "attempts", None),
        "version": __version__,
    }


def _render_table(data: dict, indent: str = "") -> str:
    lines = []
    width = max((len(str(k)) for k in data), default=0)
    for key in sorted(data):
        value = data[key]
        if isinstance(value, dict):
            lines.append(f"{indent}{key}:")
            lines.append(_render_table(value, indent + "  "))
        elif isinstance(value, list) and value and all(isinstance(x, dict) for x in value):
            lines.append(f"{indent}{key}:")
            for row in value:
                cells = "  ".join(f"{k}={row[k]}" for k in sorted(row))
                lines.append(f"{indent}  {cells}")
        else:
            lines.append(f"{indent}{str(key).ljust(width)}  {value}")
    return "\n".join(lines)


def _emit(report: dict, fmt: str) -> None:
    if fmt == "json":
        print(json.dumps(report, indent=2, sort_keys=True))
    else:
        print(_render_table(report))


def cmd_phi(args) -> int:
    ctx = _field(args)
    coalg = _load_coalgebra(args.coalgebra).with_window(args.window)
    m = _load_comodule(args.comodule, coalg, ctx)
    registry = IsoRegistry(attempts=args.attempts, seed=args.seed)
    table = OmegaTable(registry, attempts=args.attempts, seed=args.seed + 1)
    report = phi(
        m,
        args.horizon,
        registry=registry,
        table=table,
        attempts=args.attempts,
        seed=args.seed,
    )
    payload = report.to_dict()
    payload.update(_config_block(args))
    payload["registry"] = registry.dump()
    if report.status == STATUS_STABLE:
        print(
            "WARNING: ranks only observed stable up to the horizon; "
            "the value is a plateau onset, not a certified invariant",
            file=sys.stderr,
        )
    _emit(payload, args.fmt)
    return EXIT_OK


def cmd_check(args) -> int:
    ctx = _field(args)
    coalg = _load_coalgebra(args.coalgebra)
    side = args.side
    if side is None:
        raise InputError("--side is required for checks (no implicit default)")
    if args.which == "semiperfect":
        report = check_semiperfect(coalg, side, args.window, ctx).to_dict()
        code = EXIT_OK
    elif args.which == "qcf":
        report = check_qcf(coalg, side, args.window, ctx, args.attempts, args.seed).to_dict()
        code = EXIT_OK
    elif args.which == "nakayama":
        report = nakayama_nu(coalg, side, args.window, ctx, with_mu=args.with_mu).to_dict()
        code = EXIT_OK
    elif args.which == "simple-injectives":
        labels = simple_injectives(coalg, side, args.window, ctx)
        report = {
            "check": "simple-injectives",
            "side": side,
            "vertices": [s.vertex for s in labels],
            "window": coalg.with_window(args.window).window,
        }
        code = EXIT_OK
    else:  # theorem
        rng = rng_from_seed(args.seed)
        pres = coalg.with_window(args.window)
        pool = [v for v in pres.finite_quiver().vertices if v <= max(args.window - 2, 0)]
        sampler = [
            random_comodule(pres, side, ctx, rng, vertices=pool, max_total_dim=args.max_dim)
            for _ in range(args.samples)
        ]
        result = cross_validate_theorem(
            pres,
            side,
            args.window,
            ctx,
            sampler,
            horizon=args.horizon,
            attempts=args.attempts,
            seed=args.seed,
            dimension_cap=args.max_dim,
        )
        report = result.to_dict()
        code = EXIT_INCONSISTENT if result.consistency == INCONSISTENT else EXIT_OK
    report.update(_config_block(args))
    _emit(report, args.fmt)
    return code


def cmd_example(args) -> int:
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    ctx = FieldContext(101)
    written: list[str] = []

    def save(obj, name: str) -> None:
        obj.save(str(outdir / name))
        written.append(name)

    if args.which == "paper-right":
        coalg = CoalgebraPresentation(InfiniteTemplate(AWAY_FROM_ZERO, args.window), 1)
        save(coalg, "ainf_right.json")
        for n in range(16):
            save(simple_comodule(coalg, "right", ctx, n), f"m{n}.json")
    elif args.which == "paper-left":
        coalg = CoalgebraPresentation(InfiniteTemplate(TOWARD_ZERO, args.window), 1)
        save(coalg, "ainf_left.json")
        semi = Comodule(coalg, "left", ctx, {0: 1, 3: 1, 7: 1})
        save(semi, "semisimple_0_3_7.json")
        save(Comodule(coalg, "left", ctx, {0: 2, 1: 1, 2: 3}), "semisimple_0_1_2.json")
    else:
        coalg = CoalgebraPresentation(InfiniteTemplate(CYCLE, 0, args.n), 1)
        save(coalg, f"cycle{args.n}.json")
        save(simple_comodule(coalg, "right", ctx, 0), "s0.json")
        interval = Comodule(
            coalg, "right", ctx, {0: 1, 1: 1}, {"a0_1": [[1]]}
        )
        save(interval, "interval01.json")
    print(json.dumps({"written": written, "outdir": str(outdir)}, indent=2, sort_keys=True))
    return EXIT_OK


def _quiver_dot(coalg: CoalgebraPresentation, window: int) -> str:
    q = coalg.with_window(window).finite_quiver()
    lines = ["digraph quiver {"]
    for v in q.vertices:
        lines.append(f'  v{v} [label="{v}"];')
    for a in q.arrows:
        lines.append(f'  v{a.src} -> v{a.tgt} [label="{a.name}"];')
    lines.append("}")
    return "\n".join(lines)


def _orbit_dot(m: Comodule, args) -> str:
    registry = IsoRegistry(attempts=args.attempts, seed=args.seed)
    table = OmegaTable(registry, attempts=args.attempts, seed=args.seed + 1)
    start = class_of(m, registry, args.attempts, seed=args.seed)
    lines = ["digraph orbit {"]
    if start.is_zero:
        lines.append('  zero [label="class 0 (injective or zero input)"];')
        lines.append("}")
        return "\n".join(lines)

    def label(rid: int) -> str:
        entry = registry.entry(rid)
        dims = ",".join(f"{v}:{d}" for v, d in entry.comodule.dims.items())
        return f"R{rid} [{dims}]"

    seen: set[int] = set()
    frontier = list(start.support)
    edges: list[str] = []
    while frontier:
        rid = frontier.pop(0)
        if rid in seen or len(seen) > args.horizon:
            continue
        seen.add(rid)
        image = table.entry(rid)
        if image.is_zero:
            edges.append(f"  n{rid} -> zero;")
        for out_id, c in image.coords:
            edges.append(f'  n{rid} -> n{out_id} [label="{c}"];')
            if out_id not in seen:
                frontier.append(out_id)
    for rid in sorted(seen):
        lines.append(f'  n{rid} [label="{label(rid)}"];')
    if any(e.endswith("zero;") for e in edges):
        lines.append('  zero [label="0"];')
    lines.extend(edges)
    lines.append("}")
    return "\n".join(lines)


def cmd_export_dot(args) -> int:
    ctx = _field(args)
    coalg = _load_coalgebra(args.coalgebra)
    if args.orbit:
        m = _load_comodule(args.comodule, coalg.with_window(args.window), ctx)
        print(_orbit_dot(m, args))
    else:
        print(_quiver_dot(coalg, args.window))
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "phi":
            return cmd_phi(args)
        if args.command == "check":
            return cmd_check(args)
        if args.command == "example":
            return cmd_example(args)
        if args.command == "export-dot":
            return cmd_export_dot(args)
        raise InputError(f"unknown command {args.command!r}")
    except InputError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except _MATH_ERRORS as e:
        print(f"math error: {e}", file=sys.stderr)
        return EXIT_MATH
    except RuntimeError as e:
        print(f"internal inconsistency: {e}", file=sys.stderr)
        return EXIT_INCONSISTENT


if __name__ == "__main__":
    sys.exit(main())
