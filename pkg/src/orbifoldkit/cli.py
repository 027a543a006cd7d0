"""Command line front end: ``orbifoldkit {analyze,quotient,sweep,portrait,figure}``.

Exit codes: 0 ok, 2 input error, 3 check failure, 4 I/O error.
"""
from __future__ import annotations

import argparse
import json
import sys
import time

from . import __version__
from .errors import IncompletePortrait, InvalidInstance, NotCompatible, NotEquivariant, OrbifoldKitError
from .figure import render_svg
from .orbifold import RamifiedPortrait
from .reports import (
    DEFAULT_SAMPLES,
    InstanceSpec,
    dumps,
    format_sweep_table,
    resolve_seed,
    run_analyze,
    run_portrait,
    run_quotient,
    run_sweep,
)

EXIT_OK, EXIT_INPUT, EXIT_CHECK, EXIT_IO = 0, 2, 3, 4


class InputError(Exception):
    pass


def _int_list(text: str) -> tuple:
    try:
        return tuple(int(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma separated integers, got {text!r}")


def _precompose_list(text: str) -> tuple:
    items = tuple(t.strip() for t in text.split(",") if t.strip())
    bad = [t for t in items if t not in ("id", "F")]
    if bad or not items:
        raise argparse.ArgumentTypeError(f"precompose choices are id and F, got {text!r}")
    return items


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="orbifoldkit", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="full report for one instance")
    a.add_argument("spec")
    a.add_argument("--samples", type=int, default=None,
                   help=f"random transversality samples (default {DEFAULT_SAMPLES})")
    a.add_argument("--seed", type=int, default=None)
    a.add_argument("--timing", action="store_true", help="add wall-clock timing to the report")
    a.add_argument("-o", "--output")

    q = sub.add_parser("quotient", help="analysis plus the make-injective trace")
    q.add_argument("spec")
    q.add_argument("--seed", type=int, default=None)
    q.add_argument("--timing", action="store_true")
    q.add_argument("-o", "--output")

    s = sub.add_parser("sweep", help="verify parabolicity over an instance family")
    s.add_argument("--orders", type=_int_list, default=(2, 3, 4, 6))
    s.add_argument("--det-max", type=int, default=10)
    s.add_argument("--entry-max", type=int, default=2)
    s.add_argument("--precompose", type=_precompose_list, default=("id", "F"))
    s.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)
    s.add_argument("--seed", type=int, default=None)
    s.add_argument("--jobs", type=int, default=1)
    s.add_argument("--reports", action="store_true", help="include per-instance reports")
    s.add_argument("-o", "--output", help="write the JSON summary here")

    r = sub.add_parser("portrait", help="orbifold data of an abstract portrait")
    r.add_argument("portrait")
    r.add_argument("-o", "--output")

    f = sub.add_parser("figure", help="schematic SVG of an instance")
    f.add_argument("spec")
    f.add_argument("--seed", type=int, default=None)
    f.add_argument("-o", "--output", required=True)
    return p


def _load_spec(path, args) -> InstanceSpec:
    try:
        spec = InstanceSpec.load(path)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}")
    if getattr(args, "samples", None) is not None:
        spec.samples = args.samples
    # precedence: ORBIFOLDKIT_SEED, then --seed, then the instance file's seed
    spec.seed = resolve_seed(args.seed if args.seed is not None else spec.seed)
    return spec


def _emit(text: str, output) -> None:
    if output:
        with open(output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _cmd_analyze(args, quotient=False) -> int:
    spec = _load_spec(args.spec, args)
    started = time.perf_counter()
    report = run_quotient(spec) if quotient else run_analyze(spec)
    if args.timing:
        report["timing_seconds"] = round(time.perf_counter() - started, 3)
    _emit(dumps(report), args.output)
    if not report["ok"]:
        failed = [k for k, c in report["checks"].items() if not c["pass"]]
        print(f"check failure: {', '.join(failed)}", file=sys.stderr)
        return EXIT_CHECK
    return EXIT_OK


def _cmd_sweep(args) -> int:
    if args.jobs < 1 or args.samples < 0 or args.entry_max < 0:
        raise InputError("--jobs must be >= 1; --samples and --entry-max must be >= 0")
    bad = [n for n in args.orders if n not in (2, 3, 4, 6)]
    if bad:
        raise InputError(f"rotation orders must be among 2,3,4,6, got {bad}")
    summary = run_sweep(args.orders, args.det_max, args.entry_max, args.precompose,
                        args.samples, resolve_seed(args.seed), args.jobs, args.reports)
    print(format_sweep_table(summary))
    if args.output:
        _emit(dumps(summary), args.output)
    return EXIT_OK if summary["ok"] else EXIT_CHECK


def _cmd_portrait(args) -> int:
    try:
        with open(args.portrait) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {args.portrait}: {exc}")
    except json.JSONDecodeError as exc:
        raise InputError(f"{args.portrait}: invalid JSON ({exc})")
    try:
        report = run_portrait(RamifiedPortrait.from_json(data))
    except IncompletePortrait as exc:
        raise InputError(str(exc))
    _emit(json.dumps(report, indent=2) + "\n", args.output)
    return EXIT_OK if report.get("oracle_agrees", True) else EXIT_CHECK


def _cmd_figure(args) -> int:
    spec = _load_spec(args.spec, args)
    svg = render_svg(spec.pair(), seed=spec.seed)
    _emit(svg, args.output)
    return EXIT_OK


COMMANDS = {
    "analyze": _cmd_analyze,
    "quotient": lambda a: _cmd_analyze(a, quotient=True),
    "sweep": _cmd_sweep,
    "portrait": _cmd_portrait,
    "figure": _cmd_figure,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (InputError, InvalidInstance, NotEquivariant, NotCompatible) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except OrbifoldKitError as exc:
        print(f"check failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CHECK


if __name__ == "__main__":
    sys.exit(main())
