"""Command-line front end.

    specgrad run    --objective huber --method isgm --x0 -1.995
    specgrad bench  --objective sum_abs --seed 42
    specgrad verify [--grid 201]
    specgrad list

Exit codes: 0 ok, 1 usage, 2 domain escape, 3 verification failure.
"""

from __future__ import annotations

import argparse
import contextlib
import sys
from typing import Sequence

from .bench import (DEFAULT_X0, METHODS, BenchSpec, bench, run_method, write_bench_csv,
                    write_trace_csv)
from .core import DerivativeMode
from .errors import SpecgradError
from .objectives import REGISTRY, Objective, builtins, get_objective
from .optimizers import StopReason
from .verification import DEFAULT_GRID, run_suite

EXIT_OK, EXIT_USAGE, EXIT_DOMAIN, EXIT_VERIFY = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def _positive_float(text):
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return v


def _seed(text):
    v = int(text)
    if not 0 <= v < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def _add_solver_flags(p, methods_repeatable):
    p.add_argument("--objective", required=True, choices=sorted(REGISTRY))
    if methods_repeatable:
        p.add_argument("--method", action="append", choices=METHODS,
                       help="may be repeated; default all methods")
    else:
        p.add_argument("--method", required=True, choices=METHODS)
    p.add_argument("--x0", type=float)
    p.add_argument("--gamma", type=_positive_float, default=0.005)
    p.add_argument("--eta", type=_positive_float, default=1e-6)
    p.add_argument("--h", type=_positive_float, default=1e-6, help="finite-difference mesh")
    p.add_argument("--iters", type=_positive_int, default=20)
    p.add_argument("--derivatives", choices=("analytic", "fd"), default="fd")
    p.add_argument("--output", help="write CSV here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="specgrad", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("run", help="single trace as CSV")
    _add_solver_flags(p, methods_repeatable=False)

    p = sub.add_parser("bench", help="multi-trial mean table as CSV")
    _add_solver_flags(p, methods_repeatable=True)
    p.add_argument("--trials", type=_positive_int, default=20)
    p.add_argument("--seed", type=_seed, default=0)

    p = sub.add_parser("verify", help="run every check over all builtins")
    p.add_argument("--grid", type=_positive_int, default=DEFAULT_GRID)
    p.add_argument("--seed", type=_seed, default=0)

    sub.add_parser("list", help="objective and method names")
    return parser


@contextlib.contextmanager
def _output(path):
    if path is None:
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            yield fh


def _mode(args):
    return DerivativeMode(args.derivatives)


def _run(args) -> int:
    f = get_objective(args.objective)
    x0 = args.x0 if args.x0 is not None else DEFAULT_X0[f.name]
    trace = run_method(f, args.method, x0, gamma=args.gamma, eta=args.eta, mesh=args.h,
                       iters=args.iters, mode=_mode(args))
    with _output(args.output) as out:
        write_trace_csv(trace, f, out)
    return EXIT_DOMAIN if trace.stop_reason is StopReason.OUT_OF_DOMAIN else EXIT_OK


def _bench(args) -> int:
    spec = BenchSpec(args.objective, tuple(args.method or METHODS), args.trials, args.iters,
                     args.seed, args.gamma, args.eta, args.h, _mode(args), args.x0)
    table = bench(spec)
    with _output(args.output) as out:
        write_bench_csv(table, out)
    return EXIT_OK


def _verify(args, extra_objectives: Sequence[Objective]) -> int:
    grid = max(args.grid, 2)
    reports = run_suite(builtins() + list(extra_objectives), grid_n=grid, seed=args.seed)
    for r in reports:
        print(r.line())
    return EXIT_OK if all(r.passed for r in reports) else EXIT_VERIFY


def _list() -> int:
    for name in REGISTRY:
        print(f"objective {name}")
    for name in METHODS:
        print(f"method {name}")
    return EXIT_OK


def main(argv: Sequence[str] | None = None, *,
         extra_objectives: Sequence[Objective] = ()) -> int:
    """Entry point. ``extra_objectives`` are appended to the ``verify`` sweep."""
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    try:
        if args.command == "run":
            return _run(args)
        if args.command == "bench":
            return _bench(args)
        if args.command == "verify":
            return _verify(args, extra_objectives)
        return _list()
    except SpecgradError as exc:
        print(f"specgrad: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main_entry() -> None:
    sys.exit(main())
