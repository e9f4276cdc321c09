"""Command-line entry point: ``noisystab {simulate,verify,bell-strategies,bench}``.

Exit status is 0 on success, 1 on invalid input and 2 when the oracle
cross-check finds a mismatch.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from collections.abc import Sequence
from contextlib import contextmanager

from . import io, verify
from .engine import SimulationState, restrict_maps, run_script
from .errors import NoisyStabError
from .fidelity import combine_maps
from .oracle import MAX_QUBITS
from .strategies import CSV_COLUMNS, StrategyId, bench_rows, strategy_rows

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_MISMATCH = 2

logger = logging.getLogger("noisystab")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors, which is reserved for mismatches
    def error(self, message: str) -> None:  # type: ignore[override]
        raise UsageError(f"{self.prog}: {message}")


@contextmanager
def _output(path: str | None):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w") as fh:
            yield fh


def _parse_targets(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"--targets must be a comma-separated list of integers, got {text!r}") from None


def cmd_simulate(args: argparse.Namespace) -> int:
    g = io.load_graph(args.graph)
    channels = io.load_noise(args.noise, g) if args.noise else []
    script = io.load_script(args.script) if args.script else []
    state = SimulationState.from_channels(g, channels)
    run_script(state, script)
    targets = _parse_targets(args.targets) if args.targets else sorted(state.graph.vertices)
    maps = restrict_maps(state, targets)
    ens = combine_maps(maps, targets)
    with _output(args.out) as out:
        if args.format == "csv":
            io.write_csv(
                ({"pattern": ens.label(k), "weight": float(w)} for k, w in enumerate(ens.weights)),
                ("pattern", "weight"),
                out,
            )
        else:
            json.dump(io.result_to_json(ens, state.graph, maps), out, indent=2)
            out.write("\n")
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    if not 2 <= args.n_max <= MAX_QUBITS:
        raise UsageError(f"--n-max must lie in 2..{MAX_QUBITS}")
    if args.cases < 0:
        raise UsageError("--cases must be non-negative")
    print(f"seed: {args.seed}")
    if args.cases == 0:
        logger.warning("no cases requested; nothing was checked")
    result = verify.run_suite(args.cases, args.seed, n_max=args.n_max, tol=args.tol)
    print(f"cases: {result.cases}")
    print(f"max deviation: {result.max_deviation:.3e}")
    if not result.passed:
        print(f"FAIL: {len(result.failures)} case(s) above {args.tol:g}: {[i for i, _ in result.failures]}")
        return EXIT_MISMATCH
    print("PASS")
    return EXIT_OK


def _emit_rows(rows: list[dict], columns: Sequence[str], fmt: str, path: str | None) -> None:
    with _output(path) as out:
        if fmt == "json":
            json.dump(rows, out, indent=2)
            out.write("\n")
        else:
            io.write_csv(rows, columns, out)


def cmd_bell_strategies(args: argparse.Namespace) -> int:
    if args.n_min < 3 or args.n_max < args.n_min:
        raise UsageError("need 3 <= --n-min <= --n-max")
    for p in args.p:
        if not 0.0 <= p <= 1.0:
            raise UsageError(f"--p value {p} is not a probability")
    rows = strategy_rows(range(args.n_min, args.n_max + 1), args.p, args.strategy)
    _emit_rows(rows, CSV_COLUMNS, args.format, args.out)
    return EXIT_OK


def cmd_bench(args: argparse.Namespace) -> int:
    if any(n < 3 for n in args.sizes):
        raise UsageError("cluster sizes must be at least 3")
    rows = bench_rows(args.sizes, args.strategy, args.p)
    _emit_rows(rows, ("strategy", "N", "p", "seconds", "fidelity", "noise_terms"), args.format, args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="noisystab", description="Exact Pauli-diagonal noise on graph states.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sim = sub.add_parser("simulate", help="run a manipulation script on a noisy graph state")
    sim.add_argument("--graph", required=True, help='graph JSON {"n": ..., "edges": [...]}')
    sim.add_argument("--noise", help='noise JSON {"channels": [...]}; omit for a noiseless run')
    sim.add_argument("--script", help="script JSON list of operations")
    sim.add_argument("--targets", help="comma-separated target qubits (default: all survivors)")
    sim.add_argument("--out", help="output file (default: stdout)")
    sim.add_argument("--format", choices=("json", "csv"), default="json")
    sim.set_defaults(func=cmd_simulate)

    ver = sub.add_parser("verify", help="cross-check the engine against the dense oracle")
    ver.add_argument("--n-max", type=int, default=8)
    ver.add_argument("--cases", type=int, default=200)
    ver.add_argument("--seed", type=int, default=0)
    ver.add_argument("--tol", type=float, default=1e-10)
    ver.set_defaults(func=cmd_verify)

    bell = sub.add_parser("bell-strategies", help="compare the three 1D-cluster measurement orders")
    bell.add_argument("--n-min", type=int, default=3, help="smallest cluster size N")
    bell.add_argument("--n-max", type=int, default=30, help="largest cluster size N")
    bell.add_argument("--p", type=float, nargs="+", default=[0.9, 0.95, 0.99])
    bell.add_argument("--strategy", nargs="+", choices=[s.value for s in StrategyId], default=[s.value for s in StrategyId])
    bell.add_argument("--out")
    bell.add_argument("--format", choices=("csv", "json"), default="csv")
    bell.set_defaults(func=cmd_bell_strategies)

    bench = sub.add_parser("bench", help="time the 1D-cluster pipeline")
    bench.add_argument("--sizes", type=int, nargs="+", default=[1000, 10000, 100000])
    bench.add_argument("--strategy", choices=[s.value for s in StrategyId], default=StrategyId.SIDE_TO_SIDE.value)
    bench.add_argument("--p", type=float, default=0.9)
    bench.add_argument("--out")
    bench.add_argument("--format", choices=("csv", "json"), default="csv")
    bench.set_defaults(func=cmd_bench)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_INVALID
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
    except (NoisyStabError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
    return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
