"""``spiked-qaoa`` command-line entry point."""

from __future__ import annotations

import argparse
import sys

from .config import KINDS, ExperimentConfig, default_config
from .errors import CapacityError, ConfigError
from .experiments import RUNNERS, generate_instances

EXIT_OK, EXIT_CONFIG, EXIT_CAPACITY = 0, 2, 3


def _u64(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in 64 unsigned bits")
    return value


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def _common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", help="JSON experiment config; flags below override its fields")
    sub.add_argument("--seed", type=_u64, help="master seed (64-bit unsigned)")
    sub.add_argument("--threads", type=_positive, help="worker threads")
    sub.add_argument("--out", help="output directory")
    sub.add_argument("--max-n", dest="max_n", type=_positive, help="raise or lower the simulator qubit cap")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spiked-qaoa",
        description="Run QAOA and power-iteration experiments on spiked tensor instances.",
        epilog="Exit codes: 0 success, 2 invalid config, 3 size over a capacity cap.",
    )
    subs = parser.add_subparsers(dest="command", required=True)
    for kind in KINDS:
        sub = subs.add_parser(kind, help=f"run the {kind} experiment")
        _common(sub)
        sub.add_argument("--print-config", action="store_true", help="print the resolved config and exit")
    gen = subs.add_parser("gen-instance", help="write random instances in the binary container format")
    _common(gen)
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--q", type=int, default=2)
    gen.add_argument("--lam", type=float, default=0.0, help="signal strength lambda")
    gen.add_argument("--count", type=int, default=1)
    return parser


def resolve_config(args: argparse.Namespace) -> ExperimentConfig:
    cfg = ExperimentConfig.load(args.config) if args.config else default_config(args.command)
    if cfg.kind != args.command:
        raise ConfigError(f"config kind {cfg.kind!r} does not match subcommand {args.command!r}")
    return cfg.override(seed=args.seed, threads=args.threads, out=args.out, max_n=args.max_n).validate()


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "gen-instance":
            if args.config:
                raise ConfigError("gen-instance takes its parameters from flags only")
            paths = generate_instances(
                args.out or "instances", args.n, args.q, args.lam, args.seed or 0, args.count
            )
        else:
            cfg = resolve_config(args)
            if args.print_config:
                print(cfg.to_json())
                return EXIT_OK
            paths = RUNNERS[args.command](cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except CapacityError as exc:
        print(f"capacity error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    for path in paths:
        print(path)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
