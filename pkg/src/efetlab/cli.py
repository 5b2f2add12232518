"""Command line: ``efetlab <experiment> [--config PATH] [--out PREFIX] [--precision BITS] [--seed N]``.

Exit codes: 0 success, 2 numeric failure (partial tables are still written),
3 invalid configuration, 4 I/O failure.
"""
from __future__ import annotations

import argparse
import dataclasses
import sys

from .errors import ConfigError, DomainError, EfetlabError
from .experiments import EXPERIMENTS, config_from_dict, emit_plotdata, parse_config, run

EXIT_OK, EXIT_NUMERIC, EXIT_CONFIG, EXIT_IO = 0, 2, 3, 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="efetlab", description="Numerical experiments on entire functions of exponential type.")
    parser.add_argument("experiment", choices=EXPERIMENTS)
    parser.add_argument("--config", help="JSON experiment config")
    parser.add_argument("--out", help="output path prefix (a trailing / means a directory)")
    parser.add_argument("--precision", type=int, help="precision in bits (overrides the config)")
    parser.add_argument("--seed", type=int, help="seed for random coefficient sequences")
    return parser


def _load(args):
    if args.config:
        try:
            with open(args.config) as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
        config = parse_config(text, args.experiment)
    else:
        config = config_from_dict({}, args.experiment)
    changes = {}
    if args.precision is not None:
        if args.precision < 64:
            raise ConfigError("--precision must be at least 64")
        changes["precision_bits"] = args.precision
    if args.seed is not None:
        changes["seed"] = args.seed
    if args.out is not None:
        changes["output"] = args.out
    config = dataclasses.replace(config, **changes)
    if config.sequence is not None:
        config.coefficient_sequence()
    return config


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        config = _load(args)
    except ConfigError as exc:
        print(f"efetlab: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        report = run(config)
    except (ConfigError, DomainError) as exc:
        print(f"efetlab: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"efetlab: I/O failure: {exc}", file=sys.stderr)
        return EXIT_IO
    except (EfetlabError, ArithmeticError) as exc:
        print(f"efetlab: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    prefix = config.output or f"{config.experiment}_"
    try:
        emit_plotdata(report, prefix)
    except OSError as exc:
        print(f"efetlab: I/O failure: {exc}", file=sys.stderr)
        return EXIT_IO
    brief = {k: v for k, v in report.summary.items() if isinstance(v, (int, float, str, bool))}
    print(f"{config.experiment}: {brief} ({report.runtime_seconds:.1f} s)")
    return EXIT_NUMERIC if report.failed else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
