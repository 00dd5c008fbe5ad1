"""Command-line entry point.

    qfraud prepare   [--source synthetic|PATH] [--out DIR] ...
    qfraud train     --model qsvc --featuremap z ...
    qfraud benchmark ...
    qfraud kernel    --featuremap zz --part train ...

Every flag mirrors a ``RunConfig`` field. Values come from the defaults,
then ``--config FILE``, then explicit flags. Exit codes: 0 success,
1 runtime failure, 2 usage or configuration error.
"""
from __future__ import annotations

import argparse
import sys
from dataclasses import fields

from . import pipeline
from .config import ConfigError, RunConfig
from .data import RowError, SchemaError

EXIT_OK, EXIT_RUNTIME, EXIT_USAGE = 0, 1, 2


def _csv_tuple(text: str) -> tuple[str, ...]:
    return tuple(t.strip() for t in text.split(",") if t.strip())


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON run configuration; explicit flags take precedence")
    casts = {int: int, float: float, str: str}
    for f in fields(RunConfig):
        flag = "--" + f.name.replace("_", "-")
        if f.name == "pauli_strings":
            p.add_argument(flag, dest=f.name, type=_csv_tuple, default=argparse.SUPPRESS,
                           help="comma-separated Pauli strings, e.g. Z,ZZ")
            continue
        kind = type(f.default)
        p.add_argument(flag, dest=f.name, type=casts.get(kind, str), default=argparse.SUPPRESS,
                       help=f"default: {f.default}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qfraud", description="Quantum classifiers for transaction fraud.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, text in [
        ("prepare", "encode a dataset, write split, PCA ranking and correlations"),
        ("train", "train one model / feature map pair on the prepared split"),
        ("benchmark", "run every model against every feature map"),
        ("kernel", "dump the fidelity Gram matrix of one split part"),
    ]:
        p = sub.add_parser(name, help=text, description=text)
        _add_config_flags(p)
        if name == "kernel":
            p.add_argument("--part", choices=("train", "test"), default="train")
    return parser


def resolve_config(args: argparse.Namespace) -> RunConfig:
    base = RunConfig.load(args.config) if getattr(args, "config", None) else RunConfig()
    names = {f.name for f in fields(RunConfig)}
    overrides = {k: v for k, v in vars(args).items() if k in names}
    return base.replace(**overrides) if overrides else base


def run(args: argparse.Namespace) -> int:
    config = resolve_config(args)
    if args.command == "prepare":
        written = pipeline.prepare(config)
        for key in sorted(written):
            print(f"{key}: {written[key]}")
    elif args.command == "train":
        cell = pipeline.train_one(config)
        print(f"{cell.model}/{cell.featuremap}: accuracy {cell.report.accuracy:.2f}, "
              f"macro F1 {cell.report.macro.f1:.2f}")
    elif args.command == "benchmark":
        text, _ = pipeline.benchmark(config)
        print(text, end="")
    elif args.command == "kernel":
        print(pipeline.dump_kernel(config, args.part))
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return run(args)
    except (ConfigError, pipeline.MissingInputError) as exc:
        print(f"qfraud: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SchemaError, RowError, OSError, ValueError, RuntimeError) as exc:
        print(f"qfraud: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
