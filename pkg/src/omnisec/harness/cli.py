"""Command-line entry point.

    omnisec sweep-a --config cfg.json --out a.csv
    omnisec classify --format json

Without ``--config`` the bundled default document of the subcommand is used.
On failure a one-line JSON object ``{"error": <category>, "message": ...}`` is
written to stderr and the exit status is nonzero.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

from .. import __version__
from ..errors import OmnisecError, ValidationError
from .config import default_document, load_config, parse_config
from .sweeps import run_experiment, to_csv, to_jsonl

THREADS_ENV = "OMNISEC_THREADS"

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_USAGE = 2
EXIT_INPUT = 3
EXIT_IO = 4

COMMANDS = {"sweep-a": "sweep_a", "sweep-b": "sweep_b", "classify": "classify",
            "tilt-sweep": "tilt_sweep"}


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _u64(text: str) -> int:
    v = int(text)
    if not 0 <= v < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("thread count must be >= 1")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="omnisec", description="Pose optimization and hover-capability sweeps.")
    parser.add_argument("--version", action="version", version=f"omnisec {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="experiment JSON document (default: bundled defaults)")
        p.add_argument("--seed", type=_u64, help="override the document's seed")
        p.add_argument("--out", help="output path (default: document 'output', else stdout)")
        p.add_argument("--threads", type=_positive,
                       help=f"worker processes (default: ${THREADS_ENV} or 1)")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--timing", action="store_true",
                       help="add a wall_time_s column (not byte-deterministic)")
    return parser


def _threads(arg) -> int:
    if arg is not None:
        return arg
    env = os.environ.get(THREADS_ENV)
    if env is None:
        return 1
    try:
        n = int(env)
    except ValueError:
        raise ValidationError("threads", f"{THREADS_ENV}={env!r} is not an integer") from None
    if n < 1:
        raise ValidationError("threads", f"{THREADS_ENV} must be >= 1")
    return n


def _fail(category: str, message: str, code: int, **extra) -> int:
    sys.stderr.write(json.dumps({"error": category, "message": message, **extra}) + "\n")
    return code


def run(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except _UsageError as e:
        return _fail("usage", str(e), EXIT_USAGE)
    experiment = COMMANDS[args.command]
    try:
        config = load_config(args.config) if args.config else parse_config(default_document(experiment))
        if config.experiment != experiment:
            raise ValidationError("experiment", f"document is {config.experiment!r}, "
                                  f"command expects {experiment!r}")
        if args.seed is not None:
            config = config.with_seed(args.seed)
        records = run_experiment(config, _threads(args.threads), args.timing)
        text = (to_jsonl if args.format == "json" else to_csv)(records, config)
        out = args.out or config.output
        if out:
            with open(out, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    except OmnisecError as e:
        extra = {k: getattr(e, k) for k in ("path", "constraint") if hasattr(e, k)}
        return _fail(e.category, str(e), EXIT_INPUT, **extra)
    except OSError as e:
        return _fail("io", str(e), EXIT_IO)
    except Exception as e:  # noqa: BLE001 - last-resort report for the CLI
        return _fail("internal", f"{type(e).__name__}: {e}", EXIT_INTERNAL)
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
