"""Command-line entry point: one subcommand per pipeline stage, plus `all`.

Common flags: --config PATH (key=value file), --seed N, --threads N,
--output DIR. Environment variables prefixed NEWSSYNC_ override file values
(double underscore for the section dot, e.g. NEWSSYNC_THRESHOLDS__JACCARD_MIN).
"""

from __future__ import annotations

import argparse
import logging
import sys

from .config import load_config
from .pipeline import STAGES, PipelineError, run_all

logger = logging.getLogger("newssync")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="newssync",
        description="News event clustering and country-level diversity/synchrony pipeline",
    )
    parser.add_argument("--config", help="key=value configuration file")
    parser.add_argument("--seed", type=int, help="override rng_seed")
    parser.add_argument("--threads", type=int, help="override threads")
    parser.add_argument("--output", help="override the output directory")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name in (*STAGES, "all"):
        sub.add_parser(name, help=f"run the {name} stage" if name != "all" else "run every stage")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        cfg = load_config(args.config)
        if args.seed is not None:
            cfg.rng_seed = args.seed
        if args.threads is not None:
            cfg.threads = args.threads
        if args.output is not None:
            cfg.paths.output = args.output
        cfg.validate()
    except (ValueError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2

    try:
        if args.subcommand == "all":
            run_all(cfg)
        else:
            STAGES[args.subcommand](cfg)
    except PipelineError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    except (ValueError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
