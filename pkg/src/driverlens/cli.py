"""Command-line entry point.

Subcommands run the pipeline through successive stages:

    synth     generate a synthetic CSV
    prep      load, impute, encode (writes encoding/scaler summaries)
    train     + evaluate every model on repeated splits
    explain   + explain the best model's test predictions
    select    + rank features, write ranking.json and importance.svg
    compare   full pipeline, print the before/after tables
    run       full pipeline, write every artifact
    schema    print the config document schema

Exit codes: 0 success, 1 usage/config error, 2 data error, 3 internal error.
"""

from __future__ import annotations

import argparse
import json
import sys
import traceback

from .config import config_from_json, config_schema
from .errors import ConfigError, DataError
from .pipeline import report_tables_text, run_stage, run_synth_stage

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_INTERNAL = 3


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors; this CLI reserves 2 for data errors
    def error(self, message):
        raise ConfigError(message)


def build_parser() -> _Parser:
    parser = _Parser(prog="driverlens", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("synth", "prep", "train", "explain", "select", "compare", "run"):
        cmd = sub.add_parser(name)
        cmd.add_argument("--config", required=True, metavar="JSON",
                         help="path to the pipeline config document")
        cmd.add_argument("--seed", type=int, default=None,
                         help="override the master seed")
        cmd.add_argument("--threads", type=int, default=None,
                         help="worker threads (results are thread-count independent)")
        cmd.add_argument("--leak-safe", action="store_true", default=None,
                         help="preprocess inside each split instead of up front")
        cmd.add_argument("--out", default=None, metavar="DIR",
                         help="override the artifact directory")
    sub.add_parser("schema")
    return parser


def _load_config(args):
    try:
        with open(args.config, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {args.config!r}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("config JSON must be an object")
    if args.seed is not None:
        # --seed re-derives every stream, dropping seeds pinned in the file
        doc["seed"] = args.seed
        for entry in doc.get("models", []):
            if isinstance(entry, dict):
                entry.pop("seed", None)
        doc.setdefault("lime", {}).pop("seed", None)
        doc.get("input", {}).get("synth", {}).pop("seed", None)
    if args.threads is not None:
        doc["threads"] = args.threads
    if args.leak_safe:
        doc["leak_safe"] = True
    if args.out is not None:
        doc["out_dir"] = args.out
    return config_from_json(json.dumps(doc))


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "schema":
            print(json.dumps(config_schema(), indent=2))
            return EXIT_OK
        config = _load_config(args)
        if args.command == "synth":
            path = run_synth_stage(config)
            print(f"wrote {path}")
            return EXIT_OK
        report = run_stage(config, args.command)
        if args.command == "compare":
            print(report_tables_text(report))
        elif report is not None:
            print(f"report written to {config.out_dir}")
        else:
            print(f"artifacts written to {config.out_dir}")
        return EXIT_OK
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except Exception:
        print("internal error:", file=sys.stderr)
        traceback.print_exc()
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
