"""Command-line client for the pipeline and the HTTP service.

Every pipeline subcommand is a thin wrapper over the harness: it resolves a
configuration (explicit --config, else the manifest already in the output
directory, else the built-in default), runs one stage or all of them, and
maps failures to stage-specific exit codes.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .errors import ConfigError, PambenchError, StageError
from .harness import (
    STAGE_EXIT_CODES,
    ExperimentRunner,
    config_from_dict,
    default_config_dict,
    small_config_dict,
)

EXIT_CONFIG = 2

_STAGE_COMMANDS = ("simulate", "reconstruct", "preprocess", "train", "evaluate", "report")


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="experiment config (or manifest) JSON path")
    parser.add_argument("--output", "-o", required=True, help="run output directory")
    parser.add_argument("--seed", type=int, help="override the experiment seed")
    parser.add_argument("--threads", type=int, help="override the thread count")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pambench",
        description="Photoacoustic A-scan simulation and classifier benchmark",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    for stage in _STAGE_COMMANDS:
        p = sub.add_parser(stage, help=f"run the {stage} stage")
        _add_common(p)

    p = sub.add_parser("pipeline", help="run all stages in order")
    _add_common(p)

    p = sub.add_parser("init-config", help="write a config template")
    p.add_argument("path", help="where to write the JSON config")
    p.add_argument(
        "--small", action="store_true", help="use the quick smoke-scale variant"
    )

    p = sub.add_parser("serve", help="start the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    return parser


def _resolve_config_dict(args) -> dict:
    if args.config:
        path = Path(args.config)
        if not path.exists():
            raise ConfigError(f"config file not found: {path}")
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
        if "config" in raw and "stages" in raw:  # a manifest; reuse its config
            raw = raw["config"]
    else:
        manifest = Path(args.output) / "manifest.json"
        if manifest.exists():
            with open(manifest, "r", encoding="utf-8") as fh:
                raw = json.load(fh)["config"]
        else:
            raw = default_config_dict()
    if args.seed is not None:
        raw["seed"] = args.seed
    if args.threads is not None:
        raw["threads"] = args.threads
    return raw


def _run_stages(args, stages) -> int:
    config = config_from_dict(_resolve_config_dict(args))
    runner = ExperimentRunner(config, args.output)
    for stage in stages:
        getattr(runner, stage)()
        print(f"{stage}: complete")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "init-config":
            cfg = small_config_dict() if args.small else default_config_dict()
            with open(args.path, "w", encoding="utf-8") as fh:
                json.dump(cfg, fh, indent=2)
                fh.write("\n")
            print(f"wrote {args.path}")
            return 0
        if args.command == "serve":
            import uvicorn

            from .service import app

            uvicorn.run(app, host=args.host, port=args.port)
            return 0
        if args.command == "pipeline":
            return _run_stages(args, _STAGE_COMMANDS)
        return _run_stages(args, (args.command,))
    except StageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return STAGE_EXIT_CODES.get(exc.stage, 1)
    except (ConfigError, PambenchError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
