"""
lamhom command line.

    lamhom homogenize --config study.json [--method analytic|cell-solver|both] [--out DIR]
    lamhom sweep      --config study.json [--out DIR]
    lamhom compare    --config study.json [--out DIR]
    lamhom validate   --config study.json [--out DIR]
    lamhom serve      [--host HOST] [--port PORT]

Exit codes: 0 success, 1 config error, 2 solver error, 3 failed validation.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

from errors import ConfigError, SolverError, ValidationFailure
from schemas import StudyConfig
from settings import DEFAULT_LOG_LEVEL, configure_logging
from solvers.study_orchestrator import METHODS, STUDIES
from utils.config_loading import format_config_error, read_config

logger = logging.getLogger("lamhom")

DEFAULT_OUT_DIR = "lamhom-out"

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_SOLVER = 2
EXIT_VALIDATION = 3


def build_argparser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="lamhom", description="Homogenization of periodic thermodiffusive laminates")
    ap.add_argument("--log-level", default=None, help=f"logging level (default LAMHOM_LOG_LEVEL or {DEFAULT_LOG_LEVEL})")
    commands = ap.add_subparsers(dest="command", required=True)

    for name in STUDIES:
        sub = commands.add_parser(name)
        sub.add_argument("--config", required=True, type=Path, help="JSON study configuration")
        sub.add_argument("--out", type=Path, default=None, help="output directory (overrides output.directory)")
        if name == "homogenize":
            sub.add_argument("--method", choices=METHODS, default="both")

    serve = commands.add_parser("serve", help="run the JSON API")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    return ap


def _run_study(args: argparse.Namespace, config: StudyConfig) -> int:
    run, write = STUDIES[args.command]
    result = run(config, method=args.method) if args.command == "homogenize" else run(config)
    out_dir = args.out or Path(config.output.directory or DEFAULT_OUT_DIR)
    paths = write(result, out_dir)
    logger.info("wrote %d files to %s", len(paths), out_dir)

    report = result.get("report") or result["summary"]
    print(report.model_dump_json(indent=2))
    if args.command == "validate" and not result["summary"].passed:
        raise ValidationFailure(result["summary"].failed)
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    args = build_argparser().parse_args(argv)
    try:
        configure_logging(args.log_level)
    except ConfigError as exc:
        print(f"lamhom: {exc.message}", file=sys.stderr)
        return EXIT_CONFIG

    if args.command == "serve":
        import uvicorn

        uvicorn.run("main:app", host=args.host, port=args.port)
        return EXIT_OK

    text = None
    try:
        config, text = read_config(args.config)
        return _run_study(args, config)
    except ConfigError as exc:
        print(format_config_error(exc, text, str(args.config)), file=sys.stderr)
        return EXIT_CONFIG
    except SolverError as exc:
        logger.error("solver error: %s", exc)
        return EXIT_SOLVER
    except ValidationFailure as exc:
        logger.error("%s", exc)
        return EXIT_VALIDATION
    except ValueError as exc:
        print(f"{args.config}: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
