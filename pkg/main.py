# ===== Imports =====
import argparse
import importlib
import json
import logging
import os
import sys
from pathlib import Path

from dotenv import load_dotenv

from core.errors import ConfigError, InfeasiblePoint, ParseError, ValidationError, VqfpError
from utils.config import load_cfg
from views.report_view import EXIT_ERROR, EXIT_INPUT, EXIT_USAGE

# ===== .env =====
load_dotenv()

# ===== Logging =====
logger = logging.getLogger("vqfp")
FORMATTER = logging.Formatter("%(asctime)s %(levelname)s %(name)s: %(message)s")
LEVELS = {0: logging.WARNING, 1: logging.INFO, 2: logging.DEBUG}

ROOT = Path(__file__).resolve().parent
INPUT_ERRORS = (ParseError, ValidationError, InfeasiblePoint, ConfigError)


def setup_logging(verbosity: int, log_file: str | None) -> None:
    env_level = os.getenv("VQFP_LOG_LEVEL")
    level = LEVELS.get(min(verbosity, 2)) if verbosity else getattr(logging, (env_level or "WARNING").upper(),
                                                                     logging.WARNING)
    for h in list(logger.handlers):
        logger.removeHandler(h)
        h.close()
    logger.setLevel(logging.DEBUG)
    stream = logging.StreamHandler(sys.stderr)
    stream.setLevel(level)
    stream.setFormatter(FORMATTER)
    logger.addHandler(stream)
    log_file = log_file or os.getenv("VQFP_LOG_FILE")
    if log_file:
        file_handler = logging.FileHandler(filename=log_file, encoding="utf-8", mode="w")
        file_handler.setLevel(min(level, logging.INFO))
        file_handler.setFormatter(FORMATTER)
        logger.addHandler(file_handler)


# ===== Parser =====
class Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> Parser:
    parser = Parser(prog="vqfp", description="Pareto optimality certification for vector quadratic fractional programs")
    parser.add_argument("--config", help="JSON file overriding config/defaults.json")
    parser.add_argument("--out", help="write the JSON report here instead of stdout")
    parser.add_argument("--json-only", action="store_true", help="suppress the human-readable summary")
    parser.add_argument("--log-file", help="also log to this file (overwritten)")
    parser.add_argument("--threads", type=int, help="worker threads (default VQFP_THREADS or 1)")
    parser.add_argument("--seed", type=int, help="seed for every randomized step")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="-v info, -vv debug")
    subparsers = parser.add_subparsers(dest="command", required=True, parser_class=Parser)

    # Load commands
    for fname in sorted(os.listdir(ROOT / "commands")):
        if fname.endswith(".py") and not fname.startswith("__"):
            module = importlib.import_module(f"commands.{fname[:-3]}")
            if hasattr(module, "setup"):
                module.setup(subparsers)
    return parser


def _emit(payload, out: str | None) -> None:
    text = json.dumps(payload, indent=2)
    if out:
        with open(out, "w", encoding="utf-8") as f:
            f.write(text + "\n")
    else:
        sys.stdout.write(text + "\n")


def run_command(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE

    setup_logging(args.verbose, args.log_file)
    try:
        cfg = load_cfg(args.config, threads=args.threads, seed=args.seed)
        report = args.handler(args, cfg)
    except INPUT_ERRORS as e:
        logger.error("%s: %s", type(e).__name__, e)
        print(f"❌ {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_INPUT
    except VqfpError as e:
        logger.error("%s: %s", type(e).__name__, e)
        print(f"⚠ {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_ERROR
    except Exception as e:
        logger.exception("unexpected failure in %s", args.command)
        print(f"⚠ internal error: {e}", file=sys.stderr)
        return EXIT_ERROR

    _emit(report.payload, args.out)
    if not args.json_only and report.summary:
        print(report.summary, file=sys.stderr)
    return report.code


if __name__ == "__main__":
    sys.exit(run_command())
