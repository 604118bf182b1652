"""eitcool command line: parse, validate, compute, write"""

import argparse
import sys
import time
from datetime import datetime, timezone
from pathlib import Path
from typing import List, Optional, Sequence

from pydantic import ValidationError

from eitcool import __version__
from eitcool.errors import ConfigError, NumericError
from eitcool.interfaces.cli.config_loader import build_run_config, parse_config_text, parse_flag_overrides
from eitcool.interfaces.cli.handlers import execute
from eitcool.interfaces.cli.writers import write_outputs
from eitcool.models import Command, OutputFormat
from eitcool.utils import get_logger, setup_logging

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NUMERIC = 2
EXIT_IO = 3


class _Parser(argparse.ArgumentParser):
    """ArgumentParser that raises instead of exiting, so usage errors map to exit 1"""

    def error(self, message: str):
        raise ConfigError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="eitcool",
        description="Tripod-EIT cooling: spectra, cooling limits, scans, chain modes and thermometry",
        epilog="Any other --key value pair is a configuration key and overrides the config file.",
        allow_abbrev=False,
    )
    parser.add_argument("command", choices=[c.value for c in Command], help="What to compute")
    parser.add_argument("--config", type=Path, help="Flat 'key = value' configuration file")
    parser.add_argument("--out", type=Path, help="Data file (default: <command>.<format>)")
    parser.add_argument(
        "--format",
        choices=[f.value for f in OutputFormat],
        default=OutputFormat.CSV.value,
        help="Data file format",
    )
    parser.add_argument("--jobs", type=int, help="Worker processes (default: available CPUs)")
    parser.add_argument("--log-level", help="DEBUG, INFO, WARNING or ERROR")
    parser.add_argument("--version", action="version", version=f"eitcool {__version__}")
    return parser


def _read_config_file(path: Path) -> dict:
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"cannot read config file {path}: {e.strerror or e}") from None
    return parse_config_text(text, source=str(path))


def _requested_log_level(argv: Sequence[str]) -> Optional[str]:
    """--log-level value, read before full parsing so parse errors are logged at that level"""
    for i, token in enumerate(argv):
        if token == "--log-level" and i + 1 < len(argv):
            return argv[i + 1]
        if token.startswith("--log-level="):
            return token.split("=", 1)[1]
    return None


def _report(kind: str, message: str) -> None:
    print(f"eitcool: {kind}: {message}", file=sys.stderr)


def run(argv: Optional[Sequence[str]] = None) -> int:
    """
    Execute one CLI invocation.

    Returns:
        0 success, 1 configuration error, 2 numeric failure, 3 I/O error
    """
    argv: List[str] = list(sys.argv[1:] if argv is None else argv)
    started = time.perf_counter()
    started_at = datetime.now(timezone.utc).isoformat()
    setup_logging(_requested_log_level(argv))

    try:
        args, extra = build_parser().parse_known_args(argv)

        raw = _read_config_file(args.config) if args.config else {}
        raw.update(parse_flag_overrides(extra))

        command = Command(args.command)
        fmt = OutputFormat(args.format)
        output = args.out or Path(f"{command.value}.{fmt.value}")
        try:
            config = build_run_config(command, raw, output, fmt, args.jobs)
        except ValidationError as e:
            raise ConfigError(str(e)) from None

        result = execute(config)
        paths = write_outputs(config, result, time.perf_counter() - started, started_at)

    except ConfigError as e:
        logger.error("config_error", error=str(e))
        _report("config error", str(e))
        return EXIT_CONFIG
    except NumericError as e:
        logger.error("numeric_error", error_type=type(e).__name__, error=str(e))
        _report(f"numeric error ({type(e).__name__})", str(e))
        return EXIT_NUMERIC
    except OSError as e:
        logger.error("io_error", error=str(e))
        _report("I/O error", str(e))
        return EXIT_IO

    logger.info(
        "command_completed",
        command=command.value,
        rows=len(result.rows),
        data=str(paths["data"]),
        manifest=str(paths["manifest"]),
        wall_time_s=round(time.perf_counter() - started, 3),
    )
    return EXIT_OK
