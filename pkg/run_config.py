#!/usr/bin/env python3
"""
Run configuration: the argparse surface, the optional settings file and
environment overrides.

Settings precedence: built-in defaults, then <root>/fixpoint_config.json, then
FIXPOINT_WORKERS / FIXPOINT_LOG_LEVEL. Command-line flags override settings.
"""

import argparse
import json
import logging
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional

from constants import (
    APP_NAME, CONFIG_FILE, DEFAULT_SEED, DEFAULT_THREAD_CAP, DEFAULT_WORKERS, FAMILY_FULL,
    SEMANTICS_POINT_SUPPORTED, SEMANTICS_STANDARD, TARGET_FIXED, TARGET_PERIODIC, VERSION,
    get_fixpoint_root
)
from errors import UsageError

logger = logging.getLogger(__name__)

SUBCOMMANDS = ("partitions", "delta", "limit", "conjecture", "replay")
LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR")


def default_settings() -> Dict[str, Any]:
    return {
        "workers": DEFAULT_WORKERS,
        "log_level": "WARNING",
        "thread_cap": DEFAULT_THREAD_CAP,
        "keep": None,
    }


def load_settings(config_file=None) -> Dict[str, Any]:
    """Load settings from file, falling back to defaults, then apply the environment."""
    settings = default_settings()
    path = Path(config_file) if config_file else get_fixpoint_root() / CONFIG_FILE
    try:
        if path.exists():
            with open(path, 'r') as f:
                loaded = json.load(f)
            for key, value in loaded.items():
                if key in settings:
                    settings[key] = value
                else:
                    logger.warning(f"Ignoring unknown setting {key!r} in {path}")
    except (OSError, json.JSONDecodeError) as e:
        logger.error(f"Failed to load settings from {path}: {e}")

    # Environment variables win over the file
    if os.environ.get("FIXPOINT_WORKERS"):
        try:
            settings["workers"] = int(os.environ["FIXPOINT_WORKERS"])
        except ValueError:
            logger.warning(f"Ignoring non-integer FIXPOINT_WORKERS={os.environ['FIXPOINT_WORKERS']!r}")
    if os.environ.get("FIXPOINT_LOG_LEVEL"):
        settings["log_level"] = os.environ["FIXPOINT_LOG_LEVEL"].upper()
    return settings


@dataclass
class RunConfig:
    """One fully resolved command-line invocation."""
    subcommand: str
    n: Optional[int] = None
    map_text: Optional[str] = None
    point: Optional[int] = None
    partition_text: Optional[str] = None
    semantics: str = SEMANTICS_STANDARD
    family: str = FAMILY_FULL
    target: str = TARGET_PERIODIC
    sample: Optional[int] = None
    seed: int = DEFAULT_SEED
    out: Optional[str] = None
    report: Optional[str] = None
    key: Optional[str] = None
    workers: int = DEFAULT_WORKERS
    cap: int = DEFAULT_THREAD_CAP
    keep: Optional[int] = None
    force: bool = False
    explain: bool = False
    timing: bool = False
    list_reports: bool = False
    log_level: str = "WARNING"

    @property
    def family_path(self) -> Optional[str]:
        """Path part of a file:PATH family mode."""
        if self.family == FAMILY_FULL:
            return None
        return self.family[len("file:"):]

    def to_argv(self) -> List[str]:
        """Command-line text that parses back to this config."""
        argv = ["--log-level", self.log_level, self.subcommand]
        options = [
            ("--n", self.n), ("--map", self.map_text), ("--point", self.point),
            ("--partition", self.partition_text), ("--sample", self.sample), ("--out", self.out),
            ("--report", self.report), ("--key", self.key), ("--keep", self.keep),
        ]
        for flag, value in options:
            if value is not None:
                argv += [flag, str(value)]
        argv += [
            "--semantics", self.semantics, "--family", self.family, "--target", self.target,
            "--seed", str(self.seed), "--workers", str(self.workers), "--cap", str(self.cap),
        ]
        switches = (("--force", self.force), ("--explain", self.explain), ("--timing", self.timing),
                    ("--list", self.list_reports))
        for flag, value in switches:
            if value:
                argv.append(flag)
        return argv


def _family_mode(text: str) -> str:
    if text == FAMILY_FULL or (text.startswith("file:") and len(text) > len("file:")):
        return text
    raise argparse.ArgumentTypeError(f"family must be 'full' or 'file:PATH', got {text!r}")


class _Parser(argparse.ArgumentParser):
    """ArgumentParser that raises UsageError instead of exiting."""

    def error(self, message):
        raise UsageError(message)


def build_parser(settings: Optional[Dict[str, Any]] = None) -> argparse.ArgumentParser:
    settings = settings or default_settings()
    parser = _Parser(prog="fixpoint", description=f"{APP_NAME}: partition inverse limits and the fixed point conjecture")
    parser.add_argument("--version", action="version", version=f"{APP_NAME} {VERSION}")
    parser.add_argument("--log-level", choices=LOG_LEVELS, default=str(settings["log_level"]).upper())
    parser.add_argument("--config", help="settings file (default: <root>/fixpoint_config.json)")

    # Every subcommand accepts the whole flag set so configs round-trip through text;
    # each command ignores what it does not use.
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=int)
    common.add_argument("--map", dest="map_text", help="image table, e.g. [1,2,1]")
    common.add_argument("--point", type=int)
    common.add_argument("--partition", dest="partition_text", help="{0,1}|{2} or [0,0,1]")
    common.add_argument("--semantics", choices=(SEMANTICS_STANDARD, SEMANTICS_POINT_SUPPORTED), default=SEMANTICS_STANDARD)
    common.add_argument("--family", type=_family_mode, default=FAMILY_FULL, help="full or file:PATH")
    common.add_argument("--target", choices=(TARGET_PERIODIC, TARGET_FIXED), default=TARGET_PERIODIC)
    common.add_argument("--sample", type=int, help="sampled sweep of N random maps")
    common.add_argument("--seed", type=int, default=DEFAULT_SEED)
    common.add_argument("--out", help="report path (.br for Brotli)")
    common.add_argument("--report", help="report file to replay")
    common.add_argument("--key", help="stored sweep key to replay (newest report)")
    common.add_argument("--workers", type=int, default=int(settings["workers"]))
    common.add_argument("--cap", type=int, default=int(settings["thread_cap"]), help="thread enumeration cap")
    common.add_argument("--keep", type=int, default=settings["keep"], help="stored counterexample records")
    common.add_argument("--force", action="store_true", help="override size ceilings")
    common.add_argument("--explain", action="store_true", help="print inclusion tables and thread checks")
    common.add_argument("--timing", action="store_true", help="include wall time in the report file")
    common.add_argument("--list", dest="list_reports", action="store_true", help="list stored reports (replay)")

    subparsers = parser.add_subparsers(dest="subcommand")
    helps = {
        "partitions": "list every partition of {0..n-1}",
        "delta": "print Delta(x) for one map, point and partition",
        "limit": "enumerate the threads of the inverse limit at a point",
        "conjecture": "sweep maps and check the conjecture",
        "replay": "re-run the counterexamples stored in a report",
    }
    for name in SUBCOMMANDS:
        subparsers.add_parser(name, parents=[common], help=helps[name])
    return parser


def parse_run_config(argv: List[str], settings: Optional[Dict[str, Any]] = None) -> RunConfig:
    """Parse command-line text into a RunConfig.

    Raises:
        UsageError: unknown flags, bad values or a missing subcommand
    """
    args = build_parser(settings).parse_args(argv)
    if args.subcommand is None:
        raise UsageError(f"a subcommand is required: {', '.join(SUBCOMMANDS)}")
    values = vars(args)
    values.pop("config", None)
    config = RunConfig(**values)
    if config.workers < 1:
        raise UsageError(f"--workers must be at least 1, got {config.workers}")
    if config.keep is not None and config.keep < 0:
        raise UsageError(f"--keep must be non-negative, got {config.keep}")
    return config


