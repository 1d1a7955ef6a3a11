#!/usr/bin/env python3
"""
Constants and utility functions for the Fixpoint conjecture checker.
"""

import os
import pathlib

# Application constants
APP_NAME = "Fixpoint"
VERSION = "1.0.0"

# Directory paths
HOME = pathlib.Path.home()
DEFAULT_ROOT = HOME / ".Fixpoint"
ROOT_ENV_VAR = "FIXPOINT_HOME"

# File names
CONTROL_FILE = "control.json"
LOG_FILE = "fixpoint.log"
CONFIG_FILE = "fixpoint_config.json"
REPORTS_DIR = "reports"

# Semantics and right-hand-side tags as they appear in reports and on the CLI
SEMANTICS_STANDARD = "standard"
SEMANTICS_POINT_SUPPORTED = "point-supported"
TARGET_PERIODIC = "periodic"
TARGET_FIXED = "fixed"
FAMILY_FULL = "full"

# Resource ceilings (soft limits, overridable with force)
PARTITION_CEILING = 12  # B(12) = 4,213,597
SWEEP_CEILING = 6       # n = 7 is long-running, needs --force

# Search settings
DEFAULT_THREAD_CAP = 10000
DEFAULT_SEED = 42
DEFAULT_WORKERS = 1

# Report history (ring buffer per sweep key)
REPORT_HISTORY_SIZE = 10


def make_dirs_if_missing(path):
    """Create directory structure if it doesn't exist."""
    path = pathlib.Path(path)
    path.mkdir(parents=True, exist_ok=True)
    return path


def get_fixpoint_root():
    """Get the data root, honouring FIXPOINT_HOME when set."""
    override = os.environ.get(ROOT_ENV_VAR)
    if override:
        return pathlib.Path(override)
    return DEFAULT_ROOT


def get_reports_root():
    """Get the directory holding stored sweep reports."""
    return get_fixpoint_root() / REPORTS_DIR


def get_report_dir(key):
    """Get the directory path for a specific sweep key."""
    return get_reports_root() / key
