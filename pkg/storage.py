#!/usr/bin/env python3
"""
Storage for sweep reports.

Reports are JSON documents. Paths ending in .br are Brotli-compressed, which
matters for standard-semantics sweeps where most points are counterexamples.
Reports written without an explicit path go to a ring buffer per sweep key
under <root>/reports/<key>/, tracked by a control.json file.
"""

import json
import logging
import pathlib
import time
from typing import Any, Dict, List, Optional

from constants import (
    CONTROL_FILE, REPORT_HISTORY_SIZE, get_report_dir, get_reports_root, make_dirs_if_missing
)
from errors import ReportError

# Optional compression support
try:
    import brotli
    HAS_BROTLI = True
except ImportError:
    HAS_BROTLI = False
    brotli = None

logger = logging.getLogger(__name__)

# Compression settings
BROTLI_COMPRESSION_LEVEL = 6
COMPRESSED_SUFFIX = ".br"


def encode_report(data: Dict[str, Any]) -> str:
    """Canonical text form: sorted keys, two-space indent, trailing newline."""
    return json.dumps(data, indent=2, sort_keys=True) + "\n"


def save_report(data: Dict[str, Any], path) -> pathlib.Path:
    """Write a report dict to path, compressing when the suffix is .br."""
    path = pathlib.Path(path)
    make_dirs_if_missing(path.parent)
    text = encode_report(data)
    if path.suffix == COMPRESSED_SUFFIX:
        if not HAS_BROTLI:
            raise RuntimeError("Brotli library not available; install Brotli or drop the .br suffix")
        path.write_bytes(brotli.compress(text.encode("utf-8"), quality=BROTLI_COMPRESSION_LEVEL))
    else:
        path.write_text(text)
    logger.info(f"Report written to {path}")
    return path


def load_report(path) -> Dict[str, Any]:
    """Read a report written by save_report."""
    path = pathlib.Path(path)
    try:
        raw = path.read_bytes()
    except OSError as e:
        raise ReportError(f"cannot read report {path}: {e}")
    if path.suffix == COMPRESSED_SUFFIX:
        if not HAS_BROTLI:
            raise RuntimeError("Brotli library not available; cannot read compressed report")
        try:
            raw = brotli.decompress(raw)
        except brotli.error as e:
            raise ReportError(f"report {path} is not valid Brotli data: {e}")
    try:
        data = json.loads(raw.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise ReportError(f"report {path} is not valid JSON: {e}")
    if not isinstance(data, dict):
        raise ReportError(f"report {path} does not hold a JSON object")
    return data


def report_key(data: Dict[str, Any]) -> str:
    """Directory name for a report's sweep configuration."""
    return f"n{data['n']}-{data['semantics']}-{data['target']}-{data['mode']}"


class ReportStore:
    """Ring buffer of recent reports for one sweep key."""

    def __init__(self, key: str, max_reports: int = REPORT_HISTORY_SIZE):
        self.key = key
        self.report_dir = get_report_dir(key)
        self.control_file = self.report_dir / CONTROL_FILE

        # Control file structure
        self.current_index = -1
        self.max_reports = max_reports
        self.entries: Dict[str, Dict[str, Any]] = {}

        self._load_control_file()

    def _load_control_file(self):
        """Load control file data if it exists."""
        if self.control_file.exists():
            try:
                with open(self.control_file, 'r') as f:
                    data = json.load(f)
                    self.current_index = data.get('current_index', -1)
                    self.max_reports = data.get('max_reports', self.max_reports)
                    self.entries = data.get('entries', {})
            except (json.JSONDecodeError, OSError) as e:
                # If control file is corrupted, start fresh
                logger.warning(f"Ignoring unreadable control file {self.control_file}: {e}")

    def _save_control_file(self):
        make_dirs_if_missing(self.report_dir)
        data = {
            'current_index': self.current_index,
            'max_reports': self.max_reports,
            'entries': self.entries,
        }
        with open(self.control_file, 'w') as f:
            json.dump(data, f, indent=2)

    def _path_at(self, index: int) -> pathlib.Path:
        suffix = ".json.br" if HAS_BROTLI else ".json"
        return self.report_dir / f"{index}{suffix}"

    def write_report(self, data: Dict[str, Any], digest: str = None) -> pathlib.Path:
        """Store a report in the next ring-buffer slot."""
        self.current_index = (self.current_index + 1) % self.max_reports
        path = self._path_at(self.current_index)
        save_report(data, path)
        self.entries[str(self.current_index)] = {
            'file': path.name,
            'written': time.time(),
            'digest': digest,
            'counterexample_count': data.get('counterexample_count'),
        }
        self._save_control_file()
        return path

    def load_report(self, version_offset: int = 0) -> Optional[Dict[str, Any]]:
        """Load a stored report; offset 0 is the newest, 1 the one before, ..."""
        if self.current_index < 0 or not 0 <= version_offset < self.max_reports:
            return None
        index = (self.current_index - version_offset) % self.max_reports
        entry = self.entries.get(str(index))
        if entry is None:
            return None
        return load_report(self.report_dir / entry['file'])

    def history(self) -> List[Dict[str, Any]]:
        """Entries newest first."""
        result = []
        for offset in range(self.max_reports):
            index = (self.current_index - offset) % self.max_reports
            entry = self.entries.get(str(index))
            if entry is not None:
                result.append(dict(entry, index=index))
        return result

    @staticmethod
    def list_keys() -> List[str]:
        root = get_reports_root()
        if not root.exists():
            return []
        return sorted(p.name for p in root.iterdir() if (p / CONTROL_FILE).exists())
