#!/usr/bin/env python3
"""
Tests for report files and the per-key report ring buffer.
"""

import os
import shutil
import sys
import tempfile
import unittest
from pathlib import Path
from unittest.mock import patch

# Add parent directory to path to import modules
sys.path.insert(0, str(Path(__file__).parent.parent))

from conjecture import exhaustive_sweep
from constants import CONTROL_FILE, ROOT_ENV_VAR
from errors import ReportError
from inverse_system import Semantics
from storage import HAS_BROTLI, ReportStore, encode_report, load_report, report_key, save_report


class TestReportFiles(unittest.TestCase):

    @classmethod
    def setUpClass(cls):
        cls.report = exhaustive_sweep(2, Semantics.STANDARD).to_dict()

    def setUp(self):
        self.tmp = Path(tempfile.mkdtemp(prefix='fixpoint_test_'))

    def tearDown(self):
        shutil.rmtree(self.tmp)

    def test_json_round_trip(self):
        path = save_report(self.report, self.tmp / "nested" / "report.json")
        self.assertTrue(path.exists())
        self.assertEqual(load_report(path), self.report)

    def test_encoding_is_stable(self):
        first = save_report(self.report, self.tmp / "a.json")
        second = save_report(dict(reversed(list(self.report.items()))), self.tmp / "b.json")
        self.assertEqual(first.read_bytes(), second.read_bytes())
        self.assertTrue(encode_report(self.report).endswith("}\n"))

    @unittest.skipUnless(HAS_BROTLI, "Brotli not installed")
    def test_brotli_round_trip(self):
        path = save_report(self.report, self.tmp / "report.json.br")
        self.assertNotEqual(path.read_bytes()[:1], b"{")
        self.assertEqual(load_report(path), self.report)

    @unittest.skipIf(HAS_BROTLI, "Brotli installed")
    def test_brotli_missing(self):
        with self.assertRaises(RuntimeError):
            save_report(self.report, self.tmp / "report.json.br")

    def test_unreadable_reports(self):
        with self.assertRaises(ReportError):
            load_report(self.tmp / "absent.json")
        bad = self.tmp / "bad.json"
        bad.write_text("{not json")
        with self.assertRaises(ReportError):
            load_report(bad)
        listing = self.tmp / "list.json"
        listing.write_text("[1, 2]")
        with self.assertRaises(ReportError):
            load_report(listing)

    def test_report_key(self):
        self.assertEqual(report_key(self.report), "n2-standard-periodic-exhaustive")


class TestReportStore(unittest.TestCase):

    def setUp(self):
        self.tmp = Path(tempfile.mkdtemp(prefix='fixpoint_test_'))
        self.env = patch.dict(os.environ, {ROOT_ENV_VAR: str(self.tmp)})
        self.env.start()

    def tearDown(self):
        self.env.stop()
        shutil.rmtree(self.tmp)

    def _report(self, marker):
        return {"n": 2, "semantics": "standard", "target": "periodic", "mode": "exhaustive",
                "counterexample_count": marker, "counterexamples": []}

    def test_empty_store(self):
        store = ReportStore("n2-standard-periodic-exhaustive")
        self.assertIsNone(store.load_report())
        self.assertEqual(store.history(), [])
        self.assertEqual(ReportStore.list_keys(), [])

    def test_ring_buffer_keeps_newest(self):
        store = ReportStore("k", max_reports=3)
        for marker in range(5):
            store.write_report(self._report(marker), digest=f"d{marker}")
        self.assertEqual(store.load_report()["counterexample_count"], 4)
        self.assertEqual(store.load_report(2)["counterexample_count"], 2)
        self.assertIsNone(store.load_report(3))
        self.assertEqual([e["digest"] for e in store.history()], ["d4", "d3", "d2"])
        self.assertEqual(len(list((self.tmp / "reports" / "k").glob("[0-9]*.json*"))), 3)

    def test_control_file_persists(self):
        ReportStore("k").write_report(self._report(7), digest="abc")
        reopened = ReportStore("k")
        self.assertEqual(reopened.load_report()["counterexample_count"], 7)
        self.assertTrue((self.tmp / "reports" / "k" / CONTROL_FILE).exists())
        self.assertEqual(ReportStore.list_keys(), ["k"])

    def test_corrupt_control_file_starts_fresh(self):
        directory = self.tmp / "reports" / "k"
        directory.mkdir(parents=True)
        (directory / CONTROL_FILE).write_text("garbage")
        store = ReportStore("k")
        self.assertIsNone(store.load_report())
        store.write_report(self._report(1))
        self.assertEqual(store.load_report()["counterexample_count"], 1)


if __name__ == "__main__":
    unittest.main()
