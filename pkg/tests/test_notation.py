#!/usr/bin/env python3
"""
Tests for the text forms of maps, partitions, family files and thread records.
"""

import shutil
import sys
import tempfile
import unittest
from pathlib import Path

# Add parent directory to path to import modules
sys.path.insert(0, str(Path(__file__).parent.parent))

from dynamics import Endofunction
from errors import DimensionError, ParseError, ValidationError
from inverse_system import PartitionFamily, build_system, enumerate_threads, limit_via_top
from notation import (
    format_block, format_blocks, format_endofunction, format_rgs, parse_endofunction,
    parse_family_file, parse_partition, parse_table, thread_record
)
from partitions import SetPartition, enumerate_partitions


class TestParseEndofunction(unittest.TestCase):

    def test_valid(self):
        self.assertEqual(parse_endofunction("[1,2,1]").table, (1, 2, 1))
        self.assertEqual(parse_endofunction(" [ 0 , 0 ] ").table, (0, 0))

    def test_image_out_of_range_points_at_entry(self):
        with self.assertRaises(ParseError) as ctx:
            parse_endofunction("[0,3,1]")
        self.assertEqual(ctx.exception.position, 3)

    def test_malformed(self):
        for text in ["", "[", "[1,2", "[1,,2]", "[a]", "[0]]", "(0,1)"]:
            with self.assertRaises(ParseError, msg=text):
                parse_endofunction(text)

    def test_empty_table(self):
        with self.assertRaises(ParseError):
            parse_endofunction("[]")

    def test_format(self):
        self.assertEqual(format_endofunction(Endofunction((1, 2, 1))), "[1,2,1]")
        self.assertEqual(parse_table("[4, 5]"), [4, 5])


class TestParsePartition(unittest.TestCase):

    def test_block_notation(self):
        self.assertEqual(parse_partition("{0,1}|{2}").rgs, (0, 0, 1))
        self.assertEqual(parse_partition("{2}|{0,1}").rgs, (0, 0, 1))
        self.assertEqual(parse_partition("{1,3} | {0,2}", 4).rgs, (0, 1, 0, 1))

    def test_rgs_notation_is_canonicalized(self):
        self.assertEqual(parse_partition("[0,0,1]").rgs, (0, 0, 1))
        self.assertEqual(parse_partition("[5,3,5]").rgs, (0, 1, 0))

    def test_dimension_mismatch(self):
        with self.assertRaises(DimensionError):
            parse_partition("{0,1}|{2}", 4)
        with self.assertRaises(DimensionError):
            parse_partition("{0,1}|{2}", 2)
        with self.assertRaises(DimensionError):
            parse_partition("[0,1]", 3)

    def test_invalid_blocks(self):
        with self.assertRaises(ValidationError):
            parse_partition("{0,1}|{1,2}")
        with self.assertRaises(ValidationError):
            parse_partition("{0}|{2}")

    def test_malformed(self):
        for text in ["", "{0,1", "{0}|", "{}", "[]", "0,1", "{0}{1}"]:
            with self.assertRaises(ParseError, msg=text):
                parse_partition(text)

    def test_formats_parse_back(self):
        for partition in enumerate_partitions(4):
            self.assertEqual(parse_partition(format_blocks(partition)), partition)
            self.assertEqual(parse_partition(format_rgs(partition)), partition)

    def test_format_block(self):
        self.assertEqual(format_block((2, 0)), "{0,2}")


class TestFamilyFile(unittest.TestCase):

    def setUp(self):
        self.tmp = Path(tempfile.mkdtemp(prefix='fixpoint_test_'))

    def tearDown(self):
        shutil.rmtree(self.tmp)

    def _write(self, text):
        path = self.tmp / "family.txt"
        path.write_text(text)
        return path

    def test_reads_members_and_comments(self):
        path = self._write("# chain\n{0,1,2}\n\n{0,1}|{2}   # middle\n[0,1,2]\n")
        family = parse_family_file(path, 3)
        self.assertEqual([m.rgs for m in family.members], [(0, 0, 0), (0, 0, 1), (0, 1, 2)])
        self.assertFalse(family.is_full_lattice)

    def test_error_names_line(self):
        path = self._write("{0,1,2}\n{0,1|{2}\n")
        with self.assertRaises(ParseError) as ctx:
            parse_family_file(path, 3)
        self.assertIn(":2:", str(ctx.exception))

    def test_empty_file(self):
        with self.assertRaises(ParseError):
            parse_family_file(self._write("# nothing\n"), 3)

    def test_missing_file(self):
        with self.assertRaises(ParseError):
            parse_family_file(self.tmp / "absent.txt", 3)

    def test_wrong_size_member(self):
        with self.assertRaises(DimensionError):
            parse_family_file(self._write("{0,1}\n"), 3)


class TestThreadRecord(unittest.TestCase):

    def test_record_names_blocks(self):
        family = PartitionFamily.full_lattice(3)
        for thread in limit_via_top(Endofunction((1, 2, 1)), 0, family=family):
            record = thread_record(family, thread)
            self.assertEqual(len(record), 5)
            self.assertEqual(record["[0,0,0]"], "{0,1,2}")
            self.assertEqual(record["[0,1,2]"], "{%d}" % thread.assignment[-1])

    def test_sub_family(self):
        family = PartitionFamily.from_members([SetPartition((0, 0, 1))])
        system = build_system(Endofunction((0, 0, 0)), 2, family)
        record = thread_record(family, enumerate_threads(system).threads[0])
        self.assertEqual(record, {"[0,0,1]": "{0,1}"})


if __name__ == "__main__":
    unittest.main()
