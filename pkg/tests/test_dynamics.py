#!/usr/bin/env python3
"""
Tests for endofunctions, orbit shapes, recurrence and Delta(x).
"""

import itertools
import random
import sys
import unittest
from pathlib import Path

from hypothesis import given, strategies as st

# Add parent directory to path to import modules
sys.path.insert(0, str(Path(__file__).parent.parent))

from dynamics import (
    Endofunction, delta_of, enumerate_endofunctions, is_fixed, is_periodic, orbit_shape,
    random_endofunction, visits_infinitely
)
from errors import DimensionError, EmptyGroundSetError, PointError, ValidationError
from partitions import SetPartition, coarsening_map, enumerate_partitions, refines


def endofunctions_strategy(max_n=7):
    return st.integers(1, max_n).flatmap(
        lambda n: st.lists(st.integers(0, n - 1), min_size=n, max_size=n)
    ).map(lambda table: Endofunction(tuple(table)))


def simulate_recurrence(T, x, block):
    """Bounded-simulation oracle: membership of T^k(x) over one full cycle after the tail."""
    shape = orbit_shape(T, x)
    point = x
    hits = False
    for k in range(1, shape.tail_length + 2 * shape.cycle_length + 1):
        point = T(point)
        if k > shape.tail_length and point in block:
            hits = True
    return hits


class TestEndofunction(unittest.TestCase):

    def test_rejects_out_of_range(self):
        with self.assertRaises(ValidationError):
            Endofunction((0, 3, 1))
        with self.assertRaises(ValidationError):
            Endofunction(())

    def test_constructors(self):
        self.assertEqual(Endofunction.identity(3).table, (0, 1, 2))
        self.assertEqual(Endofunction.constant(3, 1).table, (1, 1, 1))
        with self.assertRaises(PointError):
            Endofunction.constant(3, 3)

    def test_enumeration_counts(self):
        self.assertEqual(len(list(enumerate_endofunctions(1))), 1)
        self.assertEqual(len(list(enumerate_endofunctions(2))), 4)
        self.assertEqual(len(list(enumerate_endofunctions(4))), 256)
        for n in range(1, 7):
            count = sum(1 for _ in enumerate_endofunctions(n))
            self.assertEqual(count, n ** n)

    def test_enumeration_order_and_prefix(self):
        tables = [T.table for T in enumerate_endofunctions(3)]
        self.assertEqual(tables, sorted(tables))
        self.assertEqual(len(set(tables)), 27)
        shard = [T.table for T in enumerate_endofunctions(3, prefix=(2,))]
        self.assertEqual(shard, [t for t in tables if t[0] == 2])

    def test_enumeration_empty_ground_set(self):
        with self.assertRaises(EmptyGroundSetError):
            list(enumerate_endofunctions(0))

    def test_random_endofunction_is_seeded(self):
        a = [random_endofunction(5, random.Random(42)).table for _ in range(3)]
        b = [random_endofunction(5, random.Random(42)).table for _ in range(3)]
        self.assertEqual(a, b)


class TestOrbitShape(unittest.TestCase):

    def test_examples(self):
        shape = orbit_shape(Endofunction.identity(3), 1)
        self.assertEqual((shape.tail, shape.cycle), ((), (1,)))
        shape = orbit_shape(Endofunction.constant(3, 0), 2)
        self.assertEqual((shape.tail, shape.cycle), ((2,), (0,)))
        shape = orbit_shape(Endofunction((1, 2, 1)), 0)
        self.assertEqual((shape.tail, shape.cycle), ((0,), (1, 2)))

    def test_point_out_of_range(self):
        with self.assertRaises(PointError):
            orbit_shape(Endofunction.identity(3), 3)

    @given(endofunctions_strategy(), st.data())
    def test_rho_shape_invariants(self, T, data):
        x = data.draw(st.integers(0, T.n - 1))
        shape = orbit_shape(T, x)
        self.assertGreaterEqual(shape.cycle_length, 1)
        self.assertLessEqual(shape.tail_length + shape.cycle_length, T.n)
        self.assertTrue(set(shape.tail).isdisjoint(shape.cycle))
        self.assertEqual(T(shape.cycle[-1]), shape.cycle[0])
        if shape.tail:
            self.assertEqual(shape.tail[0], x)
            self.assertEqual(T(shape.tail[-1]), shape.cycle[0])
        else:
            self.assertEqual(shape.cycle[0], x)

    def test_periodicity_characterizations(self):
        for n in range(1, 5):
            for T in enumerate_endofunctions(n):
                for x in range(n):
                    shape = orbit_shape(T, x)
                    by_iteration = any(
                        _iterate(T, x, k) == x for k in range(1, n + 1)
                    )
                    self.assertEqual(is_periodic(T, x), by_iteration)
                    self.assertEqual(is_periodic(T, x), x in shape.cycle_set)
                    self.assertEqual(is_periodic(T, x), shape.tail_length == 0)


def _iterate(T, x, k):
    for _ in range(k):
        x = T(x)
    return x


class TestPeriodicity(unittest.TestCase):

    def test_identity_all_periodic(self):
        T = Endofunction.identity(4)
        self.assertTrue(all(is_periodic(T, x) for x in range(4)))

    def test_constant_only_c_periodic(self):
        T = Endofunction.constant(4, 2)
        self.assertEqual([is_periodic(T, x) for x in range(4)], [False, False, True, False])

    def test_two_cycle_with_tail(self):
        T = Endofunction((1, 2, 1))
        self.assertTrue(is_periodic(T, 1))
        self.assertFalse(is_periodic(T, 0))

    def test_fixed_points(self):
        T = Endofunction((1, 0, 2))
        self.assertEqual([is_fixed(T, x) for x in range(3)], [False, False, True])
        self.assertTrue(is_periodic(T, 0))


class TestRecurrence(unittest.TestCase):

    def test_identity_examples(self):
        T = Endofunction.identity(3)
        self.assertTrue(visits_infinitely(T, 1, {1, 2}))
        self.assertFalse(visits_infinitely(T, 1, {0, 2}))

    def test_constant_example(self):
        T = Endofunction.constant(4, 3)
        for x in range(4):
            self.assertTrue(visits_infinitely(T, x, {0, 3}))
            self.assertFalse(visits_infinitely(T, x, {0, 1, 2}))

    def test_block_out_of_range(self):
        with self.assertRaises(PointError):
            visits_infinitely(Endofunction.identity(2), 0, {5})

    def test_agrees_with_simulation(self):
        for n in range(1, 5):
            blocks = {frozenset(b) for p in enumerate_partitions(n) for b in p.blocks()}
            for T in enumerate_endofunctions(n):
                for x in range(n):
                    for block in blocks:
                        self.assertEqual(
                            visits_infinitely(T, x, block), simulate_recurrence(T, x, block),
                            f"T={T} x={x} block={sorted(block)}"
                        )


class TestDelta(unittest.TestCase):

    def test_identity_gives_block_of_x(self):
        for n in range(1, 6):
            T = Endofunction.identity(n)
            for partition in enumerate_partitions(n):
                for x in range(n):
                    self.assertEqual(delta_of(T, x, partition).blocks, {partition.block_of(x)})

    def test_constant_gives_block_of_c(self):
        for n in range(1, 6):
            partitions = list(enumerate_partitions(n))
            for c in range(n):
                T = Endofunction.constant(n, c)
                for partition in partitions:
                    for x in range(n):
                        self.assertEqual(delta_of(T, x, partition).blocks, {partition.block_of(c)})

    def test_two_cycle_meets_both_blocks(self):
        delta = delta_of(Endofunction((1, 2, 1)), 0, SetPartition((0, 0, 1)))
        self.assertEqual(delta.blocks, {0, 1})

    def test_dimension_mismatch(self):
        with self.assertRaises(DimensionError):
            delta_of(Endofunction.identity(3), 0, SetPartition((0, 1)))

    def test_exhaustive_properties(self):
        for n in range(1, 5):
            lattice = list(enumerate_partitions(n))
            comparable = [(f, c, coarsening_map(f, c)) for f in lattice for c in lattice if refines(f, c)]
            for T in enumerate_endofunctions(n):
                for x in range(n):
                    deltas = {p: delta_of(T, x, p) for p in lattice}
                    for p, delta in deltas.items():
                        self.assertTrue(delta.blocks)
                        by_membership = {b for b, elements in enumerate(p.blocks())
                                         if visits_infinitely(T, x, elements)}
                        self.assertEqual(delta.blocks, by_membership)
                    for fine, coarse, psi in comparable:
                        image = {psi.apply(a) for a in deltas[fine].blocks}
                        self.assertLessEqual(image, deltas[coarse].blocks)


if __name__ == "__main__":
    unittest.main()
