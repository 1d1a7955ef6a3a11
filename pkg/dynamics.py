#!/usr/bin/env python3
"""
Finite dynamics: endofunctions T on {0, ..., n-1}, the rho-shaped orbit of a
point, and the blocks of a partition that the orbit enters infinitely often.

On a finite set the orbit x, T(x), T^2(x), ... runs through a tail and then
repeats a cycle C(x) forever, so "infinitely often" is exactly "meets C(x)".
Iterates are counted from n = 1: whether x itself lies in a block only matters
when x is on its own cycle.
"""

import itertools
import logging
import random
from dataclasses import dataclass, field
from typing import FrozenSet, Iterable, Iterator, Sequence, Tuple

from partitions import SetPartition, check_ground_size
from errors import DimensionError, PointError, ValidationError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Endofunction:
    """T : X -> X stored as its image table, table[i] = T(i)."""
    table: Tuple[int, ...]
    n: int = field(init=False, compare=False)

    def __post_init__(self):
        table = tuple(self.table)
        if not table:
            raise ValidationError("endofunction table is empty")
        n = len(table)
        for i, image in enumerate(table):
            if not isinstance(image, int) or not 0 <= image < n:
                raise ValidationError(f"T({i}) = {image!r} is outside 0..{n - 1}")
        object.__setattr__(self, "table", table)
        object.__setattr__(self, "n", n)

    @classmethod
    def identity(cls, n: int) -> "Endofunction":
        check_ground_size(n)
        return cls(tuple(range(n)))

    @classmethod
    def constant(cls, n: int, c: int) -> "Endofunction":
        check_ground_size(n)
        if not 0 <= c < n:
            raise PointError(f"constant value {c} outside 0..{n - 1}")
        return cls((c,) * n)

    def __call__(self, x: int) -> int:
        return self.table[x]

    def __str__(self):
        return "[" + ",".join(str(v) for v in self.table) + "]"


@dataclass(frozen=True)
class OrbitShape:
    """Tail and eventual cycle of the forward orbit of x."""
    x: int
    tail: Tuple[int, ...]
    cycle: Tuple[int, ...]

    @property
    def tail_length(self) -> int:
        return len(self.tail)

    @property
    def cycle_length(self) -> int:
        return len(self.cycle)

    @property
    def cycle_set(self) -> FrozenSet[int]:
        return frozenset(self.cycle)

    @property
    def is_periodic(self) -> bool:
        return not self.tail


@dataclass(frozen=True)
class DeltaSet:
    """Delta(x): indices of the partition blocks met by the eventual cycle."""
    partition: SetPartition
    blocks: FrozenSet[int]

    def __post_init__(self):
        object.__setattr__(self, "blocks", frozenset(self.blocks))
        if not self.blocks:
            raise ValidationError("Delta(x) must be nonempty")
        for b in self.blocks:
            if not 0 <= b < self.partition.block_count:
                raise ValidationError(f"block index {b} is not a block of {self.partition}")

    def sorted_blocks(self) -> Tuple[int, ...]:
        return tuple(sorted(self.blocks))

    def __contains__(self, block: int) -> bool:
        return block in self.blocks

    def __len__(self):
        return len(self.blocks)


def _check_point(T: Endofunction, x: int):
    if not isinstance(x, int) or isinstance(x, bool) or not 0 <= x < T.n:
        raise PointError(f"point {x!r} outside ground set 0..{T.n - 1}")


def orbit_shape(T: Endofunction, x: int) -> OrbitShape:
    """Split the orbit of x into its tail and its eventual cycle.

    Uses a visited-position map; n is small, so O(n) memory is fine.
    """
    _check_point(T, x)
    position = {}
    path = []
    current = x
    while current not in position:
        position[current] = len(path)
        path.append(current)
        current = T.table[current]
    start = position[current]
    return OrbitShape(x=x, tail=tuple(path[:start]), cycle=tuple(path[start:]))


def visits_infinitely(T: Endofunction, x: int, block: Iterable[int]) -> bool:
    """True iff T^k(x) lies in block for infinitely many k >= 1."""
    elements = set(block)
    for element in elements:
        if not isinstance(element, int) or not 0 <= element < T.n:
            raise PointError(f"block element {element!r} outside ground set 0..{T.n - 1}")
    return not elements.isdisjoint(orbit_shape(T, x).cycle)


def delta_of(T: Endofunction, x: int, partition: SetPartition) -> DeltaSet:
    """Delta(x) for one partition: the blocks containing some point of C(x)."""
    if partition.n != T.n:
        raise DimensionError(f"partition over n={partition.n} but map over n={T.n}")
    shape = orbit_shape(T, x)
    return DeltaSet(partition, frozenset(partition.rgs[y] for y in shape.cycle))


def is_periodic(T: Endofunction, x: int) -> bool:
    """T^k(x) = x for some k >= 1."""
    return orbit_shape(T, x).is_periodic


def is_fixed(T: Endofunction, x: int) -> bool:
    """T(x) = x."""
    _check_point(T, x)
    return T.table[x] == x


def enumerate_endofunctions(n: int, prefix: Sequence[int] = ()) -> Iterator[Endofunction]:
    """Yield all n**n tables in lexicographic order (optionally under a fixed prefix)."""
    check_ground_size(n)
    prefix = tuple(prefix)
    if len(prefix) > n or any(not 0 <= v < n for v in prefix):
        raise ValidationError(f"invalid table prefix {list(prefix)} for n={n}")
    for rest in itertools.product(range(n), repeat=n - len(prefix)):
        yield Endofunction(prefix + rest)


def random_endofunction(n: int, rng: random.Random) -> Endofunction:
    """Uniform random table drawn from rng."""
    check_ground_size(n)
    return Endofunction(tuple(rng.randrange(n) for _ in range(n)))
