#!/usr/bin/env python3
"""
Set partitions of the ground set {0, ..., n-1}.

Partitions are stored in restricted-growth form: rgs[i] is the index of the
block holding element i, and block indices appear in first-use order. That
form is unique per partition, so equality and hashing reduce to comparing
tuples.

Order convention: the refinement order writes coarse <= fine when every block
of fine sits inside a block of coarse. This module never uses <= in its API;
the relation is spelled refines(fine, coarse) instead.
"""

import logging
from dataclasses import dataclass, field
from typing import Iterable, Iterator, List, Sequence, Tuple

from constants import PARTITION_CEILING
from errors import (
    DimensionError, EmptyGroundSetError, OrderError, ResourceGuardError, ValidationError
)

logger = logging.getLogger(__name__)


def check_ground_size(n: int, ceiling: int = None, force: bool = False, what: str = "ground set"):
    """Validate a ground-set size against zero and an optional soft ceiling."""
    if not isinstance(n, int) or isinstance(n, bool):
        raise ValidationError(f"{what} size must be an integer, got {n!r}")
    if n < 1:
        raise EmptyGroundSetError(f"{what} size must be at least 1, got {n}")
    if ceiling is not None and n > ceiling and not force:
        raise ResourceGuardError(
            f"{what} size {n} exceeds the ceiling of {ceiling}; pass force to override"
        )


def is_restricted_growth(rgs: Sequence[int]) -> bool:
    """Linear scan for the restricted-growth property."""
    if not rgs or rgs[0] != 0:
        return False
    top = 0
    for value in rgs[1:]:
        if value < 0 or value > top + 1:
            return False
        if value > top:
            top = value
    return True


def _canonical_labels(labels: Iterable) -> Tuple[int, ...]:
    seen = {}
    rgs = []
    for label in labels:
        if label not in seen:
            seen[label] = len(seen)
        rgs.append(seen[label])
    return tuple(rgs)


@dataclass(frozen=True)
class SetPartition:
    """A partition of {0, ..., n-1} in canonical restricted-growth form."""
    rgs: Tuple[int, ...]
    n: int = field(init=False, compare=False)
    block_count: int = field(init=False, compare=False)

    def __post_init__(self):
        rgs = tuple(self.rgs)
        if not is_restricted_growth(rgs):
            raise ValidationError(f"not a restricted growth string: {list(rgs)}")
        object.__setattr__(self, "rgs", rgs)
        object.__setattr__(self, "n", len(rgs))
        object.__setattr__(self, "block_count", max(rgs) + 1)

    @classmethod
    def from_labels(cls, labels: Iterable) -> "SetPartition":
        """Canonicalize any label vector (labels[i] names the block of i)."""
        return cls(_canonical_labels(labels))

    def blocks(self) -> Tuple[Tuple[int, ...], ...]:
        """Element tuples of the blocks, indexed by block index."""
        members: List[List[int]] = [[] for _ in range(self.block_count)]
        for element, block in enumerate(self.rgs):
            members[block].append(element)
        return tuple(tuple(block) for block in members)

    def block(self, index: int) -> Tuple[int, ...]:
        """Elements of one block."""
        if not 0 <= index < self.block_count:
            raise ValidationError(f"block index {index} out of range for {self.block_count} blocks")
        return tuple(i for i, b in enumerate(self.rgs) if b == index)

    def block_of(self, element: int) -> int:
        """Index of the block containing element."""
        if not 0 <= element < self.n:
            raise ValidationError(f"element {element} outside ground set of size {self.n}")
        return self.rgs[element]

    def __str__(self):
        return "|".join("{" + ",".join(str(e) for e in block) + "}" for block in self.blocks())


def one_block(n: int) -> SetPartition:
    """The coarsest partition, {X}."""
    check_ground_size(n)
    return SetPartition((0,) * n)


def singletons(n: int) -> SetPartition:
    """The finest partition, {{0}, ..., {n-1}}."""
    check_ground_size(n)
    return SetPartition(tuple(range(n)))


def from_blocks(n: int, blocks: Iterable[Iterable[int]]) -> SetPartition:
    """Canonicalize an explicit family of blocks.

    Args:
        n: Ground-set size
        blocks: Nonempty, pairwise disjoint element sets covering {0, ..., n-1}

    Returns:
        The unique SetPartition with exactly those blocks

    Raises:
        ValidationError: on an empty block, an overlap, an out-of-range element or a gap
    """
    check_ground_size(n)
    owner = [None] * n
    for block_number, block in enumerate(blocks):
        elements = list(block)
        if not elements:
            raise ValidationError(f"block #{block_number} is empty")
        for element in elements:
            if not isinstance(element, int) or not 0 <= element < n:
                raise ValidationError(f"element {element!r} in block #{block_number} is outside 0..{n - 1}")
            if owner[element] is not None:
                raise ValidationError(
                    f"element {element} appears in blocks #{owner[element]} and #{block_number}"
                )
            owner[element] = block_number
    missing = [i for i, o in enumerate(owner) if o is None]
    if missing:
        raise ValidationError(f"element {missing[0]} is not covered by any block")
    partition = SetPartition.from_labels(owner)
    assert sum(len(b) for b in partition.blocks()) == n
    return partition


def enumerate_partitions(n: int, force: bool = False, prefix: Sequence[int] = ()) -> Iterator[SetPartition]:
    """Yield every partition of {0, ..., n-1} once, in lexicographic rgs order.

    A nonempty prefix restricts the stream to partitions whose rgs starts with
    it, which is how parallel sweeps shard the lattice.
    """
    check_ground_size(n, PARTITION_CEILING, force, what="partition lattice")
    prefix = tuple(prefix)
    if len(prefix) > n or (prefix and not is_restricted_growth(prefix)):
        raise ValidationError(f"invalid rgs prefix {list(prefix)} for n={n}")
    fixed = max(len(prefix), 1)

    rgs = list(prefix) + [0] * (n - len(prefix))
    if not prefix:
        rgs[0] = 0
    # tops[i] = max(rgs[0..i])
    tops = [0] * n
    for i in range(1, n):
        tops[i] = max(tops[i - 1], rgs[i])

    while True:
        yield SetPartition(tuple(rgs))
        i = n - 1
        while i >= fixed and rgs[i] > tops[i - 1]:
            i -= 1
        if i < fixed:
            return
        rgs[i] += 1
        tops[i] = max(tops[i - 1], rgs[i])
        for j in range(i + 1, n):
            rgs[j] = 0
            tops[j] = tops[i]


def bell_number(n: int) -> int:
    """B(n) via the Bell triangle."""
    if n < 0:
        raise ValidationError(f"Bell number undefined for {n}")
    row = [1]
    for _ in range(n):
        next_row = [row[-1]]
        for value in row:
            next_row.append(next_row[-1] + value)
        row = next_row
    return row[0]


def _check_same_ground(p: SetPartition, q: SetPartition):
    if p.n != q.n:
        raise DimensionError(f"partitions over different ground sets: n={p.n} and n={q.n}")


def refines(fine: SetPartition, coarse: SetPartition) -> bool:
    """True iff every block of fine is contained in a block of coarse."""
    _check_same_ground(fine, coarse)
    image = [-1] * fine.block_count
    for f, c in zip(fine.rgs, coarse.rgs):
        if image[f] == -1:
            image[f] = c
        elif image[f] != c:
            return False
    return True


@dataclass(frozen=True)
class CoarseningMap:
    """psi: the map sending each fine block to the coarse block containing it."""
    fine: SetPartition
    coarse: SetPartition
    table: Tuple[int, ...]

    def __post_init__(self):
        if len(self.table) != self.fine.block_count:
            raise ValidationError(
                f"coarsening table has {len(self.table)} entries for {self.fine.block_count} fine blocks"
            )
        for element in range(self.fine.n):
            if self.table[self.fine.rgs[element]] != self.coarse.rgs[element]:
                raise ValidationError(
                    f"fine block {self.fine.rgs[element]} is not contained in coarse block "
                    f"{self.table[self.fine.rgs[element]]}"
                )

    def apply(self, fine_block: int) -> int:
        return self.table[fine_block]

    def compose(self, after: "CoarseningMap") -> "CoarseningMap":
        """This map followed by after (fine -> mid -> coarse)."""
        if after.fine != self.coarse:
            raise OrderError("maps do not compose: middle partitions differ")
        return CoarseningMap(self.fine, after.coarse, tuple(after.table[m] for m in self.table))


def coarsening_map(fine: SetPartition, coarse: SetPartition) -> CoarseningMap:
    """Build psi for a comparable pair.

    Raises:
        DimensionError: ground sets differ
        OrderError: fine does not refine coarse, so the map is undefined
    """
    _check_same_ground(fine, coarse)
    table = [-1] * fine.block_count
    for element, (f, c) in enumerate(zip(fine.rgs, coarse.rgs)):
        if table[f] == -1:
            table[f] = c
        elif table[f] != c:
            raise OrderError(
                f"{fine} does not refine {coarse}: element {element} splits fine block {f}"
            )
    return CoarseningMap(fine, coarse, tuple(table))


def common_refinement(p: SetPartition, q: SetPartition) -> SetPartition:
    """The coarsest partition refining both p and q (blockwise intersection)."""
    _check_same_ground(p, q)
    return SetPartition.from_labels(zip(p.rgs, q.rgs))
