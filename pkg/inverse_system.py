#!/usr/bin/env python3
"""
Inverse families at a point and the threads of their inverse limit.

For a map T, a point x and a family of partitions, every member D carries the
finite set D(x) of recurrent blocks, and every comparable pair (fine, coarse)
carries the coarsening map restricted to fine(x), which lands in coarse(x).
A thread picks one block per member so that all those maps agree.

Two semantics are supported and every result records which one produced it:

  standard         all compatible choices (the usual inverse limit)
  point-supported  compatible choices whose blocks all contain x itself
"""

import enum
import logging
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from constants import (
    DEFAULT_THREAD_CAP, PARTITION_CEILING, SEMANTICS_POINT_SUPPORTED, SEMANTICS_STANDARD
)
from dynamics import DeltaSet, Endofunction, delta_of, orbit_shape
from errors import DimensionError, InternalConsistencyError, UsageError, ValidationError
from partitions import (
    SetPartition, bell_number, check_ground_size, coarsening_map, common_refinement,
    enumerate_partitions, refines
)

logger = logging.getLogger(__name__)


class Semantics(str, enum.Enum):
    STANDARD = SEMANTICS_STANDARD
    POINT_SUPPORTED = SEMANTICS_POINT_SUPPORTED

    @classmethod
    def parse(cls, value) -> "Semantics":
        if isinstance(value, cls):
            return value
        try:
            return cls(value)
        except ValueError:
            choices = ", ".join(s.value for s in cls)
            raise UsageError(f"unknown semantics {value!r}; expected one of {choices}")


@dataclass(frozen=True)
class PartitionFamily:
    """An ordered family of distinct partitions of one ground set."""
    n: int
    members: Tuple[SetPartition, ...]
    is_full_lattice: bool = False

    def __post_init__(self):
        members = tuple(self.members)
        object.__setattr__(self, "members", members)
        if not members:
            raise ValidationError("a partition family needs at least one member")
        for member in members:
            if member.n != self.n:
                raise DimensionError(f"family member {member} is over n={member.n}, family is over n={self.n}")
        if len(set(members)) != len(members):
            raise ValidationError("family members must be distinct")

    @classmethod
    def full_lattice(cls, n: int, force: bool = False) -> "PartitionFamily":
        """All of FP(X), in lexicographic rgs order."""
        check_ground_size(n, PARTITION_CEILING, force, what="partition lattice")
        return cls(n, tuple(enumerate_partitions(n, force=force)), True)

    @classmethod
    def from_members(cls, members: Sequence[SetPartition]) -> "PartitionFamily":
        members = tuple(members)
        if not members:
            raise ValidationError("a partition family needs at least one member")
        n = members[0].n
        return cls(n, members, len(members) == bell_number(n))

    def index_of(self, partition: SetPartition) -> int:
        try:
            return self._positions[partition]
        except KeyError:
            raise ValidationError(f"{partition} is not a member of the family")

    @cached_property
    def _positions(self) -> Dict[SetPartition, int]:
        return {member: i for i, member in enumerate(self.members)}

    @cached_property
    def comparable_pairs(self) -> Tuple[Tuple[int, int, Tuple[int, ...]], ...]:
        """(fine index, coarse index, coarsening table) for every strictly comparable pair.

        Independent of T and x, so it is computed once per family.
        """
        pairs = []
        for i, fine in enumerate(self.members):
            for j, coarse in enumerate(self.members):
                if i != j and refines(fine, coarse):
                    pairs.append((i, j, coarsening_map(fine, coarse).table))
        logger.debug(f"family of {len(self.members)} members has {len(pairs)} comparable pairs")
        return tuple(pairs)

    @cached_property
    def search_order(self) -> Tuple[int, ...]:
        """Member indices from coarse to fine."""
        return tuple(sorted(range(len(self.members)), key=lambda i: (self.members[i].block_count, i)))

    def is_directed(self) -> bool:
        """Whether every pair of members has a common refinement inside the family."""
        if self.is_full_lattice:
            return True
        for i, p in enumerate(self.members):
            for q in self.members[i + 1:]:
                meet = common_refinement(p, q)
                if not any(refines(m, meet) for m in self.members):
                    return False
        return True

    def descriptor(self):
        """'full' for the whole lattice, otherwise the members in block notation."""
        if self.is_full_lattice:
            return "full"
        return [str(m) for m in self.members]


@dataclass(frozen=True)
class Edge:
    """Restriction of psi(fine, coarse) to fine(x)."""
    fine_index: int
    coarse_index: int
    mapping: Dict[int, int] = field(hash=False)

    def image(self) -> frozenset:
        return frozenset(self.mapping.values())


@dataclass(frozen=True)
class InverseSystemAtPoint:
    T: Endofunction
    x: int
    family: PartitionFamily
    nodes: Tuple[DeltaSet, ...]
    edges: Tuple[Edge, ...]

    @cached_property
    def edges_at(self) -> Tuple[Tuple[int, ...], ...]:
        """Edge indices touching each member."""
        touching: List[List[int]] = [[] for _ in self.nodes]
        for e, edge in enumerate(self.edges):
            touching[edge.fine_index].append(e)
            touching[edge.coarse_index].append(e)
        return tuple(tuple(t) for t in touching)

    def non_surjective_edges(self) -> List[Edge]:
        return [edge for edge in self.edges if edge.image() != self.nodes[edge.coarse_index].blocks]


@dataclass(frozen=True, order=True)
class Thread:
    """One chosen block index per family member, in member order."""
    assignment: Tuple[int, ...]

    def restrict(self, family: PartitionFamily, subfamily: PartitionFamily) -> "Thread":
        """The same thread seen over a subfamily of family."""
        return Thread(tuple(self.assignment[family.index_of(m)] for m in subfamily.members))

    def blocks(self, family: PartitionFamily) -> List[Tuple[SetPartition, Tuple[int, ...]]]:
        return [(m, m.block(b)) for m, b in zip(family.members, self.assignment)]


@dataclass(frozen=True)
class LimitResult:
    """Threads found by one enumeration, with the semantics used and a truncation marker."""
    threads: Tuple[Thread, ...]
    semantics: Semantics
    truncated: bool = False

    def __len__(self):
        return len(self.threads)

    def __iter__(self) -> Iterator[Thread]:
        return iter(self.threads)

    @property
    def is_empty(self) -> bool:
        return not self.threads


def build_system(T: Endofunction, x: int, family: PartitionFamily) -> InverseSystemAtPoint:
    """Compute every D(x) and every restricted coarsening map.

    Raises:
        DimensionError: family and map disagree on n
        InternalConsistencyError: a restricted map leaves its target set
    """
    if family.n != T.n:
        raise DimensionError(f"family over n={family.n} but map over n={T.n}")
    cycle = orbit_shape(T, x).cycle
    nodes = tuple(
        DeltaSet(member, frozenset(member.rgs[y] for y in cycle)) for member in family.members
    )
    edges = []
    for fine_index, coarse_index, table in family.comparable_pairs:
        target = nodes[coarse_index].blocks
        mapping = {}
        for block in nodes[fine_index].blocks:
            image = table[block]
            if image not in target:
                raise InternalConsistencyError(
                    f"psi({family.members[fine_index]} -> {family.members[coarse_index]}) sends "
                    f"recurrent block {block} to non-recurrent block {image} for T={T}, x={x}"
                )
            mapping[block] = image
        edges.append(Edge(fine_index, coarse_index, mapping))
    return InverseSystemAtPoint(T, x, family, nodes, tuple(edges))


def _initial_domains(system: InverseSystemAtPoint, semantics: Semantics) -> List[set]:
    domains = [set(node.blocks) for node in system.nodes]
    if semantics is Semantics.POINT_SUPPORTED:
        for member, domain in zip(system.family.members, domains):
            domain.intersection_update({member.rgs[system.x]})
    return domains


def _propagate(system: InverseSystemAtPoint, domains: List[set]) -> bool:
    """Arc consistency over every edge; False once some domain empties."""
    queue = deque(range(len(system.edges)))
    queued = set(queue)
    while queue:
        e = queue.popleft()
        queued.discard(e)
        edge = system.edges[e]
        fine, coarse = domains[edge.fine_index], domains[edge.coarse_index]
        kept_fine = {a for a in fine if edge.mapping[a] in coarse}
        kept_coarse = coarse & {edge.mapping[a] for a in kept_fine}
        for member, old, new in ((edge.fine_index, fine, kept_fine), (edge.coarse_index, coarse, kept_coarse)):
            if len(new) == len(old):
                continue
            if not new:
                return False
            domains[member] = new
            for other in system.edges_at[member]:
                if other != e and other not in queued:
                    queue.append(other)
                    queued.add(other)
    return all(domains)


def enumerate_threads(system: InverseSystemAtPoint, semantics=Semantics.STANDARD,
                      cap: Optional[int] = DEFAULT_THREAD_CAP) -> LimitResult:
    """All threads of the inverse limit under the given semantics.

    Backtracks over members from coarse to fine after arc-consistency pruning.
    With a cap, stops once cap + 1 threads exist and marks the result truncated.
    """
    semantics = Semantics.parse(semantics)
    if cap is not None and cap < 1:
        raise UsageError(f"thread cap must be at least 1, got {cap}")
    domains = _initial_domains(system, semantics)
    if not all(domains) or not _propagate(system, domains):
        return LimitResult((), semantics)

    order = system.family.search_order
    rank = {member: position for position, member in enumerate(order)}
    # checks[p]: edges joining order[p] to an earlier member, with the side order[p] is on
    checks: List[List[Tuple[Edge, bool]]] = [[] for _ in order]
    for edge in system.edges:
        rf, rc = rank[edge.fine_index], rank[edge.coarse_index]
        if rf > rc:
            checks[rf].append((edge, True))
        else:
            checks[rc].append((edge, False))

    assigned: List[Optional[int]] = [None] * len(order)
    solutions: List[Tuple[int, ...]] = []
    truncated = False
    choices = [None] * len(order)
    choices[0] = iter(sorted(domains[order[0]]))
    depth = 0
    while depth >= 0:
        member = order[depth]
        for value in choices[depth]:
            if all(
                (edge.mapping[value] == assigned[edge.coarse_index]) if is_fine
                else (edge.mapping[assigned[edge.fine_index]] == value)
                for edge, is_fine in checks[depth]
            ):
                assigned[member] = value
                break
        else:
            assigned[member] = None
            depth -= 1
            continue
        if depth < len(order) - 1:
            depth += 1
            choices[depth] = iter(sorted(domains[order[depth]]))
            continue
        if cap is not None and len(solutions) >= cap:
            truncated = True
            break
        solutions.append(tuple(assigned))

    threads = tuple(sorted(Thread(s) for s in solutions))
    if truncated:
        logger.info(f"thread enumeration for T={system.T}, x={system.x} truncated at {cap}")
    return LimitResult(threads, semantics, truncated)


def limit_via_top(T: Endofunction, x: int, semantics=Semantics.STANDARD,
                  family: Optional[PartitionFamily] = None,
                  cap: Optional[int] = None) -> LimitResult:
    """Threads of the full lattice read off the singleton partition.

    The singleton partition refines every partition, so a thread is fixed by
    its block there, i.e. by a cycle point y; the thread is then D -> [y]_D.
    Under point-supported semantics only y = x can survive. A cap keeps the
    first cap threads and marks the result truncated, as enumerate_threads does.
    """
    semantics = Semantics.parse(semantics)
    if cap is not None and cap < 1:
        raise UsageError(f"thread cap must be at least 1, got {cap}")
    if family is None:
        family = PartitionFamily.full_lattice(T.n)
    if not family.is_full_lattice:
        raise UsageError("limit_via_top needs the full partition lattice")
    if family.n != T.n:
        raise DimensionError(f"family over n={family.n} but map over n={T.n}")
    cycle = orbit_shape(T, x).cycle
    supports = sorted(cycle) if semantics is Semantics.STANDARD else [y for y in cycle if y == x]
    threads = sorted(Thread(tuple(m.rgs[y] for m in family.members)) for y in supports)
    if cap is not None and len(threads) > cap:
        return LimitResult(tuple(threads[:cap]), semantics, truncated=True)
    return LimitResult(tuple(threads), semantics)


def thread_checks(system: InverseSystemAtPoint, thread: Thread,
                  semantics=Semantics.STANDARD) -> List[Tuple[str, bool]]:
    """Independent re-check of a thread, one (description, ok) entry per condition.

    Recomputes D(x) and the coarsening maps from scratch rather than trusting
    the system's cached edges.
    """
    semantics = Semantics.parse(semantics)
    members = system.family.members
    if len(thread.assignment) != len(members):
        return [(f"thread has {len(thread.assignment)} entries for {len(members)} members", False)]
    results = []
    for member, block in zip(members, thread.assignment):
        recurrent = delta_of(system.T, system.x, member).blocks
        results.append((f"{member}: block {block} recurrent", block in recurrent))
        if semantics is Semantics.POINT_SUPPORTED:
            results.append((f"{member}: block {block} contains x={system.x}", member.rgs[system.x] == block))
    for i, fine in enumerate(members):
        for j, coarse in enumerate(members):
            if i == j or not refines(fine, coarse):
                continue
            image = coarsening_map(fine, coarse).apply(thread.assignment[i])
            results.append((f"psi({fine} -> {coarse}) sends {thread.assignment[i]} to {image}, "
                            f"thread has {thread.assignment[j]}", image == thread.assignment[j]))
    return results


def verify_thread(system: InverseSystemAtPoint, thread: Thread, semantics=Semantics.STANDARD) -> bool:
    return all(ok for _, ok in thread_checks(system, thread, semantics))
