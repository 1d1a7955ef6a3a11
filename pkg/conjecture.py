#!/usr/bin/env python3
"""
Checking the fixed point conjecture on finite maps.

For every checked pair (T, x) the limit side ("the inverse limit at x is not
void") is compared with the right-hand side ("x is periodic", or with target
'fixed', "x is a fixed point"). Failures are recorded as replayable data, split
by direction:

  forward   limit nonempty but right-hand side false (the open implication)
  converse  right-hand side true but limit void (must never happen)

Sweeps run over independent shards of the endofunction space, optionally in a
process pool, and are merged in shard order so worker count never changes the
report.
"""

import enum
import hashlib
import json
import logging
import math
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import reduce
from typing import Any, Dict, List, Optional, Sequence, Tuple

from constants import (
    DEFAULT_THREAD_CAP, FAMILY_FULL, PARTITION_CEILING, SWEEP_CEILING, TARGET_FIXED, TARGET_PERIODIC
)
from dynamics import Endofunction, enumerate_endofunctions, is_fixed, is_periodic, random_endofunction
from errors import DimensionError, InternalConsistencyError, ReportError, UsageError, ValidationError
from inverse_system import (
    PartitionFamily, Semantics, Thread, build_system, enumerate_threads, limit_via_top, verify_thread
)
from notation import format_endofunction, parse_endofunction, parse_partition, thread_record
from partitions import check_ground_size

logger = logging.getLogger(__name__)

MODE_EXHAUSTIVE = "exhaustive"
MODE_SAMPLED = "sampled"

FORWARD = "forward"
CONVERSE = "converse"


class Target(str, enum.Enum):
    PERIODIC = TARGET_PERIODIC
    FIXED = TARGET_FIXED

    @classmethod
    def parse(cls, value) -> "Target":
        if isinstance(value, cls):
            return value
        try:
            return cls(value)
        except ValueError:
            raise UsageError(f"unknown target {value!r}; expected 'periodic' or 'fixed'")


@dataclass(frozen=True)
class PointVerdict:
    """Outcome of comparing both sides of the conjecture at one (T, x)."""
    T: Endofunction
    x: int
    semantics: Semantics
    family: PartitionFamily = field(repr=False)
    limit_nonempty: bool
    thread_count: int
    truncated: bool
    periodic: bool
    fixed: bool
    witness: Optional[Thread]
    target: Target = Target.PERIODIC
    cap: Optional[int] = DEFAULT_THREAD_CAP

    def __post_init__(self):
        if (self.witness is not None) != self.limit_nonempty:
            raise ValidationError("a witness must be present exactly when the limit is nonempty")

    @property
    def rhs(self) -> bool:
        return self.fixed if self.target is Target.FIXED else self.periodic

    @property
    def conjecture_holds(self) -> bool:
        return self.limit_nonempty == self.rhs

    @property
    def direction(self) -> Optional[str]:
        """Which implication fails, or None when the equivalence holds."""
        if self.conjecture_holds:
            return None
        return FORWARD if self.limit_nonempty else CONVERSE

    @property
    def family_descriptor(self):
        return self.family.descriptor()

    def to_dict(self) -> Dict[str, Any]:
        return {
            "map": format_endofunction(self.T),
            "point": self.x,
            "semantics": self.semantics.value,
            "target": self.target.value,
            "family": self.family_descriptor,
            "limit_nonempty": self.limit_nonempty,
            "thread_count": self.thread_count,
            "truncated": self.truncated,
            "thread_cap": self.cap,
            "periodic": self.periodic,
            "fixed": self.fixed,
            "conjecture_holds": self.conjecture_holds,
            "direction": self.direction,
            "witness": thread_record(self.family, self.witness) if self.witness is not None else None,
        }


def check_point(T: Endofunction, x: int, semantics=Semantics.STANDARD,
                family: Optional[PartitionFamily] = None, target=Target.PERIODIC,
                cap: Optional[int] = DEFAULT_THREAD_CAP, cross_check: bool = False) -> PointVerdict:
    """Evaluate both sides of the conjecture at (T, x).

    Standard semantics on the full lattice is answered by limit_via_top; every
    other case builds the inverse system and enumerates threads. With
    cross_check, full-lattice answers are computed both ways and compared.

    Raises:
        DimensionError: family and map disagree on n
        InternalConsistencyError: periodic x with a void limit, or a cross-check mismatch
    """
    semantics = Semantics.parse(semantics)
    target = Target.parse(target)
    if family is None:
        family = PartitionFamily.full_lattice(T.n)
    periodic = is_periodic(T, x)
    fixed = is_fixed(T, x)

    if family.is_full_lattice and semantics is Semantics.STANDARD and not cross_check:
        result = limit_via_top(T, x, semantics, family, cap)
    else:
        system = build_system(T, x, family)
        result = enumerate_threads(system, semantics, cap)
        if cross_check and family.is_full_lattice:
            fast = limit_via_top(T, x, semantics, family, cap)
            # Truncated runs may keep different threads, only their number must match
            same_count = fast.truncated == result.truncated and len(fast) == len(result)
            if not same_count or (not result.truncated and fast.threads != result.threads):
                raise InternalConsistencyError(
                    f"thread search and top-partition shortcut disagree at T={T}, x={x} "
                    f"({len(result)} vs {len(fast)} threads, {semantics.value})"
                )

    if periodic and result.is_empty:
        raise InternalConsistencyError(f"periodic point x={x} of T={T} has a void limit ({semantics.value})")

    return PointVerdict(
        T=T, x=x, semantics=semantics, family=family,
        limit_nonempty=not result.is_empty, thread_count=len(result), truncated=result.truncated,
        periodic=periodic, fixed=fixed,
        witness=result.threads[0] if result.threads else None, target=target, cap=cap,
    )


def easy_direction_witness(family: PartitionFamily, x: int) -> Thread:
    """The thread D -> block of D containing x."""
    return Thread(tuple(m.rgs[x] for m in family.members))


def check_easy_direction(T: Endofunction, x: int, semantics=Semantics.STANDARD,
                         family: Optional[PartitionFamily] = None) -> bool:
    """For periodic x, confirm the limit is nonempty via the thread through x."""
    if not is_periodic(T, x):
        raise UsageError(f"x={x} is not periodic under T={T}; the easy direction does not apply")
    if family is None:
        family = PartitionFamily.full_lattice(T.n)
    system = build_system(T, x, family)
    return verify_thread(system, easy_direction_witness(family, x), semantics)


@dataclass
class SweepReport:
    """Aggregated verdicts over a set of (T, x) pairs."""
    n: int
    semantics: Semantics
    target: Target
    mode: str
    family_descriptor: Any
    sample_size: Optional[int] = None
    seed: Optional[int] = None
    keep: Optional[int] = None
    total_points: int = 0
    holds_count: int = 0
    forward_failures: int = 0
    converse_failures: int = 0
    counterexamples: List[PointVerdict] = field(default_factory=list)
    complete: bool = True
    wall_time: float = 0.0

    @property
    def counterexample_count(self) -> int:
        return self.forward_failures + self.converse_failures

    @property
    def counterexamples_truncated(self) -> bool:
        return len(self.counterexamples) < self.counterexample_count

    def empty_copy(self) -> "SweepReport":
        return SweepReport(self.n, self.semantics, self.target, self.mode, self.family_descriptor,
                           self.sample_size, self.seed, self.keep)

    def add(self, verdict: PointVerdict):
        self.total_points += 1
        if verdict.conjecture_holds:
            self.holds_count += 1
            return
        if verdict.direction == FORWARD:
            self.forward_failures += 1
        else:
            self.converse_failures += 1
        if self.keep is None or len(self.counterexamples) < self.keep:
            self.counterexamples.append(verdict)

    def combine(self, other: "SweepReport") -> "SweepReport":
        """Merge with a report covering the points after this one's."""
        merged = self.empty_copy()
        merged.total_points = self.total_points + other.total_points
        merged.holds_count = self.holds_count + other.holds_count
        merged.forward_failures = self.forward_failures + other.forward_failures
        merged.converse_failures = self.converse_failures + other.converse_failures
        kept = self.counterexamples + other.counterexamples
        merged.counterexamples = kept if self.keep is None else kept[:self.keep]
        merged.complete = self.complete and other.complete
        return merged

    def to_dict(self, include_timing: bool = False) -> Dict[str, Any]:
        data = {
            "n": self.n,
            "semantics": self.semantics.value,
            "target": self.target.value,
            "mode": self.mode,
            "family": self.family_descriptor,
            "sample_size": self.sample_size,
            "seed": self.seed,
            "total_points": self.total_points,
            "holds_count": self.holds_count,
            "counterexample_count": self.counterexample_count,
            "direction_breakdown": {
                FORWARD: self.forward_failures,
                CONVERSE: self.converse_failures,
            },
            "complete": self.complete,
            "counterexamples_truncated": self.counterexamples_truncated,
            "counterexamples": [v.to_dict() for v in self.counterexamples],
        }
        if include_timing:
            data["wall_time"] = round(self.wall_time, 3)
        return data

    def content_digest(self) -> str:
        """sha256 over the canonical JSON form, timing excluded."""
        canonical = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()

    def summary_line(self) -> str:
        family = FAMILY_FULL if self.family_descriptor == FAMILY_FULL else f"{len(self.family_descriptor)}-members"
        line = (
            f"n={self.n} semantics={self.semantics.value} target={self.target.value} "
            f"family={family} mode={self.mode} points={self.total_points} holds={self.holds_count} "
            f"{self.counterexample_count} counterexamples "
            f"(forward {self.forward_failures}, converse {self.converse_failures})"
        )
        if not self.complete:
            line += " [incomplete]"
        return line


@dataclass(frozen=True)
class _ShardTask:
    """One unit of sweep work: a table prefix, or an explicit list of tables."""
    template: SweepReport
    family: PartitionFamily
    cap: Optional[int]
    prefix: Tuple[int, ...] = ()
    tables: Optional[Tuple[Tuple[int, ...], ...]] = None


def _sweep_shard(task: _ShardTask) -> SweepReport:
    report = task.template.empty_copy()
    n = report.n
    if task.tables is not None:
        maps = (Endofunction(t) for t in task.tables)
    else:
        maps = enumerate_endofunctions(n, prefix=task.prefix)
    for T in maps:
        for x in range(n):
            report.add(check_point(T, x, report.semantics, task.family, report.target, task.cap))
    logger.debug(f"shard {task.prefix or len(task.tables or ())} done: {report.total_points} points")
    return report


def _run_shards(tasks: Sequence[_ShardTask], workers: int) -> Tuple[List[SweepReport], bool]:
    """Run tasks in order; on interrupt return the finished prefix and False."""
    results: List[SweepReport] = []
    if workers <= 1:
        try:
            for task in tasks:
                results.append(_sweep_shard(task))
        except KeyboardInterrupt:
            logger.warning(f"Sweep interrupted after {len(results)} of {len(tasks)} shards")
            return results, False
        return results, True

    pool = ProcessPoolExecutor(max_workers=workers)
    try:
        futures = [pool.submit(_sweep_shard, task) for task in tasks]
        for future in futures:
            results.append(future.result())
    except KeyboardInterrupt:
        logger.warning(f"Sweep interrupted after {len(results)} of {len(tasks)} shards")
        pool.shutdown(wait=False, cancel_futures=True)
        return results, False
    pool.shutdown()
    return results, True


def _merge(template: SweepReport, parts: Sequence[SweepReport], complete: bool, started: float) -> SweepReport:
    report = reduce(SweepReport.combine, parts, template.empty_copy())
    report.complete = complete and report.complete
    report.wall_time = time.monotonic() - started
    logger.info(f"Sweep finished in {report.wall_time:.2f}s: {report.summary_line()}")
    return report


def _prepare_family(n: int, family: Optional[PartitionFamily], force: bool) -> PartitionFamily:
    if family is None:
        return PartitionFamily.full_lattice(n, force=force)
    if family.n != n:
        raise DimensionError(f"family over n={family.n} but sweep over n={n}")
    return family


def exhaustive_sweep(n: int, semantics=Semantics.STANDARD, family: Optional[PartitionFamily] = None,
                     target=Target.PERIODIC, workers: int = 1, force: bool = False,
                     keep: Optional[int] = None, cap: Optional[int] = DEFAULT_THREAD_CAP) -> SweepReport:
    """Check every (T, x) with T ranging over all n**n maps.

    Raises:
        ResourceGuardError: n above the sweep ceiling without force
    """
    check_ground_size(n, SWEEP_CEILING, force, what="sweep")
    semantics = Semantics.parse(semantics)
    target = Target.parse(target)
    family = _prepare_family(n, family, force)
    if not (family.is_full_lattice and semantics is Semantics.STANDARD):
        family.comparable_pairs  # computed once here, shipped to workers with the family

    template = SweepReport(n, semantics, target, MODE_EXHAUSTIVE, family.descriptor(), keep=keep)
    tasks = [_ShardTask(template, family, cap, prefix=p) for p in _table_prefixes(n, min(2, n - 1))]

    logger.info(f"Exhaustive sweep n={n} semantics={semantics.value} target={target.value} "
                f"over {n ** n} maps in {len(tasks)} shards, workers={workers}")
    started = time.monotonic()
    parts, complete = _run_shards(tasks, workers)
    return _merge(template, parts, complete, started)


def _table_prefixes(n: int, length: int) -> List[Tuple[int, ...]]:
    prefixes: List[Tuple[int, ...]] = [()]
    for _ in range(length):
        prefixes = [p + (v,) for p in prefixes for v in range(n)]
    return prefixes


def sampled_sweep(n: int, semantics=Semantics.STANDARD, sample_size: int = 1000, seed: int = 42,
                  family: Optional[PartitionFamily] = None, target=Target.PERIODIC, workers: int = 1,
                  force: bool = False, keep: Optional[int] = None,
                  cap: Optional[int] = DEFAULT_THREAD_CAP) -> SweepReport:
    """Check every x for sample_size maps drawn from random.Random(seed)."""
    check_ground_size(n, PARTITION_CEILING, force, what="sampled sweep")
    if sample_size < 0:
        raise UsageError(f"sample size must be non-negative, got {sample_size}")
    semantics = Semantics.parse(semantics)
    target = Target.parse(target)
    family = _prepare_family(n, family, force)
    if sample_size and not (family.is_full_lattice and semantics is Semantics.STANDARD):
        family.comparable_pairs  # warm the cache before shipping the family to workers

    rng = random.Random(seed)
    tables = [random_endofunction(n, rng).table for _ in range(sample_size)]
    template = SweepReport(n, semantics, target, MODE_SAMPLED, family.descriptor(),
                           sample_size=sample_size, seed=seed, keep=keep)
    chunk = max(1, math.ceil(sample_size / max(1, workers * 4)))
    tasks = [_ShardTask(template, family, cap, tables=tuple(tables[i:i + chunk]))
             for i in range(0, sample_size, chunk)]

    logger.info(f"Sampled sweep n={n} semantics={semantics.value} sample={sample_size} seed={seed}")
    started = time.monotonic()
    parts, complete = _run_shards(tasks, workers)
    return _merge(template, parts, complete, started)


def family_from_descriptor(n: int, descriptor) -> PartitionFamily:
    if descriptor == FAMILY_FULL:
        return PartitionFamily.full_lattice(n, force=True)
    if not isinstance(descriptor, list) or not descriptor:
        raise ReportError(f"unrecognized family descriptor {descriptor!r}")
    return PartitionFamily.from_members([parse_partition(text, n) for text in descriptor])


def replay_record(record: Dict[str, Any], cap: Optional[int] = DEFAULT_THREAD_CAP) -> Tuple[PointVerdict, bool]:
    """Re-run one stored verdict; the flag says whether it reproduces exactly.

    The record's own thread_cap wins over cap, which only serves records
    written without one.
    """
    cap = record.get("thread_cap", cap)
    try:
        T = parse_endofunction(record["map"])
        family = family_from_descriptor(T.n, record["family"])
        verdict = check_point(T, record["point"], record["semantics"], family, record.get("target", TARGET_PERIODIC), cap)
    except KeyError as e:
        raise ReportError(f"counterexample record lacks field {e}")
    return verdict, verdict.to_dict() == record


def replay_report(data: Dict[str, Any], cap: Optional[int] = DEFAULT_THREAD_CAP) -> List[Dict[str, Any]]:
    """Replay every counterexample of a report; returns the records that did not reproduce."""
    if "counterexamples" not in data:
        raise ReportError("report has no counterexamples field")
    mismatches = []
    for record in data["counterexamples"]:
        _, same = replay_record(record, cap)
        if not same:
            mismatches.append(record)
    logger.info(f"Replayed {len(data['counterexamples'])} records, {len(mismatches)} mismatches")
    return mismatches
