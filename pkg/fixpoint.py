#!/usr/bin/env python3
"""
Main entry point for Fixpoint.
Parses the run configuration, sets up logging and dispatches to a subcommand.

Exit codes say whether the run completed, not what it found: a sweep with
counterexamples still exits 0, an interrupted one exits 130 after storing its
partial report.
"""

import argparse
import logging
import sys
from typing import Callable, Dict, List, Optional

from conjecture import exhaustive_sweep, replay_report, sampled_sweep
from constants import APP_NAME, FAMILY_FULL, LOG_FILE, VERSION, get_fixpoint_root, make_dirs_if_missing
from dynamics import delta_of, orbit_shape
from errors import FixpointError, InternalConsistencyError, UsageError
from inverse_system import (
    PartitionFamily, Semantics, build_system, enumerate_threads, limit_via_top, thread_checks
)
from notation import (
    format_block, format_blocks, format_rgs, parse_endofunction, parse_family_file, parse_partition
)
from partitions import bell_number, enumerate_partitions
from run_config import RunConfig, load_settings, parse_run_config
from storage import ReportStore, load_report, report_key, save_report

logger = logging.getLogger(__name__)

EXIT_INTERRUPTED = 130


def setup_logging(level: str = "WARNING"):
    """Log to stderr and, when the data root is writable, to a log file."""
    handlers = [logging.StreamHandler(sys.stderr)]
    file_error = None
    try:
        root = make_dirs_if_missing(get_fixpoint_root())
        handlers.append(logging.FileHandler(root / LOG_FILE))
    except OSError as e:
        file_error = e

    logging.basicConfig(
        level=getattr(logging, str(level).upper(), logging.WARNING),
        format='%(asctime)s - %(levelname)s - %(message)s',
        handlers=handlers,
        force=True,
    )
    if file_error is not None:
        logger.warning(f"File logging disabled: {file_error}")
    logger.info(f"Starting {APP_NAME} v{VERSION}")


def _require(value, flag: str, command: str):
    if value is None:
        raise UsageError(f"{command} needs {flag}")
    return value


def _load_family(config: RunConfig, n: int) -> Optional[PartitionFamily]:
    """The family named by --family, or None for the full lattice."""
    if config.family == FAMILY_FULL:
        return None
    family = parse_family_file(config.family_path, n)
    if not family.is_directed():
        logger.warning("Family is not directed: some pairs have no common refinement in it")
    return family


def cmd_partitions(config: RunConfig) -> int:
    n = _require(config.n, "--n", "partitions")
    count = 0
    for partition in enumerate_partitions(n, force=config.force):
        print(f"{format_rgs(partition)} {format_blocks(partition)}")
        count += 1
    if count != bell_number(n):
        raise InternalConsistencyError(f"enumerated {count} partitions, Bell number is {bell_number(n)}")
    print(f"count {count}")
    return 0


def cmd_delta(config: RunConfig) -> int:
    T = parse_endofunction(_require(config.map_text, "--map", "delta"))
    x = _require(config.point, "--point", "delta")
    partition = parse_partition(_require(config.partition_text, "--partition", "delta"), T.n)
    delta = delta_of(T, x, partition)
    for block in delta.sorted_blocks():
        print(format_block(partition.block(block)))
    return 0


def _print_explanation(system, result, semantics: Semantics):
    family = system.family
    shape = orbit_shape(system.T, system.x)
    print(f"orbit tail {list(shape.tail)} cycle {list(shape.cycle)}")
    print(f"family directed: {'yes' if family.is_directed() else 'no'}")
    for member, node in zip(family.members, system.nodes):
        blocks = ", ".join(format_block(member.block(b)) for b in node.sorted_blocks())
        print(f"Delta(x) at {format_blocks(member)}: {blocks}")
    not_onto = system.non_surjective_edges()
    for edge in system.edges:
        fine, coarse = family.members[edge.fine_index], family.members[edge.coarse_index]
        pairs = ", ".join(
            f"{format_block(fine.block(a))}->{format_block(coarse.block(edge.mapping[a]))}"
            for a in sorted(edge.mapping)
        )
        onto = "not onto" if edge in not_onto else "onto"
        print(f"psi {format_blocks(fine)} -> {format_blocks(coarse)}: {pairs} ({onto})")
    print(f"restricted maps not onto: {len(not_onto)} of {len(system.edges)}")
    for i, thread in enumerate(result):
        for description, ok in thread_checks(system, thread, semantics):
            print(f"thread {i} [{'ok' if ok else 'FAIL'}] {description}")


def cmd_limit(config: RunConfig) -> int:
    T = parse_endofunction(_require(config.map_text, "--map", "limit"))
    x = _require(config.point, "--point", "limit")
    semantics = Semantics.parse(config.semantics)
    family = _load_family(config, T.n) or PartitionFamily.full_lattice(T.n, force=config.force)
    system = build_system(T, x, family)
    result = enumerate_threads(system, semantics, config.cap)

    if family.is_full_lattice and not result.truncated:
        shortcut = limit_via_top(T, x, semantics, family)
        if shortcut.threads != result.threads:
            raise InternalConsistencyError("thread search and top-partition shortcut disagree")

    descriptor = FAMILY_FULL if family.is_full_lattice else f"{len(family.members)}-members"
    marker = " (truncated)" if result.truncated else ""
    print(f"semantics={semantics.value} family={descriptor} threads={len(result)}{marker}")
    for i, thread in enumerate(result):
        choices = "; ".join(
            f"{format_rgs(member)}->{format_block(elements)}" for member, elements in thread.blocks(family)
        )
        print(f"thread {i}: {choices}")
    if config.explain:
        _print_explanation(system, result, semantics)
    return 0


def cmd_conjecture(config: RunConfig) -> int:
    n = _require(config.n, "--n", "conjecture")
    family = _load_family(config, n)
    options = dict(semantics=config.semantics, family=family, target=config.target,
                   workers=config.workers, force=config.force, keep=config.keep, cap=config.cap)
    if config.sample is not None:
        report = sampled_sweep(n, sample_size=config.sample, seed=config.seed, **options)
    else:
        report = exhaustive_sweep(n, **options)

    data = report.to_dict(include_timing=config.timing)
    digest = report.content_digest()
    if config.out:
        path = save_report(data, config.out)
    else:
        path = ReportStore(report_key(data)).write_report(data, digest)
    logger.info(f"Report stored at {path} after {report.wall_time:.2f}s")
    print(report.summary_line())
    print(f"digest {digest}")
    if not report.complete:
        logger.warning("Sweep was interrupted; the stored report is marked incomplete")
        return EXIT_INTERRUPTED
    return 0


def _list_stored_reports():
    for key in ReportStore.list_keys():
        for entry in ReportStore(key).history():
            print(f"{key} slot {entry['index']} counterexamples={entry.get('counterexample_count')} "
                  f"digest={entry.get('digest')}")


def cmd_replay(config: RunConfig) -> int:
    if config.list_reports:
        _list_stored_reports()
        return 0
    if config.report:
        data = load_report(config.report)
    elif config.key:
        data = ReportStore(config.key).load_report()
        if data is None:
            raise UsageError(f"no stored report under key {config.key!r}")
    else:
        raise UsageError("replay needs --report or --key")
    mismatches = replay_report(data, config.cap)
    for record in mismatches:
        print(f"mismatch map={record['map']} point={record['point']} semantics={record['semantics']}")
    print(f"replayed {len(data['counterexamples'])} records, {len(mismatches)} mismatches")
    return 0


COMMANDS: Dict[str, Callable[[RunConfig], int]] = {
    "partitions": cmd_partitions,
    "delta": cmd_delta,
    "limit": cmd_limit,
    "conjecture": cmd_conjecture,
    "replay": cmd_replay,
}


def main(argv: Optional[List[str]] = None) -> int:
    """Main application entry point."""
    argv = sys.argv[1:] if argv is None else list(argv)

    # --config has to be known before the parser defaults are built
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    settings = load_settings(known.config)

    try:
        config = parse_run_config(argv, settings)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return e.exit_code

    setup_logging(config.log_level)
    try:
        return COMMANDS[config.subcommand](config)
    except FixpointError as e:
        logger.debug(f"{config.subcommand} failed with {type(e).__name__}")
        print(f"error: {e}", file=sys.stderr)
        return e.exit_code
    except KeyboardInterrupt:
        logger.info("Run interrupted by user")
        return EXIT_INTERRUPTED


if __name__ == "__main__":
    sys.exit(main())
