#!/usr/bin/env python3
"""
Text forms used on the command line and in reports.

    partition, block notation   {0,1}|{2}
    partition, rgs notation     [0,0,1]   (any label vector; canonicalized)
    endofunction                [1,2,1]   (image table)
    family file                 one partition per line, '#' starts a comment
    thread record               {"[0,0,1]": "{0,1}", ...}
"""

import logging
import re
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from dynamics import Endofunction
from errors import DimensionError, ParseError
from inverse_system import PartitionFamily, Thread
from partitions import SetPartition, from_blocks

logger = logging.getLogger(__name__)

TOKEN_RE = re.compile(r"\s*(?:(\d+)|([\[\]{},|]))")


class _Scanner:
    """Token stream over one text with positions for error messages."""

    def __init__(self, text: str):
        self.text = text
        self.tokens: List[Tuple[str, int]] = []
        pos = 0
        stripped_end = len(text.rstrip())
        while pos < stripped_end:
            match = TOKEN_RE.match(text, pos)
            if not match:
                bad = len(text) - len(text[pos:].lstrip())
                raise ParseError(f"unexpected character {text[bad]!r}", text, bad)
            start = match.start(1) if match.group(1) is not None else match.start(2)
            self.tokens.append((match.group(1) or match.group(2), start))
            pos = match.end()
        self.index = 0

    def peek(self) -> Optional[str]:
        if self.index < len(self.tokens):
            return self.tokens[self.index][0]
        return None

    def position(self) -> int:
        if self.index < len(self.tokens):
            return self.tokens[self.index][1]
        return len(self.text)

    def take(self, expected: str = None) -> str:
        token = self.peek()
        if token is None:
            raise ParseError(f"unexpected end of input, expected {expected or 'more'}", self.text, len(self.text))
        if expected is not None and token != expected:
            raise ParseError(f"expected {expected!r}, found {token!r}", self.text, self.position())
        self.index += 1
        return token

    def take_int(self) -> Tuple[int, int]:
        position = self.position()
        token = self.peek()
        if token is None or not token.isdigit():
            found = "end of input" if token is None else repr(token)
            raise ParseError(f"expected a non-negative integer, found {found}", self.text, position)
        self.index += 1
        return int(token), position

    def int_list(self, opening: str, closing: str) -> List[Tuple[int, int]]:
        self.take(opening)
        values = []
        if self.peek() == closing:
            self.take(closing)
            return values
        while True:
            values.append(self.take_int())
            if self.peek() == ",":
                self.take(",")
                continue
            self.take(closing)
            return values

    def finish(self):
        if self.peek() is not None:
            raise ParseError(f"trailing input {self.peek()!r}", self.text, self.position())


def parse_table(text: str) -> List[int]:
    """Parse "[a,b,c]" into a list of integers."""
    scanner = _Scanner(text)
    values = scanner.int_list("[", "]")
    scanner.finish()
    return [v for v, _ in values]


def parse_endofunction(text: str) -> Endofunction:
    scanner = _Scanner(text)
    values = scanner.int_list("[", "]")
    scanner.finish()
    if not values:
        raise ParseError("empty map table", text, 0)
    for value, position in values:
        if value >= len(values):
            raise ParseError(f"image {value} outside 0..{len(values) - 1}", text, position)
    return Endofunction(tuple(v for v, _ in values))


def parse_partition(text: str, n: Optional[int] = None) -> SetPartition:
    """Parse block notation or rgs notation.

    Args:
        text: "{0,1}|{2}" or "[0,0,1]"
        n: Expected ground-set size; inferred when omitted

    Raises:
        ParseError: malformed text
        DimensionError: parsed size differs from n
        ValidationError: blocks overlap, leave gaps or are empty
    """
    scanner = _Scanner(text)
    first = scanner.peek()
    if first == "[":
        labels = scanner.int_list("[", "]")
        scanner.finish()
        if not labels:
            raise ParseError("empty rgs", text, 0)
        partition = SetPartition.from_labels(v for v, _ in labels)
    elif first == "{":
        blocks = [scanner.int_list("{", "}")]
        while scanner.peek() == "|":
            scanner.take("|")
            blocks.append(scanner.int_list("{", "}"))
        scanner.finish()
        for values in blocks:
            if not values:
                raise ParseError("empty block", text, scanner.position())
        size = max(v for block in blocks for v, _ in block) + 1
        partition = from_blocks(size, [[v for v, _ in block] for block in blocks])
    else:
        raise ParseError("a partition starts with '{' or '['", text, scanner.position())
    if n is not None and partition.n != n:
        raise DimensionError(f"partition {text!r} is over n={partition.n}, expected n={n}")
    return partition


def parse_family_file(path, n: Optional[int] = None) -> PartitionFamily:
    """Read a family file, one partition per line."""
    path = Path(path)
    try:
        lines = path.read_text().splitlines()
    except OSError as e:
        raise ParseError(f"cannot read family file {path}: {e}")
    members = []
    for number, line in enumerate(lines, 1):
        content = line.split("#", 1)[0].strip()
        if not content:
            continue
        try:
            members.append(parse_partition(content, n))
        except ParseError as e:
            raise ParseError(f"{path}:{number}: {e}")
    if not members:
        raise ParseError(f"family file {path} lists no partitions")
    family = PartitionFamily.from_members(members)
    logger.info(f"Loaded family of {len(members)} partitions from {path}")
    return family


def format_rgs(partition: SetPartition) -> str:
    return "[" + ",".join(str(b) for b in partition.rgs) + "]"


def format_blocks(partition: SetPartition) -> str:
    return str(partition)


def format_block(elements) -> str:
    return "{" + ",".join(str(e) for e in sorted(elements)) + "}"


def format_endofunction(T: Endofunction) -> str:
    return str(T)


def thread_record(family: PartitionFamily, thread: Thread) -> Dict[str, str]:
    """Map each member (rgs text) to its chosen block (element-set text)."""
    return {format_rgs(m): format_block(m.block(b)) for m, b in zip(family.members, thread.assignment)}
