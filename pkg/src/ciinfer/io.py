"""Instance files.

::

    # comment
    vars a b c d
    assume a ; b |
    assume c ; d | a
    query  c ; d |

``vars`` appears exactly once and before any statement; at least one
``query`` is required.
"""

from __future__ import annotations

import io
import os
import re
from dataclasses import dataclass
from typing import IO, Iterable

from .exceptions import ParseError
from .model import CIStatement, VarUniverse, format_statement, parse_statement

_KEYWORD_RE = re.compile(r"\s*(\S+)")
_NAME_RE = re.compile(r"[A-Za-z0-9_]+\Z")


@dataclass(frozen=True)
class InstanceFile:
    universe: VarUniverse
    antecedents: tuple[CIStatement, ...]
    queries: tuple[CIStatement, ...]

    def __iter__(self):
        # lets callers unpack ``universe, ants, queries = parse_instance_file(...)``
        return iter((self.universe, self.antecedents, self.queries))

    def dumps(self, header: str | None = None) -> str:
        return format_instance(self.universe, self.antecedents, self.queries, header)


def _strip_comment(line: str) -> str:
    cut = line.find("#")
    return line if cut < 0 else line[:cut]


def parse_instance(text: str) -> InstanceFile:
    universe = None
    vars_line = None
    ants: list[CIStatement] = []
    queries: list[CIStatement] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw)
        m = _KEYWORD_RE.match(line)
        if not m:
            continue
        word, rest_at = m.group(1), m.end(1)
        rest = line[rest_at:]
        if word == "vars":
            if universe is not None:
                raise ParseError(f"duplicate vars line (first on line {vars_line})", lineno, m.start(1) + 1)
            names = []
            for tok in re.finditer(r"\S+", rest):
                if not _NAME_RE.match(tok.group()):
                    raise ParseError(f"invalid variable name {tok.group()!r}",
                                     lineno, rest_at + tok.start() + 1)
                names.append(tok.group())
            try:
                universe = VarUniverse(names)
            except ValueError as exc:
                raise ParseError(str(exc), lineno, m.start(1) + 1) from None
            vars_line = lineno
        elif word in ("assume", "query"):
            if universe is None:
                raise ParseError(f"{word} before the vars declaration", lineno, m.start(1) + 1)
            stmt = parse_statement(rest, universe, line=lineno, offset=rest_at)
            (ants if word == "assume" else queries).append(stmt)
        else:
            raise ParseError(f"unknown keyword {word!r}", lineno, m.start(1) + 1)
    if universe is None:
        raise ParseError("no vars declaration")
    if not queries:
        raise ParseError("no query statements")
    return InstanceFile(universe, tuple(ants), tuple(queries))


def parse_instance_file(source: str | os.PathLike | IO[str]) -> InstanceFile:
    """Read an instance from a path or an open text stream."""
    if isinstance(source, (str, os.PathLike)):
        with open(source, encoding="utf-8") as fh:
            return parse_instance(fh.read())
    return parse_instance(source.read())


def format_instance(universe: VarUniverse, antecedents: Iterable[CIStatement],
                    queries: Iterable[CIStatement], header: str | None = None) -> str:
    out = io.StringIO()
    if header:
        for line in header.splitlines():
            out.write(f"# {line}\n")
    out.write("vars " + " ".join(universe.names) + "\n")
    for s in antecedents:
        out.write(f"assume {format_statement(s)}\n")
    for s in queries:
        out.write(f"query {format_statement(s)}\n")
    return out.getvalue()
