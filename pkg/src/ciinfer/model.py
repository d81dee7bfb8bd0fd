"""Variable universes, CI statements and their semi-lattices.

Subsets of the universe are ``n``-bit integer masks throughout; bit ``i``
stands for ``universe.names[i]``. Lattice elements are ordered by mask value,
which fixes row indexing downstream.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Iterator, Sequence

from .exceptions import CapExceededError, ParseError, UniverseMismatchError

MAX_VARS = 30
DEFAULT_CAP = 20

_NAME_RE = re.compile(r"[A-Za-z0-9_]+\Z")
_TOKEN_RE = re.compile(r"[A-Za-z0-9_]+|\S")


def iter_submasks(mask: int) -> Iterator[int]:
    """Yield every submask of ``mask`` (including 0 and ``mask``), largest first."""
    sub = mask
    while True:
        yield sub
        if sub == 0:
            return
        sub = (sub - 1) & mask


def mask_members(mask: int) -> tuple[int, ...]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


def check_cap(n: int, cap: int | None) -> None:
    limit = DEFAULT_CAP if cap is None else cap
    if n > limit:
        raise CapExceededError(
            f"universe has {n} variables; enumeration cap is {limit}"
        )


@dataclass(frozen=True)
class VarUniverse:
    """An ordered, duplicate-free collection of variable names."""

    names: tuple[str, ...]

    def __init__(self, names: Iterable[str]):
        names = tuple(names)
        if len(names) < 2:
            raise ValueError("a universe needs at least 2 variables")
        if len(names) > MAX_VARS:
            raise ValueError(f"at most {MAX_VARS} variables are supported")
        seen = set()
        for name in names:
            if not isinstance(name, str) or not _NAME_RE.match(name):
                raise ValueError(f"invalid variable name {name!r}")
            if name in seen:
                raise ValueError(f"duplicate variable name {name!r}")
            seen.add(name)
        object.__setattr__(self, "names", names)
        object.__setattr__(self, "_index", {nm: i for i, nm in enumerate(names)})

    @classmethod
    def default(cls, n: int) -> "VarUniverse":
        """Universe ``a, b, c, ...`` (or ``v0, v1, ...`` beyond 26 variables)."""
        if n <= 26:
            return cls("abcdefghijklmnopqrstuvwxyz"[:n])
        return cls(f"v{i}" for i in range(n))

    @property
    def n(self) -> int:
        return len(self.names)

    @property
    def full_mask(self) -> int:
        return (1 << len(self.names)) - 1

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise KeyError(f"unknown variable {name!r}") from None

    def mask(self, names: Iterable[str] | str) -> int:
        """Mask of the given names; a plain string is split on whitespace."""
        if isinstance(names, str):
            names = names.split()
        m = 0
        for name in names:
            m |= 1 << self.index(name)
        return m

    def varset(self, names: Iterable[str] | str = ()) -> "VarSet":
        return VarSet(self, self.mask(names))

    def __repr__(self) -> str:
        return f"VarUniverse({list(self.names)!r})"


@dataclass(frozen=True)
class VarSet:
    universe: VarUniverse
    mask: int

    def __post_init__(self):
        if self.mask < 0 or self.mask > self.universe.full_mask:
            raise ValueError(f"mask {self.mask} outside universe of size {self.universe.n}")

    @property
    def members(self) -> tuple[int, ...]:
        return mask_members(self.mask)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(self.universe.names[i] for i in self.members)

    def __len__(self) -> int:
        return self.mask.bit_count()

    def __iter__(self) -> Iterator[str]:
        return iter(self.names)

    def __contains__(self, name: str) -> bool:
        return bool(self.mask >> self.universe.index(name) & 1)

    def issubset(self, other: "VarSet") -> bool:
        return self.mask & ~other.mask == 0

    def __str__(self) -> str:
        return "{" + ",".join(self.names) + "}"

    def __repr__(self) -> str:
        return f"VarSet({' '.join(self.names)!r})"


class CIStatement:
    """The conditional independence statement I(A, B | C).

    Stored canonically: A and B are swapped when needed so that A is the
    lexicographically smaller index tuple.
    """

    __slots__ = ("universe", "a", "b", "c", "_hash")

    def __init__(self, universe: VarUniverse, a: int, b: int, c: int = 0):
        full = universe.full_mask
        for m in (a, b, c):
            if m < 0 or m & ~full:
                raise ValueError("statement mask outside universe")
        if not a or not b:
            raise ValueError("A and B must be non-empty")
        if a & b or a & c or b & c:
            raise ValueError("A, B and C must be pairwise disjoint")
        if mask_members(b) < mask_members(a):
            a, b = b, a
        self.universe = universe
        self.a = a
        self.b = b
        self.c = c
        self._hash = hash((a, b, c, universe.names))

    @classmethod
    def from_names(cls, universe: VarUniverse, A, B, C=()) -> "CIStatement":
        return cls(universe, universe.mask(A), universe.mask(B), universe.mask(C))

    @property
    def A(self) -> VarSet:
        return VarSet(self.universe, self.a)

    @property
    def B(self) -> VarSet:
        return VarSet(self.universe, self.b)

    @property
    def C(self) -> VarSet:
        return VarSet(self.universe, self.c)

    @property
    def is_elementary(self) -> bool:
        return self.a.bit_count() == 1 and self.b.bit_count() == 1

    def sort_key(self) -> tuple:
        return (mask_members(self.a), mask_members(self.b), self.c)

    def __eq__(self, other) -> bool:
        if not isinstance(other, CIStatement):
            return NotImplemented
        return (
            self.a == other.a
            and self.b == other.b
            and self.c == other.c
            and (self.universe is other.universe or self.universe == other.universe)
        )

    def __hash__(self) -> int:
        return self._hash

    def __lt__(self, other: "CIStatement") -> bool:
        return self.sort_key() < other.sort_key()

    def __str__(self) -> str:
        return format_statement(self)

    def __repr__(self) -> str:
        return f"I({format_statement(self)})"


def format_statement(stmt: CIStatement) -> str:
    names = stmt.universe.names
    parts = [" ".join(names[i] for i in mask_members(m)) for m in (stmt.a, stmt.b, stmt.c)]
    text = f"{parts[0]} ; {parts[1]} |"
    if parts[2]:
        text += " " + parts[2]
    return text


def parse_statement(text: str, universe: VarUniverse, *, line: int | None = None,
                    offset: int = 0) -> CIStatement:
    """Parse ``"a ; b | c d"`` into a canonical statement.

    ``line`` and ``offset`` only shift reported error positions, so callers
    parsing a larger document can report absolute locations.
    """
    groups: list[list[tuple[str, int]]] = [[]]
    separators = ";|"
    for m in _TOKEN_RE.finditer(text):
        tok, col = m.group(), offset + m.start() + 1
        if tok in separators:
            expected = separators[len(groups) - 1] if len(groups) <= 2 else None
            if tok != expected:
                raise ParseError(f"unexpected {tok!r}", line, col)
            groups.append([])
        elif _NAME_RE.match(tok):
            groups[-1].append((tok, col))
        else:
            raise ParseError(f"unexpected character {tok!r}", line, col)
    if len(groups) != 3:
        missing = "';'" if len(groups) == 1 else "'|'"
        raise ParseError(f"expected {missing} in statement", line, offset + len(text) + 1)

    masks = []
    owner: dict[str, str] = {}
    for label, group in zip("ABC", groups):
        m = 0
        for name, col in group:
            try:
                bit = 1 << universe.index(name)
            except KeyError:
                raise ParseError(f"unknown variable {name!r}", line, col) from None
            if name in owner:
                raise ParseError(
                    f"variable {name!r} appears in both {owner[name]} and {label}", line, col
                )
            owner[name] = label
            m |= bit
        masks.append(m)
    for label, m in zip("AB", masks):
        if not m:
            raise ParseError(f"set {label} is empty", line, offset + 1)
    return CIStatement(universe, *masks)


@dataclass(frozen=True)
class SemiLattice:
    """A finite family of subsets of ``universe`` (masks, sorted ascending)."""

    universe: VarUniverse
    masks: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "_members", frozenset(self.masks))

    @classmethod
    def from_masks(cls, universe: VarUniverse, masks: Iterable[int]) -> "SemiLattice":
        return cls(universe, tuple(sorted(set(masks))))

    def __len__(self) -> int:
        return len(self.masks)

    def __iter__(self) -> Iterator[VarSet]:
        return (VarSet(self.universe, m) for m in self.masks)

    def __contains__(self, item) -> bool:
        if isinstance(item, VarSet):
            item = item.mask
        return item in self._members

    def issubset(self, other: "SemiLattice") -> bool:
        return self._members <= other._members

    def index_of(self, mask: int) -> int:
        from bisect import bisect_left

        i = bisect_left(self.masks, mask)
        if i == len(self.masks) or self.masks[i] != mask:
            raise KeyError(mask)
        return i

    def __str__(self) -> str:
        parts = ("".join(VarSet(self.universe, m).names) or "∅" for m in self.masks)
        return "{" + ", ".join(parts) + "}"


def semi_lattice_masks(stmt: CIStatement) -> Iterator[int]:
    """Unordered masks of L(A,B|C) = {U : C ⊆ U, A ⊄ U, B ⊄ U}."""
    a, b, c = stmt.a, stmt.b, stmt.c
    full = stmt.universe.full_mask
    if stmt.is_elementary:
        for sub in iter_submasks(full & ~(a | b | c)):
            yield c | sub
        return
    for sub in iter_submasks(full & ~c):
        u = c | sub
        if u & a != a and u & b != b:
            yield u


def semi_lattice(stmt: CIStatement, cap: int | None = None) -> SemiLattice:
    check_cap(stmt.universe.n, cap)
    return SemiLattice.from_masks(stmt.universe, semi_lattice_masks(stmt))


def common_universe(stmts: Iterable[CIStatement], universe: VarUniverse | None = None):
    for s in stmts:
        if universe is None:
            universe = s.universe
        elif s.universe is not universe and s.universe != universe:
            raise UniverseMismatchError("statements are over different universes")
    if universe is None:
        raise ValueError("cannot infer a universe from an empty statement set")
    return universe


def semi_lattice_union(stmts: Iterable[CIStatement], cap: int | None = None,
                       universe: VarUniverse | None = None) -> SemiLattice:
    stmts = list(stmts)
    universe = common_universe(stmts, universe)
    check_cap(universe.n, cap)
    masks: set[int] = set()
    for s in stmts:
        masks.update(semi_lattice_masks(s))
    return SemiLattice.from_masks(universe, masks)


def elementary_count(n: int) -> int:
    return n * (n - 1) // 2 * (1 << (n - 2)) if n >= 2 else 0


def max_lattice_size(n: int) -> int:
    return (1 << n) - n - 1


def enumerate_elementary(universe: VarUniverse, cap: int | None = None) -> list[CIStatement]:
    """All I(a,b|K) with a < b, ordered by (a, b) then by the mask of K."""
    check_cap(universe.n, cap)
    out = []
    full = universe.full_mask
    for i, j in combinations(range(universe.n), 2):
        ai, bj = 1 << i, 1 << j
        rest = full & ~(ai | bj)
        for k in sorted(iter_submasks(rest)):
            out.append(CIStatement(universe, ai, bj, k))
    return out


def parse_statements(lines: Sequence[str] | str, universe: VarUniverse) -> list[CIStatement]:
    if isinstance(lines, str):
        lines = [lines]
    return [parse_statement(s, universe) for s in lines]
