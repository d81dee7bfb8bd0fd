"""Validation: build the minimal 0-1 system for (antecedents, consequent) and solve it.

Rows are the masks of L(antecedents) in ascending order, columns are the
relevant elementary statements in enumeration order, and the right-hand side
is ``v_antecedents - v_consequent``. A nonnegative solution is a certificate
that the antecedents imply the consequent.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

from .exceptions import ContractError, ParseError, UniverseMismatchError
from .falsify import lattice_indicator, relevant_elementary
from .lp import SparseBinaryMatrix, ip_feasible, lp_feasible
from .model import (
    CIStatement,
    VarUniverse,
    check_cap,
    common_universe,
    enumerate_elementary,
    format_statement,
    parse_statement,
    semi_lattice_masks,
)


def _dedupe(stmts: Iterable[CIStatement]) -> tuple[CIStatement, ...]:
    return tuple(dict.fromkeys(stmts))


@dataclass(frozen=True)
class LatticeVector:
    index: tuple[int, ...]
    counts: tuple[int, ...]

    def __post_init__(self):
        if len(self.index) != len(self.counts):
            raise ValueError("index and counts differ in length")
        if any(c < 0 for c in self.counts):
            raise ValueError("counts must be nonnegative")


@dataclass(frozen=True)
class ConstraintSystem:
    rows: tuple[int, ...]
    cols: tuple[CIStatement, ...]
    matrix: SparseBinaryMatrix
    v_antecedents: LatticeVector
    v_consequent: LatticeVector
    rhs: tuple[int, ...]

    @property
    def shape(self) -> tuple[int, int]:
        return self.matrix.shape


@dataclass(frozen=True)
class AntecedentSystem:
    """The part of the system that depends only on the antecedents.

    Build once with :meth:`build`, then call :meth:`for_consequent` per query;
    only the right-hand side changes between consequents.
    """

    universe: VarUniverse
    antecedents: tuple[CIStatement, ...]
    rows: tuple[int, ...]
    cols: tuple[CIStatement, ...]
    matrix: SparseBinaryMatrix
    counts: tuple[int, ...]
    _row_of: Mapping[int, int] = field(repr=False, compare=False)

    @classmethod
    def build(cls, antecedents: Iterable[CIStatement], cap: int | None = None,
              universe: VarUniverse | None = None, full: bool = False) -> "AntecedentSystem":
        """``full=True`` builds the unpruned system: every elementary column and
        every row a column can touch, for comparison benchmarks only."""
        ants = _dedupe(antecedents)
        universe = common_universe(ants, universe)
        check_cap(universe.n, cap)
        n = universe.n
        flags = lattice_indicator(ants, n)
        if full:
            cols = tuple(enumerate_elementary(universe, cap=n))
            row_flags = lattice_indicator(cols, n)
        else:
            cols = tuple(relevant_elementary(ants, cap=n, flags=flags))
            row_flags = flags
        rows = tuple(u for u in range(1 << n) if row_flags[u])
        row_of = {u: i for i, u in enumerate(rows)}
        counts = [0] * len(rows)
        for s in ants:
            for u in semi_lattice_masks(s):
                counts[row_of[u]] += 1
        columns = [sorted(row_of[u] for u in semi_lattice_masks(r)) for r in cols]
        matrix = SparseBinaryMatrix(len(rows), columns)
        return cls(universe, ants, rows, cols, matrix, tuple(counts), row_of)

    def consequent_vector(self, consequent: CIStatement) -> LatticeVector:
        if consequent.universe != self.universe:
            raise UniverseMismatchError("consequent is over a different universe")
        ind = [0] * len(self.rows)
        for u in semi_lattice_masks(consequent):
            i = self._row_of.get(u)
            if i is None or not self.counts[i]:
                raise ContractError(
                    f"L({format_statement(consequent)}) is not inside L(antecedents); "
                    "falsify before validating"
                )
            ind[i] = 1
        return LatticeVector(self.rows, tuple(ind))

    def for_consequent(self, consequent: CIStatement) -> ConstraintSystem:
        vc = self.consequent_vector(consequent)
        rhs = tuple(k - v for k, v in zip(self.counts, vc.counts))
        if any(v < 0 for v in rhs):
            raise ContractError("negative right-hand side entry")
        return ConstraintSystem(self.rows, self.cols, self.matrix,
                                LatticeVector(self.rows, self.counts), vc, rhs)


def build_system(antecedents: Iterable[CIStatement], consequent: CIStatement,
                 cap: int | None = None) -> ConstraintSystem:
    """Raises :class:`ContractError` unless L(consequent) ⊆ L(antecedents)."""
    return AntecedentSystem.build(antecedents, cap).for_consequent(consequent)


@dataclass(frozen=True)
class ValidationCertificate:
    """Positive coefficients k_r with v_antecedents = v_consequent + Σ k_r v_r."""

    terms: tuple[tuple[CIStatement, Fraction], ...]

    @classmethod
    def from_solution(cls, cols: Iterable[CIStatement], x: Iterable) -> "ValidationCertificate":
        return cls(tuple((r, Fraction(k)) for r, k in zip(cols, x) if k))

    @property
    def coefficients(self) -> dict[CIStatement, Fraction]:
        return dict(self.terms)

    @property
    def is_integral(self) -> bool:
        return all(k.denominator == 1 for _, k in self.terms)

    def __len__(self):
        return len(self.terms)

    def format_terms(self) -> list[str]:
        return [f"{k.numerator}/{k.denominator} * I({format_statement(r)})" for r, k in self.terms]

    def __str__(self):
        return " + ".join(self.format_terms()) or "0"


def solve_system(system: ConstraintSystem, integer: bool = False,
                 node_budget: int | None = None, presolve: bool = True,
                 method: str = "auto"):
    """Run the LP (or IP) on a built system; returns a certificate or ``None``."""
    if integer:
        out = ip_feasible(system.matrix, system.rhs, node_budget=node_budget,
                          presolve=presolve, method=method)
    else:
        out = lp_feasible(system.matrix, system.rhs, presolve=presolve, method=method)
    if not out.feasible:
        return None
    return ValidationCertificate.from_solution(system.cols, out.solution)


def validate(antecedents, consequent, cap: int | None = None) -> ValidationCertificate | None:
    """Certificate that the antecedents imply ``consequent``, or ``None`` (unknown).

    ``None`` makes no claim of non-implication.
    """
    return solve_system(build_system(antecedents, consequent, cap))


def validate_combinatorial(antecedents, consequent, cap: int | None = None,
                           node_budget: int | None = None) -> ValidationCertificate | None:
    """Integer-coefficient variant of :func:`validate`.

    Raises :class:`~ciinfer.exceptions.NodeBudgetExceeded` rather than
    returning ``None`` when branch-and-bound runs out of nodes.
    """
    return solve_system(build_system(antecedents, consequent, cap), integer=True,
                        node_budget=node_budget)


def verify_certificate(antecedents, consequent: CIStatement, cert: ValidationCertificate) -> bool:
    """Independent exact re-check of a certificate over the whole subset lattice."""
    try:
        ants = _dedupe(antecedents)
        universe = common_universe(ants + (consequent,) + tuple(r for r, _ in cert.terms))
    except (UniverseMismatchError, ValueError):
        return False
    flags = lattice_indicator(ants, universe.n)
    balance: dict[int, Fraction] = {}
    for s in ants:
        for u in semi_lattice_masks(s):
            balance[u] = balance.get(u, 0) + 1
    for u in semi_lattice_masks(consequent):
        balance[u] = balance.get(u, 0) - 1
    seen = set()
    for r, k in cert.terms:
        if not isinstance(k, (int, Fraction)) or k <= 0 or not r.is_elementary or r in seen:
            return False
        seen.add(r)
        for u in semi_lattice_masks(r):
            if not flags[u]:
                return False
            balance[u] = balance.get(u, 0) - k
    return all(v == 0 for v in balance.values())


_TERM_RE = re.compile(r"^\s*(-?\d+)\s*(?:/\s*(\d+))?\s*\*\s*I\((.*)\)\s*$")


def format_certificate(cert: ValidationCertificate, instance: str, query: CIStatement) -> str:
    lines = [f"# certificate for {instance}", f"query {format_statement(query)}"]
    lines += cert.format_terms()
    return "\n".join(lines) + "\n"


def parse_certificate(text: str, universe: VarUniverse):
    """Parse :func:`format_certificate` output into ``(query, certificate)``."""
    query = None
    terms = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        stripped = line.lstrip()
        col0 = len(line) - len(stripped)
        if stripped.startswith("query") and (len(stripped) == 5 or stripped[5].isspace()):
            if query is not None:
                raise ParseError("duplicate query line", lineno, col0 + 1)
            query = parse_statement(stripped[5:], universe, line=lineno, offset=col0 + 5)
            continue
        m = _TERM_RE.match(line)
        if not m:
            raise ParseError("expected 'k_num/k_den * I(A ; B | C)'", lineno, col0 + 1)
        num, den = int(m.group(1)), int(m.group(2) or 1)
        if den == 0:
            raise ParseError("zero denominator", lineno, m.start(2) + 1)
        stmt = parse_statement(m.group(3), universe, line=lineno, offset=m.start(3))
        terms.append((stmt, Fraction(num, den)))
    if query is None:
        raise ParseError("certificate has no query line")
    return query, ValidationCertificate(tuple(terms))
