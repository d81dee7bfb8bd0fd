"""The decision pipeline: falsify, then validate, else undecided."""

from __future__ import annotations

import enum
import time
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable

from .exceptions import CapExceededError, ContractError
from .falsify import check_inclusion
from .lp import default_node_budget
from .model import CIStatement, VarSet, common_universe, iter_submasks
from .validate import AntecedentSystem, ValidationCertificate, solve_system, verify_certificate

CLOSURE_MAX_VARS = 6
DEFAULT_CLOSURE_CAP = 10_000


class Outcome(str, enum.Enum):
    FALSIFIED = "FALSIFIED"
    VALIDATED = "VALIDATED"
    UNDECIDED = "UNDECIDED"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class DecideOptions:
    """``ip`` additionally runs the integer program on LP-validated instances;
    ``closure`` falls back to the semi-graphoid closure when the LP fails;
    ``method`` selects the LP solver path (see :func:`ciinfer.lp.lp_feasible`)."""

    ip: bool = False
    closure: bool = False
    node_budget: int | None = None
    cap: int | None = None
    presolve: bool = True
    method: str = "auto"


@dataclass(frozen=True)
class Decision:
    """Verdict for one consequent (or, with ``parts``, for a consequent set).

    ``certificate`` is a witness :class:`VarSet` when falsified and a
    :class:`ValidationCertificate` when validated by the LP. Closure
    validations carry no certificate. ``combinatorial`` is only set when the
    integer program was run.
    """

    outcome: Outcome
    method: str | None = None
    certificate: VarSet | ValidationCertificate | None = None
    consequent: CIStatement | None = None
    combinatorial: bool | None = None
    ip_certificate: ValidationCertificate | None = None
    n_rows: int = 0
    n_cols: int = 0
    lp_seconds: float = 0.0
    parts: tuple["Decision", ...] = field(default=())

    @property
    def falsified(self) -> bool:
        return self.outcome is Outcome.FALSIFIED

    @property
    def validated(self) -> bool:
        return self.outcome is Outcome.VALIDATED


def decide(antecedents: Iterable[CIStatement], consequent: CIStatement,
           options: DecideOptions | None = None, *,
           system: AntecedentSystem | None = None) -> Decision:
    """Decide one implication instance.

    ``system`` may carry a prebuilt :class:`AntecedentSystem` for the same
    antecedents, so that several consequents share one matrix.
    """
    opts = options or DecideOptions()
    ants = tuple(dict.fromkeys(antecedents))
    common_universe(ants + (consequent,))
    inc = check_inclusion(ants, consequent, cap=opts.cap)
    if not inc.included:
        return Decision(Outcome.FALSIFIED, "semilattice", inc.witness, consequent)

    if system is None:
        system = AntecedentSystem.build(ants, cap=opts.cap)
    cs = system.for_consequent(consequent)
    rows, cols = cs.shape
    t0 = time.perf_counter()
    cert = solve_system(cs, presolve=opts.presolve, method=opts.method)
    lp_seconds = time.perf_counter() - t0
    stats = dict(consequent=consequent, n_rows=rows, n_cols=cols, lp_seconds=lp_seconds)

    if cert is not None:
        if not verify_certificate(ants, consequent, cert):
            raise ContractError("solver produced a certificate that does not verify")
        if opts.ip:
            budget = opts.node_budget if opts.node_budget is not None else default_node_budget()
            ip_cert = solve_system(cs, integer=True, node_budget=budget,
                                   presolve=opts.presolve, method=opts.method)
            return Decision(Outcome.VALIDATED, "ip" if ip_cert else "lp", cert,
                            combinatorial=ip_cert is not None, ip_certificate=ip_cert, **stats)
        return Decision(Outcome.VALIDATED, "lp", cert, **stats)

    if opts.closure and consequent in semigraphoid_closure(ants):
        return Decision(Outcome.VALIDATED, "closure", None,
                        combinatorial=False if opts.ip else None, **stats)
    return Decision(Outcome.UNDECIDED, None, None,
                    combinatorial=False if opts.ip else None, **stats)


def combine(parts: Iterable[Decision]) -> Outcome:
    """Validated if any part is, falsified if all are, undecided otherwise."""
    parts = list(parts)
    if any(p.validated for p in parts):
        return Outcome.VALIDATED
    if parts and all(p.falsified for p in parts):
        return Outcome.FALSIFIED
    return Outcome.UNDECIDED


def decide_set(antecedents: Iterable[CIStatement], consequents: Iterable[CIStatement],
               options: DecideOptions | None = None) -> Decision:
    """Decide whether the antecedents imply at least one of ``consequents``."""
    ants = tuple(dict.fromkeys(antecedents))
    queries = list(consequents)
    if not queries:
        raise ValueError("the consequent set must be non-empty")
    opts = options or DecideOptions()
    system = None
    parts = []
    for q in queries:
        if system is None and check_inclusion(ants, q, cap=opts.cap).included:
            system = AntecedentSystem.build(ants, cap=opts.cap)
        parts.append(decide(ants, q, opts, system=system))
    outcome = combine(parts)
    chosen = next((p for p in parts if p.outcome is outcome), None)
    return Decision(outcome, chosen.method if chosen else None,
                    chosen.certificate if chosen else None,
                    chosen.consequent if chosen else None, parts=tuple(parts))


def semigraphoid_closure(statements: Iterable[CIStatement],
                         cap: int = DEFAULT_CLOSURE_CAP) -> frozenset[CIStatement]:
    """Least set containing ``statements`` closed under the semi-graphoid rules.

    Symmetry is built into the canonical form; decomposition, weak union and
    contraction are applied until nothing new appears. Raises
    :class:`CapExceededError` past ``cap`` statements or ``CLOSURE_MAX_VARS``
    variables.
    """
    seeds = list(statements)
    if not seeds:
        return frozenset()
    universe = common_universe(seeds)
    if universe.n > CLOSURE_MAX_VARS:
        raise CapExceededError(
            f"closure is limited to {CLOSURE_MAX_VARS} variables, got {universe.n}"
        )
    closed: set[CIStatement] = set()
    by_cond: dict[int, set[tuple[int, int]]] = {}
    work: deque[CIStatement] = deque()

    def add(x: int, y: int, z: int):
        s = CIStatement(universe, x, y, z)
        if s in closed:
            return
        closed.add(s)
        if len(closed) > cap:
            raise CapExceededError(f"closure exceeds {cap} statements")
        pairs = by_cond.setdefault(z, set())
        pairs.add((x, y))
        pairs.add((y, x))
        work.append(s)

    for s in seeds:
        add(s.a, s.b, s.c)
    while work:
        s = work.popleft()
        z = s.c
        for x, y in ((s.a, s.b), (s.b, s.a)):
            for y1 in iter_submasks(y):
                if y1 == 0 or y1 == y:
                    continue
                d = y & ~y1
                add(x, y1, z)        # decomposition
                add(x, y1, z | d)    # weak union
            # contraction, s as I(x, y | C ∪ D) needing I(x, D | C)
            for d in iter_submasks(z):
                if d and (x, d) in by_cond.get(z & ~d, ()):
                    add(x, y | d, z & ~d)
            # contraction, s as I(x, D=y | C=z) needing I(x, B | z ∪ y)
            for x2, bb in list(by_cond.get(z | y, ())):
                if x2 == x:
                    add(x, bb | y, z)
    return frozenset(closed)
