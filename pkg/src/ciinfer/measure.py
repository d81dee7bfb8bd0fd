"""Exact discrete probability measures and set functions on the subset lattice.

This module is the ground truth the rest of the package is tested against:
satisfaction of a CI statement is decided with exact rationals, and the
entropy quantities (which need ``log``) are floating point cross-checks.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from graphlib import CycleError, TopologicalSorter
from itertools import product
from numbers import Rational
from typing import Iterable, Mapping, Sequence

from .exceptions import ParseError
from .model import CIStatement, VarSet, VarUniverse, mask_members, semi_lattice_masks

ZERO_TOL = 1e-9


class JointTable:
    """A probability measure on ``dom(s_1) x ... x dom(s_n)``.

    ``densities`` is indexed in row-major order of the assignment vector
    (the first variable varies slowest), matching ``itertools.product``.
    """

    def __init__(self, universe: VarUniverse, dims: Sequence[int], densities: Iterable):
        dims = tuple(int(k) for k in dims)
        if len(dims) != universe.n:
            raise ValueError(f"expected {universe.n} domain sizes, got {len(dims)}")
        if any(k < 2 for k in dims):
            raise ValueError("every domain needs at least 2 values")
        dens = tuple(Fraction(p) for p in densities)
        if len(dens) != math.prod(dims):
            raise ValueError(f"expected {math.prod(dims)} densities, got {len(dens)}")
        if any(p < 0 for p in dens):
            raise ValueError("densities must be nonnegative")
        if sum(dens) != 1:
            raise ValueError(f"densities sum to {sum(dens)}, not 1")
        self.universe = universe
        self.dims = dims
        self.densities = dens
        self._marginals: dict[int, dict[tuple, Fraction]] = {}

    def __eq__(self, other):
        if not isinstance(other, JointTable):
            return NotImplemented
        return (self.universe, self.dims, self.densities) == (
            other.universe, other.dims, other.densities)

    def __hash__(self):
        return hash((self.universe, self.dims, self.densities))

    @property
    def size(self) -> int:
        return len(self.densities)

    def assignments(self):
        return product(*(range(k) for k in self.dims))

    def items(self):
        return zip(self.assignments(), self.densities)

    def marginal_table(self, mask: int) -> Mapping[tuple, Fraction]:
        """Map from assignments of the variables in ``mask`` to their mass.

        Assignments with zero mass may be absent.
        """
        table = self._marginals.get(mask)
        if table is None:
            idx = mask_members(mask)
            table = {}
            for x, p in self.items():
                if p:
                    key = tuple(x[i] for i in idx)
                    table[key] = table.get(key, 0) + p
            self._marginals[mask] = table
        return table


def _as_mask(universe: VarUniverse, A) -> int:
    if isinstance(A, VarSet):
        return A.mask
    if isinstance(A, int):
        return A
    return universe.mask(A)


def marginal(P: JointTable, A, a) -> Fraction:
    """Exact mass of ``A = a``.

    ``a`` is either a mapping from variable names to values or a sequence
    aligned with A's members in universe order.
    """
    mask = _as_mask(P.universe, A)
    idx = mask_members(mask)
    if isinstance(a, Mapping):
        a = tuple(a[P.universe.names[i]] for i in idx)
    a = tuple(a)
    if len(a) != len(idx):
        raise ValueError(f"assignment has {len(a)} values for {len(idx)} variables")
    for i, v in zip(idx, a):
        if not 0 <= v < P.dims[i]:
            raise ValueError(f"value {v} outside domain of {P.universe.names[i]}")
    return Fraction(P.marginal_table(mask).get(a, 0))


def satisfies(P: JointTable, stmt: CIStatement) -> bool:
    """Exact test of P^C(c) P^ABC(a,b,c) = P^AC(a,c) P^BC(b,c) for all vectors."""
    a, b, c = stmt.a, stmt.b, stmt.c
    abc = a | b | c
    idx = mask_members(abc)
    pos = {v: k for k, v in enumerate(idx)}

    def proj(m):
        return [pos[v] for v in mask_members(m)]

    pc, pac, pbc = proj(c), proj(a | c), proj(b | c)
    m_c, m_ac = P.marginal_table(c), P.marginal_table(a | c)
    m_bc, m_abc = P.marginal_table(b | c), P.marginal_table(abc)
    for x in product(*(range(P.dims[i]) for i in idx)):
        lhs = m_c.get(tuple(x[k] for k in pc), 0) * m_abc.get(x, 0)
        rhs = m_ac.get(tuple(x[k] for k in pac), 0) * m_bc.get(tuple(x[k] for k in pbc), 0)
        if lhs != rhs:
            return False
    return True


def relative_entropy(p, q) -> float:
    """Kullback-Leibler divergence H(p | q) in nats.

    ``p`` and ``q`` are aligned sequences, or mappings over a shared sample
    space (missing keys count as zero mass).
    """
    if isinstance(p, Mapping):
        keys = list(p)
        pv = [p[k] for k in keys]
        qv = [q.get(k, 0) for k in keys]
    else:
        pv, qv = list(p), list(q)
        if len(pv) != len(qv):
            raise ValueError("p and q must share a sample space")
    total = 0.0
    for px, qx in zip(pv, qv):
        if px > 0:
            if qx <= 0:
                raise ValueError("p is not absolutely continuous with respect to q")
            total += float(px) * math.log(Fraction(px) / Fraction(qx))
    # tiny negative sums come only from rounding
    return max(total, 0.0)


def multiinformation(P: JointTable, A) -> float:
    mask = _as_mask(P.universe, A)
    idx = mask_members(mask)
    if len(idx) < 2:
        return 0.0
    joint = P.marginal_table(mask)
    singles = [P.marginal_table(1 << i) for i in idx]
    prod_q = {
        x: math.prod((s[(v,)] for s, v in zip(singles, x)), start=Fraction(1))
        for x in joint
    }
    return relative_entropy(joint, prod_q)


class SetFunction:
    """A function on all ``2**n`` subsets, stored by mask.

    Values are exact (``int``/``Fraction``) or floating point; ``exact``
    reports which.
    """

    __slots__ = ("universe", "values")

    def __init__(self, universe: VarUniverse, values: Sequence):
        values = tuple(values)
        if len(values) != 1 << universe.n:
            raise ValueError(f"need {1 << universe.n} values, got {len(values)}")
        self.universe = universe
        self.values = values

    @classmethod
    def from_callable(cls, universe: VarUniverse, fn) -> "SetFunction":
        return cls(universe, [fn(VarSet(universe, m)) for m in range(1 << universe.n)])

    @property
    def exact(self) -> bool:
        return all(isinstance(v, Rational) for v in self.values)

    def __getitem__(self, key) -> float | Fraction:
        if isinstance(key, VarSet):
            key = key.mask
        return self.values[key]

    def __eq__(self, other):
        if not isinstance(other, SetFunction):
            return NotImplemented
        return self.universe == other.universe and self.values == other.values

    def __repr__(self):
        return f"SetFunction(n={self.universe.n}, values={list(self.values)!r})"


def multiinformation_function(P: JointTable) -> SetFunction:
    return SetFunction(P.universe, [multiinformation(P, m) for m in range(1 << P.universe.n)])


def mobius_inversion(F: SetFunction) -> SetFunction:
    """ΔF(X) = Σ_{X⊆U⊆S} (-1)^{|U|-|X|} F(U), by the superset-difference transform."""
    vals = list(F.values)
    n = F.universe.n
    for i in range(n):
        bit = 1 << i
        for x in range(1 << n):
            if not x & bit:
                vals[x] -= vals[x | bit]
    return SetFunction(F.universe, vals)


def superset_sum(F: SetFunction) -> SetFunction:
    """Inverse of :func:`mobius_inversion`: G(X) = Σ_{X⊆U} F(U)."""
    vals = list(F.values)
    n = F.universe.n
    for i in range(n):
        bit = 1 << i
        for x in range(1 << n):
            if not x & bit:
                vals[x] += vals[x | bit]
    return SetFunction(F.universe, vals)


def lattice_sum_check(F: SetFunction, stmt: CIStatement, delta: SetFunction | None = None):
    """Return ``(F(ABC)+F(C)-F(AC)-F(BC), Σ_{U∈L(stmt)} ΔF(U))``.

    Pass a precomputed ``delta`` to avoid re-inverting F for many statements.
    """
    if stmt.universe != F.universe:
        raise ValueError("statement and set function use different universes")
    a, b, c = stmt.a, stmt.b, stmt.c
    lhs = F[a | b | c] + F[c] - F[a | c] - F[b | c]
    if delta is None:
        delta = mobius_inversion(F)
    rhs = sum((delta[u] for u in semi_lattice_masks(stmt)), start=0 * lhs)
    return lhs, rhs


def multiinformation_gap(P: JointTable, stmt: CIStatement) -> float:
    """M(ABC) + M(C) - M(AC) - M(BC); zero exactly when P satisfies stmt."""
    a, b, c = stmt.a, stmt.b, stmt.c
    return (multiinformation(P, a | b | c) + multiinformation(P, c)
            - multiinformation(P, a | c) - multiinformation(P, b | c))


def _edge_index(universe: VarUniverse, end) -> int:
    if isinstance(end, int):
        if not 0 <= end < universe.n:
            raise ValueError(f"variable index {end} out of range")
        return end
    return universe.index(end)


def random_factorized_table(universe: VarUniverse, dag_edges: Iterable = (), seed=0,
                            dims: Sequence[int] | None = None) -> JointTable:
    """P = ∏ P(s_i | parents(s_i)) with small-denominator rational conditionals.

    ``dag_edges`` holds ``(parent, child)`` pairs given by name or index.
    Every conditional row is ``w / sum(w)`` with integer weights 0..8, so
    denominators stay at most 64 for domains up to 8 values.
    """
    n = universe.n
    dims = tuple(dims) if dims is not None else (2,) * n
    parents: list[list[int]] = [[] for _ in range(n)]
    for u, v in dag_edges:
        i, j = _edge_index(universe, u), _edge_index(universe, v)
        if i == j:
            raise ValueError("self-loop in edge set")
        if i not in parents[j]:
            parents[j].append(i)
    for ps in parents:
        ps.sort()
    try:
        tuple(TopologicalSorter({j: ps for j, ps in enumerate(parents)}).static_order())
    except CycleError as exc:
        raise ValueError(f"edge set is cyclic: {exc.args[1]}") from None

    rng = random.Random(seed)
    cond = []
    for j in range(n):
        rows = {}
        for pa in product(*(range(dims[p]) for p in parents[j])):
            w = [rng.randint(0, 8) for _ in range(dims[j])]
            if not any(w):
                w[rng.randrange(dims[j])] = rng.randint(1, 8)
            total = sum(w)
            rows[pa] = [Fraction(x, total) for x in w]
        cond.append(rows)

    dens = []
    for x in product(*(range(k) for k in dims)):
        p = Fraction(1)
        for j in range(n):
            p *= cond[j][tuple(x[q] for q in parents[j])][x[j]]
            if not p:
                break
        dens.append(p)
    return JointTable(universe, dims, dens)


def random_dag(universe: VarUniverse, seed=0, edge_prob: float = 0.4):
    """Random DAG edges over a random topological order of the universe."""
    rng = random.Random(seed)
    order = list(range(universe.n))
    rng.shuffle(order)
    return [(order[i], order[j]) for i in range(len(order)) for j in range(i + 1, len(order))
            if rng.random() < edge_prob]


def format_table(P: JointTable) -> str:
    lines = ["dims " + " ".join(map(str, P.dims))]
    for x, p in P.items():
        lines.append(" ".join(map(str, x)) + f" {p.numerator}/{p.denominator}")
    return "\n".join(lines) + "\n"


def parse_table(text: str, universe: VarUniverse | None = None) -> JointTable:
    """Parse the ``dims k1 ... kn`` / ``v1 ... vn p/q`` fixture format.

    Assignments that are not listed get density zero.
    """
    dims = None
    entries: dict[tuple, Fraction] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        toks = line.split()
        if dims is None:
            if toks[0] != "dims":
                raise ParseError("expected 'dims' header", lineno, 1)
            try:
                dims = tuple(int(t) for t in toks[1:])
            except ValueError:
                raise ParseError("domain sizes must be integers", lineno) from None
            continue
        if len(toks) != len(dims) + 1:
            raise ParseError(f"expected {len(dims)} values and a density", lineno)
        try:
            x = tuple(int(t) for t in toks[:-1])
            p = Fraction(toks[-1])
        except ValueError:
            raise ParseError("malformed assignment line", lineno) from None
        if any(not 0 <= v < k for v, k in zip(x, dims)):
            raise ParseError("value outside domain", lineno)
        if x in entries:
            raise ParseError(f"duplicate assignment {x}", lineno)
        entries[x] = p
    if dims is None:
        raise ParseError("missing 'dims' header")
    if universe is None:
        universe = VarUniverse.default(len(dims))
    dens = [entries.get(x, Fraction(0)) for x in product(*(range(k) for k in dims))]
    try:
        return JointTable(universe, dims, dens)
    except ValueError as exc:
        raise ParseError(str(exc)) from None
