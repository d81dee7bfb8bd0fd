"""Exact feasibility of ``A x = b, x >= 0`` for sparse 0-1 matrices.

The exact solver is a phase-one simplex on an integer tableau in which each
row carries its own positive denominator, reduced by the row gcd after every
pivot. Pricing is Dantzig's most-negative reduced cost until a degenerate
pivot occurs, after which Bland's smallest-index rule takes over for as long
as the objective stalls; Bland's rule alone cannot cycle, so neither can the
hybrid.

Large systems go through a guided path first: HiGHS proposes a solution or
an infeasibility ray in floating point, the proposal is rounded to small
rationals and accepted only if it verifies exactly. A rejected proposal falls
back to the exact simplex, so every verdict is exact.

Integer feasibility is depth-first branch-and-bound on the exact relaxation.
Tableaus start as ``int64`` arrays and move to Python integers as soon as an
update could overflow.
"""

from __future__ import annotations

import logging
import math
import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .exceptions import NodeBudgetExceeded

log = logging.getLogger(__name__)

DEFAULT_NODE_BUDGET = 10**6

# keeps |T * p - outer(col, row)| below 2**63 when every entry is below it
_INT64_SAFE = 2**31 - 1


class SparseBinaryMatrix:
    """0-1 matrix stored as one sorted tuple of row indices per column."""

    __slots__ = ("n_rows", "n_cols", "columns")

    def __init__(self, n_rows: int, columns: Sequence[Sequence[int]], n_cols: int | None = None):
        cols = tuple(tuple(int(i) for i in c) for c in columns)
        if n_cols is not None and n_cols != len(cols):
            raise ValueError(f"n_cols={n_cols} but {len(cols)} columns given")
        for j, c in enumerate(cols):
            if any(b <= a for a, b in zip(c, c[1:])):
                raise ValueError(f"column {j}: row indices must be strictly increasing")
            if c and (c[0] < 0 or c[-1] >= n_rows):
                raise ValueError(f"column {j}: row index out of range")
        self.n_rows = int(n_rows)
        self.n_cols = len(cols)
        self.columns = cols

    @classmethod
    def from_dense(cls, rows: Sequence[Sequence[int]]) -> "SparseBinaryMatrix":
        rows = [list(r) for r in rows]
        n_cols = len(rows[0]) if rows else 0
        if any(len(r) != n_cols for r in rows):
            raise ValueError("ragged dense matrix")
        if any(v not in (0, 1) for r in rows for v in r):
            raise ValueError("entries must be 0 or 1")
        cols = [[i for i, r in enumerate(rows) if r[j]] for j in range(n_cols)]
        return cls(len(rows), cols, n_cols)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n_rows, self.n_cols)

    def to_dense(self) -> list[list[int]]:
        out = [[0] * self.n_cols for _ in range(self.n_rows)]
        for j, c in enumerate(self.columns):
            for i in c:
                out[i][j] = 1
        return out

    def to_array(self) -> np.ndarray:
        arr = np.zeros((self.n_rows, self.n_cols), dtype=np.int64)
        for j, c in enumerate(self.columns):
            arr[list(c), j] = 1
        return arr

    def dump(self) -> str:
        """Dense text grid, one row per line."""
        return "\n".join(" ".join(map(str, r)) for r in self.to_dense())

    def matvec(self, x: Sequence) -> list:
        out = [0] * self.n_rows
        for j, c in enumerate(self.columns):
            xj = x[j]
            if xj:
                for i in c:
                    out[i] += xj
        return out

    def select_columns(self, keep: Sequence[int]) -> "SparseBinaryMatrix":
        return SparseBinaryMatrix(self.n_rows, [self.columns[j] for j in keep])

    def __eq__(self, other):
        if not isinstance(other, SparseBinaryMatrix):
            return NotImplemented
        return self.n_rows == other.n_rows and self.columns == other.columns

    def __repr__(self):
        return f"SparseBinaryMatrix({self.n_rows}x{self.n_cols}, nnz={sum(map(len, self.columns))})"


@dataclass(frozen=True)
class FeasibilityOutcome:
    feasible: bool
    solution: tuple[Fraction, ...] | None = None
    pivots: int = 0
    nodes: int = 0
    farkas: tuple[Fraction, ...] | None = None

    def __post_init__(self):
        if self.feasible != (self.solution is not None):
            raise ValueError("a solution is present exactly when feasible")
        if self.feasible and self.farkas is not None:
            raise ValueError("a feasible outcome cannot carry an infeasibility ray")


def _check_dims(A: SparseBinaryMatrix, b: Sequence[int]) -> list[int]:
    b = [int(v) for v in b]
    if len(b) != A.n_rows:
        raise ValueError(f"rhs has {len(b)} entries for {A.n_rows} rows")
    if any(v < 0 for v in b):
        raise ValueError("rhs entries must be nonnegative")
    return b


def _ratio_row(T: np.ndarray, cand: np.ndarray, col: np.ndarray, basis: list[int]) -> int:
    """Minimum-ratio row among ``cand``; ties go to the smallest basic index."""
    n = T.shape[1] - 1
    rhs = T[cand, n]
    zero = cand[rhs == 0]
    if zero.size:
        shortlist = zero
    elif T.dtype != object:
        ratio = rhs / col[cand]
        shortlist = cand[ratio <= ratio.min() * (1 + 1e-9)]
    else:
        shortlist = cand
    r = int(shortlist[0])
    best_num, best_den = int(T[r, n]), int(col[r])
    for i in shortlist[1:]:
        i = int(i)
        num, den = int(T[i, n]), int(col[i])
        lhs, rhs_ = num * best_den, best_num * den
        if lhs < rhs_ or (lhs == rhs_ and basis[i] < basis[r]):
            r, best_num, best_den = i, num, den
    return r


def _phase_one(A: np.ndarray, b: Sequence[int], bland: bool = False):
    """Phase-one simplex on ``A x = b, x >= 0`` with ``b >= 0``.

    Returns ``(solution or None, pivot count)``. Row ``i`` of the tableau is
    ``T[i] / den[i]`` with integer ``T`` and ``den``; the last row holds the
    reduced costs of the artificial objective. The entering column is the
    most negative reduced cost, except after a degenerate pivot (and always
    when ``bland`` is set), where Bland's smallest-index rule is used, so
    degenerate stretches cannot cycle.
    """
    m, n = A.shape
    if m == 0:
        return [Fraction(0)] * n, 0
    big = max((abs(v) for v in b), default=0) * m >= _INT64_SAFE or (
        A.size and int(np.abs(A).max()) * m >= _INT64_SAFE)
    dtype = object if big else np.int64
    T = np.zeros((m + 1, n + 1), dtype=dtype)
    T[:m, :n] = A
    T[:m, n] = list(b)
    T[m, :] = -T[:m, :].sum(axis=0)
    den = np.ones(m + 1, dtype=dtype)
    basis = list(range(n, n + m))  # artificial i has variable index n + i
    pivots = 0
    use_bland = bland
    while True:
        z = T[m, :n]
        if use_bland:
            neg = np.flatnonzero(z < 0)
            if neg.size == 0:
                break
            j = int(neg[0])
        else:
            if n == 0:
                break
            j = int(np.argmin(z))
            if z[j] >= 0:
                break
        col = T[:m, j]
        # phase one is bounded below, so an improving column has a positive entry
        r = _ratio_row(T, np.flatnonzero(col > 0), col, basis)
        use_bland = bland or T[r, n] == 0

        row = T[r, :]
        g = np.gcd.reduce(row)
        row = row // g
        dr = row[j]
        hit = np.flatnonzero(T[:, j])
        hit = hit[hit != r]
        if hit.size:
            if T.dtype != object:
                worst = max(int(np.abs(T[hit]).max()) * int(dr),
                            int(np.abs(T[hit, j]).max()) * int(np.abs(row).max()))
                if worst >= 2**62:
                    T, den, row = T.astype(object), den.astype(object), row.astype(object)
                    dr = row[j]
            f = T[hit, j]
            N = T[hit] * dr - np.outer(f, row)
            D = den[hit] * dr
            g = np.gcd(np.gcd.reduce(N, axis=1), D)
            T[hit] = N // g[:, None]
            den[hit] = D // g
        T[r] = row
        den[r] = dr
        basis[r] = j
        pivots += 1
        if pivots % 200 == 0:
            log.debug("pivot %d: infeasibility %s, %d rows updated, bland=%s",
                      pivots, -T[m, n] / den[m], hit.size, use_bland)
    if T[m, n] != 0:
        return None, pivots
    x = [Fraction(0)] * n
    for i, v in enumerate(basis):
        if v < n:
            x[v] = Fraction(int(T[i, n]), int(den[i]))
    return x, pivots


# m * n above which "auto" hands the relaxation to the float-guided path
AUTO_SIMPLEX_LIMIT = 20_000
_ROUND_DENOM = 1 << 16


def _round(v: float) -> Fraction:
    return Fraction(float(v)).limit_denominator(_ROUND_DENOM)


def _exact_farkas(A: np.ndarray, b: Sequence[int], y: Sequence[Fraction]) -> bool:
    """True when ``y^T A <= 0`` and ``y^T b > 0`` hold exactly (no solution exists)."""
    if not any(y):
        return False
    scale = math.lcm(*(v.denominator for v in y))
    yi = np.array([int(v * scale) for v in y], dtype=object)
    if (yi @ A.astype(object) > 0).any():
        return False
    return int(yi @ np.asarray(list(b), dtype=object)) > 0


def _guided(A: np.ndarray, b: list[int]):
    """Let HiGHS find a candidate, then prove it exactly.

    A feasible verdict needs a rounded (or exactly re-solved on its support)
    solution that satisfies ``A x = b`` exactly. An infeasible verdict needs
    a Farkas ray; the minimum-l1 ray is asked for because it tends to be
    sparse and integral. Returns ``(x, farkas)`` with one of them set, or
    ``None`` when no candidate survives exact checking.
    """
    from scipy.optimize import linprog

    m, n = A.shape
    bf = np.asarray(b, dtype=float)
    res = linprog(np.zeros(n), A_eq=A, b_eq=bf, bounds=(0, None), method="highs-ds")
    if res.status == 0:
        xh = res.x
        x = [Fraction(0) if v < 1e-9 else _round(v) for v in xh]
        if _exact_residual_ok(A, b, x):
            return x, None
        support = np.flatnonzero(xh > 1e-9)
        xs, _ = _phase_one(A[:, support], b)
        if xs is None:
            return None
        x = [Fraction(0)] * n
        for k, j in enumerate(support):
            x[int(j)] = xs[k]
        return x, None
    if res.status != 2:
        return None
    # min |y|_1  s.t.  A^T y <= 0,  b^T y >= 1,  with y = y+ - y-
    a_ub = np.vstack([np.hstack([A.T, -A.T]), np.r_[-bf, bf][None, :]])
    b_ub = np.r_[np.zeros(n), -1.0]
    ray = linprog(np.ones(2 * m), A_ub=a_ub, b_ub=b_ub, bounds=(0, None), method="highs-ds")
    if ray.status != 0:
        return None
    y = [_round(v) for v in ray.x[:m] - ray.x[m:]]
    if _exact_farkas(A, b, y):
        return None, tuple(y)
    return None


def _exact_residual_ok(A: np.ndarray, b: Sequence[int], x: Sequence[Fraction]) -> bool:
    if any(v < 0 for v in x):
        return False
    nz = [j for j, v in enumerate(x) if v]
    acc = [Fraction(0)] * A.shape[0]
    for j in nz:
        for i in np.flatnonzero(A[:, j]):
            acc[i] += int(A[i, j]) * x[j]
    return all(a == v for a, v in zip(acc, b))


def _lift_farkas(A: np.ndarray, rows: np.ndarray, zero_rows: np.ndarray, y_sub) -> tuple:
    """Extend a ray of the presolved system to the original one.

    Every dropped column touches a zero-rhs row, so a large enough negative
    weight on those rows restores ``y^T A <= 0`` without changing ``y^T b``.
    """
    m = A.shape[0]
    y = [Fraction(0)] * m
    for k, i in enumerate(rows):
        y[int(i)] = Fraction(y_sub[k])
    zs = np.flatnonzero(zero_rows)
    if zs.size:
        scale = math.lcm(*(v.denominator for v in y))
        yi = np.array([int(v * scale) for v in y], dtype=object)
        excess = max(0, int(max(yi @ A.astype(object), default=0)))
        for i in zs:
            y[int(i)] = Fraction(-excess, scale)
    return tuple(y)


def _solve_nonneg(A: np.ndarray, b: list[int], presolve: bool = True, method: str = "auto"):
    """Feasibility for a nonnegative integer ``A`` and ``b >= 0``.

    Returns ``(x or None, pivots, farkas or None)``. Presolve: a row with
    zero rhs forces every column touching it to zero; such columns and rows
    are dropped, and a positive row left without columns proves
    infeasibility.
    """
    if method not in ("auto", "simplex", "guided"):
        raise ValueError(f"unknown method {method!r}")
    m, n = A.shape
    rows = np.arange(m)
    cols = np.arange(n)
    zero_rows = np.zeros(m, dtype=bool)
    if presolve:
        zero_rows = np.array([v == 0 for v in b], dtype=bool)
        dead = A[zero_rows].any(axis=0) if zero_rows.any() and n else np.zeros(n, dtype=bool)
        cols = np.flatnonzero(~dead)
        rows = np.flatnonzero(~zero_rows)
        sub = A[np.ix_(rows, cols)]
        if rows.size:
            empty = np.flatnonzero(~sub.any(axis=1)) if cols.size else np.arange(rows.size)
            if empty.size:
                y = [Fraction(0)] * rows.size
                y[int(empty[0])] = Fraction(1)
                return None, 0, _lift_farkas(A, rows, zero_rows, y)
    else:
        sub = A
    sub_b = [b[int(i)] for i in rows]
    farkas = None
    pivots = 0
    if method == "guided" or (method == "auto" and sub.size > AUTO_SIMPLEX_LIMIT):
        got = _guided(sub, sub_b) if sub.size else None
        if got is None:
            log.debug("guided candidate failed exact checks; falling back to simplex")
            xs, pivots = _phase_one(sub, sub_b)
        else:
            xs, farkas = got
    else:
        xs, pivots = _phase_one(sub, sub_b)
    if xs is None:
        if farkas is not None:
            farkas = _lift_farkas(A, rows, zero_rows, farkas)
        return None, pivots, farkas
    x = [Fraction(0)] * n
    for k, j in enumerate(cols):
        x[int(j)] = xs[k]
    return x, pivots, None


def lp_feasible(A: SparseBinaryMatrix, b: Sequence[int], presolve: bool = True,
                method: str = "auto") -> FeasibilityOutcome:
    """Decide whether some rational ``x >= 0`` satisfies ``A x = b``.

    ``method="simplex"`` runs the exact simplex only. ``"guided"`` asks a
    floating-point solver for a candidate solution or infeasibility ray and
    accepts it only after exact verification, falling back to the exact
    simplex otherwise. ``"auto"`` picks ``"simplex"`` for small systems.
    Either way the verdict is exact; which solution is returned is
    deterministic but otherwise unspecified.
    """
    b = _check_dims(A, b)
    x, pivots, farkas = _solve_nonneg(A.to_array(), b, presolve, method)
    if x is None:
        return FeasibilityOutcome(False, pivots=pivots, farkas=farkas)
    return FeasibilityOutcome(True, tuple(x), pivots=pivots)


def default_node_budget() -> int:
    env = os.environ.get("CI_ENGINE_NODE_BUDGET")
    return int(env) if env else DEFAULT_NODE_BUDGET


def ip_feasible(A: SparseBinaryMatrix, b: Sequence[int], node_budget: int | None = None,
                presolve: bool = True, method: str = "auto") -> FeasibilityOutcome:
    """Decide whether some nonnegative integer ``x`` satisfies ``A x = b``.

    Depth-first branch-and-bound on the exact relaxation, branching on the
    fractional variable with the smallest column index, down-branch first.
    Raises :class:`NodeBudgetExceeded` when ``node_budget`` relaxations have
    been solved without a verdict.
    """
    b = _check_dims(A, b)
    budget = default_node_budget() if node_budget is None else node_budget
    base = A.to_array()
    m, n = base.shape
    stack: list[tuple[dict[int, int], dict[int, int]]] = [({}, {})]
    nodes = pivots = 0
    while stack:
        if nodes >= budget:
            raise NodeBudgetExceeded(f"no verdict after {nodes} branch-and-bound nodes")
        nodes += 1
        lower, upper = stack.pop()
        shifted = list(b)
        for j, lo in lower.items():
            for i in A.columns[j]:
                shifted[i] -= lo
        if any(v < 0 for v in shifted):
            continue
        free = [j for j in range(n) if upper.get(j, -1) != lower.get(j, 0)]
        bounded = [j for j in free if j in upper]
        # relaxation over free columns plus one slack per upper bound
        k = len(free)
        M = np.zeros((m + len(bounded), k + len(bounded)), dtype=np.int64)
        M[:m, :k] = base[:, free]
        rhs = shifted + [upper[j] - lower.get(j, 0) for j in bounded]
        pos = {j: t for t, j in enumerate(free)}
        for t, j in enumerate(bounded):
            M[m + t, pos[j]] = 1
            M[m + t, k + t] = 1
        y, p, _ = _solve_nonneg(M, rhs, presolve, method)
        pivots += p
        if y is None:
            continue
        x = [Fraction(lower.get(j, 0)) for j in range(n)]
        for t, j in enumerate(free):
            x[j] += y[t]
        frac = next((j for j in range(n) if x[j].denominator != 1), None)
        if frac is None:
            return FeasibilityOutcome(True, tuple(x), pivots=pivots, nodes=nodes)
        v = x[frac]
        fl = v.numerator // v.denominator
        up_lower = dict(lower)
        up_lower[frac] = fl + 1
        stack.append((up_lower, upper))
        down_upper = dict(upper)
        down_upper[frac] = fl
        stack.append((lower, down_upper))
    return FeasibilityOutcome(False, pivots=pivots, nodes=nodes)


def verify_solution(A: SparseBinaryMatrix, b: Sequence, x: Sequence) -> bool:
    """Exact check that ``x >= 0`` and ``A x = b``."""
    if len(b) != A.n_rows or len(x) != A.n_cols:
        return False
    try:
        xs = [Fraction(v) for v in x]
    except (TypeError, ValueError):
        return False
    if any(v < 0 for v in xs):
        return False
    return A.matvec(xs) == [Fraction(v) for v in b]


def verify_farkas(A: SparseBinaryMatrix, b: Sequence, y: Sequence) -> bool:
    """Exact check that ``y`` proves ``A x = b, x >= 0`` infeasible."""
    if len(b) != A.n_rows or len(y) != A.n_rows:
        return False
    y = [Fraction(v) for v in y]
    if any(sum(y[i] for i in c) > 0 for c in A.columns):
        return False
    return sum(yi * Fraction(bi) for yi, bi in zip(y, b)) > 0
