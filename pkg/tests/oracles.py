"""Slow, independent reference implementations used as test oracles.

Nothing here reuses the package's algorithms; subsets are frozensets of
names and arithmetic is plain Fraction arithmetic.
"""

from __future__ import annotations

import itertools
from fractions import Fraction


def powerset(items):
    items = list(items)
    for r in range(len(items) + 1):
        for combo in itertools.combinations(items, r):
            yield frozenset(combo)


def semi_lattice(names, A, B, C):
    S = frozenset(names)
    A, B, C = frozenset(A), frozenset(B), frozenset(C)
    return {U for U in powerset(S) if C <= U and not A <= U and not B <= U}


def interval(low, high):
    low, high = frozenset(low), frozenset(high)
    return {low | extra for extra in powerset(high - low)}


def elementary(names):
    out = []
    for a, b in itertools.combinations(names, 2):
        rest = [x for x in names if x not in (a, b)]
        for K in powerset(rest):
            out.append((frozenset([a]), frozenset([b]), K))
    return out


def mobius(names, F):
    """ΔF by the defining alternating sum; ``F`` maps frozensets to values."""
    S = frozenset(names)
    out = {}
    for X in powerset(S):
        out[X] = sum(((-1) ** (len(U) - len(X)) * F[U] for U in powerset(S) if X <= U),
                     Fraction(0))
    return out


def solve_exact(rows):
    """Solve a square-or-tall system by Gauss-Jordan; ``None`` if inconsistent
    or the columns are dependent."""
    m = [list(map(Fraction, r)) for r in rows]
    n_rows, n_cols = len(m), len(m[0]) - 1
    piv_row = 0
    pivots = []
    for col in range(n_cols):
        p = next((i for i in range(piv_row, n_rows) if m[i][col] != 0), None)
        if p is None:
            return None
        m[piv_row], m[p] = m[p], m[piv_row]
        pv = m[piv_row][col]
        m[piv_row] = [v / pv for v in m[piv_row]]
        for i in range(n_rows):
            if i != piv_row and m[i][col] != 0:
                f = m[i][col]
                m[i] = [a - f * b for a, b in zip(m[i], m[piv_row])]
        pivots.append(col)
        piv_row += 1
    if any(m[i][-1] != 0 for i in range(piv_row, n_rows)):
        return None
    return [m[i][-1] for i in range(n_cols)]


def lp_feasible_bruteforce(A, b):
    """Vertex enumeration: ``{x >= 0 : Ax = b}`` is non-empty iff some set of
    linearly independent columns solves the system with nonnegative values."""
    m = len(b)
    n = len(A[0]) if A else 0
    if all(v == 0 for v in b):
        return [Fraction(0)] * n
    for r in range(1, min(m, n) + 1):
        for support in itertools.combinations(range(n), r):
            rows = [[A[i][j] for j in support] + [b[i]] for i in range(m)]
            sol = solve_exact(rows)
            if sol is not None and all(v >= 0 for v in sol):
                x = [Fraction(0)] * n
                for j, v in zip(support, sol):
                    x[j] = v
                return x
    return None


def ip_feasible_bruteforce(A, b):
    n = len(A[0]) if A else 0
    bound = max(b, default=0)
    for x in itertools.product(range(bound + 1), repeat=n):
        if all(sum(A[i][j] * x[j] for j in range(n)) == b[i] for i in range(len(b))):
            return list(x)
    return None


def satisfies_bruteforce(dims, density, A, B, C):
    """The product identity checked directly from the full table.

    ``density`` maps assignment tuples to Fractions; A, B, C are index sets.
    """
    def marg(idx, vals):
        return sum((p for x, p in density.items()
                    if all(x[i] == v for i, v in zip(idx, vals))), Fraction(0))

    A, B, C = sorted(A), sorted(B), sorted(C)
    for va in itertools.product(*(range(dims[i]) for i in A)):
        for vb in itertools.product(*(range(dims[i]) for i in B)):
            for vc in itertools.product(*(range(dims[i]) for i in C)):
                lhs = marg(C, vc) * marg(A + B + C, va + vb + vc)
                rhs = marg(A + C, va + vc) * marg(B + C, vb + vc)
                if lhs != rhs:
                    return False
    return True


def _canon(A, B, C):
    return (A, B, C) if sorted(A) <= sorted(B) else (B, A, C)


def semigraphoid_closure(triples):
    """Naive fixpoint over (A, B, C) frozenset triples: every rule is retried
    on every statement and pair of statements until nothing changes."""
    closed = {_canon(*t) for t in triples}
    while True:
        new = set()
        items = list(closed)
        for A, B, C in items:
            for X, Y in ((A, B), (B, A)):
                for Y1 in powerset(Y):
                    if Y1 and Y1 != Y:
                        new.add(_canon(X, Y1, C))
                        new.add(_canon(X, Y1, C | (Y - Y1)))
        for A1, B1, C1 in items:
            for A2, B2, C2 in items:
                for X1, Y1 in ((A1, B1), (B1, A1)):
                    for X2, Y2 in ((A2, B2), (B2, A2)):
                        # I(X, Y | Z ∪ D) and I(X, D | Z) give I(X, Y ∪ D | Z)
                        if X1 == X2 and Y2 <= C1 and C1 - Y2 == C2:
                            new.add(_canon(X1, Y1 | Y2, C2))
        new -= closed
        if not new:
            return closed
        closed |= new
