"""Estimator-style front end: ``fit`` on antecedents, ``predict`` on queries."""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .engine import Decision, DecideOptions, decide, decide_set
from .falsify import check_inclusion
from .model import CIStatement, VarUniverse, common_universe, parse_statement
from .validate import AntecedentSystem


def check_statements(X, universe: VarUniverse | None = None,
                     allow_empty: bool = True) -> tuple[VarUniverse | None, tuple[CIStatement, ...]]:
    """Coerce ``X`` to a tuple of statements over one universe.

    Items may be :class:`CIStatement` objects or ``"a ; b | c"`` strings; the
    latter need ``universe``, which otherwise defaults to the statements' own.
    """
    if isinstance(X, (str, CIStatement)):
        X = [X]
    out = []
    for item in X:
        if isinstance(item, CIStatement):
            out.append(item)
        elif isinstance(item, str):
            if universe is None:
                raise ValueError("string statements need a universe")
            out.append(parse_statement(item, universe))
        else:
            raise TypeError(f"expected CIStatement or str, got {type(item).__name__}")
    if not out:
        if not allow_empty:
            raise ValueError("at least one statement is required")
        return universe, ()
    return common_universe(out, universe), tuple(out)


class ImplicationEngine(BaseEstimator):
    """Falsify-then-validate decisions against a fixed antecedent set.

    ``fit`` stores the antecedents and, lazily, their constraint matrix, which
    every later query reuses; only the right-hand side changes per query.

    Parameters
    ----------
    universe : VarUniverse, optional
        Needed when statements are given as strings.
    ip : bool
        Also run the integer program on LP-validated queries.
    closure : bool
        Try the semi-graphoid closure when the LP is inconclusive.
    method : {"auto", "simplex", "guided"}
    cap : int, optional
        Enumeration cap on the number of variables.
    node_budget : int, optional
        Branch-and-bound node budget for the integer program.
    """

    def __init__(self, universe=None, ip=False, closure=False, method="auto",
                 cap=None, node_budget=None):
        self.universe = universe
        self.ip = ip
        self.closure = closure
        self.method = method
        self.cap = cap
        self.node_budget = node_budget

    def _options(self) -> DecideOptions:
        return DecideOptions(ip=self.ip, closure=self.closure, node_budget=self.node_budget,
                             cap=self.cap, method=self.method)

    def fit(self, X, y=None):
        universe, ants = check_statements(X, self.universe)
        if universe is None:
            raise ValueError("fit needs antecedents or an explicit universe")
        self.universe_ = universe
        self.antecedents_ = tuple(dict.fromkeys(ants))
        self.system_ = None
        return self

    def _system(self) -> AntecedentSystem:
        if self.system_ is None:
            self.system_ = AntecedentSystem.build(self.antecedents_, cap=self.cap,
                                                  universe=self.universe_)
        return self.system_

    def decide(self, queries) -> list[Decision]:
        check_is_fitted(self, "antecedents_")
        _, qs = check_statements(queries, self.universe_)
        opts = self._options()
        out = []
        for q in qs:
            included = check_inclusion(self.antecedents_, q, cap=self.cap).included
            out.append(decide(self.antecedents_, q, opts,
                              system=self._system() if included else None))
        return out

    def predict(self, queries) -> np.ndarray:
        """Outcome names (``"FALSIFIED"``, ``"VALIDATED"``, ``"UNDECIDED"``) per query."""
        return np.array([d.outcome.value for d in self.decide(queries)], dtype=object)

    def decide_set(self, queries) -> Decision:
        """Whether the antecedents imply at least one of ``queries``."""
        check_is_fitted(self, "antecedents_")
        _, qs = check_statements(queries, self.universe_, allow_empty=False)
        return decide_set(self.antecedents_, qs, self._options())
