import sys
from pathlib import Path

import pytest

from ciinfer.model import VarUniverse, parse_statement

DATA = Path(__file__).parent / "data"
sys.path.insert(0, str(Path(__file__).parent))


@pytest.fixture
def abcd():
    return VarUniverse("abcd")


def stmts(universe, *texts):
    return [parse_statement(t, universe) for t in texts]


@pytest.fixture
def golden_valid(abcd):
    """Antecedents and consequent of the four-variable validation example."""
    ants = stmts(abcd, "a ; b |", "c ; d | a", "c ; d | b", "a ; b | c d")
    return ants, parse_statement("c ; d |", abcd)


@pytest.fixture
def golden_false(abcd):
    ants = stmts(abcd, "a ; b | c d", "a ; d | b c")
    return ants, parse_statement("a ; b d | c", abcd)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for n in sorted(results):
            terminalreporter.write_line(results[n])
