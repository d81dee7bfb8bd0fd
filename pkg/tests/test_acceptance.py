"""Acceptance checks, one test per criterion.

Each test records a one-line PASS/FAIL verdict; the lines are printed at the
end of the pytest run and also when this file is executed directly.
"""

from __future__ import annotations

import random
import sys
import time
from fractions import Fraction
from math import comb
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from ciinfer import bench
from ciinfer.engine import DecideOptions, Outcome, decide, semigraphoid_closure
from ciinfer.falsify import check_inclusion, relevant_elementary
from ciinfer.measure import (
    SetFunction,
    lattice_sum_check,
    multiinformation_gap,
    random_dag,
    random_factorized_table,
    satisfies,
)
from ciinfer.model import (
    CIStatement,
    VarUniverse,
    elementary_count,
    enumerate_elementary,
    max_lattice_size,
    parse_statement,
    semi_lattice_union,
)
from ciinfer.validate import AntecedentSystem, build_system, validate_combinatorial, verify_certificate

RESULTS: dict[int, str] = {}
SEED = 2024

ABCD = VarUniverse("abcd")


def record(n: int, ok: bool, detail: str) -> None:
    line = f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    RESULTS[n] = line
    print(line)
    assert ok, line


def parse_all(*texts):
    return [parse_statement(t, ABCD) for t in texts]


# reference matrix, rows cd, ab, a, b, c, d, ∅
REFERENCE_ROWS = ["cd", "ab", "a", "b", "c", "d", ""]
REFERENCE = [
    [1, 1, 1, 1, 0, 0, 0, 0],
    [0, 0, 0, 0, 1, 1, 1, 1],
    [0, 0, 0, 0, 1, 1, 0, 0],
    [0, 0, 0, 0, 1, 0, 1, 0],
    [1, 1, 0, 0, 0, 0, 0, 0],
    [1, 0, 1, 0, 0, 0, 0, 0],
    [1, 0, 0, 0, 1, 0, 0, 0],
]


def test_criterion_01_golden_validation():
    t0 = time.perf_counter()
    ants = parse_all("a ; b |", "c ; d | a", "c ; d | b", "a ; b | c d")
    c = parse_statement("c ; d |", ABCD)
    cs = build_system(ants, c)
    pos = {u: i for i, u in enumerate(cs.rows)}
    idx = [pos[ABCD.mask(list(r))] for r in REFERENCE_ROWS]
    dense = cs.matrix.to_dense()
    checks = {
        "|L|=7": len(cs.rows) == 7,
        "|R|=8": len(cs.cols) == 8,
        "matrix": [dense[i] for i in idx] == REFERENCE,
        "v_C": [cs.v_antecedents.counts[i] for i in idx] == [2, 2, 1, 1, 1, 1, 1],
        "b": [cs.rhs[i] for i in idx] == [2, 1, 0, 0, 1, 1, 0],
    }
    d = decide(ants, c, DecideOptions(ip=True))
    checks["validated"] = d.outcome is Outcome.VALIDATED
    checks["cert verifies"] = verify_certificate(ants, c, d.certificate)
    checks["integer"] = bool(d.combinatorial) and verify_certificate(ants, c, d.ip_certificate)
    secs = time.perf_counter() - t0
    checks["< 1 s"] = secs < 1
    failed = [k for k, v in checks.items() if not v]
    record(1, not failed, f"example system and certificate {d.certificate} in {secs:.3f}s"
           + (f"; failed: {failed}" if failed else ""))


def test_criterion_02_golden_falsification():
    t0 = time.perf_counter()
    ants = parse_all("a ; b | c d", "a ; d | b c")
    c = parse_statement("a ; b d | c", ABCD)
    d = decide(ants, c)
    secs = time.perf_counter() - t0
    ok = d.outcome is Outcome.FALSIFIED and d.certificate.names == ("c",) and secs < 1
    record(2, ok, f"{d.outcome.value} witness={d.certificate} in {secs:.3f}s")


def test_criterion_03_counting_formulas():
    bad = []
    for n in range(4, 9):
        U = VarUniverse.default(n)
        elem = enumerate_elementary(U)
        union = semi_lattice_union(elem)
        if not (len(elem) == comb(n, 2) * 2 ** (n - 2) == elementary_count(n)):
            bad.append(("elementary", n))
        if not (len(union) == 2 ** n - n - 1 == max_lattice_size(n)):
            bad.append(("lattice", n))
    pinned = (max_lattice_size(6), elementary_count(6), max_lattice_size(7), elementary_count(7))
    ok = not bad and pinned == (57, 240, 120, 672)
    record(3, ok, f"n=4..8 enumerated; (rows, cols) at n=6,7 = {pinned[:2]}, {pinned[2:]}")


CURVE_ELLS = [2, 10, 20, 30, 40, 50]


@pytest.fixture(scope="module")
def curve():
    t0 = time.perf_counter()
    table, records = bench.run_decide_curve(5, CURVE_ELLS, 200, 5, seed=SEED)
    return table, records, time.perf_counter() - t0


@pytest.mark.slow
def test_criterion_04_decide_curve(curve):
    table, _, secs = curve
    und = {r.n_antecedents: r.undecided for r in table}
    ok = und[50] <= 0.01 and und[2] > und[50] and secs <= 600
    summary = " ".join(f"l={r.n_antecedents}:{r.undecided:.3f}" for r in table)
    record(4, ok, f"undecided fractions {summary} ({secs:.0f}s)")


@pytest.mark.slow
def test_criterion_05_lp_ip_agreement(curve):
    _, records, _ = curve
    t0 = time.perf_counter()
    by_instance: dict[tuple[int, int], list] = {}
    for r in records:
        by_instance.setdefault((r.n_antecedents, r.seed), []).append(r)
    reached = disagreements = 0
    for (ell, seed), recs in by_instance.items():
        inst = bench.gen_random_instance(5, ell, 5, seed)
        for r in recs:
            if r.outcome == Outcome.FALSIFIED.value:
                continue
            q = inst.queries[r.query_idx]
            reached += 1
            lp_ok = r.outcome == Outcome.VALIDATED.value
            ip_cert = validate_combinatorial(inst.antecedents, q)
            if lp_ok != (ip_cert is not None):
                disagreements += 1
    secs = time.perf_counter() - t0
    record(5, disagreements == 0 and secs <= 600,
           f"{disagreements} LP/IP disagreements over {reached} instances reaching validation ({secs:.0f}s)")


def test_criterion_06_mobius_identity():
    t0 = time.perf_counter()
    rng = random.Random(SEED)
    failures = 0
    for _ in range(500):
        n = rng.randint(2, 5)
        U = VarUniverse.default(n)
        F = SetFunction(U, [Fraction(rng.randint(-50, 50), rng.randint(1, 20)) for _ in range(1 << n)])
        for _ in range(3):
            labels = [rng.randrange(4) for _ in range(n)]
            i, j = rng.sample(range(n), 2)
            labels[i], labels[j] = 1, 2
            masks = [sum(1 << k for k in range(n) if labels[k] == t) for t in (1, 2, 3)]
            lhs, rhs = lattice_sum_check(F, CIStatement(U, *masks))
            failures += lhs != rhs
    secs = time.perf_counter() - t0
    record(6, failures == 0 and secs < 30, f"{failures} failures over 1500 checks on 500 functions ({secs:.1f}s)")


def fuzz_measures():
    U = ABCD
    out = []
    for k in range(100):
        seed = bench.derive_seed(SEED, 7, k)
        out.append(random_factorized_table(U, random_dag(U, seed, 0.35), seed=seed))
    return out


@pytest.fixture(scope="module")
def measures():
    return fuzz_measures()


@pytest.mark.slow
def test_criterion_07_soundness_fuzz(measures):
    t0 = time.perf_counter()
    pool = enumerate_elementary(ABCD)
    violations = validated = empty = 0
    for k, P in enumerate(measures):
        sat = [s for s in pool if satisfies(P, s)]
        rng = random.Random(bench.derive_seed(SEED, 8, k))
        for _ in range(50):
            c = rng.choice(pool)
            if not sat:
                # no antecedents at all: every consequent falsifies
                empty += 1
                continue
            ants = rng.sample(sat, rng.randint(1, len(sat)))
            d = decide(ants, c)
            if d.validated:
                validated += 1
                violations += not satisfies(P, c)
    secs = time.perf_counter() - t0
    record(7, violations == 0 and secs <= 300,
           f"{violations} violations, {validated} validated of 5000 sub-instances "
           f"({empty} with empty sat(P)) ({secs:.0f}s)")


def test_criterion_08_multiinformation_zero_test(measures):
    pool = enumerate_elementary(ABCD)
    violations = satisfied = 0
    for P in measures:
        for s in pool:
            sat = satisfies(P, s)
            satisfied += sat
            violations += sat != (abs(multiinformation_gap(P, s)) < 1e-9)
    record(8, violations == 0,
           f"{violations} violations over {len(measures) * len(pool)} checks ({satisfied} satisfied)")


def test_criterion_09_closure_comparison():
    ants = parse_all("a ; b |", "c ; d | a", "c ; d | b", "a ; b | c d")
    c = parse_statement("c ; d |", ABCD)
    golden = c not in semigraphoid_closure(ants) and decide(ants, c).validated
    rng = random.Random(SEED)
    pool = enumerate_elementary(ABCD)
    closure_only = closure_hits = lp_hits = 0
    for _ in range(300):
        ants = rng.sample(pool, rng.randint(1, 12))
        cl = semigraphoid_closure(ants)
        system = None
        for q in rng.sample(pool, 5):
            inc = check_inclusion(ants, q).included
            if inc and system is None:
                system = AntecedentSystem.build(ants)
            lp = inc and decide(ants, q, system=system).validated
            in_cl = q in cl
            closure_hits += in_cl
            lp_hits += lp
            closure_only += in_cl and not lp
    record(9, golden and closure_only == 0,
           f"example outside closure but LP-validated: {golden}; closure-only instances: "
           f"{closure_only} (closure {closure_hits}, LP {lp_hits} of 1500)")


@pytest.mark.slow
def test_criterion_10_minimal_vs_full():
    t0 = time.perf_counter()
    table, pairs = bench.run_minimal_vs_full(6, [50], 100, seed=SEED, repeats=3)
    row = table[0]
    secs = time.perf_counter() - t0
    ok = row.mean_pruned_ms < row.mean_full_ms and row.mismatches == 0 and secs <= 600
    record(10, ok, f"mean LP ms pruned {row.mean_pruned_ms:.2f} (cols {row.mean_pruned_cols:.1f}) vs "
                   f"full {row.mean_full_ms:.2f} (cols {row.mean_full_cols:.0f}), "
                   f"{row.mismatches} outcome mismatches ({secs:.0f}s)")


def test_criterion_11_scaling_smoke():
    inst = bench.gen_random_instance(10, 50, 1, seed=SEED)
    R = relevant_elementary(inst.antecedents)
    extra = [r for r in R if r not in set(inst.antecedents)]
    # a consequent that passes falsification, so the call exercises the LP
    q = random.Random(SEED).choice(extra or R)
    t0 = time.perf_counter()
    d = decide(inst.antecedents, q)
    secs = time.perf_counter() - t0
    cert_ok = not d.validated or verify_certificate(inst.antecedents, q, d.certificate)
    record(11, secs < 60 and cert_ok,
           f"n=10, 50 antecedents: {d.outcome.value} on a {d.n_rows}x{d.n_cols} system in {secs:.2f}s")


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
