"""Seeded random instances and the experiment runners behind ``ciinfer bench-*``.

Every instance gets its own seed derived from the run seed and its position,
so results do not depend on how instances are spread over workers.
"""

from __future__ import annotations

import csv
import io
import os
import random
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import astuple, dataclass, fields
from typing import Callable, Iterable, Sequence

import numpy as np

from .engine import DecideOptions, Outcome, decide
from .falsify import check_inclusion
from .io import InstanceFile
from .model import VarUniverse, elementary_count, enumerate_elementary, max_lattice_size
from .validate import AntecedentSystem, solve_system

RECORD_HEADER = "n_vars,n_antecedents,seed,query_idx,outcome,rows,cols,lp_ms,total_ms"


def derive_seed(seed: int, *keys: int) -> int:
    """Stable 32-bit seed for the instance at position ``keys`` of a run."""
    return int(np.random.SeedSequence([seed, *keys]).generate_state(1)[0])


def worker_count() -> int:
    env = os.environ.get("CI_ENGINE_THREADS")
    if env:
        return max(1, int(env))
    try:
        return len(os.sched_getaffinity(0))
    except AttributeError:
        return os.cpu_count() or 1


def _pmap(fn: Callable, tasks: Sequence, workers: int | None = None) -> list:
    workers = worker_count() if workers is None else workers
    if workers <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        # map keeps task order whatever the completion order
        return list(pool.map(fn, tasks, chunksize=max(1, len(tasks) // (4 * workers))))


def gen_random_instance(n_vars: int, n_antecedents: int, n_consequents: int,
                        seed: int) -> InstanceFile:
    """Antecedents and queries drawn independently, each without replacement,
    from all elementary statements over ``a, b, c, ...``."""
    universe = VarUniverse.default(n_vars)
    pool = enumerate_elementary(universe)
    if not 0 <= n_antecedents <= len(pool):
        raise ValueError(f"n_antecedents must be in [0, {len(pool)}] for {n_vars} variables")
    if not 1 <= n_consequents <= len(pool):
        raise ValueError(f"n_consequents must be in [1, {len(pool)}] for {n_vars} variables")
    rng = random.Random(seed)
    ants = rng.sample(pool, n_antecedents)
    queries = rng.sample(pool, n_consequents)
    return InstanceFile(universe, tuple(ants), tuple(queries))


@dataclass(frozen=True)
class BenchRecord:
    n_vars: int
    n_antecedents: int
    seed: int
    query_idx: int
    outcome: str
    rows: int
    cols: int
    lp_ms: float
    total_ms: float


def write_records(records: Iterable[BenchRecord], stream=None, timing: bool = True) -> str:
    """CSV with header ``RECORD_HEADER``; ``timing=False`` writes zero times so
    that output is byte-reproducible."""
    out = stream if stream is not None else io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow([f.name for f in fields(BenchRecord)])
    for r in records:
        row = list(astuple(r))
        row[-2:] = [f"{v:.3f}" if timing else "0" for v in row[-2:]]
        w.writerow(row)
    return out.getvalue() if stream is None else ""


def write_table(header: Sequence[str], rows: Iterable[Sequence], stream=None) -> str:
    out = stream if stream is not None else io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([f"{v:.6g}" if isinstance(v, float) else v for v in row])
    return out.getvalue() if stream is None else ""


def _decide_instance(task) -> list[BenchRecord]:
    n, ell, k, inst_seed, options = task
    inst = gen_random_instance(n, ell, k, inst_seed)
    system = None
    out = []
    for qi, q in enumerate(inst.queries):
        t0 = time.perf_counter()
        if system is None and check_inclusion(inst.antecedents, q).included:
            system = AntecedentSystem.build(inst.antecedents)
        d = decide(inst.antecedents, q, options, system=system)
        total = time.perf_counter() - t0
        out.append(BenchRecord(n, ell, inst_seed, qi, d.outcome.value, d.n_rows, d.n_cols,
                               d.lp_seconds * 1e3, total * 1e3))
    return out


@dataclass(frozen=True)
class CurveRow:
    n_antecedents: int
    falsified: float
    validated: float
    undecided: float

    HEADER = ("n_antecedents", "falsified", "validated", "undecided")


def run_decide_curve(n_vars: int, ells: Sequence[int], sets_per_ell: int,
                     consequents_per_set: int, seed: int,
                     options: DecideOptions | None = None,
                     workers: int | None = None) -> tuple[list[CurveRow], list[BenchRecord]]:
    """Fractions of falsified, validated and undecided decisions per ``ℓ``."""
    options = options or DecideOptions()
    tasks = [(n_vars, ell, consequents_per_set, derive_seed(seed, ell, i), options)
             for ell in ells for i in range(sets_per_ell)]
    records = [r for batch in _pmap(_decide_instance, tasks, workers) for r in batch]
    table = []
    for ell in ells:
        outs = [r.outcome for r in records if r.n_antecedents == ell]
        total = len(outs) or 1
        table.append(CurveRow(ell, *(outs.count(o.value) / total for o in Outcome)))
    return table, records


def _relevant_query(system: AntecedentSystem, seed: int):
    """A consequent guaranteed to reach the LP: a random member of R(antecedents)."""
    return random.Random(seed).choice(system.cols)


def _time_solve(cs, repeats: int, method: str) -> tuple[bool, float]:
    best = float("inf")
    feasible = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        cert = solve_system(cs, presolve=False, method=method)
        best = min(best, time.perf_counter() - t0)
        feasible = cert is not None
    return feasible, best


def _dims_instance(task):
    n, ell, inst_seed, method = task
    inst = gen_random_instance(n, ell, 1, inst_seed)
    system = AntecedentSystem.build(inst.antecedents)
    q = _relevant_query(system, inst_seed)
    cs = system.for_consequent(q)
    _, secs = _time_solve(cs, 1, method)
    return len(system.rows), len(system.cols), secs * 1e3


@dataclass(frozen=True)
class DimsRow:
    n_vars: int
    mean_rows: float
    mean_cols: float
    max_rows: int
    max_cols: int
    mean_lp_ms: float

    HEADER = ("n_vars", "mean_rows", "mean_cols", "max_rows", "max_cols", "mean_lp_ms")


def run_dimension_timing(n_list: Sequence[int], ell: int, trials: int, seed: int,
                         method: str = "auto", workers: int | None = None) -> list[DimsRow]:
    """Average matrix size and LP time per variable count.

    Each trial solves the system for one consequent drawn from R(antecedents),
    which always passes falsification and so always reaches the LP.
    """
    tasks = [(n, ell, derive_seed(seed, n, t), method) for n in n_list for t in range(trials)]
    results = _pmap(_dims_instance, tasks, workers)
    table = []
    for idx, n in enumerate(n_list):
        chunk = results[idx * trials:(idx + 1) * trials]
        table.append(DimsRow(n, statistics.fmean(r[0] for r in chunk),
                             statistics.fmean(r[1] for r in chunk),
                             max_lattice_size(n), elementary_count(n),
                             statistics.fmean(r[2] for r in chunk)))
    return table


@dataclass(frozen=True)
class PairedTiming:
    n_antecedents: int
    seed: int
    pruned_cols: int
    full_cols: int
    pruned_feasible: bool
    full_feasible: bool
    pruned_ms: float
    full_ms: float


@dataclass(frozen=True)
class MinVsFullRow:
    n_antecedents: int
    trials: int
    mean_pruned_cols: float
    mean_full_cols: float
    mean_pruned_ms: float
    mean_full_ms: float
    mismatches: int

    HEADER = ("n_antecedents", "trials", "mean_pruned_cols", "mean_full_cols",
              "mean_pruned_ms", "mean_full_ms", "mismatches")


def _pair_instance(task) -> PairedTiming:
    n, ell, inst_seed, repeats, method = task
    inst = gen_random_instance(n, ell, 1, inst_seed)
    pruned = AntecedentSystem.build(inst.antecedents)
    full = AntecedentSystem.build(inst.antecedents, full=True)
    q = _relevant_query(pruned, inst_seed)
    cp, cf = pruned.for_consequent(q), full.for_consequent(q)
    # alternate the two solves so drift in machine load hits both alike
    fp = ff = None
    tp = tf = float("inf")
    for _ in range(repeats):
        fp, t = _time_solve(cp, 1, method)
        tp = min(tp, t)
        ff, t = _time_solve(cf, 1, method)
        tf = min(tf, t)
    return PairedTiming(ell, inst_seed, len(pruned.cols), len(full.cols), fp, ff,
                        tp * 1e3, tf * 1e3)


def run_minimal_vs_full(n_vars: int, ells: Sequence[int], trials: int, seed: int,
                        repeats: int = 3, method: str = "auto",
                        workers: int | None = None) -> tuple[list[MinVsFullRow], list[PairedTiming]]:
    """LP time on the R(antecedents)-pruned matrix against the matrix with every
    elementary column.

    Both solves skip presolve, so the solver sees the matrices as built. Each
    time is the best of ``repeats`` runs.
    """
    tasks = [(n_vars, ell, derive_seed(seed, ell, t), repeats, method)
             for ell in ells for t in range(trials)]
    pairs = _pmap(_pair_instance, tasks, workers)
    table = []
    for ell in ells:
        ps = [p for p in pairs if p.n_antecedents == ell]
        table.append(MinVsFullRow(
            ell, len(ps),
            statistics.fmean(p.pruned_cols for p in ps),
            statistics.fmean(p.full_cols for p in ps),
            statistics.fmean(p.pruned_ms for p in ps),
            statistics.fmean(p.full_ms for p in ps),
            sum(p.pruned_feasible != p.full_feasible for p in ps),
        ))
    return table, pairs
