"""Command-line interface.

Exit status is 0 when a command ran to completion (whatever the decision
outcome), 2 for unreadable or malformed input, and 1 for internal errors,
exceeded caps and exhausted node budgets.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import bench
from .engine import Decision, DecideOptions, Outcome, decide_set
from .exceptions import CapExceededError, CIError, NodeBudgetExceeded, ParseError
from .io import parse_instance_file
from .model import format_statement
from .validate import format_certificate, parse_certificate, verify_certificate

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_INPUT = 2


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.replace(",", " ").split()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated list of integers, got {text!r}")


def _witness(d: Decision) -> str:
    return "{" + ",".join(d.certificate.names) + "}"


def _decision_line(d: Decision, cert_path: Path | None) -> str:
    if d.outcome is Outcome.FALSIFIED:
        text = f"FALSIFIED witness={_witness(d)}"
    elif d.outcome is Outcome.VALIDATED:
        if d.method == "closure":
            text = "VALIDATED method=closure"
        else:
            text = f"VALIDATED cert={cert_path if cert_path else d.certificate}"
    else:
        text = "UNDECIDED"
    if d.combinatorial is not None:
        text += f" combinatorial={'yes' if d.combinatorial else 'no'}"
    return text


def cmd_decide(args) -> int:
    inst = parse_instance_file(args.file)
    opts = DecideOptions(ip=args.ip, closure=args.closure, method=args.method)
    result = decide_set(inst.antecedents, inst.queries, opts)
    cert_dir = Path(args.cert_dir) if args.cert_dir else None
    if cert_dir:
        cert_dir.mkdir(parents=True, exist_ok=True)
    stem = Path(args.file).stem
    for idx, d in enumerate(result.parts):
        path = None
        if cert_dir and d.outcome is Outcome.VALIDATED and d.certificate is not None:
            path = cert_dir / f"{stem}.q{idx}.cert"
            path.write_text(format_certificate(d.certificate, args.file, d.consequent),
                            encoding="utf-8")
        print(f"query {idx} [{format_statement(d.consequent)}] {_decision_line(d, path)}")
    print(f"combined {result.outcome.value}")
    return EXIT_OK


def cmd_verify(args) -> int:
    inst = parse_instance_file(args.file)
    text = Path(args.certfile).read_text(encoding="utf-8")
    query, cert = parse_certificate(text, inst.universe)
    if query not in inst.queries:
        print(f"INVALID query [{format_statement(query)}] is not a query of {args.file}")
        return EXIT_OK
    ok = verify_certificate(inst.antecedents, query, cert)
    print(f"{'VALID' if ok else 'INVALID'} [{format_statement(query)}]")
    return EXIT_OK


def cmd_gen(args) -> int:
    inst = bench.gen_random_instance(args.vars, args.antecedents, args.queries, args.seed)
    header = (f"random instance: vars={args.vars} antecedents={args.antecedents} "
              f"queries={args.queries} seed={args.seed}")
    text = inst.dumps(header)
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _emit(args, text: str):
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_bench_curve(args) -> int:
    opts = DecideOptions(ip=args.ip, method=args.method)
    table, records = bench.run_decide_curve(args.vars, args.ells, args.sets, args.queries,
                                            args.seed, opts, workers=args.workers)
    if args.records:
        Path(args.records).write_text(bench.write_records(records, timing=not args.no_timing),
                                      encoding="utf-8")
    _emit(args, bench.write_table(bench.CurveRow.HEADER,
                                  [(r.n_antecedents, r.falsified, r.validated, r.undecided)
                                   for r in table]))
    return EXIT_OK


def cmd_bench_dims(args) -> int:
    table = bench.run_dimension_timing(args.vars, args.ell, args.trials, args.seed,
                                       method=args.method, workers=args.workers)
    rows = [(r.n_vars, r.mean_rows, r.mean_cols, r.max_rows, r.max_cols,
             0.0 if args.no_timing else r.mean_lp_ms) for r in table]
    _emit(args, bench.write_table(bench.DimsRow.HEADER, rows))
    return EXIT_OK


def cmd_bench_minvfull(args) -> int:
    table, _ = bench.run_minimal_vs_full(args.vars, args.ells, args.trials, args.seed,
                                         repeats=args.repeats, method=args.method,
                                         workers=args.workers)
    rows = []
    for r in table:
        times = (0.0, 0.0) if args.no_timing else (r.mean_pruned_ms, r.mean_full_ms)
        rows.append((r.n_antecedents, r.trials, r.mean_pruned_cols, r.mean_full_cols,
                     *times, r.mismatches))
    _emit(args, bench.write_table(bench.MinVsFullRow.HEADER, rows))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ciinfer",
                                description="Approximate implication of conditional independence statements.")
    p.add_argument("-v", "--verbose", action="store_true", help="debug logging on stderr")
    sub = p.add_subparsers(dest="command", required=True)

    method = dict(choices=("auto", "simplex", "guided"), default="auto",
                  help="LP solver path (default: auto)")

    d = sub.add_parser("decide", help="decide every query of an instance file")
    d.add_argument("file")
    d.add_argument("--ip", action="store_true", help="also run the integer program")
    d.add_argument("--closure", action="store_true",
                   help="try the semi-graphoid closure when the LP is inconclusive")
    d.add_argument("--cert-dir", help="write validation certificates to this directory")
    d.add_argument("--method", **method)
    d.set_defaults(func=cmd_decide)

    v = sub.add_parser("verify", help="re-check a certificate against an instance file")
    v.add_argument("file")
    v.add_argument("certfile")
    v.set_defaults(func=cmd_verify)

    g = sub.add_parser("gen", help="write a random instance")
    g.add_argument("--vars", type=int, required=True)
    g.add_argument("--antecedents", type=int, required=True)
    g.add_argument("--queries", type=int, default=1)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("-o", "--output")
    g.set_defaults(func=cmd_gen)

    def bench_common(sp):
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--workers", type=int, default=None,
                        help="worker processes (default: $CI_ENGINE_THREADS or all CPUs)")
        sp.add_argument("--method", **method)
        sp.add_argument("--no-timing", action="store_true",
                        help="write zero times so output is byte-reproducible")
        sp.add_argument("-o", "--output")

    c = sub.add_parser("bench-curve", help="falsified/validated/undecided fractions per ℓ")
    c.add_argument("--vars", type=int, default=5)
    c.add_argument("--ells", type=_int_list, default=[2, 10, 20, 30, 40, 50])
    c.add_argument("--sets", type=int, default=200)
    c.add_argument("--queries", type=int, default=5)
    c.add_argument("--ip", action="store_true")
    c.add_argument("--records", help="also write per-decision records as CSV")
    bench_common(c)
    c.set_defaults(func=cmd_bench_curve)

    s = sub.add_parser("bench-dims", help="matrix size and LP time per variable count")
    s.add_argument("--vars", type=_int_list, default=[5, 6, 7, 8])
    s.add_argument("--ell", type=int, default=50)
    s.add_argument("--trials", type=int, default=20)
    bench_common(s)
    s.set_defaults(func=cmd_bench_dims)

    m = sub.add_parser("bench-minvfull", help="LP time with pruned against full columns")
    m.add_argument("--vars", type=int, default=6)
    m.add_argument("--ells", type=_int_list, default=[50])
    m.add_argument("--trials", type=int, default=100)
    m.add_argument("--repeats", type=int, default=3)
    bench_common(m)
    m.set_defaults(func=cmd_bench_minvfull)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (OSError, ParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (CapExceededError, NodeBudgetExceeded) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except (ValueError, CIError) as exc:
        # bad argument combinations (e.g. too many antecedents) are input errors
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT if isinstance(exc, ValueError) else EXIT_INTERNAL
    except Exception as exc:  # noqa: BLE001
        logging.getLogger(__name__).debug("internal error", exc_info=True)
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
