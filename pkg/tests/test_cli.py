import subprocess
import sys

import pytest

from ciinfer.cli import main

from conftest import DATA

GOLDEN_VALID = str(DATA / "example410.ci")
GOLDEN_FALSE = str(DATA / "example43.ci")


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_decide_validated(capsys):
    code, out, _ = run(capsys, "decide", GOLDEN_VALID)
    assert code == 0
    assert "VALIDATED cert=1/1 * I(a ; b | c) + 1/1 * I(a ; b | d) + 1/1 * I(c ; d | a b)" in out
    assert out.splitlines()[-1] == "combined VALIDATED"


def test_decide_falsified(capsys):
    code, out, _ = run(capsys, "decide", GOLDEN_FALSE, "--closure")
    assert code == 0
    assert "FALSIFIED witness={c}" in out
    assert out.splitlines()[-1] == "combined FALSIFIED"


def test_decide_ip_and_certificates(capsys, tmp_path):
    code, out, _ = run(capsys, "decide", GOLDEN_VALID, "--ip", "--cert-dir", str(tmp_path))
    assert code == 0 and "combinatorial=yes" in out
    cert = tmp_path / "example410.q0.cert"
    assert cert.exists()
    code, out, _ = run(capsys, "verify", GOLDEN_VALID, str(cert))
    assert code == 0 and out.startswith("VALID")
    cert.write_text(cert.read_text().replace("1/1 * I(a ; b | c)", "2/1 * I(a ; b | c)"))
    code, out, _ = run(capsys, "verify", GOLDEN_VALID, str(cert))
    assert code == 0 and out.startswith("INVALID")


def test_undecided_line(capsys, tmp_path):
    f = tmp_path / "u.ci"
    f.write_text("vars a b c d\nassume a ; b |\nquery a ; b | c d\nquery c ; d |\n")
    code, out, _ = run(capsys, "decide", str(f))
    assert code == 0
    assert out.splitlines() == ["query 0 [a ; b | c d] UNDECIDED",
                                "query 1 [c ; d |] FALSIFIED witness={a}",
                                "combined UNDECIDED"]


def test_input_errors(capsys, tmp_path):
    assert run(capsys, "decide", "missing.ci")[0] == 2
    bad = tmp_path / "bad.ci"
    bad.write_text("vars a b\nquery a ; z |\n")
    code, _, err = run(capsys, "decide", str(bad))
    assert code == 2 and "line 2, column 11" in err
    assert run(capsys, "gen", "--vars", "4", "--antecedents", "99")[0] == 2
    assert run(capsys, "no-such-command")[0] == 2


def test_budget_exhaustion_is_exit_1(capsys, monkeypatch, tmp_path):
    f = tmp_path / "odd.ci"
    f.write_text("vars a b c d\nassume a ; b |\nassume c ; d | a\nassume c ; d | b\n"
                 "assume a ; b | c d\nquery c ; d |\n")
    monkeypatch.setenv("CI_ENGINE_NODE_BUDGET", "0")
    assert run(capsys, "decide", str(f), "--ip")[0] == 1


def test_gen_is_byte_reproducible(capsys, tmp_path):
    a, b = tmp_path / "a.ci", tmp_path / "b.ci"
    for p in (a, b):
        assert run(capsys, "gen", "--vars", "5", "--antecedents", "10", "--queries", "20",
                   "--seed", "7", "-o", str(p))[0] == 0
    assert a.read_bytes() == b.read_bytes()
    code, out, _ = run(capsys, "decide", str(a))
    assert code == 0 and len(out.splitlines()) == 21


def test_bench_commands_reproducible(capsys, tmp_path):
    args = ["bench-curve", "--vars", "4", "--ells", "2,10", "--sets", "4", "--queries", "2",
            "--workers", "1", "--no-timing", "--records"]
    outs = []
    for name in ("r1.csv", "r2.csv"):
        code, out, _ = run(capsys, *args, str(tmp_path / name))
        assert code == 0
        outs.append(out)
    assert outs[0] == outs[1]
    assert outs[0].splitlines()[0] == "n_antecedents,falsified,validated,undecided"
    r1 = (tmp_path / "r1.csv").read_bytes()
    assert r1 == (tmp_path / "r2.csv").read_bytes()
    assert r1.decode().splitlines()[0] == "n_vars,n_antecedents,seed,query_idx,outcome,rows,cols,lp_ms,total_ms"

    dims = ["bench-dims", "--vars", "5,6", "--ell", "20", "--trials", "2", "--workers", "1", "--no-timing"]
    first, second = run(capsys, *dims)[1], run(capsys, *dims)[1]
    assert first == second
    assert [line.split(",")[3:5] for line in first.splitlines()[1:]] == [["26", "80"], ["57", "240"]]
    mvf = ["bench-minvfull", "--vars", "5", "--ells", "20", "--trials", "3", "--repeats", "1",
           "--workers", "1", "--no-timing"]
    first, second = run(capsys, *mvf)[1], run(capsys, *mvf)[1]
    assert first == second and first.splitlines()[1].endswith(",0")


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "ciinfer", "decide", GOLDEN_FALSE],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert "FALSIFIED witness={c}" in proc.stdout
