import io
import sys

import pytest

from pap1324 import cli
from pap1324.enumerator import DEFAULT_PRIMES, read_manifest, write_manifest


def run(capsys, *argv, stdin=None, monkeypatch=None):
    if stdin is not None:
        monkeypatch.setattr(sys, "stdin", io.StringIO(stdin))
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_sig_count(capsys):
    assert run(capsys, "sig", "count", ",3")[:2] == (0, "5\n")
    assert run(capsys, "sig", "count", "2[1]1")[:2] == (0, "12\n")


def test_sig_tools(capsys):
    assert run(capsys, "sig", "from-prefix", "--n", "20", "--prefix", "11,14,5,9")[1] == "4[3]1[2]6\n"
    code, out, _ = run(capsys, "sig", "encode", "2")
    assert code == 0 and out.strip() == "084" + "0" * 29
    assert run(capsys, "sig", "decode", out.strip())[1] == "2\n"
    code, out, _ = run(capsys, "sig", "children", ",3")
    assert code == 0 and len(out.split()) == 3


@pytest.mark.parametrize("argv", [
    ["sig", "count", "1[[2"],
    ["sig", "count"],
    ["sig", "from-prefix", "--n", "5"],
    ["sig", "decode", "zz"],
    ["enumerate", "--n", "70"],
    ["enumerate", "--n", "5", "--memo-prob", "0"],
    ["verify", "--max-n", "13"],
    ["analyze", "fit3", "--in", "does-not-exist.txt", "--mu", "11.6"],
    ["analyze", "asym", "--params", "1,2,3"],
])
def test_usage_errors(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2 and err


def test_bad_flags_exit_2(capsys):
    with pytest.raises(SystemExit) as e:
        cli.main(["enumerate"])
    assert e.value.code == 2


def test_enumerate_16(capsys, tmp_path, reference):
    code, out, _ = run(capsys, "enumerate", "--n", "16", "--manifest-dir", str(tmp_path))
    assert code == 0
    rows = [ln.split("\t") for ln in out.splitlines() if not ln.startswith("#")]
    assert [int(v) for _, v in rows] == reference.coefficients[:17]
    assert out.rstrip().endswith("16\t62300851632")
    assert len(list(tmp_path.glob("residues_*.txt"))) >= 2


def test_enumerate_bigint_to_file(capsys, tmp_path):
    out = tmp_path / "s.txt"
    assert run(capsys, "enumerate", "--n", "10", "--mode", "bigint", "--out", str(out))[0] == 0
    assert out.read_text().rstrip().endswith("10\t591950")


def test_verify_ok(capsys):
    code, out, _ = run(capsys, "verify", "--max-n", "8")
    assert code == 0
    assert out.splitlines()[0] == "n,engine,brute,match"
    assert out.splitlines()[-1] == "8,15793,15793,yes"
    assert run(capsys, "verify", "--max-n", "8", "--pattern", "1342")[0] == 0


def test_verify_mismatch(capsys, monkeypatch):
    monkeypatch.setattr(cli.O, "p1234", lambda n: 1)
    code, out, err = run(capsys, "verify", "--max-n", "5", "--pattern", "1234")
    assert code == 1 and "n=2" in err


def test_crt_combine_and_integrity(capsys, tmp_path):
    p1, p2, p3 = DEFAULT_PRIMES[:3]
    run(capsys, "enumerate", "--n", "12", "--primes", f"{p1},{p2},{p3}", "--manifest-dir", str(tmp_path))
    files = [str(tmp_path / f"residues_{p}.txt") for p in (p1, p2, p3)]
    code, out, _ = run(capsys, "crt-combine", "--in", files[0], files[1], "--check", files[2])
    assert code == 0 and out.rstrip().endswith("12\t25431452")
    m = read_manifest(files[2])
    m.residues[5] = (m.residues[5] + 1) % m.prime
    write_manifest(m, files[2])
    code, _, err = run(capsys, "crt-combine", "--in", files[0], files[1], "--check", files[2])
    assert code == 3 and "integrity" in err
    assert run(capsys, "crt-combine", "--in", files[0], files[0])[0] == 2


def test_analyze_pipeline(capsys, monkeypatch, reference_path):
    code, out, _ = run(capsys, "analyze", "transform", "--in", reference_path)
    assert code == 0 and out.startswith("n,value\n2,")
    code, out, _ = run(capsys, "analyze", "bs", "--w", "1", "--lmax", "2", stdin=out,
                       monkeypatch=monkeypatch)
    last = [ln for ln in out.splitlines() if ln.startswith("2,")][-1]
    assert float(last.split(",")[2]) == pytest.approx(11.62202312, abs=5e-3)


def test_analyze_bs_reference(capsys, reference_path):
    code, out, _ = run(capsys, "analyze", "bs", "--in", reference_path, "--w", "0.5", "--lmax", "3")
    assert out.splitlines()[0] == "L,n,value"
    last = {}
    for ln in out.splitlines()[1:]:
        L, n, v = ln.split(",")
        last[int(L)] = float(v)
    assert last[1] == pytest.approx(12.83193533, abs=1e-3)


@pytest.mark.parametrize("what,extra,header", [
    ("ratios", [], "n,value"),
    ("intercepts", ["--t", "1"], "n,value"),
    ("sigma", [], "n,r_sigma,gradient"),
    ("sigma", ["--mu", "11.6"], "n,one_minus_sigma"),
    ("fit3", ["--mu", "11.6"], "k,c1,c2,c3"),
    ("fit4", [], "k,c1,c2,c3,c4"),
    ("fitlog3", ["--mu", "11.6"], "k,c1,c2,c3"),
    ("amplitude", ["--params", "9.5,11.6,0.0398,0.5,-1.1"], "n,amplitude,extrapolated"),
])
def test_analyze_csv(capsys, reference_path, what, extra, header):
    code, out, _ = run(capsys, "analyze", what, "--in", reference_path, *extra)
    assert code == 0 and out.splitlines()[0] == header
    assert len(out.splitlines()) > 20


def test_analyze_da_homogeneous(capsys, tmp_path):
    from pap1324.oracles import p1342
    f = tmp_path / "c.csv"
    f.write_text("n,value\n" + "".join(f"{n},{p1342(n)}\n" for n in range(16)))
    code, out, err = run(capsys, "analyze", "da", "--in", str(f), "--order", "2", "--homogeneous")
    assert code == 0 and "verdict: algebraic singularity" in err
    row = out.splitlines()[1].split(",")
    assert row[0] == "none" and float(row[1]) == pytest.approx(0.125, abs=1e-6)


def test_analyze_asym(capsys):
    code, out, err = run(capsys, "analyze", "asym", "--params", "9.5,11.60,0.0398,0.5,-1.1", "--n", "1000")
    assert code == 0
    lg = float(out.splitlines()[1].split(",")[1])
    assert 1017.0 <= lg <= 1018.5
    assert "10^1017" in err


def test_analyze_needs_arguments(capsys, reference_path):
    assert run(capsys, "analyze", "fit3", "--in", reference_path)[0] == 2
    assert run(capsys, "analyze", "bs", "--in", reference_path)[0] == 2
    assert run(capsys, "analyze", "asym", "--n", "5")[0] == 2


def test_analyze_bad_csv(capsys, tmp_path):
    f = tmp_path / "bad.csv"
    f.write_text("n,value\n1,2\n3,4\n")
    assert run(capsys, "analyze", "ratios", "--in", str(f))[0] == 2
