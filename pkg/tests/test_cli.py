import json
import subprocess
import sys

import pytest

from spinpart import generate, load, serialize
from spinpart.cli import main


def run_cli(*argv) -> int:
    return main(list(argv))


def test_gen_writes_parseable_file(tmp_path):
    path = tmp_path / "inst.npp"
    assert run_cli("gen", "-n", "5", "-b", "8", "-s", "42", "-o", str(path)) == 0
    inst = load(path)
    assert inst == generate(5, 8, 42)


def test_gen_stdout(capsys):
    assert run_cli("gen", "-n", "2", "-b", "1", "-s", "0") == 0
    out = capsys.readouterr().out
    assert out == serialize(generate(2, 1, 0))


def test_gen_byte_identical(tmp_path):
    p1, p2 = tmp_path / "a.npp", tmp_path / "b.npp"
    run_cli("gen", "-n", "9", "-b", "13", "-s", "3", "-o", str(p1))
    run_cli("gen", "-n", "9", "-b", "13", "-s", "3", "-o", str(p2))
    assert p1.read_bytes() == p2.read_bytes()


def test_solve_all_exact_energies_agree(tmp_path):
    path = tmp_path / "inst.npp"
    run_cli("gen", "-n", "12", "-b", "10", "-s", "7", "-o", str(path))
    out = tmp_path / "runs.jsonl"
    assert run_cli("solve", "--all", str(path), "-o", str(out), "--no-timings") == 0
    records = [json.loads(line) for line in out.read_text().splitlines()]
    assert [r["solver"] for r in records] == ["brute", "mitm", "ss", "kk", "ckk"]
    exact = [r["energy"] for r in records if r["exact"]]
    assert len(set(exact)) == 1
    for r in records:
        assert r["witness"].startswith("0x")
        assert int(r["witness"], 16) & 1
        assert r["energy"] == r["discrepancy"] ** 2
        assert r["wallTimeMs"] == 0.0


def test_solve_byte_identical_with_no_timings(tmp_path):
    args = ("solve", "-n", "10", "-b", "8", "-s", "4", "--no-timings")
    a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    assert run_cli(*args, "-o", str(a)) == 0
    assert run_cli(*args, "-o", str(b)) == 0
    assert a.read_bytes() == b.read_bytes()


def test_solve_capacity_exit_code():
    assert run_cli("solve", "--solver", "brute", "-n", "40", "-b", "8", "-s", "1") == 3


def test_solve_all_skips_infeasible_brute(tmp_path, capsys):
    out = tmp_path / "runs.jsonl"
    code = run_cli(
        "solve", "--all", "-n", "30", "-b", "4", "-s", "1", "-o", str(out), "--no-timings"
    )
    assert code == 0
    names = [json.loads(l)["solver"] for l in out.read_text().splitlines()]
    assert "brute" not in names and "mitm" in names
    assert "skipping brute" in capsys.readouterr().err


def test_usage_errors_exit_2(tmp_path):
    # conflicting instance sources
    path = tmp_path / "inst.npp"
    run_cli("gen", "-n", "4", "-b", "4", "-s", "1", "-o", str(path))
    assert run_cli("solve", str(path), "-n", "4", "-b", "4", "-s", "1") == 2
    # missing source
    assert run_cli("solve") == 2
    # unreadable file
    assert run_cli("solve", str(tmp_path / "missing.npp")) == 2
    # unknown flag
    assert run_cli("solve", "--definitely-not-a-flag") == 2
    # malformed instance file
    bad = tmp_path / "bad.npp"
    bad.write_text("npp v1 n=2 bits=4 seed=none\n1\n")
    assert run_cli("solve", str(bad)) == 2


def test_spectrum_csv_golden(tmp_path, capsys):
    path = tmp_path / "inst.npp"
    path.write_text("npp v1 n=3 bits=2 seed=none\n3\n1\n1\n")
    assert run_cli("spectrum", str(path)) == 0
    assert capsys.readouterr().out == "energy,degeneracy\n1,2\n9,4\n25,2\n"


def test_spectrum_capacity_exit(tmp_path):
    assert run_cli("spectrum", "-n", "12", "-b", "4", "-s", "1", "--cap", "10") == 3


def test_thermo_csv_shape(tmp_path):
    out = tmp_path / "curve.csv"
    code = run_cli(
        "thermo", "-n", "8", "-b", "8", "-s", "2", "--steps", "5", "-o", str(out)
    )
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "T,beta,lnZ,meanE,freeE,scale"
    assert len(lines) == 6
    first = lines[1].split(",")
    assert float(first[0]) == 10.0 and float(first[1]) == 0.1


def test_correspond_exit_codes(tmp_path):
    path = tmp_path / "ones.npp"
    path.write_text("npp v1 n=2 bits=1 seed=none\n1\n1\n")
    assert run_cli("correspond", str(path), "--tmin", "0.001") == 0


def test_correspond_record_fields(tmp_path):
    out = tmp_path / "rep.jsonl"
    code = run_cli(
        "correspond", "-n", "10", "-b", "8", "-s", "6", "-o", str(out), "--no-timings"
    )
    assert code == 0
    rec = json.loads(out.read_text())
    assert rec["agree"] is True
    assert rec["eGroundSolver"] == rec["eGroundSpectrum"]
    assert set(rec["checks"]) == {
        "solver_equals_spectrum",
        "witness_in_eigenspace",
        "eigenspace_residuals_zero",
        "limit_within_bracket",
    }
    assert rec["cost"]["brute"]["wallTimeMs"] == 0.0


def test_scaling_csv_deterministic(tmp_path):
    args = (
        "scaling", "--ns", "8,10,12", "-b", "8", "-s", "3", "--trials", "2",
        "--solver", "brute,mitm", "--jobs", "1", "--no-timings",
    )
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run_cli(*args, "-o", str(a)) == 0
    assert run_cli(*args, "-o", str(b)) == 0
    assert a.read_bytes() == b.read_bytes()
    lines = a.read_text().splitlines()
    assert lines[0].startswith("n,bits,trials,solver,meanWorkNodes")
    assert len(lines) == 1 + 3 * 2


def test_scaling_jsonl_format(tmp_path):
    out = tmp_path / "rows.jsonl"
    code = run_cli(
        "scaling", "--ns", "8,10", "-b", "6", "-s", "2", "--trials", "1",
        "--solver", "brute", "--format", "jsonl", "--jobs", "1",
        "--no-timings", "-o", str(out),
    )
    assert code == 0
    rows = [json.loads(l) for l in out.read_text().splitlines()]
    assert rows[0]["workSlope"] == 1.0


def test_phase_csv(tmp_path):
    out = tmp_path / "phase.csv"
    code = run_cli(
        "phase", "-n", "10", "-s", "4", "--bits-list", "2,20", "--trials", "10",
        "--jobs", "1", "-o", str(out),
    )
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "n,bits,alpha,trials,perfect,fraction"
    rows = [line.split(",") for line in lines[1:]]
    assert [r[1] for r in rows] == ["2", "20"]
    assert float(rows[0][5]) >= float(rows[1][5])


def test_help_exits_zero():
    assert run_cli("--help") == 0
    assert run_cli("solve", "--help") == 0


def test_module_invocation_subprocess():
    proc = subprocess.run(
        [sys.executable, "-m", "spinpart", "gen", "-n", "2", "-b", "1", "-s", "0"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert proc.stdout == "npp v1 n=2 bits=1 seed=0\n1\n1\n"


@pytest.mark.parametrize("fmt_value", [1.0, 0.1, 2 / 3, 1e-300, 12345.678901234567])
def test_float_formatting_is_12_sig_digits(fmt_value):
    from spinpart.cli import _f12

    text = _f12(fmt_value)
    assert float(text) == pytest.approx(fmt_value, rel=1e-11)
    digits = text.replace("-", "").replace(".", "").split("e")[0].lstrip("0")
    assert len(digits) <= 12
