import subprocess
import sys

import pytest

from rsynth.cli import main

from conftest import BENCH, needs_gcc


def rsynth(*args, stdin=None):
    return subprocess.run([sys.executable, "-m", "rsynth.cli", *map(str, args)], input=stdin,
                          capture_output=True, text=True, timeout=600)


@pytest.mark.parametrize("name,code,verdict", [
    ("onedim", 0, "realizable"),
    ("empty_transition", 1, "unrealizable"),
    ("counter_bounded", 1, "unrealizable"),
])
def test_check_exit_codes(name, code, verdict, capsys):
    assert main(["check", str(BENCH / f"{name}.lus")]) == code
    assert capsys.readouterr().out.strip() == verdict


def test_round_cap_is_a_resource_error(capsys):
    # the counter needs three rounds to be refuted
    assert main(["check", "--iter-cap", "1", str(BENCH / "counter_bounded.lus")]) == 70
    err = capsys.readouterr().err
    assert "resource limit" in err and "Traceback" not in err


def test_show_fixpoint(capsys):
    assert main(["check", "--show-fixpoint", str(BENCH / "onedim.lus")]) == 0
    assert "F = position >= 0" in capsys.readouterr().out


def test_usage_errors(tmp_path, capsys):
    assert main(["check", str(tmp_path / "missing.lus")]) == 64
    bad = tmp_path / "bad.lus"
    bad.write_text("node n(x : int) returns (); let assert x >= ; tel;")
    assert main(["check", str(bad)]) == 64
    with pytest.raises(SystemExit) as info:
        main(["frobnicate"])
    assert info.value.code == 64


def test_synth_is_deterministic(tmp_path):
    a = rsynth("synth", BENCH / "onedim.lus")
    b = rsynth("synth", BENCH / "onedim.lus")
    assert a.returncode == 0 and a.stdout == b.stdout and '"format"' in a.stdout
    out = tmp_path / "w.json"
    assert main(["synth", str(BENCH / "onedim.lus"), "--out", str(out)]) == 0
    assert out.read_text() == a.stdout


@needs_gcc
def test_codegen_writes_files(tmp_path):
    dump = tmp_path / "w.json"
    main(["synth", str(BENCH / "onedim.lus"), "--out", str(dump)])
    assert main(["codegen", str(dump), "--emit-randval", "--out-dir", str(tmp_path / "c")]) == 0
    files = sorted(p.name for p in (tmp_path / "c").iterdir())
    assert files == ["onedim_witness.c", "randval.c", "randval.h"]
    r = subprocess.run(["gcc", "-std=c99", "-Wall", "-Wextra", "-c", "onedim_witness.c", "randval.c"],
                       cwd=tmp_path / "c", capture_output=True, text=True)
    assert r.returncode == 0 and not r.stderr
    assert main(["codegen", str(BENCH / "onedim.lus"), "--target", "smtlib", "--out-dir", str(tmp_path)]) == 0
    assert (tmp_path / "onedim_witness.smt2").read_text().count("check-sat") >= 1


def test_codegen_rejects_bad_dump(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"format": "nope"}')
    assert main(["codegen", str(bad), "--out-dir", str(tmp_path)]) == 64


def test_simulate_reports_coverage(capsys):
    code = main(["simulate", str(BENCH / "bounded_evasion_ints.lus"), "--game", str(BENCH / "chaser_int.json"),
                 "--turns", "50", "--seed", "1"])
    out = capsys.readouterr().out
    assert code == 0 and out.startswith("turns 50 violations 0 coverage")


def test_fuzz_emit_with_stdin_feedback():
    r = rsynth("fuzz-emit", BENCH / "fuzzer.lus", "--feedback", "stdin", stdin="1\n0\n1\n")
    lines = r.stdout.splitlines()
    assert r.returncode == 0 and len(lines) == 3
    assert [l.split()[0] for l in lines] == ["1", "2", "3"]


def test_fuzz_emit_into_closed_pipe():
    p = subprocess.Popen([sys.executable, "-m", "rsynth.cli", "fuzz-emit", str(BENCH / "fuzzer.lus")],
                         stdout=subprocess.PIPE, stderr=subprocess.PIPE)
    p.stdout.readline()
    p.stdout.close()
    p.wait(timeout=120)
    assert p.returncode == 0 and b"Traceback" not in p.stderr.read()
