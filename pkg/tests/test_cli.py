"""Command-line interface: subcommands, formats, exit codes."""

from pathlib import Path

import numpy as np
import pytest

import oblivjoin.cli as cli
from oblivjoin.harness import ClassVerdict

FIXTURES = Path(__file__).parent / "fixtures"
VALID = sorted(FIXTURES.glob("valid_*.txt"))
MALFORMED = {
    name: int(line)
    for name, line in (
        ln.split() for ln in
        (FIXTURES / "malformed_manifest.txt").read_text().splitlines())
}


def run(args):
    return cli.main(args)


def sorted_lines(text):
    rows = [tuple(int(v) for v in ln.split()) for ln in text.splitlines() if ln]
    return sorted(rows)


def test_fixture_corpus_is_populated():
    assert len(VALID) >= 10
    assert len(MALFORMED) >= 5


@pytest.mark.parametrize("path", VALID, ids=lambda p: p.stem)
def test_join_fixtures_match_expected(path, capsys):
    rc = run(["join", str(path)])
    out = capsys.readouterr()
    assert rc == 0
    expected = path.with_suffix(".expected").read_text()
    assert sorted_lines(out.out) == sorted_lines(expected)
    assert "m=" in out.err


@pytest.mark.parametrize("name", sorted(MALFORMED), ids=str)
def test_malformed_fixtures_exit_1_with_line(name, capsys):
    rc = run(["join", str(FIXTURES / name)])
    err = capsys.readouterr().err
    assert rc == 1
    assert f"line {MALFORMED[name]}:" in err


def test_join_out_file(tmp_path, capsys):
    out = tmp_path / "result.txt"
    rc = run(["join", str(VALID[0]), "--out", str(out)])
    assert rc == 0
    assert capsys.readouterr().out == ""
    expected = VALID[0].with_suffix(".expected").read_text()
    assert sorted_lines(out.read_text()) == sorted_lines(expected)


def test_join_missing_input_exits_2(tmp_path, capsys):
    rc = run(["join", str(tmp_path / "nope.txt")])
    assert rc == 2
    assert "error" in capsys.readouterr().err


def test_join_unwritable_out_exits_2(tmp_path, capsys):
    rc = run(["join", str(VALID[0]), "--out", str(tmp_path / "no" / "dir")])
    assert rc == 2


def test_join_trace_hash(capsys):
    rc = run(["join", str(VALID[0]), "--trace", "hash"])
    err = capsys.readouterr().err
    assert rc == 0
    digest = [ln for ln in err.splitlines() if ln.startswith("trace sha256:")]
    assert len(digest) == 1
    assert len(digest[0].split()[-1]) == 64


def test_join_trace_log(tmp_path, capsys):
    p = tmp_path / "t.txt"
    p.write_text("1 1\n---\n1 2\n")
    rc = run(["join", str(p), "--trace", "log"])
    err = capsys.readouterr().err
    assert rc == 0
    ev = [ln for ln in err.splitlines() if ln and ln[0] in "RW"]
    assert len(ev) > 10
    assert all(len(ln.split()) == 3 for ln in ev)


def test_join_scalar_engine_agrees(capsys):
    rc = run(["join", str(VALID[0]), "--engine", "scalar"])
    out1 = capsys.readouterr().out
    rc2 = run(["join", str(VALID[0]), "--engine", "vector"])
    out2 = capsys.readouterr().out
    assert rc == rc2 == 0
    assert out1 == out2


def test_verify_ok(capsys):
    rc = run(["verify", "--n1", "8", "--n2", "8", "--instances", "4",
              "--shapes", "all-1x1,disjoint"])
    out = capsys.readouterr().out
    assert rc == 0
    assert out.count("OK") == 2
    assert "digest=" in out


def test_verify_reports_infeasible(capsys):
    rc = run(["verify", "--n1", "1", "--n2", "1", "--instances", "2",
              "--shapes", "mixed"])
    out = capsys.readouterr().out
    assert rc == 0
    assert "infeasible" in out


def test_verify_divergence_exits_3(monkeypatch, capsys):
    def fake_verify(tc, engine="vector"):
        return ClassVerdict(False, ["a", "b"], (0, 1))
    monkeypatch.setattr(cli, "verify_trace_class", fake_verify)
    rc = run(["verify", "--n1", "4", "--n2", "4", "--instances", "2",
              "--shapes", "all-1x1"])
    out = capsys.readouterr().out
    assert rc == 3
    assert "DIVERGENT" in out


def test_bench_csv_stdout(capsys):
    rc = run(["bench", "--sizes", "32,64", "--reps", "1"])
    out = capsys.readouterr().out
    assert rc == 0
    lines = out.strip().splitlines()
    assert lines[0] == "n,m,oblivious_s,sortmerge_s,events"
    assert len(lines) == 3


def test_bench_csv_file(tmp_path):
    p = tmp_path / "bench.csv"
    rc = run(["bench", "--sizes", "32", "--reps", "1", "--csv", str(p)])
    assert rc == 0
    assert p.read_text().startswith("n,m,")


def test_cost_command(capsys):
    rc = run(["cost", "--n", "16"])
    out = capsys.readouterr().out
    assert rc == 0
    assert "initial_sorts" in out
    assert out.startswith("n1=16")


def test_entry_point_matches_main():
    # the installed console script resolves to cli.main
    from importlib.metadata import entry_points
    eps = entry_points(group="console_scripts")
    ours = [ep for ep in eps if ep.name == "oblivjoin"]
    assert ours and ours[0].value == "oblivjoin.cli:main"
