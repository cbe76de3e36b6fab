from __future__ import annotations

import json

import pytest

from arrh import __version__
from arrh.cli import EXIT_INPUT, EXIT_OK, EXIT_UNDETERMINED, main
from golden_cases import CASES, GOLDEN, expected_path, run_case


def _run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.mark.parametrize("stem, command, extra", CASES, ids=[f"{s}-{c}" for s, c, _ in CASES])
def test_golden_reports(stem, command, extra):
    code, out = run_case(stem, command, extra)
    assert code in (EXIT_OK, EXIT_UNDETERMINED)
    assert out == expected_path(stem, command).read_text()


def test_family_x3_free(capsys):
    code, out, _ = _run(capsys, "freeness", "--family", "x3", "--param", "t=-1", "--mult", "n=2", "--json")
    assert code == EXIT_OK
    data = json.loads(out)
    assert data["status"] == "Free" and sum(data["exponents"]) == 9


def test_not_free_exits_zero(capsys):
    code, out, _ = _run(capsys, "freeness", "--family", "x3", "--param", "t=-1", "--mult", "n=3")
    assert code == EXIT_OK
    assert out.startswith("NotFree")


def test_undetermined_exit_code(capsys):
    code, out, _ = _run(capsys, "freeness", "--family", "x3", "--param", "t=-1", "--mult", "n=3",
                        "--dmax", "0", "--no-fast-path")
    assert code == EXIT_UNDETERMINED
    assert out.startswith("Undetermined")


def test_rank2_exponents(capsys):
    code, out, _ = _run(capsys, "exponents", "--rank2", "x^3 y^3 (x-y)^3", "--json")
    assert code == EXIT_OK
    assert json.loads(out)["exponents"] == [5, 4]


def test_homology_ziegler(capsys):
    code, out, _ = _run(capsys, "homology", "--file", str(GOLDEN / "ziegler_generic.arr"), "--dmax", "6", "--json")
    assert code == EXIT_OK
    assert json.loads(out)["version"] == 1


@pytest.mark.parametrize("argv", [
    ["freeness"],
    ["freeness", "--file", "missing.arr"],
    ["freeness", "--family", "nope"],
    ["freeness", "--family", "x3", "--file", str(GOLDEN / "braid.arr")],
    ["freeness", "--family", "x3", "--param", "t"],
    ["no-such-command"],
])
def test_input_errors(capsys, argv):
    code, _, _ = _run(capsys, *argv)
    assert code == EXIT_INPUT


def test_parse_error_reports_position(tmp_path, capsys):
    path = tmp_path / "bad.arr"
    path.write_text("field GF(4)\nvars 2\n1 0\n")
    code, _, err = _run(capsys, "freeness", "--file", str(path))
    assert code == EXIT_INPUT
    assert "line 1, column 7" in err


def test_sample_is_deterministic(capsys, monkeypatch):
    argv = ["sample", "--family", "x3", "--param", "t=-3..3", "--mult", "n=3", "--trials", "6", "--json"]
    _, first, _ = _run(capsys, *argv, "--seed", "11")
    _, second, _ = _run(capsys, *argv, "--seed", "11")
    assert first == second
    monkeypatch.setenv("ARRH_SEED", "11")
    _, third, _ = _run(capsys, *argv)
    assert third == first


def test_canonical_round_trip(tmp_path, capsys):
    code, out, _ = _run(capsys, "canonical", "--file", str(GOLDEN / "seven_lines.arr"))
    assert code == EXIT_OK
    path = tmp_path / "again.arr"
    path.write_text(out)
    _, again, _ = _run(capsys, "canonical", "--file", str(path))
    assert again == out


def test_version(capsys):
    code, out, _ = _run(capsys, "--version")
    assert code == EXIT_OK
    assert __version__ in out
