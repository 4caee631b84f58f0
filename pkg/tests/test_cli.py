import json

import pytest

from collatz_family.cli import EXIT_FAIL, EXIT_OK, EXIT_USAGE, main, parse_range
from collatz_family.export import matrix_from_json


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_parse_range():
    assert parse_range("1..4") == [1, 2, 3, 4]
    assert parse_range("-2..1") == [-2, -1, 0, 1]
    assert parse_range("5..4") == []
    assert parse_range("7") == [7]
    assert parse_range("3,-2,9") == [3, -2, 9]


def test_traj_collatz(capsys):
    code, out, _ = run(capsys, "traj", "--map", "T", "--start", "15", "--k", "5")
    assert code == EXIT_OK
    assert out.splitlines()[0] == "15 23 35 53 80 40"
    assert "beta: 4" in out


def test_traj_cycle(capsys):
    code, out, _ = run(capsys, "traj", "--map", "F", "--n", "3", "--start", "2", "--until-cycle")
    assert code == EXIT_OK
    assert "cycle: 2 0 -3" in out
    code, out, _ = run(capsys, "traj", "--map", "F", "--n", "3", "--start", "2", "--until-cycle", "--format", "json")
    assert json.loads(out)["cycle"] == [2, 0, -3]


def test_traj_trivial(capsys):
    code, out, _ = run(capsys, "traj", "--map", "T", "--start", "1", "--k", "0")
    assert code == EXIT_OK and out.splitlines()[0] == "1"
    code, out, _ = run(capsys, "traj", "--start", "1", "--k", "0", "--format", "csv")
    assert out == "1\n"


def test_traj_budget_and_errors(capsys):
    assert run(capsys, "traj", "--start", "27", "--until", "--max-steps", "5")[0] == EXIT_FAIL
    assert run(capsys, "traj", "--start", "0", "--k", "3")[0] == EXIT_USAGE
    assert run(capsys, "traj", "--map", "F", "--start", "3")[0] == EXIT_USAGE
    assert run(capsys, "traj", "--start", "3", "--k", "-1")[0] == EXIT_USAGE
    assert run(capsys, "traj")[0] == EXIT_USAGE


def test_verify_conjugacy_grid(capsys):
    code, out, _ = run(
        capsys, "verify", "--identity", "thm2.1", "--N", "1..1000", "--n", "-20..20", "--k", "32", "--workers", "1"
    )
    assert code == EXIT_OK
    assert out.startswith("PASS conjugacy")


def test_verify_offset_constant(capsys):
    code, out, _ = run(capsys, "verify", "--identity", "cor2.2", "--N", "27", "--pair", "3,-2", "--k", "9", "--format", "json")
    assert code == EXIT_OK
    report = json.loads(out)
    assert report["observed"]["differences"] == {"3,-2": [10]}
    assert report["checked"] == 10


def test_verify_empty_range(capsys):
    code, out, _ = run(capsys, "verify", "--identity", "thm2.1", "--N", "5..1", "--format", "json")
    assert code == EXIT_OK
    assert json.loads(out)["checked"] == 0


@pytest.mark.parametrize(
    "identity",
    ["prop2.2", "thm2.2", "cor2.1", "cor2.3", "cor2.4", "cor2.5", "cor2.6", "prop2.3", "cor2.8", "chroma"],
)
def test_verify_every_identity(capsys, identity):
    code, out, _ = run(capsys, "verify", "--identity", identity, "--N", "1..20", "--n", "-3..3", "--k", "8", "--offset", "50")
    assert code == EXIT_OK, out
    assert out.startswith("PASS")


def test_verify_reach_identity_fails_on_tiny_budget(capsys):
    code, out, _ = run(capsys, "verify", "--identity", "thm2.3", "--n", "0", "--offset", "40", "--budget", "3")
    assert code == EXIT_FAIL
    assert "counterexample" in out


def test_verify_usage_errors(capsys):
    assert run(capsys, "verify", "--identity", "nope")[0] == EXIT_USAGE
    assert run(capsys, "verify", "--identity", "thm2.1", "--N", "0..3")[0] == EXIT_USAGE
    assert run(capsys, "verify", "--identity", "thm2.1", "--N", "a..b")[0] == EXIT_USAGE
    assert run(capsys, "verify", "--identity", "thm2.1", "--k", "-1")[0] == EXIT_USAGE


def test_matrix_symbolic_csv(capsys):
    code, out, _ = run(capsys, "matrix", "--symbolic", "--M", "16", "--k", "6", "--format", "csv")
    assert code == EXIT_OK
    assert out.splitlines()[0] == "2n+16,2n+24,2n+36,2n+54,2n+81,2n+41"


def test_matrix_half_substitution(capsys):
    code, out, _ = run(capsys, "matrix", "--subst", "-1/2", "--M", "16", "--k", "6", "--format", "csv")
    assert code == EXIT_OK
    lines = out.splitlines()
    assert [int(line.split(",")[0]) for line in lines] == list(range(15, 0, -1))
    assert lines[0] == "15,23,35,53,80,40"


def test_matrix_concrete_json(capsys, published):
    code, out, _ = run(capsys, "matrix", "--n", "0", "--M", "17", "--k", "11", "--ascending", "--format", "json")
    assert code == EXIT_OK
    m = matrix_from_json(out)
    assert [list(r.cells) for r in m.rows] == published["grids"]["f0_2to17_x11_a"]["rows"]


def test_matrix_html_to_file(capsys, tmp_path):
    target = tmp_path / "m.html"
    code, out, _ = run(capsys, "matrix", "--symbolic", "--format", "html", "--output", str(target))
    assert code == EXIT_OK and out == ""
    assert "chroma-3" in target.read_text(encoding="utf-8")


def test_matrix_usage_errors(capsys):
    assert run(capsys, "matrix", "--M", "2")[0] == EXIT_USAGE
    assert run(capsys, "matrix", "--k", "0")[0] == EXIT_USAGE
    assert run(capsys, "matrix", "--subst", "1/3")[0] == EXIT_USAGE
    assert run(capsys, "matrix", "--subst", "2", "--n", "2")[0] == EXIT_USAGE


def test_coeffs(capsys):
    code, out, _ = run(capsys, "coeffs", "--map", "T", "--start", "3", "--k", "2", "--format", "csv")
    assert code == EXIT_OK
    rows = out.splitlines()
    assert rows[0] == "k,beta,lead,r,term"
    assert rows[1] == "0,0,1/1,0/1,3"
    assert rows[3] == "2,2,9/4,5/4,8"
    code, out, _ = run(capsys, "coeffs", "--map", "F", "--n", "0", "--start", "4", "--k", "2", "--format", "json")
    last = json.loads(out)["rows"][-1]
    assert (last["alpha"], last["lead"], last["phi"]) == (2, "9/4", "0/1")


def test_reach(capsys):
    code, out, _ = run(capsys, "reach", "--n", "0", "--upto", "1000")
    assert code == EXIT_OK and "all starts reach 2" in out
    code, out, _ = run(capsys, "reach", "--n", "-3", "--upto", "100")
    assert code == EXIT_OK and "all starts reach -4" in out
    code, out, _ = run(capsys, "reach", "--n", "5", "--upto", "0", "--per-start")
    assert code == EXIT_OK and "12: 0" in out


def test_reach_budget_exhaustion_exits_1(capsys):
    code, out, _ = run(capsys, "reach", "--n", "0", "--upto", "40", "--budget", "5")
    assert code == EXIT_FAIL
    assert "not reached: 28" in out
    assert run(capsys, "reach", "--n", "0", "--budget", "0")[0] == EXIT_USAGE
