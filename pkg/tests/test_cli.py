import json

import pytest

from dglinf.cli import main, run, split_top


def report(argv):
    rep, code = run(argv)
    json.dumps(rep)
    return rep, code


def no_floats(x):
    if isinstance(x, float):
        return False
    if isinstance(x, dict):
        return all(no_floats(v) for v in x.values())
    if isinstance(x, list):
        return all(no_floats(v) for v in x)
    return True


def test_split_top():
    assert split_top("a, [a,b], 1/2*[b,[a,b]]") == ["a", "[a,b]", "1/2*[b,[a,b]]"]


@pytest.mark.parametrize("argv", [
    ["check", "t1"], ["check", "--spheres", "3,3,3,3"], ["homology", "t2"], ["trees", "--leaves", "6"],
    ["transfer", "t2", "--seed", "3"], ["coalgebra", "t1", "--check-dsq"],
    ["whitehead", "t2", "--classes", "u1,u2,u3"],
    ["verify", "t2", "--theorem", "main1", "--classes", "u1,u2,u3"],
    ["verify", "t2", "--theorem", "elsegundo", "--classes", "u1,u2,u3", "--seed", "2"],
])
def test_passing_commands(argv):
    rep, code = report(argv)
    assert code == 0, rep
    assert rep["verdict"] == "pass"
    assert rep["convention"]
    assert no_floats(rep)


def test_fraction_strings_and_seed_embedded():
    rep, code = report(["whitehead", "t2", "--classes", "u1,u2,u3", "--seed", "5"])
    assert rep["seed"] == 5 and rep["degree_cap"] == 8
    assert rep["results"]["class"] == {"0": "1"}


def test_usage_errors_exit_2():
    assert run(["homology", "no-such-file"])[1] == 2
    assert run(["frobnicate"])[1] == 2
    assert run(["homology"])[1] == 2
    assert run(["whitehead", "t2", "--classes", "u1,[u1,"])[1] == 2


def test_parse_error_exit_2(tmp_path):
    bad = tmp_path / "bad.dgl"
    bad.write_text("dgl { gen a:2 d a = }")
    rep, code = run(["check", str(bad)])
    assert code == 2 and "DglSyntaxError" in rep["results"]["error"]


def test_failed_verdict_exit_1():
    # the triple product of u1, u2, u3 is a nonzero class, so the zero class is never reached
    rep, code = run(["whitehead", "t2", "--classes", "u1,u2,u3", "--target", "0", "--budget", "10"])
    assert code == 1, rep


def test_retract_file_round_trip(tmp_path):
    out = tmp_path / "r.json"
    assert run(["retract", "t2", "--seed", "4", "--out", str(out)])[1] == 0
    rep, code = run(["transfer", "t2", "--retract-file", str(out)])
    assert code == 0
    assert rep["results"]["least_nonvanishing_arity"] == 3


def test_json_file_written(tmp_path, capsys):
    path = tmp_path / "out.json"
    assert main(["trees", "--leaves", "4", "--json", str(path)]) == 0
    assert json.loads(path.read_text())["results"]["count"] == 2
    assert json.loads(capsys.readouterr().out)["verdict"] == "pass"


def test_solve_phi_command():
    rep, code = run(["coalgebra", "t2", "--solve-phi", "h2_0,h2_1,h2_2,h7_0"])
    assert code == 0, rep
    assert rep["results"]["solve_phi"]["found"]
