from __future__ import annotations

import json
import random

import numpy as np
import pytest

from graphcalc.cli.main import main
from graphcalc.cli.program import from_lists, label_for, load_program, parse, parse_builtin
from graphcalc.contraction import einsum_eval
from graphcalc.diagram import Chi, Fourier, build, load_diagram, to_json
from graphcalc.errors import ParseError, UnknownBuiltin
from graphcalc.mediators import chi_dense, delta_dense
from graphcalc.serialization import loads_tensor, save_tensor

from fuzz import random_program


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def tensor_out(out):
    return loads_tensor(out)


# program parsing


def test_parse_matmul():
    p = parse("ij,jk->ik")
    assert p.n_operands == 2 and p.spec.output == ("i", "k")


def test_parse_implicit_output():
    assert parse("iijk").spec.output == ("j", "k")


def test_parse_bindings():
    p = parse("ab,abc->c @ 2=delta[3,4]")
    assert p.free_positions == (1,)
    assert str(p) == "ab,abc->c @ 2=delta[3,4]"
    assert str(parse("ijk @ 1=chi[-+-,3]")) == "ijk->ijk @ 1=chi[+-+,3]"


@pytest.mark.parametrize("text,pos", [("ij,j$->i", 4), ("ij,jk->i?", 8)])
def test_parse_error_positions(text, pos):
    with pytest.raises(ParseError) as exc:
        parse(text)
    assert exc.value.position == pos


@pytest.mark.parametrize("text", [
    "ab @ 1=blob[2]", "ab @ 1=delta[x,2]", "ab @ 3=delta[2,2]", "ab @ 1=delta[3,2]",
    "ab,bc @ 1=delta[2,2]; 1=delta[2,2]", "a @ 1=fourier[3,sideways]",
])
def test_bad_bindings(text):
    with pytest.raises(ParseError):
        parse(text)


def test_unknown_builtin_type():
    with pytest.raises(UnknownBuiltin):
        parse_builtin("omega[2]")


def test_builtins_are_dense_mediators():
    assert np.array_equal(parse_builtin("delta[3,2]").dense(), delta_dense(3, 2))
    assert np.array_equal(parse_builtin("chi[+--,4]").dense(), chi_dense("+--", 4))
    assert parse_builtin("gamma[2,3]").extents == (2, 3, 6)


def test_round_trip_random_programs():
    rng = random.Random(1)
    for _ in range(200):
        p = random_program(rng)
        assert parse(str(p)) == p


def test_integer_list_program(tmp_path):
    path = tmp_path / "p.json"
    path.write_text(json.dumps({"operands": [[0, 1], [1, 2]], "output": [0, 2]}))
    assert load_program(path) == parse("ab,bc->ac")
    assert from_lists([[0, 1], [1, 2]], [0, 2]) == parse("ab,bc->ac")
    assert label_for(26) == "A"
    path.write_text(json.dumps({"program": "ab->ba"}))
    assert load_program(path) == parse("ab->ba")


# subcommands


def test_eval_identity_matmul(tmp_path, capsys):
    save_tensor(np.eye(2), tmp_path / "a.json")
    save_tensor(np.eye(2), tmp_path / "b.json")
    code, out, _ = run(["eval", "ij,jk->ik", str(tmp_path / "a.json"), str(tmp_path / "b.json")], capsys)
    assert code == 0
    assert np.array_equal(tensor_out(out), np.eye(2))


def test_eval_frobenius(capsys):
    code, out, _ = run(["eval", "ij,ij->", "[[1,2],[3,4]]", "[[1,2],[3,4]]"], capsys)
    assert code == 0 and tensor_out(out) == 30.0


def test_eval_diagonal_embedding(capsys):
    code, out, _ = run(["eval", "i->ii", "[1,2]"], capsys)
    assert code == 0 and np.array_equal(tensor_out(out), np.diag([1.0, 2.0]))


def test_eval_with_builtin(capsys):
    code, out, _ = run(["eval", "k,ijk->ij @ 2=delta[3,3]", "[1,2,3]"], capsys)
    assert code == 0 and np.array_equal(tensor_out(out), np.diag([1.0, 2.0, 3.0]))
    code, out, _ = run(["eval", "k,ijk->ij", "[1,2,3]", "--bind", "2=delta[3,3]"], capsys)
    assert code == 0 and np.array_equal(tensor_out(out), np.diag([1.0, 2.0, 3.0]))


def test_eval_program_file(tmp_path, capsys):
    (tmp_path / "p.json").write_text(json.dumps({"operands": [[0, 1], [1, 2]], "output": [0, 2]}))
    code, out, _ = run(["eval", "--program-file", str(tmp_path / "p.json"),
                        "[[1,2],[3,4]]", "[[1,0],[0,1]]"], capsys)
    assert code == 0 and tensor_out(out).tolist() == [[1, 2], [3, 4]]


def test_eval_mismatch_exits_2(capsys):
    code, _, err = run(["eval", "ij,jk->ik", "[[1,2,3],[4,5,6]]", "[[1,2],[3,4]]"], capsys)
    assert code == 2 and "j" in err


def test_eval_output_file(tmp_path, capsys):
    code, _, _ = run(["eval", "ij->ji", "[[1,2]]", "-o", str(tmp_path / "t.json")], capsys)
    assert code == 0
    assert loads_tensor((tmp_path / "t.json").read_text()).tolist() == [[1], [2]]


@pytest.mark.parametrize("argv", [
    ["eval"], ["eval", "ij,jk->ik", "[[1]]"], ["eval", "ij", "[[1]]", "[[1]]"],
    ["eval", "ij->", "no-such-file.json"], ["bogus"], ["conv", "[1,2]", "[1,2]", "--sig", "++"],
    ["conv", "[1,2]", "[1,2]", "--sig", "+*-"], ["mediator", "omega[2]"],
])
def test_usage_errors_exit_2(argv, capsys):
    assert run(argv, capsys)[0] == 2


def test_budget_exit_3(capsys):
    big = json.dumps(np.ones((20, 20)).tolist())
    assert run(["--budget", "10", "eval", "ij,jk->ik", big, big], capsys)[0] == 3


def test_check_zero_trials(capsys):
    code, out, _ = run(["check", "--trials", "0"], capsys)
    assert code == 0 and "0/0 passed" in out


def test_check_report(tmp_path, capsys):
    report = tmp_path / "r.json"
    code, out, _ = run(["check", "--trials", "3", "--names", "kron-factor", "kron-trace",
                        "--json-report", str(report)], capsys)
    assert code == 0 and "2/2 passed" in out
    data = json.loads(report.read_text())
    assert data["passed"] and [c["name"] for c in data["cases"]] == ["kron-factor", "kron-trace"]


def test_check_structural_flag(capsys):
    code, out, _ = run(["check", "--trials", "1", "--names", "kron-transpose", "--structural",
                        "--max-extent", "3"], capsys)
    assert code == 0 and "(diagram)" in out


def test_conv_identity_element(capsys):
    code, out, _ = run(["conv", "[1,0,0,0]", "[3,-1,2,5]"], capsys)
    assert code == 0 and tensor_out(out).tolist() == [3, -1, 2, 5]


def test_conv_signatures_differ(capsys):
    _, out1, _ = run(["conv", "[1,2,0]", "[0,1,5]", "--sig", "++-"], capsys)
    _, out2, _ = run(["conv", "[1,2,0]", "[0,1,5]", "--sig", "+--"], capsys)
    assert tensor_out(out1).tolist() != tensor_out(out2).tolist()


def test_simplify_command(tmp_path, capsys):
    d = build([Chi("++-", 4), Fourier(4), Fourier(4), Fourier(4, True)],
              [((0, t), (t + 1, 1)) for t in range(3)], [(t + 1, 0) for t in range(3)])
    (tmp_path / "d.json").write_text(json.dumps(to_json(d)))
    out_path, dot_path, report = tmp_path / "s.json", tmp_path / "s.dot", tmp_path / "r.json"
    code, _, err = run(["simplify", str(tmp_path / "d.json"), "-o", str(out_path),
                        "--dot", str(dot_path), "--json-report", str(report)], capsys)
    assert code == 0 and "nodes 4 -> 1" in err
    s = load_diagram(out_path)
    assert s.scale == 2.0
    assert dot_path.read_text().startswith("graph")
    assert [st["rule"] for st in json.loads(report.read_text())["steps"]] == ["chi_fourier"]


def test_simplify_bad_file(tmp_path, capsys):
    (tmp_path / "d.json").write_text('{"nodes": 3}')
    assert run(["simplify", str(tmp_path / "d.json")], capsys)[0] == 2


def test_mediator_command(capsys):
    code, out, _ = run(["mediator", "gamma[2,2]"], capsys)
    assert code == 0 and tensor_out(out).shape == (2, 2, 4)


def test_product_shortcuts(capsys):
    a, b = np.array([[1.0, 2.0], [3.0, 4.0]]), np.array([[0.0, 1.0], [1.0, 0.0]])
    sa, sb = json.dumps(a.tolist()), json.dumps(b.tolist())
    _, out, _ = run(["kron", sa, sb, "--layout", "textbook"], capsys)
    assert np.array_equal(tensor_out(out), np.kron(a, b))
    _, out, _ = run(["kr", sa, sb, "--mode", "row"], capsys)
    assert tensor_out(out).shape == (2, 4)
    _, out, _ = run(["hadamard", sa, sb], capsys)
    assert np.array_equal(tensor_out(out), a * b)
    _, out, _ = run(["dot", sa, sb], capsys)
    assert np.array_equal(tensor_out(out), a @ b)
    t = json.dumps(np.ones((1, 1, 2, 2)).tolist())
    _, out, _ = run(["ts", t, t], capsys)
    assert tensor_out(out).shape == (4, 4)


def test_eval_matches_library(capsys):
    a = np.arange(6.0).reshape(2, 3)
    code, out, _ = run(["eval", "ij,kj->ik", json.dumps(a.tolist()), json.dumps(a.tolist())], capsys)
    assert code == 0 and np.array_equal(tensor_out(out), einsum_eval("ij,kj->ik", [a, a]))


def test_env_fallback_and_flag_precedence(monkeypatch, capsys):
    big = json.dumps(np.ones((20, 20)).tolist())
    monkeypatch.setenv("GRAPHCALC_BUDGET", "10")
    assert run(["eval", "ij,jk->ik", big, big], capsys)[0] == 3
    assert run(["--budget", "100000", "eval", "ij,jk->ik", big, big], capsys)[0] == 0
    assert run(["eval", "--budget", "100000", "ij,jk->ik", big, big], capsys)[0] == 0


def test_env_tolerance(monkeypatch, capsys):
    monkeypatch.setenv("GRAPHCALC_TOLERANCE", "-1")
    assert run(["check", "--trials", "1", "--names", "kron-factor"], capsys)[0] == 1
