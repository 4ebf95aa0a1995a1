import json
from fractions import Fraction

import pytest
from hypothesis import given

from conftest import polynomials
from sublevel import cli, corpus
from sublevel.exactpoly import Polynomial
from sublevel.problem import (
    Frequency,
    ProblemError,
    canonical,
    make_problem,
    parse_problem,
    parse_problem_text,
    serialize_problem,
)
from sublevel.witness import verify_witness


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_cone_fixture_parses():
    prob = corpus.load("cone5")
    assert prob.dimension == 3 and len(prob.maps) == 5
    for m in prob.maps:
        a, b, c = m.matrix[0]
        assert c * c == a * a + b * b


@pytest.mark.parametrize("name", corpus.names())
def test_fixture_round_trip(name):
    text = corpus.text(name)
    assert serialize_problem(parse_problem_text(text)) == canonical(text)
    assert canonical(canonical(text)) == canonical(text)


@given(polynomials(2))
def test_round_trip_random_phase(P):
    prob = make_problem(P, [[[1, Fraction(-2, 3)]]], epsilons=(Fraction(1, 7),),
                        lambdas=(Frequency(Fraction(3), True),))
    assert parse_problem_text(serialize_problem(prob)) == prob


@pytest.mark.parametrize("doc,path", [
    ({"phase": {"dimension": 1, "terms": [[[1], "1/0"]]}}, "phase.terms[0][1]"),
    ({"phase": {"dimension": 2, "terms": [[[1], "1"]]}}, "phase.terms[0][0]"),
    ({"phase": {"dimension": 2, "terms": []}, "maps": [[["1", "1"], ["2", "2"]]]}, "maps[0]"),
    ({"phase": {"dimension": 1, "terms": []}, "box": [["1", "0"]]}, "box[0]"),
    ({"phase": {"dimension": 1, "terms": []}, "bogus": 1}, ""),
    ({"maps": []}, ""),
])
def test_malformed_problems(doc, path):
    with pytest.raises(ProblemError) as exc:
        parse_problem_text(json.dumps(doc))
    assert exc.value.path == path


def test_json_syntax_error_has_line_and_column():
    with pytest.raises(ProblemError) as exc:
        parse_problem_text('{\n  "phase": ,\n}')
    assert exc.value.path.startswith("line 2 column")


def test_frequency_syntax():
    assert float(Frequency.parse("2/1*pi", "x")) == pytest.approx(6.283185307179586)
    assert str(Frequency.parse(3, "x")) == "3/1"


def test_parse_problem_from_disk(tmp_path):
    f = tmp_path / "p.json"
    f.write_text(serialize_problem(make_problem(Polynomial.variable(0, 1), [])))
    assert parse_problem(f).phase == Polynomial.variable(0, 1)


def test_analyze_bilinear(capsys):
    code, out, _ = run(capsys, "analyze", "fixtures/bilinear_xy.json")
    report = json.loads(out)
    assert code == 0
    assert report["verdict"] == "nondegenerate"
    assert report["annihilator"] == "D_{e2}D_{e1}"


def test_analyze_degenerate(capsys):
    code, out, _ = run(capsys, "analyze", "separable.json")
    report = json.loads(out)
    assert code == 0 and report["verdict"] == "degenerate" and len(report["decomposition"]) == 2


def test_witness_round_trip(capsys, tmp_path):
    code, out, err = run(capsys, "witness", "fixtures/cone5.json", "--budget", "6")
    assert code == 0 and "radius 1" in err
    assert out.splitlines()[0] == "s1,s2,s3,c_s"
    w = cli.load_witness_csv(out)
    prob = corpus.load("cone5")
    assert verify_witness(w, prob.phase, prob.maps)
    code, _, _ = run(capsys, "witness", "cone5.json", "--out", str(tmp_path))
    assert (tmp_path / "cone5_witness.csv").read_text() == out


def test_witness_exhausted_exit_code(capsys):
    code, out, err = run(capsys, "witness", "separable.json", "--budget", "2", "--modulus", "1")
    assert code == 1 and out == "" and "no witness" in err


def test_density_row(capsys):
    code, out, _ = run(capsys, "density", "--pattern", "0,1,2", "--d", "1", "--N", "9")
    assert code == 0
    assert out.splitlines()[0] == "N,max_size,density,exact"
    assert out.splitlines()[-1].startswith("9,5")


def test_density_from_problem_and_2d_pattern(capsys):
    code, out, _ = run(capsys, "density", "corner.json", "--N", "2")
    assert code == 0 and out.splitlines()[-1] == "2,3,3/4,true"
    code, out2, _ = run(capsys, "density", "--pattern", "0,0;1,0;0,1", "--d", "2", "--N", "2")
    assert out2 == out


def test_sublevel_and_periodic_tables(capsys):
    code, out, _ = run(capsys, "sublevel", "separable.json", "--functions", "adversary")
    rows = out.splitlines()
    assert code == 0 and len(rows) == 5
    assert all(r.endswith(",4.0,4.0") for r in rows[1:])
    code, out, _ = run(capsys, "periodic", "linear_no_maps.json", "--resolution", "512")
    assert code == 0 and out.splitlines()[1].startswith("1/10,2/1*pi,512,grid,512,16,")


def test_adversary_on_nondegenerate_is_inconclusive(capsys):
    code, _, err = run(capsys, "sublevel", "bilinear_xy.json", "--functions", "adversary")
    assert code == 1 and "nondegenerate" in err


def test_oscint_table(capsys):
    code, out, err = run(capsys, "oscint", "bilinear_xy.json")
    assert code == 0 and len(out.splitlines()) == 9
    slope = float(err.split()[-1])
    assert -1.2 <= slope <= -0.8


@pytest.mark.parametrize("argv", [
    ["analyze", "missing.json"],
    ["oscint", "bilinear_xy.json", "--resolution", "10"],
    ["density", "--pattern", "0,a"],
    ["witness", "bilinear_xy.json", "--modulus", "x"],
])
def test_input_errors_exit_2(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2 and err.startswith("error:")


def test_bad_flag_exits_2(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["periodic", "bilinear_xy.json", "--mode", "bogus"])
    assert exc.value.code == 2
    capsys.readouterr()


def test_bad_rational_file_exit_2(capsys, tmp_path):
    f = tmp_path / "bad.json"
    f.write_text('{"phase": {"dimension": 1, "terms": [[[1], "1/0"]]}}')
    code, _, err = run(capsys, "analyze", str(f))
    assert code == 2 and "phase.terms[0][1]" in err


def test_selftest(capsys):
    code, out, _ = run(capsys, "selftest")
    assert code == 0 and all(line.startswith("PASS") for line in out.splitlines())


@pytest.mark.parametrize("argv", [
    ["analyze", "cubic_three_dirs.json"],
    ["witness", "rational_maps.json"],
    ["sublevel", "bilinear_xy.json", "--mode", "mc", "--seed", "5"],
    ["periodic", "linear_no_maps.json"],
    ["density", "ap3.json", "--N", "7"],
    ["oscint", "bilinear_xy.json"],
])
def test_byte_identical_reruns(capsys, argv):
    first = run(capsys, *argv)
    assert run(capsys, *argv) == first
    assert "\r" not in first[1]
