import json
import math
import os
from pathlib import Path

import pytest

import fracss

PROBLEMS = Path(os.environ.get("FRACSS_PROBLEMS", Path(__file__).resolve().parents[2] / "problems"))


def relaxation(alpha, y0=1.0):
    return {
        "parameters": {"alpha": alpha},
        "terms": [
            {"coeff": 1, "derivative": {"kind": "caputo", "order": "alpha"}},
            {"coeff": -1},
        ],
        "initial_conditions": {"y(0)": y0},
    }


def test_special_functions():
    assert fracss.mittag_leffler(1.0, 1.0, 1.0) == pytest.approx(math.e, rel=1e-15)
    assert fracss.mittag_leffler(2.0, 1.0, 0.49) == pytest.approx(math.cosh(0.7), rel=1e-14)
    assert fracss.wright(0.0, 1.0, 0.3) == pytest.approx(math.exp(0.3), rel=1e-14)
    assert fracss.kilbas_saigo(0.5, 1.3, 0.45, 0.0) == 1.0
    assert fracss.generalized_wright([(1.0, 1.0)], [(1.0, 1.0)], 0.5) == pytest.approx(math.exp(0.5), rel=1e-14)


def test_truncation_error():
    with pytest.raises(fracss.TruncationError):
        fracss.mittag_leffler(1.0, 1.0, 30.0, max_terms=10)


def test_solve_relaxation():
    sol = fracss.solve(relaxation(0.5, 2.0))
    assert sol.status == "mittag-leffler"
    coeffs = {idx: c for idx, _, c in sol.coefficients}
    for i in range(10):
        assert coeffs[(i,)] == pytest.approx(2.0 / math.gamma(0.5 * i + 1), rel=1e-12)
    for t in (0.0, 0.3, 1.0):
        assert sol.evaluate(t) == pytest.approx(sol.closed_form_value(t), abs=1e-12)
    report = json.loads(sol.report_json())
    assert report["status"] == "mittag-leffler"


def test_problem_file_and_recurrence_only():
    sol = fracss.solve(PROBLEMS / "coupled.json", max_index=16)
    assert sol.status == "recurrence-only"
    assert sol.closed_form is None
    assert sol.relations
    with pytest.raises(fracss.SolveError):
        sol.evaluate(0.5)


def test_brute_force_matches():
    bf = fracss.brute_force(relaxation(0.7), n=8)
    for i in range(9):
        assert bf[(i,)] == pytest.approx(1.0 / math.gamma(0.7 * i + 1), rel=1e-8)


def test_parse_error():
    with pytest.raises(fracss.ParseError):
        fracss.solve('{"parameters": {"alpha": 0.5}, "terms": 3}')


def test_cli_entry(capsys):
    assert fracss.main(["special", "ml", "--alpha", "1", "--z", "1"]) == 0
    assert capsys.readouterr().out == "z,value\n1,2.718281828459045\n"
