"""Generalized power series solutions of fractional differential equations."""

import json
import os
import sys

from ._fracss import (
    LatticeError,
    ParseError,
    Solution,
    SolveError,
    TruncationError,
    generalized_wright,
    kilbas_saigo,
    mittag_leffler,
    wright,
)
from . import _fracss

__all__ = [
    "LatticeError",
    "ParseError",
    "Solution",
    "SolveError",
    "TruncationError",
    "brute_force",
    "generalized_wright",
    "kilbas_saigo",
    "main",
    "mittag_leffler",
    "solve",
    "wright",
]


def _problem_text(problem):
    if isinstance(problem, dict):
        return json.dumps(problem)
    if isinstance(problem, os.PathLike) or (isinstance(problem, str) and not problem.lstrip().startswith("{")):
        with open(problem, encoding="utf-8") as f:
            return f.read()
    return problem


def solve(problem, max_index=None):
    """Solve a problem given as a dict, JSON text, or path to a problem file."""
    return _fracss.solve_text(_problem_text(problem), max_index)


def brute_force(problem, n=8):
    """Least-squares coefficients of the ansatz truncated at index n, keyed by index tuple."""
    return _fracss.brute_force(_problem_text(problem), n)


def main(argv=None):
    code, out, err = _fracss.run_cli(list(sys.argv[1:] if argv is None else argv))
    sys.stdout.write(out)
    sys.stderr.write(err)
    return code
