import numpy as np
import pytest

from cgtoolkit.problems import build_spec, make_smooth_term
from cgtoolkit.subproblems import make_lmo


def make_problem(problem_id, dim, lmo_kind, problem_params=None, lmo_params=None, **spec_kw):
    """Assemble (spec, lmo) for a catalog problem/regularizer pair."""
    term = make_smooth_term(problem_id, dim, **(problem_params or {}))
    lmo = make_lmo(lmo_kind, dim, **(lmo_params or {}))
    return build_spec(term, lmo, **spec_kw), lmo


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
