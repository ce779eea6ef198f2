import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

from trexlab.model import make_problem


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def random_problem(rng, n, p, noise=1.0, beta=None):
    x = rng.standard_normal((n, p))
    if beta is None:
        beta = np.zeros(p)
        beta[: min(p, 2)] = rng.standard_normal(min(p, 2))
    y = x @ beta + noise * rng.standard_normal(n)
    problem, _ = make_problem(x, y)
    return problem
