import sys

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from conicond.linalg import Subspace

settings.register_profile(
    "repo", deadline=None, max_examples=30, derandomize=True,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.load_profile("repo")


def random_subspace(rng, n, m):
    return Subspace.from_columns(rng.standard_normal((n, m)))


def feasible_orthant_subspace(rng, n, m):
    """Random subspace through a strictly positive vector."""
    B = rng.standard_normal((n, m))
    B[:, 0] = rng.uniform(0.2, 1.0, n)
    return Subspace.from_columns(B)


def infeasible_orthant_subspace(rng, n, m):
    """Random subspace orthogonal to a strictly positive vector."""
    w = rng.uniform(0.2, 1.0, n)
    B = rng.standard_normal((n, m))
    B -= np.outer(w, w @ B) / (w @ w)
    return Subspace.from_columns(B)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is not None and mod.LINES:
        terminalreporter.section("acceptance criteria")
        for line in mod.LINES:
            terminalreporter.write_line(line)
