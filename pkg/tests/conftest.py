"""Shared fixtures: benchmark problem builders and common instances."""

import numpy as np
import pytest

from gvikit import GviProblem, ProblemSpec, build_problem
from gvikit.sets import Box, WholeSpace


@pytest.fixture
def example2():
    return build_problem(ProblemSpec("example2"))


@pytest.fixture
def example3_2():
    return build_problem(ProblemSpec("example3", n=2))


@pytest.fixture
def example3_10():
    return build_problem(ProblemSpec("example3", n=10))


@pytest.fixture
def example4_2():
    return build_problem(ProblemSpec("example4", n=2))


@pytest.fixture
def example4_5():
    return build_problem(ProblemSpec("example4", n=5))


@pytest.fixture
def example4_10():
    return build_problem(ProblemSpec("example4", n=10))


@pytest.fixture
def zero_operator_problem():
    # T = 0 over a box: every feasible point is a solution.
    n = 3
    return GviProblem(dim=n, T=lambda x: np.zeros(n), K=Box(np.zeros(n), np.ones(n)))


@pytest.fixture
def rotation_problem():
    # Monotone but not strongly monotone: plain projection diverges,
    # the extragradient corrector converges to the origin.
    return GviProblem(
        dim=2,
        T=lambda u: np.array([u[1], -u[0]]),
        K=WholeSpace(),
        known_solution=np.zeros(2),
    )
