import numpy as np
import pytest
from hypothesis import settings

from clonelab.linalg import density_problems

settings.register_profile("clonelab", max_examples=40, deadline=None, derandomize=True)
settings.load_profile("clonelab")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def assert_density(mat, tol=1e-10):
    problems = density_problems(np.asarray(mat), tol)
    assert not problems, problems
