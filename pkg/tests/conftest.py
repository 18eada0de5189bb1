import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from capclosure.fpalg import Subspace
from capclosure.search import sample_subspace
from capclosure.spaces import make_context

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def random_subspace(rng, ambient, p, k=None):
    """Uniform subspace of F_p^ambient; dimension uniform in 0..ambient unless given."""
    if k is None:
        k = int(rng.integers(0, ambient + 1))
    while True:
        m = rng.integers(0, p, size=(k, ambient))
        s = Subspace.from_rows(m, ambient, p)
        if s.dim == k:
            return s


def random_v(rng, ctx, k=None):
    if k is None:
        k = int(rng.integers(0, ctx.dim_v + 1))
    return sample_subspace(ctx, k, rng)


def random_in_coordinates(rng, ctx, cols):
    """Random subspace supported on the given V-coordinates."""
    k = int(rng.integers(0, len(cols) + 1))
    m = np.zeros((k, ctx.dim_v), dtype=np.int64)
    if k:
        m[:, cols] = rng.integers(0, ctx.p, size=(k, len(cols)))
    return Subspace.from_rows(m, ctx.dim_v, ctx.p)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(params=[(3, 3), (4, 3), (4, 5), (5, 3)], ids=lambda t: f"n{t[0]}p{t[1]}")
def ctx(request):
    return make_context(*request.param)


# one line per acceptance criterion, printed at the end of the run
ACCEPTANCE_LINES: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])
