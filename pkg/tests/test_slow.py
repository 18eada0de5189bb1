"""Long-running check that f(m) does not depend on n. Run with ``pytest -m slow``."""

import numpy as np
import pytest

from capclosure.bounds import f_of_m
from capclosure.search import BatchClosureChecker, enumerate_cells
from capclosure.spaces import make_context

pytestmark = pytest.mark.slow


def max_overlap(n, p, k):
    """Largest ``dim(X^n ∩ ker Phi)`` over every k-dimensional X, i.e. ``n k - min dim X*``."""
    ctx = make_context(n, p)
    checker = BatchClosureChecker(ctx, k)
    best = 0
    for cell in enumerate_cells(ctx.dim_v, k):
        size = cell.size(p)
        for start in range(0, size, 4096):
            mats = cell.matrices(p, start, min(size, start + 4096))
            if checker.d == 0:
                xstar = np.full(len(mats), ctx.dim_w)
            else:
                xstar, _, _ = checker.check(mats, skip_certified=True)
            best = max(best, n * k - int(xstar.min()))
    return best


@pytest.mark.parametrize("k", range(0, 7))
def test_max_overlap_n4_equals_f(k):
    assert max_overlap(4, 3, k) == f_of_m(k)


@pytest.mark.parametrize("k", [1, 9, 10])
def test_max_overlap_n5_equals_f(k):
    assert max_overlap(5, 3, k) == f_of_m(k)
