from math import comb

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from capclosure import bounds
from capclosure.closure import (
    c_subspace,
    capability_report,
    closure,
    closure_family,
    contains_psi_image,
    interior,
    is_closed,
    is_open,
    kernel_overlap,
    missing_index,
    projective_points,
    star_V,
    star_W,
    witness_report,
    z_subspace,
)
from capclosure.constructions import extraspecial_subspace
from capclosure.fpalg import Subspace, apply, rank
from capclosure.spaces import induced_gl_action, make_context, pi_mask, psi_image

from conftest import random_in_coordinates, random_subspace, random_v

contexts = st.sampled_from([(3, 3), (4, 3), (4, 5), (5, 3)]).map(lambda t: make_context(*t))
seeds = st.integers(0, 2**32 - 1)


@given(contexts, seeds)
def test_closure_laws(ctx, seed):
    rng = np.random.default_rng(seed)
    X = random_v(rng, ctx)
    cl = closure(ctx, X)
    assert X <= cl
    assert closure(ctx, cl) == cl
    assert star_V(ctx, cl) == star_V(ctx, X)
    bigger = X + random_v(rng, ctx, int(rng.integers(0, 3)))
    assert cl <= closure(ctx, bigger)


@given(contexts, seeds)
def test_interior_laws(ctx, seed):
    rng = np.random.default_rng(seed)
    Y = random_subspace(rng, ctx.dim_w, ctx.p)
    it = interior(ctx, Y)
    assert it <= Y
    assert interior(ctx, it) == it
    assert star_W(ctx, it) == star_W(ctx, Y)
    smaller = Subspace.from_rows(Y.basis[: max(Y.dim - 2, 0)], ctx.dim_w, ctx.p)
    assert interior(ctx, smaller) <= it


@given(contexts, seeds)
def test_star_is_additive_and_counts_overlap(ctx, seed):
    rng = np.random.default_rng(seed)
    A, B = random_v(rng, ctx), random_v(rng, ctx)
    assert star_V(ctx, A + B) == star_V(ctx, A) + star_V(ctx, B)
    assert star_V(ctx, A).dim == ctx.n * A.dim - kernel_overlap(ctx, A).dim


@given(contexts, seeds)
def test_projection_lemmas(ctx, seed):
    rng = np.random.default_rng(seed)
    drop = rng.choice(ctx.dim_v, size=int(rng.integers(1, ctx.dim_v)), replace=False)
    keep = np.setdiff1d(np.arange(ctx.dim_v), drop)
    X = random_in_coordinates(rng, ctx, keep)
    cl = closure(ctx, X)
    for col in drop:
        if not X.basis[:, col].any():
            assert not cl.basis[:, col].any()
    i = int(rng.integers(1, ctx.n + 1))
    Xi = random_in_coordinates(rng, ctx, np.flatnonzero(~pi_mask(ctx, i)))
    assert missing_index(ctx, Xi) is not None
    assert is_closed(ctx, Xi)


@given(contexts, seeds)
def test_interior_determines_star(ctx, seed):
    rng = np.random.default_rng(seed)
    Y = random_subspace(rng, ctx.dim_w, ctx.p)
    it = interior(ctx, Y)
    # any Y' between interior(Y) and Y has the same interior and the same star
    extra = Subspace.from_rows(Y.basis[: int(rng.integers(0, Y.dim + 1))], ctx.dim_w, ctx.p)
    Y2 = it + extra
    assert interior(ctx, Y2) == it
    assert star_W(ctx, Y2) == star_W(ctx, Y)


@given(contexts, seeds)
def test_closedness_is_gl_invariant(ctx, seed):
    rng = np.random.default_rng(seed)
    while True:
        g = rng.integers(0, ctx.p, size=(ctx.n, ctx.n))
        if rank(g, ctx.p) == ctx.n:
            break
    act = induced_gl_action(ctx, g)
    X = random_v(rng, ctx)
    gX = apply(act, X)
    assert is_closed(ctx, X) == is_closed(ctx, gX)
    assert closure(ctx, gX) == apply(act, closure(ctx, X))


def test_generic_family_route_matches(rng):
    ctx = make_context(4, 3)
    for _ in range(30):
        X = random_v(rng, ctx)
        assert closure_family(list(ctx.phi), X) == closure(ctx, X)


@given(contexts, seeds)
def test_heineken_nikolova_and_z_in_c(ctx, seed):
    rng = np.random.default_rng(seed)
    Y = random_subspace(rng, ctx.dim_w, ctx.p)
    X = star_W(ctx, Y)
    z, c = z_subspace(ctx, X), c_subspace(ctx, Y)
    k = X.codim
    assert ctx.n - z.dim <= 2 * k + comb(k, 2)
    assert z <= c


def test_codim_one_equal_codims(rng):
    ctx = make_context(4, 3)
    for _ in range(60):
        Y = random_subspace(rng, ctx.dim_w, 3, ctx.dim_w - 1)
        X = star_W(ctx, Y)
        assert X.codim == ctx.n - c_subspace(ctx, Y).dim


def test_star_examples(rng):
    for n in (3, 4, 5):
        ctx = make_context(n, 3)
        assert star_V(ctx, ctx.zero_v()).dim == 0
        assert star_W(ctx, ctx.full_w()) == ctx.full_v()
        assert star_W(ctx, ctx.zero_w()) == ctx.zero_v()
        for _ in range(100):
            assert star_V(ctx, random_v(rng, ctx, 1)).dim == n
            assert star_V(ctx, random_v(rng, ctx, 2)).dim == 2 * n


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_trivial_subspaces_closed_and_open(n):
    ctx = make_context(n, 3)
    assert is_closed(ctx, ctx.zero_v()) and is_closed(ctx, ctx.full_v())
    assert is_open(ctx, ctx.zero_w()) and is_open(ctx, ctx.full_w())


def test_report_examples():
    three = make_context(3, 3)
    assert capability_report(three, three.zero_v()).verdict == "closed"
    two = make_context(2, 5)
    assert capability_report(two, two.zero_v()).closed
    ctx = make_context(4, 3)
    E = extraspecial_subspace(ctx)
    rep = capability_report(ctx, E)
    assert rep.verdict == "not_closed" and rep.epicenter_dim == 1
    assert rep.group_view.rank_comm == 1 and rep.dim_Z == 0
    assert "necessary_bound_violated" in rep.certificates
    assert z_subspace(ctx, E).dim == 0


def test_certified_only_skips_direct_check_only_when_proven_closed(rng):
    ctx = make_context(4, 3)
    X = ctx.span_v([ctx.v_vector(2, 1)])
    rep = capability_report(ctx, X, certified_only=True)
    assert rep.closed and "direct_computation" not in rep.certificates
    rep = capability_report(ctx, extraspecial_subspace(ctx), certified_only=True)
    assert rep.certificate_states["direct_computation"] == "negative"


@given(contexts, seeds)
def test_certificates_are_sound(ctx, seed):
    rng = np.random.default_rng(seed)
    X = random_v(rng, ctx)
    rep = capability_report(ctx, X)
    positives = [k for k, v in rep.certificate_states.items() if v == "positive" and k != "direct_computation"]
    if positives:
        assert rep.closed
    if rep.certificate_states["necessary_bound_violated"] == "negative":
        assert not rep.closed
    assert rep.epicenter_dim == rep.dim_Xclosure - rep.dim_X >= 0
    assert bounds.sufficient_closed(ctx.n, X.dim) <= rep.closed


def test_kernel_overlap_examples(rng):
    ctx = make_context(4, 3)
    assert kernel_overlap(ctx, ctx.full_v()).dim == 4
    for _ in range(50):
        assert kernel_overlap(ctx, random_v(rng, ctx, int(rng.integers(0, 3)))).dim == 0


def test_contains_psi_image():
    ctx = make_context(4, 3)
    e1 = psi_image(ctx, [1, 0, 0, 0])
    assert tuple(contains_psi_image(ctx, e1)) == (1, 0, 0, 0)
    assert contains_psi_image(ctx, ctx.zero_v()) is None
    pts = list(projective_points(4, 3))
    assert len(pts) == (3**4 - 1) // 2 and pts == sorted(pts)
    assert all(next(x for x in pt if x) == 1 for pt in pts)


def test_witness_examples():
    two = make_context(2, 3)
    w = witness_report(two, two.zero_v())
    assert (w.g_exponent, w.h_exponent) == (3, 5)
    ctx = make_context(4, 3)
    assert witness_report(ctx, extraspecial_subspace(ctx)).g_exponent == 5
    assert witness_report(ctx, ctx.full_v()).g_exponent == 4


def test_ambient_mismatch():
    ctx = make_context(4, 3)
    with pytest.raises(ValueError):
        closure(ctx, make_context(5, 3).zero_v())
    with pytest.raises(ValueError):
        star_W(ctx, ctx.zero_v())
