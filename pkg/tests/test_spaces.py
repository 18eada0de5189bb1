from itertools import combinations, product
from math import comb

import numpy as np
import pytest

from capclosure.fpalg import Subspace, kernel, rank
from capclosure.spaces import (
    expected_dims,
    induced_gl_action,
    kernel_basis,
    kernel_subspace,
    make_context,
    pair_index,
    phi_k_column,
    phi_kernel_direct,
    phi_u,
    pi_mask,
    proj_Pi,
    psi_i_column,
    psi_image,
    psi_u,
    wedge,
)


def signed_v(ctx, a, b):
    """Coordinates of v_ab for any a != b (v_ab = -v_ba)."""
    return ctx.v_vector(a, b) if a > b else (-ctx.v_vector(b, a)) % ctx.p


@pytest.mark.parametrize("n", range(2, 9))
def test_dimensions(n):
    ctx = make_context(n, 3)
    assert (ctx.dim_u, ctx.dim_v, ctx.dim_w) == expected_dims(n)
    assert ctx.dim_w == 2 * comb(n + 1, 3)


@pytest.mark.parametrize("n", [2, 3, 5, 8])
def test_pair_index_follows_basis_order(n):
    ctx = make_context(n, 3)
    for col, (j, i) in enumerate(ctx.pairs):
        assert pair_index(n, j, i) == col
    assert ctx.pairs == tuple(sorted(ctx.pairs, key=lambda t: (t[1], t[0])))
    assert ctx.triples == tuple(sorted(ctx.triples, key=lambda t: (t[1], t[0], t[2])))


def test_index_errors():
    ctx = make_context(4, 3)
    for bad in [(1, 1), (1, 2), (5, 1), (2, 0)]:
        with pytest.raises(ValueError):
            ctx.pair(*bad)
    with pytest.raises(ValueError):
        ctx.triple(2, 2, 1)
    with pytest.raises(ValueError):
        make_context(1, 3)
    with pytest.raises(ValueError):
        make_context(4, 9)


@pytest.mark.parametrize("n,p", [(2, 3), (3, 5), (4, 3), (6, 7)])
def test_each_phi_k_is_injective_and_phi_is_onto(n, p):
    ctx = make_context(n, p)
    for k in range(n):
        assert rank(ctx.phi[k], p) == ctx.dim_v
    assert rank(ctx.big_phi, p) == ctx.dim_w


def test_phi_column_formula():
    ctx = make_context(4, 5)
    # k >= i: a single basis vector; k < i: a difference of two
    assert (phi_k_column(ctx, 3, 2, 1) == ctx.w_vector(2, 1, 3)).all()
    expected = (ctx.w_vector(4, 1, 3) - ctx.w_vector(3, 1, 4)) % 5
    assert (phi_k_column(ctx, 1, 4, 3) == expected).all()
    for k in range(1, 5):
        for col, (j, i) in enumerate(ctx.pairs):
            assert (ctx.phi[k - 1][:, col] == phi_k_column(ctx, k, j, i)).all()


def test_psi_definition():
    ctx = make_context(4, 3)
    assert (psi_i_column(ctx, 1, 3) == ctx.v_vector(3, 1)).all()
    assert not psi_i_column(ctx, 2, 2).any()
    assert (psi_i_column(ctx, 3, 1) == (-ctx.v_vector(3, 1)) % 3).all()


@pytest.mark.parametrize("n", range(2, 8))
def test_jacobi_on_basis_triples(n):
    for p in (3, 5):
        ctx = make_context(n, p)
        for a, b, c in product(range(1, n + 1), repeat=3):
            if len({a, b, c}) < 2:
                continue
            total = np.zeros(ctx.dim_w, dtype=np.int64)
            for (x, y, z) in ((a, b, c), (b, c, a), (c, a, b)):
                if x != y:
                    total += ctx.phi[z - 1] @ signed_v(ctx, x, y)
            assert not (total % p).any(), (a, b, c)


def test_index_inequalities_on_random_images(rng):
    ctx = make_context(5, 3)
    for _ in range(200):
        k = int(rng.integers(1, 6))
        w = ctx.phi[k - 1] @ rng.integers(0, 3, size=ctx.dim_v) % 3
        for col in np.flatnonzero(w):
            _, s, t = ctx.triples[col]
            assert s <= k <= t
            assert (s < k) + (k < t) <= 1


@pytest.mark.parametrize("n", range(3, 8))
@pytest.mark.parametrize("p", [3, 5])
def test_kernel_two_ways(n, p):
    ctx = make_context(n, p)
    explicit = kernel_subspace(ctx)
    assert explicit.dim == comb(n, 3)
    assert explicit == phi_kernel_direct(ctx)


def test_kernel_elements_avoid_their_slot_index():
    ctx = make_context(6, 3)
    for ke in kernel_basis(ctx):
        assert not (ctx.big_phi @ ke.flat() % 3).any()
        for k in range(1, 7):
            assert not proj_Pi(ctx, ke.components[k - 1], k).any()
        assert ke.component_span().dim == 3


def test_partial_span_formula():
    ctx = make_context(5, 3)
    for size in range(1, 6):
        for S in combinations(range(5), size):
            img = Subspace.from_rows(np.vstack([ctx.phi[k].T for k in S]), ctx.dim_w, 3)
            assert img.dim == size * 10 - comb(size, 3)


def test_wedge_and_psi(rng):
    ctx = make_context(5, 7)
    for _ in range(50):
        a, b, c = rng.integers(0, 7, size=(3, 5))
        assert ((wedge(ctx, a, b) + wedge(ctx, b, a)) % 7 == 0).all()
        assert not wedge(ctx, a, a).any()
        assert ((wedge(ctx, a + c, b) - wedge(ctx, a, b) - wedge(ctx, c, b)) % 7 == 0).all()
        assert (psi_u(ctx, b) @ a % 7 == wedge(ctx, a, b)).all()
        if b.any():
            assert psi_image(ctx, b).dim == 4
        assert phi_u(ctx, a).shape == (ctx.dim_w, ctx.dim_v)


def test_induced_action_is_multiplicative(rng):
    ctx = make_context(4, 5)

    def invertible():
        while True:
            g = rng.integers(0, 5, size=(4, 4))
            if rank(g, 5) == 4:
                return g

    for _ in range(20):
        g, h = invertible(), invertible()
        lhs = induced_gl_action(ctx, g @ h % 5)
        rhs = induced_gl_action(ctx, g) @ induced_gl_action(ctx, h) % 5
        assert (lhs == rhs).all()
    with pytest.raises(ValueError, match="singular"):
        induced_gl_action(ctx, np.zeros((4, 4), dtype=np.int64))


def test_pi_mask_counts():
    ctx = make_context(6, 3)
    for i in range(1, 7):
        assert pi_mask(ctx, i).sum() == 5
