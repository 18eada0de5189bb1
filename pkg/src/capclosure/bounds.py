"""Overlap counting functions and the numerical capability certificates."""

from __future__ import annotations

from dataclasses import dataclass
from math import comb, isqrt

from .fpalg import Subspace
from .spaces import SpaceContext


@dataclass(frozen=True)
class TriangularDecomposition:
    """``m = C(T, 2) + s`` with ``0 < s <= T`` (``m = 0`` gives ``T = s = 0``)."""

    m: int
    T: int
    s: int


def triangular_decomposition(m: int) -> TriangularDecomposition:
    if m < 0:
        raise ValueError(f"expected a nonnegative integer, got {m}")
    if m == 0:
        return TriangularDecomposition(0, 0, 0)
    # largest T with C(T, 2) < m
    T = (1 + isqrt(8 * m - 7)) // 2
    while comb(T, 2) >= m:
        T -= 1
    while comb(T + 1, 2) < m:
        T += 1
    return TriangularDecomposition(m, T, m - comb(T, 2))


def r_of_d(d: int) -> int:
    """Largest ``r <= d`` with ``r <= C(d - r, 2)``."""
    if d < 0:
        raise ValueError(f"expected a nonnegative integer, got {d}")
    if d == 0:
        return 0
    dec = triangular_decomposition(d)
    return comb(dec.T - 1, 2) + dec.s - 1


def f_of_m(m: int) -> int:
    """Maximum of ``dim(X^n & ker Phi)`` over ``m``-dimensional ``X``."""
    if m < 0:
        raise ValueError(f"expected a nonnegative integer, got {m}")
    dec = triangular_decomposition(m)
    return comb(dec.T, 3) + comb(dec.s, 2)


def star_dim_bounds(n: int, dim_x: int) -> tuple[int, int]:
    """Lower and upper bounds on ``dim X*`` for ``dim X = dim_x`` in ``V(n)``."""
    if dim_x < 0 or dim_x > comb(n, 2):
        raise ValueError(f"dim X = {dim_x} outside 0..{comb(n, 2)}")
    return n * dim_x - f_of_m(dim_x), min(n * dim_x, 2 * comb(n + 1, 3))


def sufficient_closed(n: int, dim_x: int) -> bool:
    """Every ``dim_x``-dimensional subspace of ``V(n)`` is closed when this holds.

    With ``dim_x = C(T, 2) + s`` and ``0 <= s < T`` the test is
    ``C(T, 3) + C(s + 1, 2) < n``, i.e. ``f(dim_x + 1) < n``.
    """
    return f_of_m(dim_x + 1) < n


def sufficient_closed_precise(n: int, dim_x: int, dim_xstar: int) -> bool:
    deficit = n * dim_x - dim_xstar
    return n + deficit > f_of_m(dim_x + 1)


def sufficient_capable_group(n: int, rank_comm: int) -> bool:
    """Capability from the ranks of ``G^ab`` (``n``) and ``[G, G]``."""
    dim_x = comb(n, 2) - rank_comm
    if dim_x < 0:
        raise ValueError(f"commutator rank {rank_comm} exceeds C({n},2)")
    return sufficient_closed(n, dim_x)


def necessary_bound(k: int) -> int:
    """Largest possible rank of ``G/Z(G)`` for capable ``G`` with ``[G,G]`` of rank ``k``."""
    return 2 * k + comb(k, 2)


def necessary_violated(ctx: SpaceContext, X: Subspace) -> bool:
    """True proves ``X`` is not closed."""
    from .closure import z_subspace

    ctx.check_v(X)
    k = X.codim
    z = z_subspace(ctx, X).dim
    return (ctx.n - z) > necessary_bound(k)


def f_table(m_max: int, m_min: int = 3) -> list[tuple[int, int]]:
    return [(m, f_of_m(m)) for m in range(m_min, m_max + 1)]


def r_table(d_max: int, d_min: int = 0) -> list[tuple[int, int]]:
    return [(d, r_of_d(d)) for d in range(d_min, d_max + 1)]


def format_table(rows: list[tuple[int, int]], head: tuple[str, str]) -> str:
    """Two-column plain-text table: a header line then ``"<x> <y>"`` per row."""
    lines = [f"{head[0]} {head[1]}"]
    lines.extend(f"{a} {b}" for a, b in rows)
    return "\n".join(lines) + "\n"
