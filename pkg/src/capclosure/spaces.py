"""The spaces U(n), V(n) = U ^ U and W(n), with their preferred bases and maps.

Basis conventions (1-based generator indices, 0-based columns):

* ``V`` has basis ``v_ji = u_j ^ u_i`` for ``1 <= i < j <= n``, ordered by
  ``(i, j)``; ``v_ji`` sits at column ``(i-1)(2n-i)/2 + (j-i-1)``.
* ``W`` has basis ``w_jik`` for ``1 <= i < j <= n`` and ``i <= k <= n``,
  ordered by ``(i, j, k)``.

``phi[k-1]`` is the matrix of ``v -> image of v (x) u_k`` and ``psi[i-1]``
the matrix of ``a -> a ^ u_i``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from math import comb

import numpy as np

from .fpalg import DTYPE, PrimeModulus, Subspace, as_matrix, kernel, rank, span

MIN_N = 2
MAX_N = 12


def pair_index(n: int, j: int, i: int) -> int:
    """Column of ``v_ji`` (requires ``1 <= i < j <= n``)."""
    if not (1 <= i < j <= n):
        raise ValueError(f"v({j},{i}) is not a basis vector of V({n})")
    return (i - 1) * (2 * n - i) // 2 + (j - i - 1)


@dataclass(frozen=True, eq=False)
class SpaceContext:
    """Index schemes and cached matrices for a fixed ``(n, p)``."""

    n: int
    p: int
    pairs: tuple = field(repr=False)
    triples: tuple = field(repr=False)
    triple_index: dict = field(repr=False)
    phi: np.ndarray = field(repr=False)
    psi: np.ndarray = field(repr=False)

    @property
    def dim_u(self) -> int:
        return self.n

    @property
    def dim_v(self) -> int:
        return len(self.pairs)

    @property
    def dim_w(self) -> int:
        return len(self.triples)

    def pair(self, j: int, i: int) -> int:
        return pair_index(self.n, j, i)

    def triple(self, j: int, i: int, k: int) -> int:
        try:
            return self.triple_index[(j, i, k)]
        except KeyError:
            raise ValueError(f"w({j},{i},{k}) is not a basis vector of W({self.n})") from None

    @property
    def big_phi(self) -> np.ndarray:
        """``Phi: V^n -> W`` with slot-major columns ``phi_1 | ... | phi_n``."""
        return _big_phi(self)

    def v_vector(self, j: int, i: int) -> np.ndarray:
        e = np.zeros(self.dim_v, dtype=DTYPE)
        e[self.pair(j, i)] = 1
        return e

    def w_vector(self, j: int, i: int, k: int) -> np.ndarray:
        e = np.zeros(self.dim_w, dtype=DTYPE)
        e[self.triple(j, i, k)] = 1
        return e

    def zero_v(self) -> Subspace:
        return Subspace.zero(self.dim_v, self.p)

    def full_v(self) -> Subspace:
        return Subspace.full(self.dim_v, self.p)

    def zero_w(self) -> Subspace:
        return Subspace.zero(self.dim_w, self.p)

    def full_w(self) -> Subspace:
        return Subspace.full(self.dim_w, self.p)

    def span_v(self, vectors) -> Subspace:
        return span(vectors, self.dim_v, self.p)

    def check_v(self, X: Subspace) -> None:
        if X.ambient_dim != self.dim_v or X.p != self.p:
            raise ValueError(
                f"subspace of F_{X.p}^{X.ambient_dim} is not in V({self.n}) over F_{self.p}"
            )

    def check_w(self, Y: Subspace) -> None:
        if Y.ambient_dim != self.dim_w or Y.p != self.p:
            raise ValueError(
                f"subspace of F_{Y.p}^{Y.ambient_dim} is not in W({self.n}) over F_{self.p}"
            )

    def __repr__(self) -> str:
        return f"SpaceContext(n={self.n}, p={self.p})"


@lru_cache(maxsize=64)
def make_context(n: int, p: int) -> SpaceContext:
    if not isinstance(n, (int, np.integer)) or not (MIN_N <= n <= MAX_N):
        raise ValueError(f"n must be an integer with {MIN_N} <= n <= {MAX_N}, got {n!r}")
    n = int(n)
    p = int(PrimeModulus(p))
    pairs = tuple((j, i) for i in range(1, n + 1) for j in range(i + 1, n + 1))
    triples = tuple(
        (j, i, k) for i in range(1, n + 1) for j in range(i + 1, n + 1) for k in range(i, n + 1)
    )
    tindex = {t: c for c, t in enumerate(triples)}
    dim_v, dim_w = len(pairs), len(triples)

    phi = np.zeros((n, dim_w, dim_v), dtype=DTYPE)
    for k in range(1, n + 1):
        for col, (j, i) in enumerate(pairs):
            for (a, b, c), coeff in _phi_terms(k, j, i):
                phi[k - 1, tindex[(a, b, c)], col] = coeff % p
    psi = np.zeros((n, dim_v, n), dtype=DTYPE)
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            if i < j:
                psi[i - 1, pair_index(n, j, i), j - 1] = 1
            elif i > j:
                psi[i - 1, pair_index(n, i, j), j - 1] = p - 1
    phi.setflags(write=False)
    psi.setflags(write=False)
    return SpaceContext(n, p, pairs, triples, tindex, phi, psi)


def _phi_terms(k: int, j: int, i: int):
    if k >= i:
        return [((j, i, k), 1)]
    return [((j, k, i), 1), ((i, k, j), -1)]


@lru_cache(maxsize=64)
def _big_phi(ctx: SpaceContext) -> np.ndarray:
    m = np.hstack(list(ctx.phi))
    m.setflags(write=False)
    return m


def phi_k_column(ctx: SpaceContext, k: int, j: int, i: int) -> np.ndarray:
    """Image of ``v_ji`` under ``phi_k`` in the preferred basis of ``W``."""
    if not (1 <= k <= ctx.n):
        raise ValueError(f"phi index k={k} out of range 1..{ctx.n}")
    out = np.zeros(ctx.dim_w, dtype=DTYPE)
    for t, coeff in _phi_terms(k, j, i):
        out[ctx.triple(*t)] = coeff % ctx.p
    return out


def psi_i_column(ctx: SpaceContext, i: int, j: int) -> np.ndarray:
    """Image of ``u_j`` under ``psi_i`` (that is, ``u_j ^ u_i``)."""
    if not (1 <= i <= ctx.n and 1 <= j <= ctx.n):
        raise ValueError(f"psi indices ({i},{j}) out of range 1..{ctx.n}")
    return ctx.psi[i - 1][:, j - 1].copy()


def _as_u(ctx: SpaceContext, u) -> np.ndarray:
    vec = np.mod(np.asarray(u, dtype=DTYPE), ctx.p)
    if vec.shape != (ctx.n,):
        raise ValueError(f"expected a vector of U({ctx.n}), got shape {vec.shape}")
    return vec


def phi_u(ctx: SpaceContext, u) -> np.ndarray:
    return np.tensordot(_as_u(ctx, u), ctx.phi, axes=1) % ctx.p


def psi_u(ctx: SpaceContext, u) -> np.ndarray:
    return np.tensordot(_as_u(ctx, u), ctx.psi, axes=1) % ctx.p


def psi_image(ctx: SpaceContext, u) -> Subspace:
    """``psi_u(U) = U ^ u``; of dimension ``n - 1`` for nonzero ``u``."""
    m = psi_u(ctx, u)
    return Subspace.from_rows(m.T, ctx.dim_v, ctx.p)


def wedge(ctx: SpaceContext, a, b) -> np.ndarray:
    """Coordinates of ``a ^ b`` in the ``v`` basis."""
    a = _as_u(ctx, a)
    b = _as_u(ctx, b)
    out = np.zeros(ctx.dim_v, dtype=DTYPE)
    for col, (j, i) in enumerate(ctx.pairs):
        out[col] = a[j - 1] * b[i - 1] - a[i - 1] * b[j - 1]
    return out % ctx.p


@dataclass(frozen=True, eq=False)
class KernelElement:
    """An element ``(v_1, ..., v_n)`` of ``V^n``; rows of ``components``."""

    components: np.ndarray
    p: int
    label: tuple | None = None

    def flat(self) -> np.ndarray:
        return self.components.ravel()

    def component_span(self) -> Subspace:
        return Subspace.from_rows(self.components, self.components.shape[1], self.p)


def component_span(ke: KernelElement) -> Subspace:
    return ke.component_span()


def kernel_basis(ctx: SpaceContext) -> list[KernelElement]:
    """Explicit basis of ``ker(Phi)``, one element per triple ``a < b < c``."""
    out = []
    for a, b, c in combinations(range(1, ctx.n + 1), 3):
        comp = np.zeros((ctx.n, ctx.dim_v), dtype=DTYPE)
        comp[a - 1, ctx.pair(c, b)] = 1
        comp[b - 1, ctx.pair(c, a)] = ctx.p - 1
        comp[c - 1, ctx.pair(b, a)] = 1
        comp.setflags(write=False)
        out.append(KernelElement(comp, ctx.p, (a, b, c)))
    return out


def kernel_subspace(ctx: SpaceContext) -> Subspace:
    """``ker(Phi)`` inside ``V^n`` spanned by :func:`kernel_basis`."""
    basis = kernel_basis(ctx)
    return span([ke.flat() for ke in basis], ctx.n * ctx.dim_v, ctx.p)


def phi_kernel_direct(ctx: SpaceContext) -> Subspace:
    """``ker(Phi)`` by elimination on the matrix of ``Phi``."""
    return kernel(ctx.big_phi, ctx.p)


def proj_pair(ctx: SpaceContext, v, j: int, i: int) -> int:
    vec = np.asarray(v, dtype=DTYPE)
    return int(vec[ctx.pair(j, i)] % ctx.p)


def pi_mask(ctx: SpaceContext, i: int) -> np.ndarray:
    """Boolean mask of the ``v_ab`` coordinates with ``i`` in ``{a, b}``."""
    if not (1 <= i <= ctx.n):
        raise ValueError(f"index {i} out of range 1..{ctx.n}")
    return np.array([i in pr for pr in ctx.pairs])


def proj_Pi(ctx: SpaceContext, v, i: int) -> np.ndarray:
    vec = np.mod(np.asarray(v, dtype=DTYPE), ctx.p)
    return np.where(pi_mask(ctx, i), vec, 0)


def induced_gl_action(ctx: SpaceContext, g) -> np.ndarray:
    """Matrix on ``V`` of ``v_ji -> g(u_j) ^ g(u_i)`` for invertible ``g``."""
    g = as_matrix(g, ctx.p)
    if g.shape != (ctx.n, ctx.n):
        raise ValueError(f"expected an {ctx.n}x{ctx.n} matrix, got {g.shape}")
    if rank(g, ctx.p) != ctx.n:
        raise ValueError("matrix is singular mod p")
    out = np.zeros((ctx.dim_v, ctx.dim_v), dtype=DTYPE)
    for col, (j, i) in enumerate(ctx.pairs):
        out[:, col] = wedge(ctx, g[:, j - 1], g[:, i - 1])
    return out


def orthogonal_complement(ctx: SpaceContext, X: Subspace) -> Subspace:
    ctx.check_v(X)
    return X.annihilator()


def expected_dims(n: int) -> tuple[int, int, int]:
    return n, comb(n, 2), 2 * comb(n + 1, 3)
