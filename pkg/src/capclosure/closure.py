"""Star, closure and interior operators for the family ``{phi_u : u in U}``.

A subspace ``X`` of ``V`` corresponds to a class-two exponent-``p`` group
``G``; ``G`` is capable exactly when ``X`` equals its closure, and
``closure(X) / X`` is the epicenter of ``G``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from math import comb
from typing import Iterator, Optional, Sequence

import numpy as np

from . import bounds
from .fpalg import DTYPE, Subspace, intersect, kernel, span
from .spaces import SpaceContext, kernel_subspace, pi_mask

CERTIFICATE_NAMES = (
    "coordinate_shortcut",
    "sufficient_f_bound",
    "precise_f_bound",
    "necessary_bound_violated",
    "direct_computation",
)


# -- generic families ----------------------------------------------------------


def star_family(maps: Sequence[np.ndarray], X: Subspace) -> Subspace:
    """``span(l(X) for l in maps)`` for an arbitrary family of linear maps."""
    codim = maps[0].shape[0]
    if X.dim == 0:
        return Subspace.zero(codim, X.p)
    images = np.vstack([X.basis @ np.asarray(m).T for m in maps])
    return Subspace.from_rows(images, codim, X.p)


def costar_family(maps: Sequence[np.ndarray], Y: Subspace) -> Subspace:
    """``intersection of l^{-1}(Y) for l in maps``."""
    dom = maps[0].shape[1]
    check = Y.parity_check()
    if check.shape[0] == 0:
        return Subspace.full(dom, Y.p)
    return kernel(np.vstack([check @ np.asarray(m) for m in maps]), Y.p, cols=dom)


def closure_family(maps: Sequence[np.ndarray], X: Subspace) -> Subspace:
    return costar_family(maps, star_family(maps, X))


# -- the phi family ------------------------------------------------------------


def star_V(ctx: SpaceContext, X: Subspace) -> Subspace:
    """``X* = span(phi_k(X))`` inside ``W``."""
    ctx.check_v(X)
    if X.dim == 0:
        return ctx.zero_w()
    images = np.einsum("kwv,mv->kmw", ctx.phi, X.basis).reshape(-1, ctx.dim_w)
    return Subspace.from_rows(images, ctx.dim_w, ctx.p)


def star_W(ctx: SpaceContext, Y: Subspace) -> Subspace:
    """``Y* = {v : phi_k(v) in Y for all k}`` inside ``V``."""
    ctx.check_w(Y)
    check = Y.parity_check()
    if check.shape[0] == 0:
        return ctx.full_v()
    stacked = np.einsum("cw,kwv->kcv", check, ctx.phi).reshape(-1, ctx.dim_v)
    return kernel(stacked, ctx.p, cols=ctx.dim_v)


def closure(ctx: SpaceContext, X: Subspace) -> Subspace:
    return star_W(ctx, star_V(ctx, X))


def is_closed(ctx: SpaceContext, X: Subspace) -> bool:
    # closure always contains X, so equal dimension means equal
    return closure(ctx, X).dim == X.dim


def interior(ctx: SpaceContext, Y: Subspace) -> Subspace:
    return star_V(ctx, star_W(ctx, Y))


def is_open(ctx: SpaceContext, Y: Subspace) -> bool:
    return interior(ctx, Y).dim == Y.dim


def z_subspace(ctx: SpaceContext, X: Subspace) -> Subspace:
    """``{u in U : psi_u(U) is contained in X}``."""
    ctx.check_v(X)
    check = X.parity_check()
    if check.shape[0] == 0:
        return Subspace.full(ctx.n, ctx.p)
    # column i holds N_X psi_i flattened over (row of N_X, u_j)
    m = np.einsum("cv,ivj->icj", check, ctx.psi).reshape(ctx.n, -1).T
    return kernel(m, ctx.p, cols=ctx.n)


def c_subspace(ctx: SpaceContext, Y: Subspace) -> Subspace:
    """``{u in U : phi_u(V) is contained in Y}``."""
    ctx.check_w(Y)
    check = Y.parity_check()
    if check.shape[0] == 0:
        return Subspace.full(ctx.n, ctx.p)
    m = np.einsum("cw,kwv->kcv", check, ctx.phi).reshape(ctx.n, -1).T
    return kernel(m, ctx.p, cols=ctx.n)


def power_subspace(ctx: SpaceContext, X: Subspace) -> Subspace:
    """``X^n`` inside ``V^n`` (slot-major coordinates)."""
    ctx.check_v(X)
    d, n = ctx.dim_v, ctx.n
    rows = np.zeros((n * X.dim, n * d), dtype=DTYPE)
    for s in range(n):
        rows[s * X.dim:(s + 1) * X.dim, s * d:(s + 1) * d] = X.basis
    return Subspace.from_rows(rows, n * d, ctx.p)


def kernel_overlap(ctx: SpaceContext, X: Subspace) -> Subspace:
    """``X^n`` intersected with ``ker(Phi)``."""
    return intersect(power_subspace(ctx, X), kernel_subspace(ctx))


def projective_points(n: int, p: int) -> Iterator[tuple[int, ...]]:
    """Normalized representatives (first nonzero coordinate 1) in lexicographic order."""
    for lead in range(n - 1, -1, -1):
        head = (0,) * lead + (1,)
        for tail in product(range(p), repeat=n - lead - 1):
            yield head + tail


def contains_psi_image(ctx: SpaceContext, X: Subspace, chunk: int = 4096) -> Optional[np.ndarray]:
    """First projective ``u`` with ``U ^ u`` inside ``X``, or ``None``."""
    ctx.check_v(X)
    check = X.parity_check()
    points = projective_points(ctx.n, ctx.p)
    if check.shape[0] == 0:
        return np.array(next(points), dtype=DTYPE)
    # A[i] = N_X psi_i; u works iff sum_i u_i A[i] = 0
    a = np.einsum("cv,ivj->icj", check, ctx.psi).reshape(ctx.n, -1)
    while True:
        block = [pt for _, pt in zip(range(chunk), points)]
        if not block:
            return None
        us = np.array(block, dtype=DTYPE)
        hit = np.flatnonzero(~((us @ a) % ctx.p).any(axis=1))
        if hit.size:
            return us[hit[0]]


# -- reports -------------------------------------------------------------------


def is_coordinate_subspace(X: Subspace) -> bool:
    return bool(((X.basis != 0).sum(axis=1) == 1).all()) if X.dim else True


def missing_index(ctx: SpaceContext, X: Subspace) -> Optional[int]:
    """Some ``i`` with ``Pi_i(X) = 0``, if there is one."""
    if X.dim == 0:
        return 1
    support = (X.basis != 0).any(axis=0)
    for i in range(1, ctx.n + 1):
        if not support[pi_mask(ctx, i)].any():
            return i
    return None


@dataclass(frozen=True)
class GroupView:
    rank_Gab: int
    rank_comm: int
    rank_GmodZ: int


@dataclass(frozen=True)
class CapabilityReport:
    n: int
    p: int
    verdict: str
    dim_X: int
    dim_Xstar: int
    dim_Xclosure: int
    epicenter_dim: int
    certificates: tuple
    certificate_states: dict = field(compare=False)
    group_view: GroupView
    dim_Z: int

    @property
    def closed(self) -> bool:
        return self.verdict == "closed"


def capability_report(ctx: SpaceContext, X: Subspace, certified_only: bool = False) -> CapabilityReport:
    """Decide capability of the group attached to ``X``.

    Certificates are recorded whenever they fire. The verdict comes from the
    direct closure computation, except that with ``certified_only`` a
    certificate proving closedness is trusted and the closure is skipped.
    """
    ctx.check_v(X)
    n = ctx.n
    xstar = star_V(ctx, X)
    z = z_subspace(ctx, X)
    states = {name: "inapplicable" for name in CERTIFICATE_NAMES}
    if is_coordinate_subspace(X) or missing_index(ctx, X) is not None:
        states["coordinate_shortcut"] = "positive"
    if bounds.sufficient_closed(n, X.dim):
        states["sufficient_f_bound"] = "positive"
    if bounds.sufficient_closed_precise(n, X.dim, xstar.dim):
        states["precise_f_bound"] = "positive"
    if (n - z.dim) > bounds.necessary_bound(X.codim):
        states["necessary_bound_violated"] = "negative"
    certified_closed = any(v == "positive" for v in states.values())

    if certified_only and certified_closed:
        dim_cl = X.dim
    else:
        dim_cl = star_W(ctx, xstar).dim
        states["direct_computation"] = "positive" if dim_cl == X.dim else "negative"

    fired = tuple(k for k in CERTIFICATE_NAMES if states[k] != "inapplicable")
    return CapabilityReport(
        n=n,
        p=ctx.p,
        verdict="closed" if dim_cl == X.dim else "not_closed",
        dim_X=X.dim,
        dim_Xstar=xstar.dim,
        dim_Xclosure=dim_cl,
        epicenter_dim=dim_cl - X.dim,
        certificates=fired,
        certificate_states=states,
        group_view=GroupView(rank_Gab=n, rank_comm=ctx.dim_v - X.dim, rank_GmodZ=n - z.dim),
        dim_Z=z.dim,
    )


@dataclass(frozen=True)
class WitnessReport:
    """Orders, as powers of ``p``, of ``G`` and of the canonical witness ``H``.

    ``H`` has lower central layers of ranks ``n``, ``dim V`` and
    ``dim W - dim X*``; ``G`` has layers ``n`` and ``dim V - dim X``.
    """

    n: int
    g_exponent: int
    h_exponent: int
    g_layers: tuple
    h_layers: tuple


def witness_report(ctx: SpaceContext, X: Subspace) -> WitnessReport:
    xstar = star_V(ctx, X)
    g_layers = (ctx.n, ctx.dim_v - X.dim)
    h_layers = (ctx.n, ctx.dim_v, ctx.dim_w - xstar.dim)
    return WitnessReport(ctx.n, sum(g_layers), sum(h_layers), g_layers, h_layers)


def expected_kernel_dim(n: int) -> int:
    return comb(n, 3)
