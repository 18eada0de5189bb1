"""Subspaces of V realizing standard group constructions, and the n = 5 catalog.

The split at ``r`` separates generators ``1..r`` (small side) from
``r+1..n`` (large side)::

    V_s = <v_ji : j <= r>        V_m = <v_ji : i <= r < j>     V_l = <v_ji : r < i>

Subspaces of ``V_s`` are given in the coordinates of ``V(r)`` and subspaces of
``V_l`` in those of ``V(n - r)`` (generator ``r + t`` becomes ``t``); both
orders agree with the restriction of the order on ``V(n)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from typing import Iterable

import numpy as np

from . import bounds
from .closure import closure
from .fpalg import DTYPE, Subspace, intersect, kernel, rank, span
from .spaces import SpaceContext, make_context, pair_index


def coordinate_subspace(ctx: SpaceContext, pairs: Iterable[tuple[int, int]]) -> Subspace:
    return ctx.span_v([ctx.v_vector(j, i) for j, i in pairs])


# -- split ---------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class SplitContext:
    ctx: SpaceContext
    r: int
    vs: np.ndarray
    vm: np.ndarray
    vl: np.ndarray
    ws: np.ndarray
    wms: np.ndarray
    wml: np.ndarray
    wl: np.ndarray

    @property
    def n(self) -> int:
        return self.ctx.n

    @property
    def p(self) -> int:
        return self.ctx.p

    @property
    def dim_s(self) -> int:
        return len(self.vs)

    @property
    def dim_l(self) -> int:
        return len(self.vl)

    def embed_small(self, rows) -> np.ndarray:
        rows = np.asarray(rows, dtype=DTYPE)
        rows = rows.reshape(rows.size // self.dim_s if self.dim_s else 0, self.dim_s)
        out = np.zeros((rows.shape[0], self.ctx.dim_v), dtype=DTYPE)
        out[:, self.vs] = rows
        return out

    def embed_large(self, rows) -> np.ndarray:
        rows = np.asarray(rows, dtype=DTYPE)
        rows = rows.reshape(rows.size // self.dim_l if self.dim_l else 0, self.dim_l)
        out = np.zeros((rows.shape[0], self.ctx.dim_v), dtype=DTYPE)
        out[:, self.vl] = rows
        return out

    def mixed(self) -> Subspace:
        rows = np.eye(self.ctx.dim_v, dtype=DTYPE)[self.vm]
        return Subspace.from_rows(rows, self.ctx.dim_v, self.p)

    def closure_small(self, X: Subspace) -> Subspace:
        """Closure inside ``V(r)``."""
        return _closure_local(self.r, self.p, X)

    def closure_large(self, X: Subspace) -> Subspace:
        """Closure inside ``V(n - r)``."""
        return _closure_local(self.n - self.r, self.p, X)

    def zero_small(self) -> Subspace:
        return Subspace.zero(self.dim_s, self.p)

    def zero_large(self) -> Subspace:
        return Subspace.zero(self.dim_l, self.p)


def _closure_local(m: int, p: int, X: Subspace) -> Subspace:
    if m < 2:
        # V(1) = 0, nothing to close
        return X
    return closure(make_context(m, p), X)


def split(ctx: SpaceContext, r: int) -> SplitContext:
    n = ctx.n
    if not (1 <= r < n):
        raise ValueError(f"split index must satisfy 1 <= r < n = {n}, got {r}")
    vs, vm, vl = [], [], []
    for col, (j, i) in enumerate(ctx.pairs):
        (vs if j <= r else vl if i > r else vm).append(col)
    ws, wms, wml, wl = [], [], [], []
    for col, (j, i, k) in enumerate(ctx.triples):
        if i > r:
            wl.append(col)
        elif j <= r and k <= r:
            ws.append(col)
        elif j > r and k > r:
            wml.append(col)
        else:
            wms.append(col)
    arr = lambda xs: np.array(xs, dtype=np.intp)
    return SplitContext(ctx, r, arr(vs), arr(vm), arr(vl), arr(ws), arr(wms), arr(wml), arr(wl))


def _check_part(X: Subspace, dim: int, p: int, what: str) -> None:
    if X.ambient_dim != dim or X.p != p:
        raise ValueError(f"{what} must be a subspace of F_{p}^{dim}, got F_{X.p}^{X.ambient_dim}")


def direct_sum_subspace(sp: SplitContext, Xs: Subspace, Xl: Subspace) -> Subspace:
    """``Xs + V_m + Xl``: the direct product of the two groups."""
    _check_part(Xs, sp.dim_s, sp.p, "Xs")
    _check_part(Xl, sp.dim_l, sp.p, "Xl")
    rows = [sp.embed_small(Xs.basis), sp.embed_large(Xl.basis), sp.mixed().basis]
    return Subspace.from_rows(np.vstack(rows), sp.ctx.dim_v, sp.p)


def direct_sum_closure(sp: SplitContext, Xs: Subspace, Xl: Subspace) -> Subspace:
    return direct_sum_subspace(sp, sp.closure_small(Xs), sp.closure_large(Xl))


def coproduct_subspace(sp: SplitContext, Xs: Subspace, Xl: Subspace) -> Subspace:
    """``Xs + Xl``: the 2-nilpotent product of the two groups."""
    _check_part(Xs, sp.dim_s, sp.p, "Xs")
    _check_part(Xl, sp.dim_l, sp.p, "Xl")
    rows = [sp.embed_small(Xs.basis), sp.embed_large(Xl.basis)]
    return Subspace.from_rows(np.vstack(rows), sp.ctx.dim_v, sp.p)


class AmalgamError(ValueError):
    """A precondition of an amalgam construction is violated."""


def _check_amalgam(sp: SplitContext, Xs: Subspace, Xl: Subspace, H: Subspace, images,
                   need_nonzero: bool) -> np.ndarray:
    _check_part(Xs, sp.dim_s, sp.p, "Xs")
    _check_part(Xl, sp.dim_l, sp.p, "Xl")
    _check_part(H, sp.dim_s, sp.p, "H")
    img = np.mod(np.asarray(images, dtype=DTYPE), sp.p).reshape(H.dim, sp.dim_l)
    if need_nonzero:
        if not (2 <= sp.r <= sp.n - 2):
            raise AmalgamError(f"split index must satisfy 2 <= r <= n - 2, got r={sp.r}, n={sp.n}")
        if H.dim == 0:
            raise AmalgamError("H must be nonzero")
    if intersect(H, Xs).dim:
        raise AmalgamError("H meets Xs nontrivially")
    if H.dim and rank(img, sp.p) != H.dim:
        raise AmalgamError("phi is not injective on H")
    phiH = span(list(img), sp.dim_l, sp.p)
    if intersect(phiH, Xl).dim:
        raise AmalgamError("phi(H) meets Xl nontrivially")
    return img


def _diagonal(sp: SplitContext, H: Subspace, img: np.ndarray) -> np.ndarray:
    """Rows ``h - phi(h)`` for the basis of ``H``."""
    return (sp.embed_small(H.basis) - sp.embed_large(img)) % sp.p


def amalgamated_direct_product(sp: SplitContext, Xs: Subspace, Xl: Subspace, H: Subspace,
                               images) -> Subspace:
    """``Xs + Xl + V_m + {h - phi(h)}``; ``images[t]`` is ``phi`` of ``H.basis[t]``.

    Under the preconditions the result is never closed.
    """
    img = _check_amalgam(sp, Xs, Xl, H, images, need_nonzero=True)
    rows = [sp.embed_small(Xs.basis), sp.embed_large(Xl.basis), sp.mixed().basis,
            _diagonal(sp, H, img)]
    return Subspace.from_rows(np.vstack(rows), sp.ctx.dim_v, sp.p)


def amalgamated_direct_product_closure(sp: SplitContext, Xs: Subspace, Xl: Subspace,
                                       H: Subspace, images) -> Subspace:
    img = _check_amalgam(sp, Xs, Xl, H, images, need_nonzero=True)
    small = sp.closure_small(Xs + H)
    large = sp.closure_large(Xl + span(list(img), sp.dim_l, sp.p))
    return direct_sum_subspace(sp, small, large)


def amalgamated_coproduct(sp: SplitContext, Xs: Subspace, Xl: Subspace, H: Subspace,
                          images) -> Subspace:
    """``Xs + Xl + {h - phi(h)}``."""
    img = _check_amalgam(sp, Xs, Xl, H, images, need_nonzero=False)
    rows = [sp.embed_small(Xs.basis), sp.embed_large(Xl.basis), _diagonal(sp, H, img)]
    return Subspace.from_rows(np.vstack(rows), sp.ctx.dim_v, sp.p)


def amalgamated_coproduct_closure(sp: SplitContext, Xs: Subspace, Xl: Subspace, H: Subspace,
                                  images) -> Subspace:
    """``X + {h in H : h in cl_s(Xs) and phi(h) in cl_l(Xl)}``."""
    img = _check_amalgam(sp, Xs, Xl, H, images, need_nonzero=False)
    X = amalgamated_coproduct(sp, Xs, Xl, H, images)
    if H.dim == 0:
        return X
    # coefficient vectors c with c.H in cl_s(Xs) and c.img in cl_l(Xl)
    conds = [
        sp.closure_small(Xs).parity_check() @ H.basis.T,
        sp.closure_large(Xl).parity_check() @ img.T,
    ]
    coeffs = kernel(np.vstack(conds), sp.p, cols=H.dim)
    if coeffs.dim == 0:
        return X
    extra = sp.embed_small(coeffs.basis @ H.basis % sp.p)
    return Subspace.from_rows(np.vstack([X.basis, extra]), sp.ctx.dim_v, sp.p)


# -- named subspaces -----------------------------------------------------------


def extraspecial_subspace(ctx: SpaceContext) -> Subspace:
    """Codimension-one subspace of the extraspecial group of order ``p^(n+1)``.

    Generators are paired as ``(1,2), (3,4), ...``; all paired commutators are
    identified with ``[g2, g1]`` and every other commutator is trivial.
    """
    n = ctx.n
    if n % 2:
        raise ValueError(f"extraspecial groups need an even number of generators, got n={n}")
    pattern = {(2 * t, 2 * t - 1) for t in range(1, n // 2 + 1)}
    rows = [ctx.v_vector(j, i) for j, i in ctx.pairs if (j, i) not in pattern]
    rows += [(ctx.v_vector(2, 1) - ctx.v_vector(2 * t, 2 * t - 1)) % ctx.p
             for t in range(2, n // 2 + 1)]
    return ctx.span_v(rows)


def f_witness(ctx: SpaceContext, m: int) -> Subspace:
    """Coordinate subspace of dimension ``m`` whose overlap dimension is ``f(m)``."""
    if not (0 <= m <= ctx.dim_v):
        raise ValueError(f"m must satisfy 0 <= m <= {ctx.dim_v}, got {m}")
    dec = bounds.triangular_decomposition(m)
    pairs = [(j, i) for i in range(1, dec.T + 1) for j in range(i + 1, dec.T + 1)]
    pairs += [(dec.T + 1, i) for i in range(1, dec.s + 1)]
    return coordinate_subspace(ctx, pairs)


def extend_by_cyclic_factor(ctx: SpaceContext, X: Subspace) -> tuple[SpaceContext, Subspace]:
    """Subspace of ``V(n + 1)`` for ``G x C_p`` with the new generator central."""
    ctx.check_v(X)
    big = make_context(ctx.n + 1, ctx.p)
    rows = np.zeros((X.dim, big.dim_v), dtype=DTYPE)
    for col, (j, i) in enumerate(ctx.pairs):
        rows[:, pair_index(big.n, j, i)] = X.basis[:, col]
    extra = [big.v_vector(big.n, i) for i in range(1, big.n)]
    return big, Subspace.from_rows(np.vstack([rows] + extra), big.dim_v, big.p)


# -- catalog -------------------------------------------------------------------

PARAMETER_RULES = ("none", "least_nonresidue", "least_r_with_cubic_irreducible", "any_nonzero")


class CatalogError(ValueError):
    pass


def least_nonresidue(p: int) -> int:
    squares = {x * x % p for x in range(1, p)}
    for r in range(2, p):
        if r not in squares:
            return r
    raise CatalogError(f"no quadratic nonresidue mod {p}")


def least_r_with_cubic_irreducible(p: int) -> int:
    xs = np.arange(p, dtype=DTYPE)
    for r in range(1, p):
        if ((xs ** 3 + r * xs - 1) % p).all():
            return r
    raise CatalogError(f"no r with x^3 + r x - 1 irreducible mod {p}")


def resolve_parameter(rule: str, p: int) -> int | None:
    if rule == "none":
        return None
    if rule == "least_nonresidue":
        return least_nonresidue(p)
    if rule == "least_r_with_cubic_irreducible":
        return least_r_with_cubic_irreducible(p)
    if rule == "any_nonzero":
        return 1
    raise CatalogError(f"unknown parameter rule {rule!r}")


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    n: int
    dim: int
    generators: tuple
    parameter_rule: str
    expected_verdict: str
    expected_epicenter_dim: int
    item: str

    def subspace(self, p: int) -> Subspace:
        from .io import parse_expression

        ctx = make_context(self.n, p)
        r = resolve_parameter(self.parameter_rule, p)
        vecs = [parse_expression(g, self.n, p).vector(ctx, r) for g in self.generators]
        X = ctx.span_v(vecs)
        if X.dim != self.dim or len(vecs) != self.dim:
            raise CatalogError(
                f"transcription error in {self.name}: {len(vecs)} generators span "
                f"dimension {X.dim} at p={p}, expected {self.dim}"
            )
        return X


def parse_catalog(text: str) -> list[CatalogEntry]:
    entries = []
    header = None
    gens: list[str] = []

    def flush():
        if header is not None:
            entries.append(_entry(header, gens))

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if not any(c in line for c in "(["):
            flush()
            header = (lineno, line.split())
            gens = []
        else:
            if header is None:
                raise CatalogError(f"line {lineno}: generator before any entry header")
            gens.append(line)
    flush()
    return entries


def _entry(header, gens) -> CatalogEntry:
    lineno, fields = header
    if len(fields) not in (6, 7):
        raise CatalogError(f"line {lineno}: expected 6 or 7 header fields, got {len(fields)}")
    name, n, dim, verdict, rule, item = fields[:6]
    epi = 0
    if len(fields) == 7:
        key, _, val = fields[6].partition("=")
        if key != "epicenter" or not val.isdigit():
            raise CatalogError(f"line {lineno}: bad optional field {fields[6]!r}")
        epi = int(val)
    if verdict not in ("closed", "not_closed"):
        raise CatalogError(f"line {lineno}: bad verdict {verdict!r}")
    if rule not in PARAMETER_RULES:
        raise CatalogError(f"line {lineno}: unknown parameter rule {rule!r}")
    return CatalogEntry(name, int(n), int(dim), tuple(gens), rule, verdict, epi, item)


def catalog_n5() -> list[CatalogEntry]:
    text = resources.files("capclosure").joinpath("data/catalog_n5.txt").read_text(encoding="utf-8")
    return parse_catalog(text)


@dataclass(frozen=True)
class CatalogResult:
    entry: CatalogEntry
    p: int
    parameter: int | None
    verdict: str
    epicenter_dim: int

    @property
    def matches(self) -> bool:
        return (self.verdict == self.entry.expected_verdict
                and self.epicenter_dim == self.entry.expected_epicenter_dim)


def verify_catalog(p: int) -> list[CatalogResult]:
    ctx = make_context(5, p)
    out = []
    for e in catalog_n5():
        X = e.subspace(p)
        cl = closure(ctx, X)
        epi = cl.dim - X.dim
        out.append(CatalogResult(e, p, resolve_parameter(e.parameter_rule, p),
                                 "closed" if epi == 0 else "not_closed", epi))
    return out
