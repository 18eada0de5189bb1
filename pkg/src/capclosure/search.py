"""Enumeration and sampling of subspaces of V with batched closure checks.

The hot loop works on the orthogonal side. With ``A`` a parity check of ``X``
(``d`` rows), every element of ``(X*)^perp`` is ``Phi^T`` of a tuple
``(y_1 A, ..., y_n A)`` that is orthogonal to ``ker(Phi)``. The tuples form
the null space ``S`` of a ``C(n,3) x n*d`` matrix built from ``A`` alone, and
``closure(X)^perp`` is spanned by all slot vectors ``y_k A`` with ``y`` in
``S``. So ``X`` is closed exactly when those slot vectors have rank ``d``.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations
from pathlib import Path
from typing import Iterator, Optional, Sequence

import numpy as np

from . import bounds
from .closure import closure, projective_points, star_V, z_subspace
from .fpalg import DTYPE, Subspace, batched_nullspace, batched_rank, batched_rref, rank
from .spaces import SpaceContext, make_context

BLOCK = 2048
ENV_MAX_INSTANCES = "CAP_MAX_INSTANCES"


# -- cells and enumeration -----------------------------------------------------


@dataclass(frozen=True)
class PivotPattern:
    """Pivot columns of an RREF ``k x dim`` matrix; one Schubert cell of ``Gr(k, dim)``."""

    pivots: tuple
    dim: int

    @property
    def k(self) -> int:
        return len(self.pivots)

    def free_positions(self) -> list[tuple[int, int]]:
        piv = set(self.pivots)
        return [(t, c) for t, pc in enumerate(self.pivots)
                for c in range(pc + 1, self.dim) if c not in piv]

    @property
    def free_count(self) -> int:
        k = self.k
        return sum(self.dim - 1 - pc - (k - 1 - t) for t, pc in enumerate(self.pivots))

    def size(self, p: int) -> int:
        return p ** self.free_count

    def label(self) -> str:
        return ",".join(map(str, self.pivots))

    def matrices(self, p: int, start: int = 0, stop: Optional[int] = None) -> np.ndarray:
        """RREF matrices with odometer indices ``start..stop`` (last free entry fastest)."""
        stop = self.size(p) if stop is None else stop
        free = self.free_positions()
        count = max(stop - start, 0)
        out = np.zeros((count, self.k, self.dim), dtype=DTYPE)
        out[:, range(self.k), list(self.pivots)] = 1
        if free and count:
            idx = np.arange(start, stop, dtype=np.int64)
            rows, cols = zip(*free)
            for pos in range(len(free) - 1, -1, -1):
                out[:, rows[pos], cols[pos]] = idx % p
                idx //= p
        return out


def enumerate_cells(dim: int, k: int) -> Iterator[PivotPattern]:
    """All ``C(dim, k)`` pivot patterns in colexicographic order."""
    if not (0 <= k <= dim):
        raise ValueError(f"need 0 <= k <= dim, got k={k}, dim={dim}")
    c = list(range(k))
    while True:
        yield PivotPattern(tuple(c), dim)
        j = 0
        while j < k and c[j] + 1 == (c[j + 1] if j + 1 < k else dim):
            j += 1
        if j == k:
            return
        c[j] += 1
        c[:j] = range(j)


def gaussian_binomial(dim: int, k: int, p: int) -> int:
    if not (0 <= k <= dim):
        return 0
    num = den = 1
    for t in range(k):
        num *= p ** (dim - t) - 1
        den *= p ** (t + 1) - 1
    return num // den


def enumerate_subspaces(ctx: SpaceContext, k: int) -> Iterator[Subspace]:
    for cell in enumerate_cells(ctx.dim_v, k):
        total = cell.size(ctx.p)
        for start in range(0, total, BLOCK):
            for m in cell.matrices(ctx.p, start, min(start + BLOCK, total)):
                yield Subspace(m, cell.pivots, ctx.dim_v, ctx.p)


# -- sampling ------------------------------------------------------------------


def index_generator(seed: int, index: int) -> np.random.Generator:
    """Counter-based stream: sample ``index`` depends only on ``(seed, index)``."""
    return np.random.Generator(np.random.Philox(key=int(seed), counter=[0, 0, int(index), 0]))


def sample_subspace(ctx: SpaceContext, k: int, rng: np.random.Generator) -> Subspace:
    """Uniform ``k``-dimensional subspace: row space of a uniform rank-``k`` matrix."""
    if not (0 <= k <= ctx.dim_v):
        raise ValueError(f"need 0 <= k <= {ctx.dim_v}, got {k}")
    while True:
        m = rng.integers(0, ctx.p, size=(k, ctx.dim_v), dtype=DTYPE)
        if rank(m, ctx.p) == k:
            return Subspace.from_rows(m, ctx.dim_v, ctx.p)


def _sample_block(ctx: SpaceContext, k: int, seed: int, start: int, stop: int) -> np.ndarray:
    """Full-rank ``k x dim`` matrices for indices ``start..stop`` (not reduced)."""
    gens = [index_generator(seed, i) for i in range(start, stop)]
    mats = np.stack([g.integers(0, ctx.p, size=(k, ctx.dim_v), dtype=DTYPE) for g in gens]) \
        if gens else np.zeros((0, k, ctx.dim_v), dtype=DTYPE)
    if k and len(gens):
        bad = np.flatnonzero(batched_rank(mats, ctx.p) < k)
        for b in bad:
            # continue the same stream, as sample_subspace would
            while rank(mats[b], ctx.p) < k:
                mats[b] = gens[b].integers(0, ctx.p, size=(k, ctx.dim_v), dtype=DTYPE)
    return mats


def sample_for_index(ctx: SpaceContext, k: int, seed: int, index: int) -> Subspace:
    return sample_subspace(ctx, k, index_generator(seed, index))


# -- batched closure check -----------------------------------------------------


class BatchClosureChecker:
    """Closure dimensions for many ``k``-dimensional subspaces at once."""

    def __init__(self, ctx: SpaceContext, k: int):
        self.ctx = ctx
        self.k = k
        self.d = ctx.dim_v - k
        n = ctx.n
        triples = list(combinations(range(1, n + 1), 3))
        # kernel element (a,b,c): slot a v_cb, slot b -v_ca, slot c v_ba
        self._slots = []
        for row, (a, b, c) in enumerate(triples):
            self._slots.append((row, a - 1, ctx.pair(c, b), 1))
            self._slots.append((row, b - 1, ctx.pair(c, a), -1))
            self._slots.append((row, c - 1, ctx.pair(b, a), 1))
        self.n_eq = len(triples)

    def parity_checks(self, mats: np.ndarray) -> np.ndarray:
        """``(B, d, dim)`` parity checks of the row spaces of full-rank ``(B, k, dim)`` stacks."""
        p, dim, k = self.ctx.p, self.ctx.dim_v, self.k
        if k == 0:
            return np.broadcast_to(np.eye(dim, dtype=DTYPE), (len(mats), dim, dim)).copy()
        red, piv, _ = batched_rref(mats, p)
        null, _ = batched_nullspace(red, piv, np.full(len(mats), k), p)
        return null[:, : self.d]

    def dual_system(self, checks: np.ndarray) -> np.ndarray:
        """``(B, C(n,3), n*d)`` matrix whose null space parametrizes ``(X*)^perp``."""
        nb, d = checks.shape[0], self.d
        m = np.zeros((nb, self.n_eq, self.ctx.n, d), dtype=DTYPE)
        for row, slot, col, sign in self._slots:
            m[:, row, slot, :] += sign * checks[:, :, col]
        return np.mod(m.reshape(nb, self.n_eq, self.ctx.n * d), self.ctx.p)

    def star_dims(self, ranks: np.ndarray) -> np.ndarray:
        """``dim X*`` from the rank of the dual system."""
        return self.ctx.dim_w - self.ctx.n * self.d + ranks

    def check(self, mats: np.ndarray, skip_certified: bool = False):
        """Return ``(dim X*, dim closure, certified)`` arrays for a stack of bases.

        With ``skip_certified`` the closure of instances proven closed by the
        precise overlap bound is not computed (reported as ``dim X``).
        """
        ctx, p, d, n = self.ctx, self.ctx.p, self.d, self.ctx.n
        nb = len(mats)
        if d == 0:
            full = np.full(nb, ctx.dim_v)
            return np.full(nb, ctx.dim_w), full, np.ones(nb, dtype=bool)
        checks = self.parity_checks(mats)
        red, piv, ranks = batched_rref(self.dual_system(checks), p)
        xstar = self.star_dims(ranks)
        certified = np.array([bounds.sufficient_closed_precise(n, self.k, int(s)) for s in xstar]) \
            if nb else np.zeros(0, dtype=bool)
        dim_cl = np.full(nb, self.k)
        todo = np.flatnonzero(~certified) if skip_certified else np.arange(nb)
        if todo.size:
            null, dims = batched_nullspace(red[todo], piv[todo], ranks[todo], p)
            # every null vector contributes its n slot vectors y_k in F_p^d
            top = int(dims.max())
            slots = null[:, :top].reshape(todo.size, top * n, d)
            perp = batched_rref(slots, p, max_rank=d)[2]
            dim_cl[todo] = ctx.dim_v - perp
        return xstar, dim_cl, certified


# -- orbit invariants ----------------------------------------------------------


def orbit_fingerprint(ctx: SpaceContext, X: Subspace) -> tuple:
    """Invariants of ``X`` under the induced ``GL(n, p)`` action.

    ``(dim X, dim X*, dim closure, dim Z, histogram)`` where the histogram
    counts projective points ``u`` by ``dim(X & (U ^ u))`` as sorted
    ``(dimension, count)`` pairs.
    """
    ctx.check_v(X)
    xstar = star_V(ctx, X)
    cl = closure(ctx, X)
    z = z_subspace(ctx, X)
    pts = np.array(list(projective_points(ctx.n, ctx.p)), dtype=DTYPE)
    check = X.parity_check()
    if check.shape[0] == 0:
        meet = np.full(len(pts), ctx.n - 1)
    else:
        aps = np.einsum("cv,ivj->icj", check, ctx.psi)
        stack = np.tensordot(pts, aps, axes=1) % ctx.p
        meet = (ctx.n - 1) - batched_rank(stack, ctx.p)
    vals, counts = np.unique(meet, return_counts=True)
    hist = tuple(zip(vals.tolist(), counts.tolist()))
    return (X.dim, xstar.dim, cl.dim, z.dim, hist)


# -- scan ----------------------------------------------------------------------


@dataclass(frozen=True)
class SearchRecord:
    basis: tuple
    dim_closure: int
    epicenter_dim: int
    source: str

    def subspace(self, ctx: SpaceContext) -> Subspace:
        rows = np.array(self.basis, dtype=DTYPE).reshape(len(self.basis), ctx.dim_v)
        return Subspace.from_rows(rows, ctx.dim_v, ctx.p)

    @property
    def sort_key(self) -> tuple:
        return (len(self.basis), tuple(x for row in self.basis for x in row), self.source)


@dataclass
class ScanSummary:
    mode: str
    n: int
    p: int
    dim: int
    seed: Optional[int]
    planned: int
    checked: int = 0
    certificate_skipped: int = 0
    non_closed: int = 0
    truncated: bool = False

    def add(self, checked: int, skipped: int, hits: int) -> None:
        self.checked += checked
        self.certificate_skipped += skipped
        self.non_closed += hits

    def lines(self) -> list[str]:
        return [
            f"mode={self.mode}",
            f"n={self.n} p={self.p} dim={self.dim}" + (f" seed={self.seed}" if self.seed is not None else ""),
            f"planned={self.planned}",
            f"checked={self.checked}",
            f"certificate_skipped={self.certificate_skipped}",
            f"non_closed={self.non_closed}",
            f"truncated={'yes' if self.truncated else 'no'}",
        ]


@dataclass(frozen=True)
class WorkUnit:
    """Cell ``cell`` (exhaustive) or sample block (random), instances ``start..stop``."""

    key: str
    start: int
    stop: int
    cell: Optional[tuple] = None
    complete: bool = True


@dataclass(frozen=True)
class UnitResult:
    key: str
    checked: int
    skipped: int
    records: tuple
    complete: bool


@dataclass
class ScanResult:
    summary: ScanSummary
    records: list = field(default_factory=list)


def _max_instances(limit: Optional[int]) -> Optional[int]:
    if limit is not None:
        return limit
    raw = os.environ.get(ENV_MAX_INSTANCES)
    if raw is None or raw.strip() == "":
        return None
    try:
        value = int(raw)
    except ValueError:
        raise ValueError(f"{ENV_MAX_INSTANCES} must be an integer, got {raw!r}") from None
    if value < 0:
        raise ValueError(f"{ENV_MAX_INSTANCES} must be nonnegative, got {value}")
    return value


def plan_units(ctx: SpaceContext, k: int, mode: str, count: Optional[int], cap: Optional[int],
               block: int = BLOCK) -> tuple[list[WorkUnit], int, bool]:
    """Work units in canonical order, the planned total, and whether the cap truncated it."""
    units = []
    budget = cap
    if mode == "exhaustive":
        planned = gaussian_binomial(ctx.dim_v, k, ctx.p)
        for cell in enumerate_cells(ctx.dim_v, k):
            size = cell.size(ctx.p)
            take = size if budget is None else min(size, budget)
            if take <= 0:
                break
            units.append(WorkUnit(f"cell {cell.label()}", 0, take, cell.pivots, take == size))
            if budget is not None:
                budget -= take
    elif mode == "random":
        if count is None or count < 0:
            raise ValueError("random mode needs a nonnegative sample count")
        planned = count
        total = count if budget is None else min(count, budget)
        for start in range(0, total, block):
            stop = min(start + block, total)
            units.append(WorkUnit(f"block {start} {stop}", start, stop))
    else:
        raise ValueError(f"unknown mode {mode!r}")
    done = sum(u.stop - u.start for u in units)
    return units, planned, done < planned


_worker_state: dict = {}


def _init_worker(n: int, p: int, k: int, mode: str, seed: int, certified_only: bool) -> None:
    ctx = make_context(n, p)
    _worker_state.update(ctx=ctx, k=k, mode=mode, seed=seed, certified_only=certified_only,
                         checker=BatchClosureChecker(ctx, k))


def _run_unit(unit: WorkUnit) -> UnitResult:
    st = _worker_state
    ctx, k, checker = st["ctx"], st["k"], st["checker"]
    records = []
    checked = skipped = 0
    for lo in range(unit.start, unit.stop, BLOCK):
        hi = min(lo + BLOCK, unit.stop)
        if st["mode"] == "exhaustive":
            cell = PivotPattern(unit.cell, ctx.dim_v)
            mats = cell.matrices(ctx.p, lo, hi)
        else:
            mats = _sample_block(ctx, k, st["seed"], lo, hi)
        _, dim_cl, certified = checker.check(mats, skip_certified=st["certified_only"])
        checked += hi - lo
        if st["certified_only"]:
            skipped += int(certified.sum())
        for b in np.flatnonzero(dim_cl > k):
            X = Subspace.from_rows(mats[b], ctx.dim_v, ctx.p)
            if st["mode"] == "exhaustive":
                source = f"cell={','.join(map(str, unit.cell))}:{lo + b}"
            else:
                source = f"seed={st['seed']}:index={lo + b}"
            records.append(SearchRecord(tuple(map(tuple, X.basis.tolist())), int(dim_cl[b]),
                                        int(dim_cl[b]) - k, source))
    return UnitResult(unit.key, checked, skipped, tuple(records), unit.complete)


def scan(ctx: SpaceContext, k: int, mode: str = "exhaustive", count: Optional[int] = None,
         workers: int = 1, seed: int = 0, certified_only: bool = False,
         checkpoint: Optional[str | Path] = None, max_instances: Optional[int] = None) -> ScanResult:
    """Check every planned instance and record the non-closed ones.

    Output (summary and records sorted by canonical basis) depends only on
    ``(ctx, k, mode, count, seed, certified_only)`` and the instance cap, not on
    ``workers``. With ``checkpoint``, completed units are appended to the file
    and skipped on a later call with the same arguments.
    """
    if not (0 <= k <= ctx.dim_v):
        raise ValueError(f"dimension must satisfy 0 <= k <= {ctx.dim_v}, got {k}")
    if workers < 1:
        raise ValueError(f"workers must be positive, got {workers}")
    cap = _max_instances(max_instances)
    units, planned, truncated = plan_units(ctx, k, mode, count, cap)
    summary = ScanSummary(mode, ctx.n, ctx.p, k, seed if mode == "random" else None, planned,
                          truncated=truncated)
    done: dict[str, UnitResult] = {}
    if checkpoint is not None:
        done = read_checkpoint(checkpoint, ctx)
    todo = [u for u in units if u.key not in done]
    init = (ctx.n, ctx.p, k, mode, seed, certified_only)

    results: dict[str, UnitResult] = {u.key: done[u.key] for u in units if u.key in done}
    ckpt = open(checkpoint, "a", encoding="utf-8") if checkpoint is not None else None
    try:
        if workers == 1 or len(todo) <= 1:
            _init_worker(*init)
            stream = map(_run_unit, todo)
            pool = None
        else:
            pool = ProcessPoolExecutor(max_workers=workers, initializer=_init_worker, initargs=init)
            stream = pool.map(_run_unit, todo)
        for res in stream:
            results[res.key] = res
            if ckpt is not None and res.complete:
                ckpt.write(format_checkpoint_entry(res))
                ckpt.flush()
        if pool is not None:
            pool.shutdown()
    finally:
        if ckpt is not None:
            ckpt.close()

    records = []
    for u in units:
        res = results[u.key]
        summary.add(res.checked, res.skipped, len(res.records))
        records.extend(res.records)
    records.sort(key=lambda r: r.sort_key)
    return ScanResult(summary, records)


# -- files ---------------------------------------------------------------------


def format_checkpoint_entry(res: UnitResult) -> str:
    lines = [f"hit {' '.join(str(x) for row in r.basis for x in row)} "
             f"dim_closure={r.dim_closure} source={r.source}" for r in res.records]
    lines.append(f"{res.key} done checked={res.checked} skipped={res.skipped}")
    return "\n".join(lines) + "\n"


def read_checkpoint(path, ctx: SpaceContext) -> dict[str, UnitResult]:
    """Completed units of an earlier run; hits of an unfinished unit are discarded."""
    path = Path(path)
    if not path.exists():
        return {}
    out: dict[str, UnitResult] = {}
    pending: list[SearchRecord] = []
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        parts = line.split()
        if not parts:
            continue
        try:
            if parts[0] == "hit":
                fields = dict(t.split("=", 1) for t in parts if "=" in t)
                nums = [int(t) for t in parts[1:] if "=" not in t]
                k = len(nums) // ctx.dim_v
                basis = tuple(tuple(nums[i * ctx.dim_v:(i + 1) * ctx.dim_v]) for i in range(k))
                dcl = int(fields["dim_closure"])
                pending.append(SearchRecord(basis, dcl, dcl - k, fields["source"]))
            elif "done" in parts:
                at = parts.index("done")
                key = " ".join(parts[:at])
                fields = dict(t.split("=", 1) for t in parts[at + 1:])
                out[key] = UnitResult(key, int(fields.get("checked", 0)), int(fields.get("skipped", 0)),
                                      tuple(pending), True)
                pending = []
            else:
                raise ValueError(line)
        except (ValueError, KeyError):
            raise ValueError(f"{path}:{lineno}: malformed checkpoint line") from None
    return out


def format_records(records: Sequence[SearchRecord]) -> str:
    out = []
    for r in records:
        out.append("record")
        out.extend(" ".join(map(str, row)) for row in r.basis)
        out.append(f"dim_closure={r.dim_closure}")
        out.append(f"epicenter_dim={r.epicenter_dim}")
        out.append(f"source={r.source}")
        out.append("")
    return "\n".join(out)


def parse_records(text: str) -> list[SearchRecord]:
    records = []
    for stanza in text.split("\n\n"):
        lines = [ln for ln in stanza.splitlines() if ln.strip()]
        if not lines:
            continue
        if lines[0] != "record":
            raise ValueError(f"expected 'record', got {lines[0]!r}")
        rows = [tuple(int(x) for x in ln.split()) for ln in lines[1:] if "=" not in ln]
        kv = dict(ln.split("=", 1) for ln in lines[1:] if "=" in ln)
        records.append(SearchRecord(tuple(rows), int(kv["dim_closure"]), int(kv["epicenter_dim"]),
                                    kv["source"]))
    return records
