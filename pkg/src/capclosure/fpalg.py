"""Dense linear algebra over the prime field F_p.

Matrices are plain ``numpy`` integer arrays with entries in ``[0, p)``.
Linear maps act on column vectors, so a map from ``F_p^d`` to ``F_p^c`` is a
``(c, d)`` array. Subspaces are stored by their reduced row-echelon basis,
which is the canonical representative of a point of the Grassmannian.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

DTYPE = np.int64
MAX_PRIME = 1 << 16


class PrimeModulus(int):
    """An odd prime ``3 <= p < 2**16``; behaves as a plain ``int``."""

    def __new__(cls, p):
        try:
            value = int(p)
        except (TypeError, ValueError):
            raise ValueError(f"modulus must be an integer, got {p!r}") from None
        if isinstance(p, float) and p != value:
            raise ValueError(f"modulus must be an integer, got {p!r}")
        if value < 3 or value >= MAX_PRIME:
            raise ValueError(f"modulus must satisfy 3 <= p < 2**16, got {value}")
        if value % 2 == 0 or not _is_prime(value):
            raise ValueError(f"modulus must be an odd prime, got {value}")
        return super().__new__(cls, value)


def _is_prime(m: int) -> bool:
    if m < 2:
        return False
    d = 2
    while d * d <= m:
        if m % d == 0:
            return False
        d += 1
    return True


@lru_cache(maxsize=None)
def inverse_table(p: int) -> np.ndarray:
    """``inv[a]`` is the multiplicative inverse of ``a`` mod ``p`` (``inv[0] = 0``)."""
    inv = np.zeros(p, dtype=DTYPE)
    for a in range(1, p):
        inv[a] = pow(a, p - 2, p)
    return inv


def as_matrix(m, p: int, cols: int | None = None) -> np.ndarray:
    arr = np.asarray(m, dtype=DTYPE)
    if arr.ndim == 1:
        if arr.size == 0 and cols is not None:
            arr = arr.reshape(0, cols)
        else:
            arr = arr.reshape(1, -1)
    if arr.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {arr.shape}")
    return np.mod(arr, p)


def _rref_inplace(m: np.ndarray, p: int) -> list[int]:
    rows, cols = m.shape
    inv = inverse_table(p)
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(m[r:, c])
        if nz.size == 0:
            continue
        k = r + int(nz[0])
        if k != r:
            m[[r, k]] = m[[k, r]]
        lead = m[r, c]
        if lead != 1:
            m[r] = m[r] * inv[lead] % p
        col = m[:, c].copy()
        col[r] = 0
        hit = np.flatnonzero(col)
        if hit.size:
            m[hit] = (m[hit] - np.outer(col[hit], m[r])) % p
        pivots.append(c)
        r += 1
    return pivots


def rref_with_pivots(m, p: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row-echelon form with zero rows dropped, plus pivot columns."""
    work = as_matrix(m, p).copy()
    pivots = _rref_inplace(work, p)
    return work[: len(pivots)], pivots


def rref(m, p: int) -> np.ndarray:
    return rref_with_pivots(m, p)[0]


def rank(m, p: int) -> int:
    arr = as_matrix(m, p)
    if arr.size == 0:
        return 0
    return len(_rref_inplace(arr.copy(), p))


def nullspace_from_rref(r: np.ndarray, pivots: Sequence[int], cols: int, p: int) -> np.ndarray:
    """Basis (as rows) of ``{v : r v = 0}`` read off an RREF matrix."""
    free = [c for c in range(cols) if c not in set(pivots)]
    basis = np.zeros((len(free), cols), dtype=DTYPE)
    for t, f in enumerate(free):
        basis[t, f] = 1
        for row, pc in enumerate(pivots):
            basis[t, pc] = (-r[row, f]) % p
    return basis


class Subspace:
    """A subspace of ``F_p^d`` held as its canonical RREF basis.

    Two subspaces compare equal iff ambient dimension, modulus and RREF basis
    agree entry-wise. Instances are immutable and hashable.
    """

    __slots__ = ("_basis", "_pivots", "ambient_dim", "p", "_key")

    def __init__(self, basis: np.ndarray, pivots: Sequence[int], ambient_dim: int, p: int):
        basis = np.ascontiguousarray(basis, dtype=DTYPE).reshape(len(pivots), ambient_dim)
        basis.setflags(write=False)
        self._basis = basis
        self._pivots = tuple(int(c) for c in pivots)
        self.ambient_dim = int(ambient_dim)
        self.p = int(p)
        self._key = None

    @classmethod
    def from_rows(cls, rows, ambient_dim: int, p: int) -> "Subspace":
        arr = as_matrix(rows, p, cols=ambient_dim)
        if arr.shape[1] != ambient_dim:
            raise ValueError(
                f"vector length {arr.shape[1]} does not match ambient dimension {ambient_dim}"
            )
        r, piv = rref_with_pivots(arr, p)
        return cls(r, piv, ambient_dim, p)

    @classmethod
    def zero(cls, ambient_dim: int, p: int) -> "Subspace":
        return cls(np.zeros((0, ambient_dim), dtype=DTYPE), (), ambient_dim, p)

    @classmethod
    def full(cls, ambient_dim: int, p: int) -> "Subspace":
        return cls(np.eye(ambient_dim, dtype=DTYPE), range(ambient_dim), ambient_dim, p)

    @property
    def basis(self) -> np.ndarray:
        return self._basis

    @property
    def pivots(self) -> tuple[int, ...]:
        return self._pivots

    @property
    def dim(self) -> int:
        return len(self._pivots)

    @property
    def codim(self) -> int:
        return self.ambient_dim - self.dim

    def is_zero(self) -> bool:
        return self.dim == 0

    def is_full(self) -> bool:
        return self.dim == self.ambient_dim

    def _check_compatible(self, other: "Subspace") -> None:
        if self.ambient_dim != other.ambient_dim or self.p != other.p:
            raise ValueError(
                "ambient mismatch: "
                f"F_{self.p}^{self.ambient_dim} vs F_{other.p}^{other.ambient_dim}"
            )

    def reduce(self, v) -> np.ndarray:
        """Remainder of ``v`` after clearing the pivot coordinates."""
        vec = np.mod(np.asarray(v, dtype=DTYPE), self.p)
        if vec.shape != (self.ambient_dim,):
            raise ValueError(f"vector of length {vec.shape} not in F_p^{self.ambient_dim}")
        if self.dim:
            coeffs = vec[list(self._pivots)]
            vec = (vec - coeffs @ self._basis) % self.p
        return vec

    def contains(self, v) -> bool:
        return not self.reduce(v).any()

    def __contains__(self, v) -> bool:
        return self.contains(v)

    def issubset(self, other: "Subspace") -> bool:
        self._check_compatible(other)
        if self.dim > other.dim:
            return False
        if self.dim == 0:
            return True
        if other.dim == 0:
            return False
        coeffs = self._basis[:, list(other._pivots)]
        rem = (self._basis - coeffs @ other._basis) % self.p
        return not rem.any()

    def __le__(self, other: "Subspace") -> bool:
        return self.issubset(other)

    def __ge__(self, other: "Subspace") -> bool:
        return other.issubset(self)

    def __add__(self, other: "Subspace") -> "Subspace":
        return subspace_sum(self, other)

    def __and__(self, other: "Subspace") -> "Subspace":
        return intersect(self, other)

    def annihilator(self) -> "Subspace":
        """Orthogonal complement under the standard dot product."""
        null = nullspace_from_rref(self._basis, self._pivots, self.ambient_dim, self.p)
        return Subspace.from_rows(null, self.ambient_dim, self.p)

    def parity_check(self) -> np.ndarray:
        """Matrix ``N`` with ``{v : N v = 0}`` equal to this subspace."""
        return nullspace_from_rref(self._basis, self._pivots, self.ambient_dim, self.p)

    def _eq_key(self):
        if self._key is None:
            self._key = (self.ambient_dim, self.p, self._pivots, self._basis.tobytes())
        return self._key

    def __eq__(self, other) -> bool:
        if not isinstance(other, Subspace):
            return NotImplemented
        return self._eq_key() == other._eq_key()

    def __hash__(self) -> int:
        return hash(self._eq_key())

    def sort_key(self) -> tuple:
        return (self.dim, tuple(self._basis.ravel().tolist()))

    def __repr__(self) -> str:
        return f"Subspace(dim={self.dim}, ambient={self.ambient_dim}, p={self.p})"


def span(vectors: Iterable, ambient_dim: int, p: int) -> Subspace:
    rows = [np.asarray(v, dtype=DTYPE).ravel() for v in vectors]
    for v in rows:
        if v.shape[0] != ambient_dim:
            raise ValueError(f"vector of length {v.shape[0]} in ambient dimension {ambient_dim}")
    if not rows:
        return Subspace.zero(ambient_dim, p)
    return Subspace.from_rows(np.vstack(rows), ambient_dim, p)


def subspace_sum(a: Subspace, b: Subspace) -> Subspace:
    a._check_compatible(b)
    if b.dim == 0:
        return a
    if a.dim == 0:
        return b
    return Subspace.from_rows(np.vstack([a.basis, b.basis]), a.ambient_dim, a.p)


def intersect(a: Subspace, b: Subspace) -> Subspace:
    """Zassenhaus: reduce ``[[A, A], [B, 0]]``; rows with zero left half span the meet."""
    a._check_compatible(b)
    d, p = a.ambient_dim, a.p
    if a.dim == 0 or b.dim == 0:
        return Subspace.zero(d, p)
    top = np.hstack([a.basis, a.basis])
    bottom = np.hstack([b.basis, np.zeros_like(b.basis)])
    r, piv = rref_with_pivots(np.vstack([top, bottom]), p)
    rows = [i for i, c in enumerate(piv) if c >= d]
    if not rows:
        return Subspace.zero(d, p)
    return Subspace.from_rows(r[rows, d:], d, p)


def kernel(m, p: int, cols: int | None = None) -> Subspace:
    """``{v : m v = 0}`` as a subspace of the domain."""
    arr = as_matrix(m, p, cols=cols)
    ncols = arr.shape[1]
    if arr.shape[0] == 0:
        return Subspace.full(ncols, p)
    r, piv = rref_with_pivots(arr, p)
    return Subspace.from_rows(nullspace_from_rref(r, piv, ncols, p), ncols, p)


def apply(m, s: Subspace) -> Subspace:
    arr = as_matrix(m, s.p)
    if arr.shape[1] != s.ambient_dim:
        raise ValueError(f"map with domain {arr.shape[1]} applied to subspace of F_p^{s.ambient_dim}")
    if s.dim == 0:
        return Subspace.zero(arr.shape[0], s.p)
    return Subspace.from_rows(s.basis @ arr.T, arr.shape[0], s.p)


def preimage(m, t: Subspace) -> Subspace:
    arr = as_matrix(m, t.p)
    if arr.shape[0] != t.ambient_dim:
        raise ValueError(f"map with codomain {arr.shape[0]} pulled back along F_p^{t.ambient_dim}")
    check = t.parity_check()
    if check.shape[0] == 0:
        return Subspace.full(arr.shape[1], t.p)
    return kernel(check @ arr, t.p)


def contains(a: Subspace, v) -> bool:
    return a.contains(v)


def subset(a: Subspace, b: Subspace) -> bool:
    return a.issubset(b)


# -- batched elimination -------------------------------------------------------


def batched_rref(stack: np.ndarray, p: int, max_rank: int | None = None):
    """Row-reduce a stack of matrices ``(B, r, c)`` in lockstep.

    Returns ``(R, pivcols, ranks)``: ``R`` has the same shape with reduced rows
    first, ``pivcols[b, t]`` is the pivot column of row ``t`` (``-1`` if none).
    Elimination stops early once every matrix reaches ``max_rank``; matrices
    stopped that way are only partially reduced.
    """
    # products of two residues fit in int32 for p < 46341
    work = np.int32 if p * p < 2**31 else DTYPE
    a = np.mod(np.asarray(stack, dtype=DTYPE), p).astype(work)
    nb, rows, cols = a.shape
    inv = inverse_table(p).astype(work)
    ranks = np.zeros(nb, dtype=np.intp)
    pivcols = np.full((nb, rows), -1, dtype=np.intp)
    limit = rows if max_rank is None else min(rows, max_rank)
    row_ids = np.arange(rows)
    for c in range(cols):
        open_ = ranks < limit
        if not open_.any():
            break
        cand = (a[:, :, c] != 0) & (row_ids[None, :] >= ranks[:, None]) & open_[:, None]
        has = cand.any(axis=1)
        sel = np.flatnonzero(has)
        if sel.size == 0:
            continue
        whole = sel.size == nb
        sub = a[:, :, c:] if whole else a[sel, :, c:]
        cand = cand if whole else cand[sel]
        rk = ranks[sel]
        piv = cand.argmax(axis=1)
        idx = np.arange(sel.size)
        prow = sub[idx, piv].copy()
        sub[idx, piv] = sub[idx, rk]
        prow = prow * inv[prow[:, 0]][:, None] % p
        sub[idx, rk] = prow
        factors = sub[:, :, 0].copy()
        factors[idx, rk] = 0
        sub -= factors[:, :, None] * prow[:, None, :]
        np.mod(sub, p, out=sub)
        if not whole:
            a[sel, :, c:] = sub
        pivcols[sel, rk] = c
        ranks[sel] += 1
    return a.astype(DTYPE), pivcols, ranks


def batched_rank(stack: np.ndarray, p: int) -> np.ndarray:
    return batched_rref(stack, p)[2]


def batched_nullspace(reduced: np.ndarray, pivcols: np.ndarray, ranks: np.ndarray, p: int):
    """Null-space bases from :func:`batched_rref` output.

    Returns ``(N, dims)`` with ``N`` of shape ``(B, c, c)``; the first
    ``dims[b]`` rows of ``N[b]`` are a basis, the remaining rows are zero.
    """
    nb, rows, cols = reduced.shape
    out = np.zeros((nb, cols, cols), dtype=DTYPE)
    is_pivot = np.zeros((nb, cols), dtype=bool)
    bi, ti = np.nonzero(pivcols >= 0)
    is_pivot[bi, pivcols[bi, ti]] = True
    free = ~is_pivot
    dims = free.sum(axis=1)
    # slot of each free column among the free columns of its matrix
    slot = np.cumsum(free, axis=1) - 1
    fb, fc = np.nonzero(free)
    fs = slot[fb, fc]
    out[fb, fs, fc] = 1
    # pivot coordinate of null vector for free column f is -R[row, f]
    for t in range(rows):
        has = pivcols[:, t] >= 0
        if not has.any():
            continue
        sel = fb[has[fb]]
        if sel.size == 0:
            continue
        mask = has[fb]
        cols_f = fc[mask]
        slots = fs[mask]
        pc = pivcols[sel, t]
        out[sel, slots, pc] = (-reduced[sel, t, cols_f]) % p
    return out, dims
