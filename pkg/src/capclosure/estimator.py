"""scikit-learn style facade over the capability test.

Samples are subspaces of ``V(n)``: either :class:`Subspace` objects or
array-likes whose rows span the subspace. ``fit`` only fixes ``(n, p)``;
nothing is learned from data.
"""

from __future__ import annotations

from math import isqrt

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .closure import capability_report
from .fpalg import PrimeModulus, Subspace
from .spaces import SpaceContext, make_context

FEATURE_NAMES = ("dim_X", "dim_Xstar", "dim_Xclosure", "epicenter_dim", "dim_Z")


def infer_n(dim_v: int) -> int:
    """``n`` with ``C(n, 2) = dim_v``."""
    n = (1 + isqrt(1 + 8 * dim_v)) // 2
    if n * (n - 1) // 2 != dim_v:
        raise ValueError(f"vector length {dim_v} is not C(n,2) for any n")
    return n


def check_subspaces(X, p: int, n: int | None = None) -> tuple[SpaceContext, list[Subspace]]:
    """Validate a sequence of subspaces and bring them into one ``V(n)`` over ``F_p``."""
    p = int(PrimeModulus(p))
    if isinstance(X, Subspace) or (isinstance(X, np.ndarray) and X.ndim == 2):
        raise ValueError("expected a sequence of subspaces, got a single one; wrap it in a list")
    items = list(X)
    if not items:
        raise ValueError("expected at least one subspace")
    widths = set()
    for item in items:
        if isinstance(item, Subspace):
            if item.p != p:
                raise ValueError(f"subspace over F_{item.p} given to an estimator over F_{p}")
            widths.add(item.ambient_dim)
        else:
            arr = np.asarray(item)
            if arr.ndim != 2:
                raise ValueError(f"each sample must be a 2-D array of rows, got shape {arr.shape}")
            if not np.issubdtype(arr.dtype, np.integer):
                raise ValueError(f"expected integer entries, got dtype {arr.dtype}")
            widths.add(arr.shape[1])
    if len(widths) != 1:
        raise ValueError(f"samples live in different ambient dimensions {sorted(widths)}")
    dim_v = widths.pop()
    n_found = infer_n(dim_v)
    if n is not None and n != n_found:
        raise ValueError(f"samples have {dim_v} coordinates, which is V({n_found}), not V({n})")
    ctx = make_context(n_found, p)
    subs = [s if isinstance(s, Subspace) else Subspace.from_rows(s, dim_v, p) for s in items]
    return ctx, subs


class CapabilityClassifier(ClassifierMixin, TransformerMixin, BaseEstimator):
    """Predicts whether the group attached to each subspace is capable (closed).

    ``transform`` returns the integer features ``FEATURE_NAMES`` per sample.
    """

    def __init__(self, p: int = 3, n: int | None = None, certified_only: bool = False):
        self.p = p
        self.n = n
        self.certified_only = certified_only

    def fit(self, X, y=None):
        ctx, _ = check_subspaces(X, self.p, self.n)
        self.ctx_ = ctx
        self.n_ = ctx.n
        self.classes_ = np.array([False, True])
        return self

    def _reports(self, X):
        check_is_fitted(self, "ctx_")
        ctx, subs = check_subspaces(X, self.p, self.n_)
        return [capability_report(ctx, s, certified_only=self.certified_only) for s in subs]

    def predict(self, X) -> np.ndarray:
        return np.array([r.closed for r in self._reports(X)])

    def transform(self, X) -> np.ndarray:
        rows = [(r.dim_X, r.dim_Xstar, r.dim_Xclosure, r.epicenter_dim, r.dim_Z) for r in self._reports(X)]
        return np.array(rows, dtype=np.int64)

    def get_feature_names_out(self, input_features=None) -> np.ndarray:
        return np.array(FEATURE_NAMES, dtype=object)
