"""Input coercion for the estimator API."""

from __future__ import annotations

import numpy as np

from .exceptions import ContractError
from .triangle import CUMULATIVE, INCREMENTAL, Triangle, cumulate

__all__ = ["check_triangle"]


def check_triangle(X, kind: str = CUMULATIVE, *, input_kind: str | None = None,
                   allow_negative_increments: bool = False) -> Triangle:
    """Coerce ``X`` to a :class:`Triangle` of the requested ``kind``.

    ``X`` may be a Triangle, a pandas DataFrame (index used as accident-year
    labels) or any square 2-D array-like with NaN in the future cells. Plain
    arrays are read as ``input_kind`` (default: ``kind``). An incremental
    input is cumulated when a cumulative triangle is requested.
    """
    if isinstance(X, Triangle):
        tri = X
    else:
        labels = None
        if hasattr(X, "index") and hasattr(X, "to_numpy"):
            labels = tuple(str(v) for v in X.index)
            X = X.to_numpy(dtype=float)
        values = np.asarray(X, dtype=float)
        tri = Triangle(values, kind=input_kind or kind, labels=labels,
                       allow_negative_increments=allow_negative_increments)
    if tri.kind == kind:
        return tri
    if kind == CUMULATIVE and tri.kind == INCREMENTAL:
        return cumulate(tri)
    raise ContractError(f"expected a {kind} triangle, got {tri.kind}")
