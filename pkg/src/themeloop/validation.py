"""Input validation helpers shared by the estimator-style components."""
from __future__ import annotations

from typing import Any, Sequence

import numpy as np


class NotFittedError(ValueError, AttributeError):
    """Raised when an estimator method requiring a fit is called before fit."""


def check_array(
    X: Any,
    *,
    name: str = "X",
    dtype: Any = np.float64,
    ndim: int = 2,
    min_rows: int = 1,
    allow_nan: bool = False,
) -> np.ndarray:
    """Coerce ``X`` to a contiguous ndarray and validate shape and finiteness."""
    arr = np.asarray(X, dtype=dtype)
    if arr.ndim != ndim:
        raise ValueError(f"{name} must be {ndim}-dimensional, got shape {arr.shape}")
    if arr.shape[0] < min_rows:
        raise ValueError(f"{name} needs at least {min_rows} rows, got {arr.shape[0]}")
    if not allow_nan and not np.isfinite(arr).all():
        raise ValueError(f"{name} contains non-finite values")
    return np.ascontiguousarray(arr)


def check_labels(y: Any, n_rows: int, *, name: str = "y") -> np.ndarray:
    """Validate an integer label vector aligned with ``n_rows`` samples."""
    arr = np.asarray(y)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be 1-dimensional, got shape {arr.shape}")
    if arr.shape[0] != n_rows:
        raise ValueError(f"{name} has {arr.shape[0]} entries for {n_rows} rows")
    if not np.issubdtype(arr.dtype, np.integer):
        rounded = np.rint(np.asarray(arr, dtype=np.float64))
        if not np.array_equal(rounded, np.asarray(arr, dtype=np.float64)):
            raise ValueError(f"{name} must contain integer labels")
        arr = rounded.astype(np.int64)
    if arr.size and arr.min() < 0:
        raise ValueError(f"{name} labels must be non-negative")
    return arr.astype(np.int64)


def check_is_fitted(estimator: Any, attributes: Sequence[str]) -> None:
    """Raise :class:`NotFittedError` unless every fitted attribute is present."""
    missing = [a for a in attributes if getattr(estimator, a, None) is None]
    if missing:
        raise NotFittedError(
            f"{type(estimator).__name__} is not fitted yet; call fit() first "
            f"(missing {', '.join(missing)})"
        )


def check_in_range(value: float, lo: float, hi: float, *, name: str) -> float:
    """Validate a scalar against a closed interval, returning it unchanged."""
    v = float(value)
    if not np.isfinite(v):
        raise ValueError(f"{name} must be finite, got {value!r}")
    if v < lo or v > hi:
        raise ValueError(f"{name} must be in [{lo}, {hi}], got {value!r}")
    return v
