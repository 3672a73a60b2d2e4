"""Small input-validation helpers shared by the estimators and pipeline ops."""

from __future__ import annotations

import numpy as np


def as_float_vector(v, name: str = "x") -> np.ndarray:
    """Coerce to a 1-D float array."""
    arr = np.asarray(v, dtype=float)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be 1-dimensional, got shape {arr.shape}")
    return arr


def as_float_matrix(X, name: str = "X", *, allow_nan: bool = True) -> np.ndarray:
    """Coerce to a 2-D float array, optionally rejecting missing values."""
    arr = np.asarray(X, dtype=float)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be 2-dimensional, got shape {arr.shape}")
    if not allow_nan and np.isnan(arr).any():
        raise ValueError(f"{name} must not contain missing values")
    if np.isinf(arr).any():
        raise ValueError(f"{name} contains non-finite values")
    return arr


def check_equal_length(x: np.ndarray, y: np.ndarray, what: str = "vectors") -> None:
    if x.shape[0] != y.shape[0]:
        raise ValueError(f"{what} must have equal length, got {x.shape[0]} and {y.shape[0]}")


def check_subset_indices(indices, n: int, name: str = "subset") -> tuple[int, ...]:
    """Validate a collection of 0-based indices against a dimension of size n."""
    idx = tuple(int(i) for i in indices)
    for i in idx:
        if not 0 <= i < n:
            raise ValueError(f"{name} index {i} out of range for size {n}")
    if len(set(idx)) != len(idx):
        raise ValueError(f"{name} contains duplicate indices")
    return idx
