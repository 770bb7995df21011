"""Input validation helpers shared across the package."""

from __future__ import annotations

import numpy as np


def as_float_matrix(x, name: str = "X") -> np.ndarray:
    """Coerce to a 2-D float array with all entries finite."""
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2:
        raise ValueError(f"{name} must be 2-dimensional, got shape {arr.shape}")
    if arr.size == 0:
        raise ValueError(f"{name} is empty")
    if not np.isfinite(arr).all():
        raise ValueError(f"{name} contains non-finite entries")
    return arr


def as_square_matrix(x, k: int | None = None, name: str = "matrix") -> np.ndarray:
    arr = as_float_matrix(x, name)
    if arr.shape[0] != arr.shape[1]:
        raise ValueError(f"{name} must be square, got shape {arr.shape}")
    if k is not None and arr.shape[0] != k:
        raise ValueError(f"{name} must be {k}x{k}, got shape {arr.shape}")
    return arr


def check_break_index(break_index, n_obs: int) -> int:
    """Validate a regime boundary: both regimes must be non-empty."""
    t_c = int(break_index)
    if t_c != break_index:
        raise ValueError(f"break_index must be an integer, got {break_index!r}")
    if not 1 <= t_c < n_obs:
        raise ValueError(
            f"break_index must satisfy 1 <= break_index < {n_obs}, got {t_c}"
        )
    return t_c


def as_rng(random_state) -> np.random.Generator:
    """Normalize seeds, SeedSequences and Generators to a Generator."""
    if isinstance(random_state, np.random.Generator):
        return random_state
    return np.random.default_rng(random_state)
