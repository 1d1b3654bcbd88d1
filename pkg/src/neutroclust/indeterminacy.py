"""Per-point indeterminacy from local density.

A point with fewer than ``np_threshold`` neighbors inside radius ``eps``
is treated as noise-flavored and gets indeterminacy close to 1; points in
dense regions get the floor value ``alpha``. Values are clamped to
[alpha, 1 - alpha] so the solver's divisions by I and (1 - I) stay finite.
"""

from __future__ import annotations

import numpy as np

from .datasets import Dataset

__all__ = ["neighbor_counts", "compute_indeterminacy"]


def neighbor_counts(data: Dataset | np.ndarray, eps: float,
                    block: int = 512) -> np.ndarray:
    """Count, for each point, the other points strictly closer than ``eps``.

    Self is excluded. The scan is a blocked O(n^2) pass; results are integer
    counts and independent of evaluation order.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    pts = data.points if isinstance(data, Dataset) else np.asarray(data, float)
    if not np.isfinite(pts).all():
        raise ValueError("non-finite input")
    n = len(pts)
    eps2 = eps * eps
    counts = np.empty(n, dtype=np.int64)
    for i in range(0, n, block):
        d2 = ((pts[i:i + block, None, :] - pts[None, :, :]) ** 2).sum(axis=2)
        counts[i:i + block] = (d2 < eps2).sum(axis=1) - 1
    return counts


def compute_indeterminacy(data: Dataset | np.ndarray, num_clusters: int,
                          eps: float = 4.0, np_threshold: int = 4,
                          alpha: float = 0.05) -> np.ndarray:
    """Map neighbor counts to indeterminacy values in [alpha, 1 - alpha].

    Points with count below ``np_threshold`` get 1 - count / (n / k),
    everything else gets ``alpha``; both branches are clamped.
    """
    if num_clusters < 2:
        raise ValueError("num_clusters must be at least 2")
    if not (0 < alpha < 0.5):
        raise ValueError("alpha must lie in (0, 0.5)")
    if np_threshold < 1:
        raise ValueError("np_threshold must be >= 1")
    counts = neighbor_counts(data, eps)
    n = len(counts)
    raw = np.where(counts < np_threshold,
                   1.0 - counts / (n / num_clusters),
                   alpha)
    return np.clip(raw, alpha, 1.0 - alpha)
