"""Classic fuzzy c-means, kept in-repo as the comparison baseline.

Standard Bezdek formulation: memberships w_ij = 1 / sum_l (d_ij / d_il)^
(2 / (m - 1)), centers as w^m-weighted means, objective J = sum w^m d^2,
stopping on the max-norm change of the membership matrix.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .datasets import Dataset

__all__ = ["FcmResult", "fcm_fit", "fcm_objective"]


@dataclass
class FcmResult:
    """Membership matrix W (n x c), centers (c x d) and iteration count."""

    W: np.ndarray
    centers: np.ndarray
    iterations: int
    objective_trace: np.ndarray
    converged: bool


def _sq_distances(points, centers):
    return ((points[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)


def fcm_objective(data: Dataset, W: np.ndarray, centers: np.ndarray,
                  m: float) -> float:
    d2 = _sq_distances(data.points, centers)
    return float(((W ** m) * d2).sum())


def _kmeanspp(points: np.ndarray, c: int, rng: np.random.Generator) -> np.ndarray:
    n = len(points)
    chosen = [int(rng.integers(n))]
    d2 = ((points - points[chosen[0]]) ** 2).sum(axis=1)
    for _ in range(c - 1):
        total = d2.sum()
        if total <= 0:
            nxt = int(rng.integers(n))
        else:
            nxt = int(rng.choice(n, p=d2 / total))
        chosen.append(nxt)
        d2 = np.minimum(d2, ((points - points[nxt]) ** 2).sum(axis=1))
    return points[chosen].copy()


def fcm_fit(data: Dataset, c: int, m: float = 2.0, eps_conv: float = 1e-6,
            max_iter: int = 300, seed: int = 0,
            singular_delta: float = 1e-9) -> FcmResult:
    """Run fuzzy c-means on ``data`` with c clusters.

    Points coinciding with a center (distance below ``singular_delta``) are
    hard-assigned there, mirroring the main solver's singularity rule.
    """
    if c < 2:
        raise ValueError("c must be at least 2")
    if data.n < c:
        raise ValueError(f"need at least {c} points, got {data.n}")
    if m <= 1:
        raise ValueError("m must exceed 1")
    rng = np.random.default_rng(seed)
    pts = data.points
    centers = _kmeanspp(pts, c, rng)
    expo = 1.0 / (m - 1.0)
    W_prev = None
    trace = []
    converged = False
    iterations = 0
    for it in range(max_iter):
        d2 = _sq_distances(pts, centers)
        singular = d2 < singular_delta ** 2
        with np.errstate(divide="ignore"):
            inv = d2 ** (-expo)
        W = inv / inv.sum(axis=1, keepdims=True)
        for i in np.flatnonzero(singular.any(axis=1)):
            j = int(np.argmin(np.where(singular[i], d2[i], np.inf)))
            W[i] = 0.0
            W[i, j] = 1.0
        Wm = W ** m
        den = Wm.sum(axis=0)
        ok = den >= singular_delta
        new_centers = centers.copy()
        new_centers[ok] = (Wm.T @ pts)[ok] / den[ok, None]
        centers = new_centers
        trace.append(fcm_objective(data, W, centers, m))
        iterations = it + 1
        if W_prev is not None and np.max(np.abs(W - W_prev)) <= eps_conv:
            converged = True
            break
        W_prev = W
    return FcmResult(W=W, centers=centers, iterations=iterations,
                     objective_trace=np.asarray(trace), converged=converged)
