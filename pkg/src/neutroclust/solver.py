"""Alternating solver for the indeterminacy-weighted clustering objective.

Each point i carries truth memberships T[i, j] toward the k main clusters
and one noise membership F[i]; every row satisfies sum_j T[i, j] + F[i] = 1.
Memberships are recomputed in closed form from the current centers through
the per-point normalizer K_temp that eliminates the row constraint's
Lagrange multiplier:

    a_ij   = ||x_i - c_j||^(-2 / (m - 1))
    b_i    = (k - sum_j ||x_i - c_j||^2)^(-1 / (m - 1))
    K_i    = 1 / (sum_j a_ij / (w1 I_i) + b_i / (w2 (1 - I_i)))
    T_ij   = K_i a_ij / (w1 I_i)
    F_i    = K_i b_i  / (w2 (1 - I_i))

Low-indeterminacy points therefore need small distances to earn truth
membership, while isolated points (I near 1) shed mass into F. Centers are
the membership-weighted means c_j = sum_i T_ij^m x_i / sum_i T_ij^m, which
keeps them anchored to the dense structure; points absorbed by the noise
cluster have little truth mass left and barely move any center.

Inputs are expected in normalized coordinates (max pairwise squared
distance at most 1) so the noise base k - sum_j d^2 stays positive.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace

import numpy as np

from .datasets import Dataset

__all__ = [
    "SolverConfig",
    "NeutrosophicPartition",
    "FitResult",
    "initialize",
    "compute_cost",
    "update_memberships",
    "update_centers",
    "lagrangian_gradients",
    "fit",
]

log = logging.getLogger("neutroclust")


@dataclass(frozen=True)
class SolverConfig:
    """Hyperparameters of the clustering run.

    Defaults follow the published tuning: density radius 4 with neighbor
    threshold 4 and floor 0.05 for indeterminacy, fuzzifier 2, stop
    tolerance 1e-6 on the truth memberships, boundary band 0.4, and weights
    w1 = 1, w2 = 2 for the truth and noise terms.
    """

    num_clusters: int
    fuzzifier: float = 2.0
    w1: float = 1.0
    w2: float = 2.0
    eps_conv: float = 1e-6
    max_iter: int = 300
    eps_density: float = 4.0
    np_threshold: int = 4
    alpha: float = 0.05
    boundary_t: float = 0.4
    seed: int = 0
    singular_delta: float = 1e-9

    def __post_init__(self):
        if self.num_clusters < 2:
            raise ValueError("num_clusters must be at least 2")
        if self.fuzzifier <= 1:
            raise ValueError("fuzzifier must exceed 1")
        if self.w1 <= 0 or self.w2 <= 0:
            raise ValueError("w1 and w2 must be positive")
        if self.eps_conv <= 0:
            raise ValueError("eps_conv must be positive")
        if not (0 < self.boundary_t < 0.5):
            raise ValueError("boundary_t must lie in (0, 0.5)")
        if not (0 < self.alpha < 0.5):
            raise ValueError("alpha must lie in (0, 0.5)")
        if self.singular_delta <= 0:
            raise ValueError("singular_delta must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")

    def with_seed(self, seed: int) -> "SolverConfig":
        return replace(self, seed=seed)


@dataclass
class NeutrosophicPartition:
    """Truth memberships T (n x k) and noise memberships F (n,)."""

    T: np.ndarray
    F: np.ndarray

    def __post_init__(self):
        self.T = np.asarray(self.T, dtype=float)
        self.F = np.asarray(self.F, dtype=float)
        if self.T.ndim != 2 or self.F.shape != (self.T.shape[0],):
            raise ValueError("T must be n x k and F length n")

    def row_sum_error(self) -> float:
        return float(np.abs(self.T.sum(axis=1) + self.F - 1.0).max())

    def check(self, tol: float = 1e-9):
        if self.T.min() < -tol or self.T.max() > 1 + tol:
            raise ValueError("truth memberships outside [0, 1]")
        if self.F.min() < -tol or self.F.max() > 1 + tol:
            raise ValueError("noise memberships outside [0, 1]")
        err = self.row_sum_error()
        if err > tol:
            raise ValueError(f"membership rows do not sum to 1 (max error {err:g})")


@dataclass
class FitResult:
    """Converged state of one solver run plus its trace and diagnostics."""

    partition: NeutrosophicPartition
    centers: np.ndarray
    indeterminacy: np.ndarray
    iterations: int
    cost_trace: np.ndarray
    converged: bool
    diagnostics: dict = field(default_factory=dict)


def _squared_distances(points: np.ndarray, centers: np.ndarray) -> np.ndarray:
    return ((points[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)


def initialize(data: Dataset, cfg: SolverConfig,
               indeterminacy: np.ndarray | None = None
               ) -> tuple[NeutrosophicPartition, np.ndarray]:
    """Seed memberships and centers for a run.

    Centers come from D^2-weighted sampling in the k-means++ style: the
    first center is drawn uniformly, each further center with probability
    proportional to the squared distance from the centers chosen so far.
    When an indeterminacy vector is supplied, candidates are restricted to
    the points at the minimum indeterminacy level, which keeps seeds off
    isolated noise points (falling back to all points if the pool is too
    small). T rows are uniform draws jointly scaled with a small uniform
    F so every row sums to 1 exactly. Deterministic for a fixed seed.
    """
    n, k = data.n, cfg.num_clusters
    if n < k:
        raise ValueError(f"need at least {k} points, got {n}")
    rng = np.random.default_rng(cfg.seed)
    pts = data.points

    if indeterminacy is not None:
        ind = np.asarray(indeterminacy, dtype=float)
        pool = np.flatnonzero(ind <= ind.min() + 1e-12)
        if len(pool) < k:
            pool = np.arange(n)
    else:
        pool = np.arange(n)

    chosen = [int(pool[rng.integers(len(pool))])]
    d2 = ((pts - pts[chosen[0]]) ** 2).sum(axis=1)
    for _ in range(k - 1):
        w = d2[pool]
        total = w.sum()
        if total <= 0:
            nxt = int(pool[rng.integers(len(pool))])
        else:
            nxt = int(pool[rng.choice(len(pool), p=w / total)])
        chosen.append(nxt)
        d2 = np.minimum(d2, ((pts - pts[nxt]) ** 2).sum(axis=1))
    centers = pts[chosen].copy()

    T = rng.random((n, k))
    F = rng.random(n) * 0.05
    T *= ((1.0 - F) / T.sum(axis=1))[:, None]
    return NeutrosophicPartition(T, F), centers


def compute_cost(data: Dataset, indeterminacy: np.ndarray,
                 part: NeutrosophicPartition, centers: np.ndarray,
                 cfg: SolverConfig) -> float:
    """Objective value: truth terms (w1 I T)^m d^2 summed over clusters plus
    one noise term (w2 (1-I) F)^m (k - sum_j d^2) per point."""
    I = np.asarray(indeterminacy, dtype=float)
    T, F = part.T, part.F
    k, m = cfg.num_clusters, cfg.fuzzifier
    if T.shape != (data.n, k) or centers.shape[1] != data.dim:
        raise ValueError("shape mismatch")
    d2 = _squared_distances(data.points, centers)
    truth = (((cfg.w1 * I)[:, None] * T) ** m * d2).sum()
    noise = ((cfg.w2 * (1.0 - I) * F) ** m * (k - d2.sum(axis=1))).sum()
    return float(truth + noise)


def update_memberships(data: Dataset, indeterminacy: np.ndarray,
                       centers: np.ndarray, cfg: SolverConfig,
                       _diag: dict | None = None) -> NeutrosophicPartition:
    """Closed-form T and F for fixed centers.

    A point within ``singular_delta`` of some center is hard-assigned to the
    nearest such center (lowest index on ties). The noise base k - sum d^2
    cannot go negative for normalized data; if it does numerically it is
    clamped to ``singular_delta`` and counted in the diagnostics.
    """
    I = np.asarray(indeterminacy, dtype=float)
    pts = data.points
    n, k, m = data.n, cfg.num_clusters, cfg.fuzzifier
    if centers.shape != (k, pts.shape[1]):
        raise ValueError("centers shape mismatch")
    if not np.isfinite(centers).all():
        raise ValueError("non-finite centers")
    p = 1.0 / (m - 1.0)
    delta = cfg.singular_delta

    d2 = _squared_distances(pts, centers)
    singular = d2 < delta * delta
    sing_rows = singular.any(axis=1)

    with np.errstate(divide="ignore", over="ignore"):
        a = d2 ** (-p)
    base = k - d2.sum(axis=1)
    clamped = base <= 0
    if clamped.any():
        nclamp = int(clamped.sum())
        log.warning("noise base k - sum d^2 non-positive for %d points; clamped", nclamp)
        if _diag is not None:
            _diag["noise_base_clamps"] = _diag.get("noise_base_clamps", 0) + nclamp
        base = np.where(clamped, delta, base)
    b = base ** (-p)

    a_sum = np.where(sing_rows, 1.0, a.sum(axis=1))
    K = 1.0 / (a_sum / (cfg.w1 * I) + b / (cfg.w2 * (1.0 - I)))
    T = K[:, None] * a / (cfg.w1 * I)[:, None]
    F = K * b / (cfg.w2 * (1.0 - I))

    for i in np.flatnonzero(sing_rows):
        j = int(np.argmin(np.where(singular[i], d2[i], np.inf)))
        T[i] = 0.0
        T[i, j] = 1.0
        F[i] = 0.0
    return NeutrosophicPartition(T, F)


def update_centers(data: Dataset, indeterminacy: np.ndarray,
                   part: NeutrosophicPartition, centers_prev: np.ndarray,
                   cfg: SolverConfig, _diag: dict | None = None) -> np.ndarray:
    """Membership-weighted means c_j = sum_i T_ij^m x_i / sum_i T_ij^m.

    A cluster whose weight mass falls below ``singular_delta`` keeps its
    previous center, and the event is recorded in the diagnostics.
    """
    T = part.T
    if T.shape[0] != data.n or centers_prev.shape != (T.shape[1], data.dim):
        raise ValueError("shape mismatch")
    W = T ** cfg.fuzzifier
    den = W.sum(axis=0)
    centers = centers_prev.copy()
    ok = np.abs(den) >= cfg.singular_delta
    if not ok.all():
        bad = int((~ok).sum())
        log.warning("%d cluster(s) had degenerate weight mass; keeping previous centers", bad)
        if _diag is not None:
            _diag["center_fallbacks"] = _diag.get("center_fallbacks", 0) + bad
    centers[ok] = (W.T @ data.points)[ok] / den[ok, None]
    return centers


def center_gradient(data: Dataset, part: NeutrosophicPartition,
                    centers: np.ndarray, cfg: SolverConfig) -> np.ndarray:
    """Normal-equation residual of the center update,
    G[j] = -sum_i T_ij^m (x_i - c_j); zero at the weighted mean."""
    W = part.T ** cfg.fuzzifier
    diff = data.points[:, None, :] - centers[None, :, :]
    return -(W[:, :, None] * diff).sum(axis=0)


def lagrangian_gradients(data: Dataset, indeterminacy: np.ndarray,
                         part: NeutrosophicPartition, centers: np.ndarray,
                         lam: np.ndarray, cfg: SolverConfig
                         ) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Analytic partials used by the verification suite.

    dT[i, j] = m (w1 I_i T_ij)^(m-1) d2_ij - lambda_i
    dF[i]    = m (w2 (1-I_i) F_i)^(m-1) (k - sum_j d2_ij) - lambda_i
    dC[j]    = sum_i [ (w2 (1-I_i) F_i)^m - (w1 I_i T_ij)^m ] (x_i - c_j)

    These are the stationarity conditions the membership update solves: at
    the output of :func:`update_memberships`, dT and dF vanish for
    lambda_i = m K_i^(m-1). They are gradients of the corresponding scalar
    potentials checked by finite differences in :mod:`neutroclust.verify`;
    the center step used by :func:`fit` solves its own normal equation
    (:func:`center_gradient`) instead of zeroing dC.
    """
    I = np.asarray(indeterminacy, dtype=float)
    T, F = part.T, part.F
    n, k, m = data.n, cfg.num_clusters, cfg.fuzzifier
    lam = np.asarray(lam, dtype=float)
    if T.shape != (n, k) or lam.shape != (n,):
        raise ValueError("shape mismatch")
    d2 = _squared_distances(data.points, centers)
    dT = m * ((cfg.w1 * I)[:, None] * T) ** (m - 1.0) * d2 - lam[:, None]
    dF = m * (cfg.w2 * (1.0 - I) * F) ** (m - 1.0) * (k - d2.sum(axis=1)) - lam
    truth_w = ((cfg.w1 * I)[:, None] * T) ** m
    noise_w = (cfg.w2 * (1.0 - I) * F) ** m
    diff = data.points[:, None, :] - centers[None, :, :]
    dC = ((noise_w[:, None] - truth_w)[:, :, None] * diff).sum(axis=0)
    return dT, dF, dC


def implied_lambda(data: Dataset, indeterminacy: np.ndarray,
                   centers: np.ndarray, cfg: SolverConfig) -> np.ndarray:
    """Multiplier lambda_i = m K_i^(m-1) at which the membership update is
    stationary; used only for verification."""
    I = np.asarray(indeterminacy, dtype=float)
    m, k = cfg.fuzzifier, cfg.num_clusters
    p = 1.0 / (m - 1.0)
    d2 = _squared_distances(data.points, centers)
    a = d2 ** (-p)
    base = np.maximum(k - d2.sum(axis=1), cfg.singular_delta)
    b = base ** (-p)
    K = 1.0 / (a.sum(axis=1) / (cfg.w1 * I) + b / (cfg.w2 * (1.0 - I)))
    return m * K ** (m - 1.0)


def fit(data: Dataset, cfg: SolverConfig,
        indeterminacy: np.ndarray | None = None,
        on_iteration=None) -> FitResult:
    """Run the alternating updates until the truth memberships settle.

    Indeterminacy is computed once up front (from the data as given) unless
    a precomputed vector is supplied; pipelines that want density measured
    in raw units pass it in. The loop alternates membership and center
    updates, records the cost after each iteration, and stops when the
    max-norm change of T drops below ``eps_conv`` or ``max_iter`` is hit.
    ``on_iteration(it, partition, centers, cost)`` is invoked after each
    update pair when provided. Deterministic for a fixed seed and config.
    """
    from .indeterminacy import compute_indeterminacy

    if indeterminacy is None:
        I = compute_indeterminacy(data, cfg.num_clusters, cfg.eps_density,
                                  cfg.np_threshold, cfg.alpha)
    else:
        I = np.asarray(indeterminacy, dtype=float)
        if I.shape != (data.n,):
            raise ValueError("indeterminacy length mismatch")

    diag: dict = {}
    part, centers = initialize(data, cfg, indeterminacy=I)
    T_prev = part.T
    costs = []
    converged = False
    iterations = 0
    for it in range(cfg.max_iter):
        part = update_memberships(data, I, centers, cfg, _diag=diag)
        centers = update_centers(data, I, part, centers, cfg, _diag=diag)
        cost = compute_cost(data, I, part, centers, cfg)
        costs.append(cost)
        iterations = it + 1
        if on_iteration is not None:
            on_iteration(iterations, part, centers, cost)
        if np.max(np.abs(part.T - T_prev)) < cfg.eps_conv:
            converged = True
            break
        T_prev = part.T

    lo = data.points.min(axis=0)
    hi = data.points.max(axis=0)
    pad = 0.1 * np.where(hi > lo, hi - lo, 1.0)
    if ((centers < lo - pad) | (centers > hi + pad)).any():
        log.warning("centers left the data bounding box (+10%%) for %s", data.name)
        diag["centers_out_of_box"] = True

    return FitResult(partition=part, centers=centers, indeterminacy=I,
                     iterations=iterations,
                     cost_trace=np.asarray(costs), converged=converged,
                     diagnostics=diag)
