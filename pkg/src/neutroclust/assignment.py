"""Hard labels from a converged partition, with boundary and outlier
detection, and accuracy scoring against ground truth."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .solver import NeutrosophicPartition

__all__ = ["MAIN", "BOUNDARY", "OUTLIER", "PointLabel", "assign",
           "resolved_ids", "accuracy"]

MAIN = "main"
BOUNDARY = "boundary"
OUTLIER = "outlier"


@dataclass(frozen=True)
class PointLabel:
    """Label of one point.

    ``kind`` is main, boundary or outlier. For main labels ``cluster_a``
    holds the cluster id. For boundary labels ``cluster_a < cluster_b`` are
    the two contending clusters. ``resolved`` is always the argmax truth
    cluster, which for a boundary point is its higher-membership side.
    """

    kind: str
    cluster_a: int | None
    cluster_b: int | None
    resolved: int


def assign(part: NeutrosophicPartition, t: float) -> list[PointLabel]:
    """Label every point, checking outlier, then boundary, then main.

    A point is an outlier when its noise membership exceeds every truth
    membership. It is a boundary point when its two largest truth
    memberships both lie strictly inside (t, 1 - t). Otherwise it belongs
    to its argmax cluster, ties broken by the lowest index.
    """
    if not (0 < t < 0.5):
        raise ValueError("t must lie in (0, 0.5)")
    part.check(tol=1e-9)
    T, F = part.T, part.F
    labels = []
    for i in range(T.shape[0]):
        row = T[i]
        best = int(np.argmax(row))
        if F[i] > row[best]:
            labels.append(PointLabel(OUTLIER, None, None, best))
            continue
        order = np.argsort(row, kind="stable")
        j1, j2 = int(order[-1]), int(order[-2])
        v1, v2 = row[j1], row[j2]
        if t < v1 < 1 - t and t < v2 < 1 - t:
            a, b = sorted((j1, j2))
            labels.append(PointLabel(BOUNDARY, a, b, best))
            continue
        labels.append(PointLabel(MAIN, best, None, best))
    return labels


def resolved_ids(labels: list[PointLabel], num_clusters: int) -> np.ndarray:
    """Collapse labels to integer ids for scoring.

    Main points keep their cluster, boundary points resolve to their
    higher-membership cluster, and outliers map to a reject id equal to
    ``num_clusters``.
    """
    out = np.empty(len(labels), dtype=np.int64)
    for i, lab in enumerate(labels):
        if lab.kind == OUTLIER:
            out[i] = num_clusters
        else:
            out[i] = lab.resolved
    return out


def accuracy(predicted, truth) -> float:
    """Fraction correct under the best one-to-one cluster-to-class matching.

    ``predicted`` may be PointLabel objects or integer ids. Boundary labels
    resolve to their stronger cluster and outliers to a separate reject
    class before the contingency matrix is built; the matching then
    maximizes the correctly paired count over injective assignments.
    """
    truth = np.asarray(truth, dtype=np.int64)
    if len(predicted) != len(truth):
        raise ValueError("length mismatch")
    if len(truth) == 0:
        raise ValueError("empty inputs")
    if predicted and isinstance(predicted[0], PointLabel):
        k = 0
        for lab in predicted:
            for c in (lab.cluster_a, lab.cluster_b, lab.resolved):
                if c is not None:
                    k = max(k, c + 1)
        pred = resolved_ids(list(predicted), k)
    else:
        pred = np.asarray(predicted, dtype=np.int64)
    rows = int(pred.max()) + 1
    cols = int(truth.max()) + 1
    M = np.zeros((rows, cols), dtype=np.int64)
    np.add.at(M, (pred, truth), 1)
    r, c = linear_sum_assignment(-M)
    return float(M[r, c].sum() / len(truth))
