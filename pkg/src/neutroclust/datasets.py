"""Synthetic scatter datasets, CSV ingestion and feature normalization.

The diamond family reconstructs the classic benchmark geometry: each main
cluster is a small point motif, one or more "boundary" points sit exactly
midway between adjacent cluster centers, and isolated outliers are appended
far from everything. Exact coordinates are a convention of this package;
the symmetry properties (midpoint boundaries, equidistance, determinism)
are what downstream code relies on.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Dataset",
    "DiamondSpec",
    "NormalizationRecord",
    "generate_diamond",
    "diamond_preset",
    "load_csv",
    "normalize",
    "boundary_label",
    "outlier_label",
]


@dataclass
class Dataset:
    """A finite set of points, optionally with ground-truth class ids.

    Attributes
    ----------
    points : (n, d) float array, all coordinates finite.
    labels : optional (n,) int array; every label in [0, num_classes).
    name : text identifier used in outputs and manifests.
    """

    points: np.ndarray
    labels: np.ndarray | None = None
    name: str = "dataset"

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=float)
        if self.points.ndim != 2 or self.points.shape[0] < 1 or self.points.shape[1] < 1:
            raise ValueError("points must be a non-empty n x d matrix")
        if not np.isfinite(self.points).all():
            raise ValueError("points contain non-finite coordinates")
        if self.labels is not None:
            self.labels = np.asarray(self.labels, dtype=np.int64)
            if self.labels.shape != (self.points.shape[0],):
                raise ValueError("labels length must equal the number of points")
            if self.labels.min() < 0:
                raise ValueError("labels must be non-negative")

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def num_classes(self) -> int:
        if self.labels is None:
            return 0
        return int(self.labels.max()) + 1


def boundary_label(num_clusters: int) -> int:
    """Ground-truth id marking midpoint boundary points."""
    return num_clusters


def outlier_label(num_clusters: int) -> int:
    """Ground-truth id marking outlier points."""
    return num_clusters + 1


# Motif templates, listed in a fixed deterministic order. The 5-point
# diamond runs left arm, top, center, bottom, right arm; the 9-point grid
# runs the on-axis row first, then the upper and lower rows.
_DIAMOND5 = ((-1, 0), (0, 1), (0, 0), (0, -1), (1, 0))
_GRID9 = ((-1, 0), (0, 0), (1, 0),
          (-1, 1), (0, 1), (1, 1),
          (-1, -1), (0, -1), (1, -1))


@dataclass
class DiamondSpec:
    """Parameters of a generated diamond dataset.

    ``outliers`` holds explicit raw coordinates appended after all motif and
    boundary points. ``motif`` selects the 5-point diamond or the 9-point
    grid variant. ``boundary_offsets`` places each gap's boundary points at
    the midpoint plus multiples of ``motif_scale`` along y.
    """

    num_clusters: int
    motif_scale: float = 1.67
    center_spacing: float = 6.68
    boundary_points_per_gap: int = 1
    outliers: tuple = ()
    layout: str = "collinear"
    motif: str = "diamond5"

    def __post_init__(self):
        if self.num_clusters < 2:
            raise ValueError("num_clusters must be at least 2")
        if self.motif_scale <= 0 or self.center_spacing <= 0:
            raise ValueError("motif_scale and center_spacing must be positive")
        if self.center_spacing <= 2 * self.motif_scale:
            raise ValueError("center_spacing must exceed 2 * motif_scale")
        if self.boundary_points_per_gap < 0:
            raise ValueError("boundary_points_per_gap must be >= 0")
        if self.layout not in ("collinear", "grid"):
            raise ValueError("layout must be 'collinear' or 'grid'")
        if self.motif not in ("diamond5", "grid9"):
            raise ValueError("motif must be 'diamond5' or 'grid9'")


def _cluster_centers(spec: DiamondSpec) -> np.ndarray:
    k, sp = spec.num_clusters, spec.center_spacing
    if spec.layout == "collinear":
        return np.array([(i * sp, 0.0) for i in range(k)])
    side = math.ceil(math.sqrt(k))
    return np.array([((i % side) * sp, (i // side) * sp) for i in range(k)])


def _boundary_offsets(count: int, scale: float):
    # midpoint first, then symmetric pairs above/below the axis
    offs = [0.0]
    step = 1
    while len(offs) < count:
        offs.extend([step * scale, -step * scale])
        step += 1
    return offs[:count]


def generate_diamond(spec: DiamondSpec, truth_labeling: bool = True) -> Dataset:
    """Build the deterministic diamond dataset described by ``spec``.

    Point ordering is cluster 0 motif, its trailing boundary points, cluster
    1 motif, boundary, ..., final cluster motif, then all outliers. Boundary
    points are placed exactly midway between adjacent cluster centers, so
    they are equidistant from both flanking motif centroids by construction.
    """
    centers = _cluster_centers(spec)
    template = _DIAMOND5 if spec.motif == "diamond5" else _GRID9
    s = spec.motif_scale
    pts, labs = [], []
    for ci in range(spec.num_clusters):
        cx, cy = centers[ci]
        for dx, dy in template:
            pts.append((cx + dx * s, cy + dy * s))
            labs.append(ci)
        if ci + 1 < spec.num_clusters and spec.boundary_points_per_gap > 0:
            nx, ny = centers[ci + 1]
            mx, my = (cx + nx) / 2.0, (cy + ny) / 2.0
            for off in _boundary_offsets(spec.boundary_points_per_gap, s):
                pts.append((mx, my + off))
                labs.append(boundary_label(spec.num_clusters))
    for ox, oy in spec.outliers:
        pts.append((float(ox), float(oy)))
        labs.append(outlier_label(spec.num_clusters))
    name = f"diamond_k{spec.num_clusters}_{spec.motif}"
    return Dataset(np.array(pts, dtype=float),
                   np.array(labs, dtype=np.int64) if truth_labeling else None,
                   name=name)


# Canonical presets mirroring the published scatter benchmarks: 12, 19 and
# 24 points built from 5-point diamonds, and the 35-point variant built
# from 9-point grids with three boundary points per gap.
_PRESETS = {
    "x12": DiamondSpec(2, outliers=((3.34, 10.0),)),
    "x19": DiamondSpec(3, outliers=((3.34, 10.0), (10.02, 10.0))),
    "x24": DiamondSpec(4, outliers=((10.02, 10.0),)),
    "x35": DiamondSpec(3, boundary_points_per_gap=3, motif="grid9",
                       outliers=((3.34, 12.0), (10.02, 12.0))),
}


def diamond_preset(name: str) -> Dataset:
    """Return one of the bundled scatter datasets: x12, x19, x24 or x35."""
    key = name.lower()
    if key not in _PRESETS:
        raise ValueError(f"unknown preset {name!r}; choose from {sorted(_PRESETS)}")
    ds = generate_diamond(_PRESETS[key], truth_labeling=True)
    ds.name = key
    return ds


def load_csv(path, label_column: int | None = None, delimiter: str = ",",
             skip_header: bool = False, name: str | None = None) -> Dataset:
    """Read a delimited text file into a Dataset.

    Non-label fields must parse as finite reals. When ``label_column`` is
    given, its values (numeric or not) are mapped to contiguous integer ids
    in order of first appearance.
    """
    rows = []
    labels_raw = []
    with open(path, "r", newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh, delimiter=delimiter)
        width = None
        for ridx, row in enumerate(reader):
            if skip_header and ridx == 0:
                continue
            if not row or (len(row) == 1 and row[0].strip() == ""):
                continue
            if width is None:
                width = len(row)
            elif len(row) != width:
                raise ValueError(f"ragged row at line {ridx + 1}: "
                                 f"expected {width} fields, got {len(row)}")
            lcol = label_column if label_column is None or label_column >= 0 \
                else len(row) + label_column
            feats = []
            for cidx, cell in enumerate(row):
                if lcol is not None and cidx == lcol:
                    labels_raw.append(cell.strip())
                    continue
                try:
                    v = float(cell)
                except ValueError as exc:
                    raise ValueError(f"unparseable value at line {ridx + 1}, "
                                     f"column {cidx + 1}: {cell!r}") from exc
                if not math.isfinite(v):
                    raise ValueError(f"non-finite value at line {ridx + 1}, "
                                     f"column {cidx + 1}")
                feats.append(v)
            rows.append(feats)
    if not rows:
        raise ValueError(f"no data rows in {path}")
    labels = None
    if label_column is not None:
        seen: dict[str, int] = {}
        labels = np.array([seen.setdefault(v, len(seen)) for v in labels_raw],
                          dtype=np.int64)
    import os
    return Dataset(np.array(rows, dtype=float), labels,
                   name=name or os.path.splitext(os.path.basename(str(path)))[0])


@dataclass
class NormalizationRecord:
    """Affine map applied by :func:`normalize`, kept so cluster centers can
    be reported back in original units.

    normalized = ((x - mins) / ranges) / scale, with constant features
    pinned to 0 and ``scale`` the max pairwise distance of the min-max
    scaled data (1 when all points coincide).
    """

    mins: np.ndarray
    ranges: np.ndarray
    scale: float

    def denormalize(self, points: np.ndarray) -> np.ndarray:
        pts = np.asarray(points, dtype=float) * self.scale
        return pts * np.where(self.ranges > 0, self.ranges, 1.0) + self.mins

    def to_json(self) -> str:
        return json.dumps({"mins": self.mins.tolist(),
                           "ranges": self.ranges.tolist(),
                           "scale": self.scale})

    @classmethod
    def from_json(cls, text: str) -> "NormalizationRecord":
        obj = json.loads(text)
        return cls(np.asarray(obj["mins"], dtype=float),
                   np.asarray(obj["ranges"], dtype=float),
                   float(obj["scale"]))


def max_pairwise_sq_distance(points: np.ndarray, block: int = 512) -> float:
    """Largest squared Euclidean distance over all point pairs."""
    pts = np.asarray(points, dtype=float)
    best = 0.0
    for i in range(0, len(pts), block):
        d2 = ((pts[i:i + block, None, :] - pts[None, :, :]) ** 2).sum(axis=2)
        best = max(best, float(d2.max()))
    return best


def normalize(data: Dataset) -> tuple[Dataset, NormalizationRecord]:
    """Rescale features so the largest pairwise distance is exactly 1.

    Each feature is min-max scaled to [0, 1] (constant features map to 0),
    then all coordinates are divided by the resulting point set's diameter.
    Every squared distance is therefore at most 1, which bounds the sum of
    squared distances to k cluster centers by k, the margin the solver's
    noise membership update depends on.
    """
    pts = data.points
    if not np.isfinite(pts).all():
        raise ValueError("non-finite input")
    mins = pts.min(axis=0)
    ranges = pts.max(axis=0) - mins
    safe = np.where(ranges > 0, ranges, 1.0)
    scaled = (pts - mins) / safe
    scaled[:, ranges == 0] = 0.0
    diam = math.sqrt(max_pairwise_sq_distance(scaled))
    scale = diam if diam > 0 else 1.0
    out = Dataset(scaled / scale, data.labels, name=data.name)
    return out, NormalizationRecord(mins=mins, ranges=ranges, scale=scale)
