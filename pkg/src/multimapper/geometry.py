"""Point-cloud and lens-value storage plus the built-in lens functions.

A lens maps each point of the cloud to a 1- or 2-dimensional value; every
cover downstream is built over the lens image, never over the raw points.
Lens values may come from a coordinate projection, from PCA, or from a CSV
produced by an external embedding.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import (
    DegenerateLens,
    InvalidLensAxis,
    LensSizeMismatch,
    ParseError,
)

MAX_LENS_DIM = 2


@dataclass(frozen=True, eq=False)
class PointCloud:
    """Immutable (n_points, n) array of real vectors; ids are row indices."""

    points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2:
            raise ValueError(f"points must be a 2d array, got shape {pts.shape}")
        if pts.shape[0] < 1 or pts.shape[1] < 1:
            raise ValueError(f"need at least one point and one axis, got shape {pts.shape}")
        if not np.all(np.isfinite(pts)):
            raise ValueError("points must be finite")
        object.__setattr__(self, "points", pts)
        self.points.setflags(write=False)

    @property
    def n(self) -> int:
        return self.points.shape[1]

    def __len__(self) -> int:
        return self.points.shape[0]


@dataclass(frozen=True, eq=False)
class LensMap:
    """Per-point lens values, one d-vector per point index, d in {1, 2}."""

    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.ndim != 2:
            raise ValueError(f"lens values must be a 2d array, got shape {vals.shape}")
        if not 1 <= vals.shape[1] <= MAX_LENS_DIM:
            raise ValueError(f"lens dimension must be 1 or 2, got {vals.shape[1]}")
        if not np.all(np.isfinite(vals)):
            raise ValueError("lens values must be finite")
        object.__setattr__(self, "values", vals)
        self.values.setflags(write=False)

    @property
    def d(self) -> int:
        return self.values.shape[1]

    def __len__(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True)
class BoundingBox:
    """Axis-aligned box, lo[k] <= hi[k]; hosts the extent of a lens image."""

    lo: tuple[float, ...]
    hi: tuple[float, ...]

    def __post_init__(self):
        if len(self.lo) != len(self.hi):
            raise ValueError("lo and hi must share a dimension")
        if any(l > h for l, h in zip(self.lo, self.hi)):
            raise ValueError(f"inverted box: lo={self.lo} hi={self.hi}")

    @property
    def d(self) -> int:
        return len(self.lo)

    def span(self) -> tuple[float, ...]:
        return tuple(h - l for l, h in zip(self.lo, self.hi))


def lens_coordinate(pc: PointCloud, axes: Sequence[int]) -> LensMap:
    """Project points onto the chosen coordinate axes (1 or 2 of them)."""
    axes = list(axes)
    if not 1 <= len(axes) <= MAX_LENS_DIM:
        raise InvalidLensAxis(f"need 1 or {MAX_LENS_DIM} axes, got {len(axes)}")
    for a in axes:
        if not 0 <= a < pc.n:
            raise InvalidLensAxis(f"axis {a} out of range for {pc.n}-dimensional points")
    return LensMap(pc.points[:, axes].copy())


def lens_pca(pc: PointCloud, d: int) -> LensMap:
    """Project centered points onto their top-d principal directions."""
    if d not in (1, MAX_LENS_DIM):
        raise ValueError(f"pca lens dimension must be 1 or {MAX_LENS_DIM}, got {d}")
    if len(pc) < d:
        raise DegenerateLens(f"need at least {d} points for a {d}d pca lens")
    centered = pc.points - pc.points.mean(axis=0)
    # SVD of the centered cloud; right singular vectors are the principal axes.
    _, singular, vt = np.linalg.svd(centered, full_matrices=False)
    scale = float(singular[0]) if singular.size else 0.0
    if scale <= 0.0 or singular.size < d or singular[d - 1] <= 1e-12 * scale:
        raise DegenerateLens(f"data rank below requested lens dimension {d}")
    axes = vt[:d]
    # Fix each axis sign by its largest-magnitude component so output is
    # reproducible across equivalent SVD solutions.
    for row in axes:
        pivot = row[np.argmax(np.abs(row))]
        if pivot < 0:
            row *= -1.0
    return LensMap(centered @ axes.T)


def lens_bounds(lens: LensMap) -> BoundingBox:
    """Componentwise min/max of the lens values."""
    return BoundingBox(
        lo=tuple(lens.values.min(axis=0)),
        hi=tuple(lens.values.max(axis=0)),
    )


def _parse_numeric_rows(path: Path) -> np.ndarray:
    """Read a CSV of decimal rows; a non-numeric first cell marks a header."""
    lines = [ln for ln in Path(path).read_text().splitlines() if ln.strip()]
    if not lines:
        raise ParseError(f"{path}: empty file")
    first_cell = lines[0].split(",")[0].strip()
    try:
        float(first_cell)
    except ValueError:
        lines = lines[1:]
        if not lines:
            raise ParseError(f"{path}: header but no data rows")
    rows = []
    width = None
    for i, ln in enumerate(lines):
        cells = [c.strip() for c in ln.split(",")]
        try:
            row = [float(c) for c in cells]
        except ValueError as exc:
            raise ParseError(f"{path}: non-numeric cell on data row {i}") from exc
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise ParseError(f"{path}: row {i} has {len(row)} cells, expected {width}")
        rows.append(row)
    return np.array(rows, dtype=float)


def load_points_csv(path: Path | str) -> PointCloud:
    """Load a point cloud CSV (one row per point, optional header row)."""
    return PointCloud(_parse_numeric_rows(Path(path)))


def load_lens_csv(path: Path | str, n_points: int) -> LensMap:
    """Load precomputed lens values; row count must match the point count."""
    vals = _parse_numeric_rows(Path(path))
    if vals.shape[0] != n_points:
        raise LensSizeMismatch(
            f"{path}: {vals.shape[0]} lens rows for {n_points} points"
        )
    if vals.shape[1] > MAX_LENS_DIM:
        raise ParseError(f"{path}: lens files carry 1 or 2 columns, got {vals.shape[1]}")
    return LensMap(vals)
