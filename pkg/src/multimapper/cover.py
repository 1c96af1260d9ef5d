"""Overlapping covers of lens space: cuboidal grids and brick lattices.

Bins are axis-aligned boxes. The base boxes partition the lens bounds; the
overlap fraction g grows each box toward the top-right only, so membership
stays a half-open test base_lo[k] <= z[k] < grown_hi[k] with no ambiguity at
seams. Bins on the max edge of the bounds are nudged past the bounds so the
componentwise maximum survives the half-open test even at g = 0.

Brick lattices offset every other row by half a brick width. With overlap
below 50% at most three bricks can share a point, which caps the Mapper at
2-simplices; cuboidal grids in 2d admit 4-fold corners.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    BrickCoverDimension,
    InvalidOverlap,
    UnknownBin,
    UnsupportedScheme,
)
from .geometry import BoundingBox

CUBOIDAL = "cuboidal"
BRICK = "brick"

# Bins whose base touches the bounds max edge extend at least this far past
# it, scaled to the data, keeping the half-open membership test total.
_EDGE_NUDGE = 1e-9
# Zero-width lens axes are widened to this so covers stay well formed.
_DEGENERATE_WIDTH = 1e-9


@dataclass(frozen=True)
class Bin:
    """One cover element: a base partition box plus its grown extension."""

    id: int
    base_lo: tuple[float, ...]
    base_hi: tuple[float, ...]
    grown_hi: tuple[float, ...]
    level: int = 0

    def __post_init__(self):
        for lo, hi, gh in zip(self.base_lo, self.base_hi, self.grown_hi):
            if not (lo < hi <= gh):
                raise ValueError(f"bin {self.id}: need lo < hi <= grown, got {lo},{hi},{gh}")


@dataclass(eq=False)
class Cover:
    """A finite list of bins covering the lens bounds."""

    bins: list[Bin]
    scheme: str
    g: float
    bounds: BoundingBox
    bins_per_axis: tuple[int, ...] | None = None
    warn_overlap: bool = False

    @property
    def d(self) -> int:
        return self.bounds.d

    @property
    def is_empty(self) -> bool:
        return not self.bins

    def bin_by_id(self, bin_id: int) -> Bin:
        for b in self.bins:
            if b.id == bin_id:
                return b
        raise UnknownBin(f"bin {bin_id} not in cover")


def _edge_nudge(hi: float, span: float) -> float:
    return _EDGE_NUDGE * max(1.0, abs(hi), span)


def _working_edges(bounds: BoundingBox, counts: tuple[int, ...]) -> list[np.ndarray]:
    """Per-axis partition edges; degenerate axes get a tiny positive width."""
    edges = []
    for k, n in enumerate(counts):
        lo, hi = bounds.lo[k], bounds.hi[k]
        if hi <= lo:
            hi = lo + _DEGENERATE_WIDTH
        edges.append(np.linspace(lo, hi, n + 1))
    return edges


def _check_overlap(g: float) -> None:
    if not 0.0 <= g < 1.0:
        raise InvalidOverlap(f"overlap fraction must be in [0, 1), got {g}")


def _grown(hi: float, lo: float, g: float, at_edge: bool, bound_hi: float, span: float) -> float:
    value = hi + g * (hi - lo)
    if at_edge:
        value = max(value, bound_hi + _edge_nudge(bound_hi, span))
    return value


def build_cuboidal_cover(bounds: BoundingBox, bins_per_axis: int, g: float) -> Cover:
    """Tile the bounds with a bins_per_axis^d grid, growing each box by g."""
    _check_overlap(g)
    if bins_per_axis < 1:
        raise ValueError(f"bins_per_axis must be >= 1, got {bins_per_axis}")
    d = bounds.d
    counts = (bins_per_axis,) * d
    edges = _working_edges(bounds, counts)
    spans = [float(e[-1] - e[0]) for e in edges]
    bins: list[Bin] = []
    for idx in itertools.product(*(range(n) for n in counts)):
        lo = tuple(float(edges[k][i]) for k, i in enumerate(idx))
        hi = tuple(float(edges[k][i + 1]) for k, i in enumerate(idx))
        gh = tuple(
            _grown(hi[k], lo[k], g, idx[k] == counts[k] - 1, float(edges[k][-1]), spans[k])
            for k in range(d)
        )
        bins.append(Bin(id=len(bins), base_lo=lo, base_hi=hi, grown_hi=gh))
    return Cover(bins=bins, scheme=CUBOIDAL, g=g, bounds=bounds, bins_per_axis=counts)


def build_brick_cover(
    bounds: BoundingBox, bins_per_axis: int | tuple[int, int], g: float
) -> Cover:
    """Rows of equal bricks, odd rows offset by half a brick width.

    bins_per_axis is the brick count per row (and the row count when given
    as a single integer). Offset rows gain one clipped partial brick at each
    end so the bounds stay fully covered.
    """
    _check_overlap(g)
    if bounds.d != 2:
        raise BrickCoverDimension(f"brick covers need a 2d lens, got d={bounds.d}")
    if isinstance(bins_per_axis, int):
        nx, ny = bins_per_axis, bins_per_axis
    else:
        nx, ny = bins_per_axis
    if nx < 1 or ny < 1:
        raise ValueError(f"brick counts must be >= 1, got {nx}x{ny}")

    lo_x, lo_y = bounds.lo
    hi_x, hi_y = bounds.hi
    if hi_x <= lo_x:
        hi_x = lo_x + _DEGENERATE_WIDTH
    if hi_y <= lo_y:
        hi_y = lo_y + _DEGENERATE_WIDTH
    span_x, span_y = hi_x - lo_x, hi_y - lo_y
    w = span_x / nx
    y_edges = np.linspace(lo_y, hi_y, ny + 1)

    bins: list[Bin] = []
    for row in range(ny):
        y0, y1 = float(y_edges[row]), float(y_edges[row + 1])
        top_row = row == ny - 1
        if row % 2 == 0:
            x_edges = np.linspace(lo_x, hi_x, nx + 1)
            pieces = [(float(x_edges[j]), float(x_edges[j + 1])) for j in range(nx)]
        else:
            pieces = []
            for j in range(nx + 1):
                a = max(lo_x + (j - 0.5) * w, lo_x)
                b = min(lo_x + (j + 0.5) * w, hi_x)
                if b > a:
                    pieces.append((a, b))
        last = len(pieces) - 1
        for j, (a, b) in enumerate(pieces):
            gx = _grown(b, a, g, j == last, hi_x, span_x)
            gy = _grown(y1, y0, g, top_row, hi_y, span_y)
            bins.append(
                Bin(id=len(bins), base_lo=(a, y0), base_hi=(b, y1), grown_hi=(gx, gy))
            )
    return Cover(
        bins=bins,
        scheme=BRICK,
        g=g,
        bounds=bounds,
        bins_per_axis=(nx, ny),
        warn_overlap=g >= 0.5,
    )


def slice_refine(cover: Cover, selected: set[int], m: int) -> Cover:
    """Replace each selected bin by m^d children tiling its base box.

    Children grow by g times their own width and sit at level parent+1;
    unselected bins are untouched. Ids are renumbered densely in the original
    order with children in their parent's slot.
    """
    if m < 2:
        raise ValueError(f"slice factor must be >= 2, got {m}")
    if cover.scheme != CUBOIDAL:
        raise UnsupportedScheme("slice_refine is defined for cuboidal covers")
    known = {b.id for b in cover.bins}
    missing = set(selected) - known
    if missing:
        raise UnknownBin(f"unknown bin ids: {sorted(missing)}")

    d = cover.d
    out: list[Bin] = []
    for b in cover.bins:
        if b.id not in selected:
            out.append(
                Bin(
                    id=len(out),
                    base_lo=b.base_lo,
                    base_hi=b.base_hi,
                    grown_hi=b.grown_hi,
                    level=b.level,
                )
            )
            continue
        child_edges = [
            np.linspace(b.base_lo[k], b.base_hi[k], m + 1) for k in range(d)
        ]
        for idx in itertools.product(*(range(m) for _ in range(d))):
            lo = tuple(float(child_edges[k][i]) for k, i in enumerate(idx))
            hi = tuple(float(child_edges[k][i + 1]) for k, i in enumerate(idx))
            gh = []
            for k in range(d):
                at_edge = hi[k] >= cover.bounds.hi[k]
                span_k = cover.bounds.hi[k] - cover.bounds.lo[k]
                gh.append(
                    _grown(hi[k], lo[k], cover.g, at_edge, cover.bounds.hi[k], span_k)
                )
            out.append(
                Bin(
                    id=len(out),
                    base_lo=lo,
                    base_hi=hi,
                    grown_hi=tuple(gh),
                    level=b.level + 1,
                )
            )
    return Cover(
        bins=out,
        scheme=cover.scheme,
        g=cover.g,
        bounds=cover.bounds,
        bins_per_axis=None,
        warn_overlap=cover.warn_overlap,
    )


def bin_members(b: Bin, values: np.ndarray) -> np.ndarray:
    """Indices of lens values inside the bin's half-open grown box."""
    lo = np.asarray(b.base_lo)
    gh = np.asarray(b.grown_hi)
    mask = np.all((values >= lo) & (values < gh), axis=1)
    return np.flatnonzero(mask)


def cover_membership(cover: Cover, values: np.ndarray) -> list[np.ndarray]:
    """Per-bin member indices, in bin order."""
    return [bin_members(b, values) for b in cover.bins]


def covers_all(cover: Cover, values: np.ndarray) -> bool:
    """True when every lens value lies in at least one bin."""
    covered = np.zeros(len(values), dtype=bool)
    for b in cover.bins:
        lo = np.asarray(b.base_lo)
        gh = np.asarray(b.grown_hi)
        covered |= np.all((values >= lo) & (values < gh), axis=1)
        if covered.all():
            return True
    return bool(covered.all())


def restrict_cover(cover: Cover, lens, member_ids: set[int]) -> Cover:
    """Drop bins containing no lens value of the given members.

    Geometry is unchanged; surviving bins are renumbered densely. The result
    may be empty (check is_empty).
    """
    members = np.array(sorted(member_ids), dtype=int)
    values = lens.values[members]
    kept: list[Bin] = []
    for b in cover.bins:
        if len(bin_members(b, values)):
            kept.append(
                Bin(
                    id=len(kept),
                    base_lo=b.base_lo,
                    base_hi=b.base_hi,
                    grown_hi=b.grown_hi,
                    level=b.level,
                )
            )
    return Cover(
        bins=kept,
        scheme=cover.scheme,
        g=cover.g,
        bounds=cover.bounds,
        bins_per_axis=None,
        warn_overlap=cover.warn_overlap,
    )


def cover_to_json(cover: Cover) -> dict:
    """Serialize to the wire shape {"scheme", "g", "bins": [...]}."""
    return {
        "scheme": cover.scheme,
        "g": cover.g,
        "bins": [
            {
                "id": b.id,
                "base_lo": list(b.base_lo),
                "base_hi": list(b.base_hi),
                "grown_hi": list(b.grown_hi),
                "level": b.level,
            }
            for b in cover.bins
        ],
    }


def cover_from_json(data: dict) -> Cover:
    """Rebuild a cover from its wire shape; bounds come from the base boxes."""
    bins = [
        Bin(
            id=int(rec["id"]),
            base_lo=tuple(float(v) for v in rec["base_lo"]),
            base_hi=tuple(float(v) for v in rec["base_hi"]),
            grown_hi=tuple(float(v) for v in rec["grown_hi"]),
            level=int(rec["level"]),
        )
        for rec in data["bins"]
    ]
    if not bins:
        raise ValueError("cover JSON carries no bins")
    lo = tuple(np.min([b.base_lo for b in bins], axis=0))
    hi = tuple(np.max([b.base_hi for b in bins], axis=0))
    g = float(data["g"])
    return Cover(
        bins=bins,
        scheme=str(data["scheme"]),
        g=g,
        bounds=BoundingBox(lo=lo, hi=hi),
        bins_per_axis=None,
        warn_overlap=g >= 0.5,
    )
