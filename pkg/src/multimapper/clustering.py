"""Clustering within pullback bins.

Clusters stand in for path-connected components of a bin's preimage, so the
two algorithms here are the connectivity-flavored ones: DBSCAN (density,
drops noise) and single linkage (distance-graph components, keeps every
point). Both are written out directly; determinism matters more than speed
at the scales the engine targets, so members are sorted before any
processing and ties resolve toward lower indices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .errors import ParseError
from .geometry import PointCloud

DBSCAN = "dbscan"
SINGLE_LINKAGE = "single_linkage"

# auto mode: radius from the 90th percentile (nearest rank) of k-NN
# distances, k fixed at 4; single linkage doubles it into a neighborhood
# diameter so points with overlapping 4-NN balls end up linked.
AUTO_KNN = 4
SINGLE_AUTO_FACTOR = 2.0


@dataclass(frozen=True)
class ClusterParams:
    """Algorithm choice plus its radius parameters.

    auto=True derives the radius per bin from the member distribution, so
    eps/threshold stay None until resolution time.
    """

    algorithm: str
    eps: float | None = None
    min_pts: int = 4
    threshold: float | None = None
    auto: bool = False

    def __post_init__(self):
        if self.algorithm not in (DBSCAN, SINGLE_LINKAGE):
            raise ParseError(f"unknown clustering algorithm {self.algorithm!r}")
        if self.min_pts < 1:
            raise ParseError(f"min_pts must be >= 1, got {self.min_pts}")
        if not self.auto:
            if self.algorithm == DBSCAN:
                if self.eps is None or self.eps <= 0:
                    raise ParseError(f"dbscan eps must be > 0, got {self.eps}")
            else:
                if self.threshold is None or self.threshold <= 0:
                    raise ParseError(
                        f"single linkage threshold must be > 0, got {self.threshold}"
                    )

    @staticmethod
    def parse(spec: str) -> "ClusterParams":
        """Parse "dbscan:auto", "dbscan:eps=E,min_pts=M", "single:threshold=T",
        or "single:auto"."""
        head, sep, rest = spec.partition(":")
        if not sep:
            raise ParseError(f"cluster spec needs 'algorithm:params', got {spec!r}")
        if head == "dbscan":
            if rest == "auto":
                return ClusterParams(algorithm=DBSCAN, auto=True)
            kv = _parse_kv(rest, spec)
            if set(kv) != {"eps", "min_pts"}:
                raise ParseError(f"dbscan takes eps and min_pts, got {spec!r}")
            return ClusterParams(
                algorithm=DBSCAN, eps=kv["eps"], min_pts=int(kv["min_pts"])
            )
        if head == "single":
            if rest == "auto":
                return ClusterParams(algorithm=SINGLE_LINKAGE, auto=True)
            kv = _parse_kv(rest, spec)
            if set(kv) != {"threshold"}:
                raise ParseError(f"single takes threshold, got {spec!r}")
            return ClusterParams(algorithm=SINGLE_LINKAGE, threshold=kv["threshold"])
        raise ParseError(f"unknown clustering algorithm in {spec!r}")

    def to_string(self) -> str:
        if self.algorithm == DBSCAN:
            if self.auto:
                return "dbscan:auto"
            return f"dbscan:eps={_fmt(self.eps)},min_pts={self.min_pts}"
        if self.auto:
            return "single:auto"
        return f"single:threshold={_fmt(self.threshold)}"


def _fmt(x: float) -> str:
    return repr(int(x)) if float(x).is_integer() else repr(float(x))


def _parse_kv(rest: str, spec: str) -> dict[str, float]:
    out: dict[str, float] = {}
    for part in rest.split(","):
        key, sep, val = part.partition("=")
        if not sep or not key:
            raise ParseError(f"bad cluster parameter {part!r} in {spec!r}")
        try:
            out[key.strip()] = float(val)
        except ValueError as exc:
            raise ParseError(f"non-numeric value in {spec!r}") from exc
    return out


@dataclass(frozen=True)
class Cluster:
    """A point-index set carrying its originating bin, depth, and region."""

    id: int
    members: tuple[int, ...]
    bin_id: int
    level: int = 0
    region: int = 0

    def __post_init__(self):
        if not self.members:
            raise ValueError("clusters are nonempty by definition")

    @property
    def size(self) -> int:
        return len(self.members)


def with_identity(cluster: Cluster, new_id: int, bin_id: int | None = None) -> Cluster:
    """Copy a cluster under a new id (and optionally bin), members untouched."""
    return replace(
        cluster, id=new_id, bin_id=cluster.bin_id if bin_id is None else bin_id
    )


def _pairwise_distances(points: np.ndarray) -> np.ndarray:
    diff = points[:, None, :] - points[None, :, :]
    return np.sqrt((diff * diff).sum(axis=2))


def auto_eps(
    pc: PointCloud,
    member_ids: Sequence[int],
    k: int,
    fallback: float | None = None,
) -> float:
    """90th-percentile (nearest-rank) k-th nearest-neighbor distance.

    With k or fewer members the k-NN distance is undefined; callers pass the
    bin's lens-space diameter as the fallback scale.
    """
    members = sorted(member_ids)
    if len(members) <= k:
        if fallback is None:
            raise ValueError(f"need more than {k} members or a fallback scale")
        return float(fallback)
    dist = _pairwise_distances(pc.points[members])
    # row-sorted column k skips the self-distance at column 0
    knn = np.sort(dist, axis=1)[:, k]
    rank = math.ceil(0.9 * len(knn))
    return float(np.sort(knn)[rank - 1])


def _resolve_radius(
    pc: PointCloud,
    members: list[int],
    params: ClusterParams,
    fallback_scale: float | None,
) -> float:
    if params.algorithm == DBSCAN:
        if not params.auto:
            return float(params.eps)
        return auto_eps(pc, members, params.min_pts, fallback=fallback_scale)
    if not params.auto:
        return float(params.threshold)
    return SINGLE_AUTO_FACTOR * auto_eps(pc, members, AUTO_KNN, fallback=fallback_scale)


def _dbscan_groups(dist: np.ndarray, eps: float, min_pts: int) -> list[list[int]]:
    """Index groups per DBSCAN; noise rows are simply absent.

    Neighborhoods include the point itself. Seeds run in ascending index
    order and each cluster expands fully before the next seed, so a border
    point reachable from several clusters is claimed by the lowest id.
    """
    n = dist.shape[0]
    within = dist <= eps
    core = within.sum(axis=1) >= min_pts
    label = [-1] * n
    groups: list[list[int]] = []
    for seed in range(n):
        if label[seed] != -1 or not core[seed]:
            continue
        current = len(groups)
        label[seed] = current
        frontier = [seed]
        while frontier:
            nxt: list[int] = []
            for j in frontier:
                for q in np.flatnonzero(within[j]):
                    if label[q] == -1:
                        label[q] = current
                        if core[q]:
                            nxt.append(int(q))
            frontier = nxt
        groups.append([i for i in range(n) if label[i] == current])
    return groups


def _single_linkage_groups(dist: np.ndarray, threshold: float) -> list[list[int]]:
    """Connected components of the at-most-threshold graph via union-find."""
    n = dist.shape[0]
    parent = list(range(n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    rows, cols = np.nonzero(dist <= threshold)
    for a, b in zip(rows, cols):
        if a < b:
            ra, rb = find(int(a)), find(int(b))
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)
    roots: dict[int, list[int]] = {}
    for i in range(n):
        roots.setdefault(find(i), []).append(i)
    return [roots[r] for r in sorted(roots)]


def cluster_bin(
    pc: PointCloud,
    member_ids: Sequence[int],
    params: ClusterParams,
    fallback_scale: float | None = None,
    bin_id: int = -1,
    level: int = 0,
    region: int = 0,
) -> list[Cluster]:
    """Cluster one bin's members; DBSCAN noise joins no cluster.

    Cluster ids are local (0..k-1 within this call); the pipeline reassigns
    them in (bin id, intra-bin) order afterwards.
    """
    members = sorted(int(m) for m in member_ids)
    if not members:
        return []
    if len(members) == 1:
        if params.algorithm == SINGLE_LINKAGE:
            return [
                Cluster(id=0, members=(members[0],), bin_id=bin_id, level=level, region=region)
            ]
        # a lone point is core only when min_pts is 1
        if params.min_pts > 1:
            return []
        return [
            Cluster(id=0, members=(members[0],), bin_id=bin_id, level=level, region=region)
        ]
    radius = _resolve_radius(pc, members, params, fallback_scale)
    dist = _pairwise_distances(pc.points[members])
    if params.algorithm == DBSCAN:
        groups = _dbscan_groups(dist, radius, params.min_pts)
    else:
        groups = _single_linkage_groups(dist, radius)
    return [
        Cluster(
            id=i,
            members=tuple(members[j] for j in group),
            bin_id=bin_id,
            level=level,
            region=region,
        )
        for i, group in enumerate(groups)
    ]
