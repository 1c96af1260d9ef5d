"""Mapper complexes: per-bin clustering, nerve construction, graph Betti.

The nerve is computed from witness sets: for each data point, the set of
node ids whose clusters contain it. Every subset of a witness set of size
2..dim_cap+1 is a simplex, which is exactly the nerve of the cluster family
because any nonempty intersection of clusters is witnessed by one of its
points. Witness sets larger than ``dim_cap + 1`` mark the complex as
truncated rather than silently spilling into higher dimensions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from .clustering import Cluster, ClusterParams, cluster_bin, with_identity
from .cover import Bin, Cover, bin_members, covers_all
from .errors import CoverageError, LensSizeMismatch
from .geometry import LensMap, PointCloud
from .parallel import parallel_map

DEFAULT_DIM_CAP = 3

Simplex = tuple[int, ...]
Skeleton = tuple[list[int], list[tuple[int, int]]]


@dataclass(frozen=True)
class MapperComplex:
    """Nodes (clusters) plus the nerve simplices of dimension >= 1."""

    nodes: list[Cluster]
    simplices: list[Simplex]
    dim_cap: int
    truncated: bool
    truncated_count: int = 0

    def node_by_id(self) -> dict[int, Cluster]:
        return {c.id: c for c in self.nodes}


@dataclass(frozen=True)
class BuildReport:
    points_total: int
    points_clustered: int
    noise_dropped: int
    bins_empty: int
    truncated_simplices_count: int


def nerve(clusters: Sequence[Cluster], dim_cap: int = DEFAULT_DIM_CAP) -> MapperComplex:
    """Nerve of a cluster family, truncated above ``dim_cap``."""
    if dim_cap < 1:
        raise ValueError(f"dim_cap must be >= 1, got {dim_cap}")
    witness: dict[int, list[int]] = {}
    for c in sorted(clusters, key=lambda c: c.id):
        for p in c.members:
            witness.setdefault(p, []).append(c.id)
    distinct = {tuple(ids) for ids in witness.values() if len(ids) > 1}
    simplices: set[Simplex] = set()
    oversized = 0
    for ids in distinct:
        if len(ids) > dim_cap + 1:
            oversized += 1
        top = min(len(ids), dim_cap + 1)
        for k in range(2, top + 1):
            simplices.update(combinations(ids, k))
    return MapperComplex(
        nodes=sorted(clusters, key=lambda c: c.id),
        simplices=sorted(simplices),
        dim_cap=dim_cap,
        truncated=oversized > 0,
        truncated_count=oversized,
    )


def _bin_fallback_scale(b: Bin) -> float:
    return math.sqrt(
        sum((hi - lo) ** 2 for lo, hi in zip(b.base_lo, b.grown_hi))
    )


def cluster_cover(
    pc: PointCloud,
    lens: LensMap,
    cover: Cover,
    params: ClusterParams,
    restrict_to: np.ndarray | None = None,
) -> tuple[list[Cluster], int, int]:
    """Cluster each bin's pullback; returns (clusters, noise_dropped, bins_empty).

    Cluster ids are dense, ordered by (bin id, intra-bin cluster order). When
    ``restrict_to`` is given, only those point indices participate.
    """
    values = lens.values
    if restrict_to is not None:
        mask = np.zeros(len(pc), dtype=bool)
        mask[restrict_to] = True
    else:
        mask = None

    def cluster_one(b: Bin) -> tuple[list[Cluster], int]:
        ids = bin_members(b, values)
        if mask is not None:
            ids = ids[mask[ids]]
        if ids.size == 0:
            return [], 0
        found = cluster_bin(
            pc,
            ids,
            params,
            fallback_scale=_bin_fallback_scale(b),
            bin_id=b.id,
            level=b.level,
        )
        dropped = int(ids.size) - sum(c.size for c in found)
        return found, dropped

    results = parallel_map(cluster_one, cover.bins)
    clusters: list[Cluster] = []
    noise = 0
    empty = 0
    for (found, dropped), b in zip(results, cover.bins):
        noise += dropped
        if not found:
            empty += 1
        for c in found:
            clusters.append(with_identity(c, len(clusters)))
    return clusters, noise, empty


def build_mapper(
    pc: PointCloud,
    lens: LensMap,
    cover: Cover,
    params: ClusterParams,
    dim_cap: int = DEFAULT_DIM_CAP,
) -> tuple[MapperComplex, BuildReport]:
    """Full pipeline: coverage check, per-bin clustering, nerve."""
    if len(lens.values) != len(pc):
        raise LensSizeMismatch(
            f"lens has {len(lens.values)} rows for {len(pc)} points"
        )
    if not covers_all(cover, lens.values):
        raise CoverageError("cover does not contain every lens value")
    clusters, noise, empty = cluster_cover(pc, lens, cover, params)
    mc = nerve(clusters, dim_cap=dim_cap)
    covered = {p for c in clusters for p in c.members}
    report = BuildReport(
        points_total=len(pc),
        points_clustered=len(covered),
        noise_dropped=noise,
        bins_empty=empty,
        truncated_simplices_count=mc.truncated_count,
    )
    return mc, report


def one_skeleton(mc: MapperComplex) -> Skeleton:
    nodes = [c.id for c in mc.nodes]
    edges = [s for s in mc.simplices if len(s) == 2]
    return nodes, sorted(edges)


def graph_betti(skeleton: Skeleton) -> tuple[int, int]:
    """(beta0, beta1) of a graph: components and independent cycles."""
    nodes, edges = skeleton
    parent = {v: v for v in nodes}

    def find(v: int) -> int:
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for a, b in edges:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb
    b0 = len({find(v) for v in nodes})
    b1 = len(edges) - len(nodes) + b0
    return b0, b1


def subcomplex(mc: MapperComplex, node_ids: Iterable[int]) -> MapperComplex:
    """Full subcomplex induced on a subset of nodes."""
    keep = set(node_ids)
    nodes = [c for c in mc.nodes if c.id in keep]
    simplices = [s for s in mc.simplices if all(v in keep for v in s)]
    return MapperComplex(
        nodes=nodes,
        simplices=simplices,
        dim_cap=mc.dim_cap,
        truncated=mc.truncated,
        truncated_count=mc.truncated_count,
    )


def canonical_form(mc: MapperComplex):
    """Structure label invariant under node renumbering.

    Two complexes over the same point set are the same decomposition iff
    their canonical forms match: the multiset of member tuples plus every
    simplex rewritten as its members.
    """
    members = {c.id: c.members for c in mc.nodes}
    node_part = tuple(sorted(members.values()))
    simp_part = tuple(
        sorted(tuple(sorted(members[v] for v in s)) for s in mc.simplices)
    )
    return node_part, simp_part


def complex_to_json(mc: MapperComplex, lens: LensMap) -> dict:
    values = lens.values
    nodes = []
    for c in sorted(mc.nodes, key=lambda c: c.id):
        centroid = values[list(c.members)].mean(axis=0)
        nodes.append(
            {
                "id": c.id,
                "size": c.size,
                "members": list(c.members),
                "bin_id": c.bin_id,
                "level": c.level,
                "lens_centroid": [float(x) for x in centroid],
            }
        )
    return {
        "nodes": nodes,
        "simplices": [list(s) for s in sorted(mc.simplices)],
        "dim_cap": mc.dim_cap,
        "truncated": mc.truncated,
    }


def complex_from_json(data: dict) -> MapperComplex:
    nodes = [
        Cluster(
            id=n["id"],
            members=tuple(n["members"]),
            bin_id=n["bin_id"],
            level=n["level"],
            region=n["id"] // 10**6,
        )
        for n in data["nodes"]
    ]
    return MapperComplex(
        nodes=sorted(nodes, key=lambda c: c.id),
        simplices=sorted(tuple(s) for s in data["simplices"]),
        dim_cap=data["dim_cap"],
        truncated=data["truncated"],
    )
