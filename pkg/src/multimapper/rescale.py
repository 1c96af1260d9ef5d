"""Region-local rescaling of a Mapper complex.

Magnification replaces the sub-Mapper on a selected node set S with a
locally covered one: X-tilde is the union of the selected clusters, every
old cluster that still meets the complement survives unchanged, and a fresh
cover built on the tight lens bounding box of X-tilde yields new clusters
from X-tilde's points only. The nerve of the combined family glues old and
new parts wherever member sets intersect. Coarsening is the same operation
with a coarser local cover.

Restricting the new clusters to X-tilde (rather than to every point whose
lens value lands in the local cover) is what keeps a non-injective lens from
silently dragging far-away points into the magnified region;
``degeneracy_guard`` reports exactly the points that restriction excluded.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .clustering import Cluster, ClusterParams
from .cover import (
    BRICK,
    CUBOIDAL,
    Cover,
    bin_members,
    build_brick_cover,
    build_cuboidal_cover,
)
from .errors import UnknownNode, UnsupportedScheme
from .geometry import BoundingBox, LensMap, PointCloud
from .mapper import (
    BuildReport,
    MapperComplex,
    build_mapper,
    cluster_cover,
    nerve,
)

REGION_STRIDE = 10**6


@dataclass(frozen=True)
class MagnifyRequest:
    """A node selection plus the local cover and clustering to apply to it."""

    node_ids: tuple[int, ...]
    scheme: str
    bins_per_axis: int
    g: float
    params: ClusterParams

    @staticmethod
    def from_json(data: dict) -> "MagnifyRequest":
        cover = data["cover"]
        return MagnifyRequest(
            node_ids=tuple(data["node_ids"]),
            scheme=cover["scheme"],
            bins_per_axis=int(cover["bins_per_axis"]),
            g=float(cover["g"]),
            params=ClusterParams.parse(data["cluster"]),
        )

    def to_json(self) -> dict:
        return {
            "node_ids": list(self.node_ids),
            "cover": {
                "scheme": self.scheme,
                "bins_per_axis": self.bins_per_axis,
                "g": self.g,
            },
            "cluster": self.params.to_string(),
        }


@dataclass(frozen=True)
class RegionRecord:
    """One magnification: which nodes, with what cover and clustering."""

    region: int
    node_ids: tuple[int, ...]
    scheme: str
    bins_per_axis: int
    g: float
    cluster: str
    level: int


@dataclass(frozen=True)
class AnalysisState:
    """Current cluster family and complex, plus how they were produced.

    States are immutable values: every mutation returns a new state, so a
    snapshot handed to a reader stays valid while another magnify runs.
    """

    pc: PointCloud
    lens: LensMap
    clusters: tuple[Cluster, ...]
    complex: MapperComplex
    dim_cap: int
    base_cover: Cover
    params_log: tuple[str, ...]
    region_log: tuple[RegionRecord, ...]
    noise: tuple[int, ...]


def _uncovered(n: int, clusters) -> tuple[int, ...]:
    covered = np.zeros(n, dtype=bool)
    for c in clusters:
        covered[list(c.members)] = True
    return tuple(int(i) for i in np.flatnonzero(~covered))


def initial_state(
    pc: PointCloud,
    lens: LensMap,
    cover: Cover,
    params: ClusterParams,
    dim_cap: int = 3,
) -> tuple[AnalysisState, BuildReport]:
    """Build the first Mapper and wrap it as a rescalable state."""
    mc, report = build_mapper(pc, lens, cover, params, dim_cap=dim_cap)
    state = AnalysisState(
        pc=pc,
        lens=lens,
        clusters=tuple(mc.nodes),
        complex=mc,
        dim_cap=dim_cap,
        base_cover=cover,
        params_log=(params.to_string(),),
        region_log=(),
        noise=_uncovered(len(pc), mc.nodes),
    )
    return state, report


def _selected_union(state: AnalysisState, node_ids) -> np.ndarray:
    by_id = {c.id: c for c in state.clusters}
    missing = [i for i in node_ids if i not in by_id]
    if missing:
        raise UnknownNode(f"node ids not in current complex: {missing}")
    members: set[int] = set()
    for i in node_ids:
        members.update(by_id[i].members)
    return np.array(sorted(members), dtype=int)


def _local_cover(state: AnalysisState, req: MagnifyRequest, tilde: np.ndarray) -> Cover:
    vals = state.lens.values[tilde]
    bounds = BoundingBox(lo=tuple(vals.min(axis=0)), hi=tuple(vals.max(axis=0)))
    if req.scheme == CUBOIDAL:
        return build_cuboidal_cover(bounds, req.bins_per_axis, req.g)
    if req.scheme == BRICK:
        return build_brick_cover(bounds, req.bins_per_axis, req.g)
    raise UnsupportedScheme(f"unknown cover scheme {req.scheme!r}")


def magnify(state: AnalysisState, req: MagnifyRequest) -> AnalysisState:
    """Replace the sub-Mapper on the selected nodes with a local one."""
    tilde = _selected_union(state, req.node_ids)
    region = len(state.region_log) + 1
    in_tilde = np.zeros(len(state.pc), dtype=bool)
    in_tilde[tilde] = True

    kept = [
        c for c in state.clusters if any(not in_tilde[m] for m in c.members)
    ]
    fresh: list[Cluster] = []
    level = 0
    if tilde.size:
        level = max(c.level for c in state.clusters if c.id in set(req.node_ids)) + 1
        local = _local_cover(state, req, tilde)
        found, _, _ = cluster_cover(
            state.pc, state.lens, local, req.params, restrict_to=tilde
        )
        fresh = [
            replace(c, id=region * REGION_STRIDE + c.id, level=level, region=region)
            for c in found
        ]

    family = kept + fresh
    mc = nerve(family, dim_cap=state.dim_cap)
    record = RegionRecord(
        region=region,
        node_ids=tuple(req.node_ids),
        scheme=req.scheme,
        bins_per_axis=req.bins_per_axis,
        g=req.g,
        cluster=req.params.to_string(),
        level=level,
    )
    return replace(
        state,
        clusters=tuple(mc.nodes),
        complex=mc,
        params_log=state.params_log + (req.params.to_string(),),
        region_log=state.region_log + (record,),
        noise=_uncovered(len(state.pc), mc.nodes),
    )


def coarsen(state: AnalysisState, req: MagnifyRequest) -> AnalysisState:
    """Same operation as magnify; named for the zoom-out direction."""
    return magnify(state, req)


def degeneracy_guard(state: AnalysisState, req: MagnifyRequest) -> list[int]:
    """Points outside the selection whose lens values the local cover captures.

    These are exactly the points a lens-preimage magnification would have
    swept in; they are reported, never re-clustered.
    """
    tilde = _selected_union(state, req.node_ids)
    if tilde.size == 0:
        return []
    local = _local_cover(state, req, tilde)
    in_tilde = np.zeros(len(state.pc), dtype=bool)
    in_tilde[tilde] = True
    caught: set[int] = set()
    for b in local.bins:
        for p in bin_members(b, state.lens.values):
            if not in_tilde[p]:
                caught.add(int(p))
    return sorted(caught)
