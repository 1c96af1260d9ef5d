"""Towers of covers, induced Mapper towers, and 0-dimensional persistence.

All levels of a tower share one fixed cell partition of the lens bounds;
level i grows every cell to extent ``frac_i * 2 * cell_step`` (top-right,
like any cover here), with fractions linearly spaced over
[eps_lo_fraction, eps_hi_fraction]. Because bins only grow with the level
and keep their low corner, the map of covers is the identity on cell index
and containment is true by construction — it is still asserted at build
time.

The scale value reported for level i is ``frac_i * mean(2 * cell_step)``,
i.e. the nominal bin size at that level averaged over axes.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass

import numpy as np

from .clustering import Cluster, ClusterParams
from .cover import CUBOIDAL, Bin, Cover, _edge_nudge
from .geometry import BoundingBox, LensMap, PointCloud
from .mapper import MapperComplex, cluster_cover, graph_betti, nerve, one_skeleton
from .parallel import parallel_map

DEFAULT_LEVELS = 5


@dataclass(frozen=True)
class TowerOfCovers:
    levels: tuple[float, ...]
    covers: tuple[Cover, ...]
    maps: tuple[dict[int, int], ...]

    @property
    def res(self) -> float:
        return self.levels[0]


@dataclass(frozen=True)
class MapperTower:
    levels: tuple[float, ...]
    complexes: tuple[MapperComplex, ...]
    node_maps: tuple[dict[int, int], ...]
    soft_warnings: tuple[str, ...]


@dataclass(frozen=True)
class PersistenceReport:
    levels: tuple[float, ...]
    beta0_per_level: tuple[int, ...]
    pairs: tuple[tuple[float, float], ...]
    beta0_mode: int


def build_tower(
    bounds: BoundingBox,
    base_cells_per_axis: int,
    g: float,
    K: int = DEFAULT_LEVELS,
    eps_lo_fraction: float = 0.5,
    eps_hi_fraction: float = 1.0,
) -> TowerOfCovers:
    """Fixed-cell tower: K nested covers over one partition of ``bounds``."""
    if K < 2:
        raise ValueError(f"a tower needs at least 2 levels, got K={K}")
    if not 0.0 < eps_lo_fraction < eps_hi_fraction:
        raise ValueError(
            f"need 0 < eps_lo_fraction < eps_hi_fraction, got "
            f"{eps_lo_fraction} and {eps_hi_fraction}"
        )
    if base_cells_per_axis < 1:
        raise ValueError(f"need at least one cell per axis, got {base_cells_per_axis}")
    d = bounds.d
    span = np.asarray(bounds.span(), dtype=float)
    step = np.maximum(span / base_cells_per_axis, 1e-9)
    fracs = np.linspace(eps_lo_fraction, eps_hi_fraction, K)
    levels = tuple(float(f * np.mean(2.0 * step)) for f in fracs)

    cell_index = list(
        itertools.product(*(range(base_cells_per_axis) for _ in range(d)))
    )
    covers = []
    for li, frac in enumerate(fracs):
        extent = frac * 2.0 * step
        bins = []
        for bid, idx in enumerate(cell_index):
            lo = tuple(
                float(bounds.lo[k] + idx[k] * step[k]) for k in range(d)
            )
            hi = tuple(
                float(bounds.lo[k] + (idx[k] + 1) * step[k]) for k in range(d)
            )
            grown = []
            for k in range(d):
                gh = lo[k] + float(extent[k]) * (1.0 + g)
                if idx[k] == base_cells_per_axis - 1:
                    gh += _edge_nudge(bounds.hi[k], float(span[k]))
                grown.append(max(gh, hi[k]))
            bins.append(
                Bin(
                    id=bid,
                    base_lo=lo,
                    base_hi=hi,
                    grown_hi=tuple(grown),
                    level=li,
                )
            )
        covers.append(
            Cover(
                bins=bins,
                scheme=CUBOIDAL,
                g=g,
                bounds=bounds,
                bins_per_axis=(base_cells_per_axis,) * d,
                warn_overlap=False,
            )
        )

    identity = {bid: bid for bid in range(len(cell_index))}
    maps = tuple(dict(identity) for _ in range(K - 1))
    for i in range(K - 1):
        for b in covers[i].bins:
            target = covers[i + 1].bin_by_id(maps[i][b.id])
            assert b.base_lo == target.base_lo and all(
                x <= y for x, y in zip(b.grown_hi, target.grown_hi)
            ), "tower containment violated"
    return TowerOfCovers(levels=levels, covers=tuple(covers), maps=maps)


def node_map_between(
    src: MapperComplex, dst: MapperComplex, bin_map: dict[int, int]
) -> tuple[dict[int, int], list[str]]:
    """Map each src cluster to the dst cluster holding most of its members.

    Candidates in the image bin are preferred; a cluster with no overlap
    there falls back to the best-overlapping cluster anywhere in dst (a soft
    warning), and in the noise-only corner case to the smallest dst id.
    Ties always break toward the smaller id.
    """
    warnings: list[str] = []
    dst_by_bin: dict[int, list[Cluster]] = {}
    for c in dst.nodes:
        dst_by_bin.setdefault(c.bin_id, []).append(c)
    mapping: dict[int, int] = {}
    for u in src.nodes:
        mem = set(u.members)

        def best(cands) -> tuple[int, int] | None:
            scored = [(len(mem & set(c.members)), c.id) for c in cands]
            scored = [(s, cid) for s, cid in scored if s > 0]
            if not scored:
                return None
            score, cid = max(scored, key=lambda t: (t[0], -t[1]))
            return score, cid

        target_bin = bin_map.get(u.bin_id, u.bin_id)
        hit = best(dst_by_bin.get(target_bin, []))
        if hit is None:
            hit = best(dst.nodes)
            if hit is not None:
                warnings.append(
                    f"cluster {u.id}: no overlap in bin {target_bin}, "
                    f"mapped by global overlap to {hit[1]}"
                )
        if hit is None:
            fallback = min(c.id for c in dst.nodes)
            warnings.append(
                f"cluster {u.id}: no overlapping cluster at next level, "
                f"mapped to {fallback}"
            )
            mapping[u.id] = fallback
        else:
            mapping[u.id] = hit[1]
    return mapping, warnings


def tower_mappers(
    pc: PointCloud,
    lens: LensMap,
    tower: TowerOfCovers,
    params: ClusterParams,
    dim_cap: int = 1,
    member_ids: np.ndarray | None = None,
) -> MapperTower:
    """One Mapper per tower level plus the induced node maps."""

    def build_level(cover: Cover) -> MapperComplex:
        clusters, _, _ = cluster_cover(
            pc, lens, cover, params, restrict_to=member_ids
        )
        return nerve(clusters, dim_cap=dim_cap)

    complexes = parallel_map(build_level, tower.covers)
    node_maps = []
    warnings: list[str] = []
    for i in range(len(complexes) - 1):
        mapping, warns = node_map_between(
            complexes[i], complexes[i + 1], tower.maps[i]
        )
        node_maps.append(mapping)
        warnings.extend(warns)
    return MapperTower(
        levels=tower.levels,
        complexes=tuple(complexes),
        node_maps=tuple(node_maps),
        soft_warnings=tuple(warnings),
    )


def beta0_mode_from_counts(beta0_per_level) -> int:
    """argmax over beta of #levels showing that beta; ties go to smaller beta."""
    counts = Counter(beta0_per_level)
    best = max(counts.values())
    return min(b for b, c in counts.items() if c == best)


def _components(mc: MapperComplex) -> dict[int, int]:
    """Node id -> component id, components numbered by smallest node id."""
    nodes, edges = one_skeleton(mc)
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
    groups: dict[int, list[int]] = {}
    for v in nodes:
        groups.setdefault(find(v), []).append(v)
    ordered = sorted(groups.values(), key=min)
    return {v: ci for ci, comp in enumerate(ordered) for v in comp}


def persistence0(mt: MapperTower) -> PersistenceReport:
    """Track components through the node maps; elder rule on merges.

    A component class is born at the first scale where its component is
    distinct and dies at the last scale where it still is; on a merge the
    class with the earlier birth (then smaller id) survives. Classes alive
    at the top die at the top scale.
    """
    if len(mt.complexes) < 2:
        raise ValueError("persistence needs a tower with at least 2 levels")
    levels = mt.levels
    comp_maps = [_components(mc) for mc in mt.complexes]
    beta0 = tuple(
        len(set(cm.values())) if cm else 0 for cm in comp_maps
    )

    births: dict[int, float] = {}
    deaths: dict[int, float] = {}
    alive: dict[int, int] = {}
    next_class = 0
    comp_members: dict[int, list[int]] = {}
    for v, ci in comp_maps[0].items():
        comp_members.setdefault(ci, []).append(v)
    for ci in sorted(comp_members):
        births[next_class] = levels[0]
        alive[next_class] = ci
        next_class += 1

    for i in range(len(mt.complexes) - 1):
        nmap = mt.node_maps[i]
        cm_next = comp_maps[i + 1]
        image: dict[int, int] = {}
        rep = {}
        for v, ci in comp_maps[i].items():
            rep.setdefault(ci, []).append(v)
        for cls, ci in alive.items():
            anchor = min(rep[ci])
            image[cls] = cm_next[nmap[anchor]]
        merged: dict[int, list[int]] = {}
        for cls, tgt in image.items():
            merged.setdefault(tgt, []).append(cls)
        new_alive: dict[int, int] = {}
        for tgt, classes in merged.items():
            survivor = min(classes, key=lambda c: (births[c], c))
            new_alive[survivor] = tgt
            for c in classes:
                if c != survivor:
                    deaths[c] = levels[i]
        taken = set(merged)
        for ci in sorted(set(cm_next.values()) - taken):
            births[next_class] = levels[i + 1]
            new_alive[next_class] = ci
            next_class += 1
        alive = new_alive

    for cls in alive:
        deaths[cls] = levels[-1]
    pairs = tuple(
        sorted((births[c], deaths[c]) for c in births)
    )
    return PersistenceReport(
        levels=levels,
        beta0_per_level=beta0,
        pairs=pairs,
        beta0_mode=beta0_mode_from_counts(beta0),
    )


def report_to_json(report: PersistenceReport) -> dict:
    return {
        "levels": [float(x) for x in report.levels],
        "beta0": [int(b) for b in report.beta0_per_level],
        "pairs": [[float(b), float(d)] for b, d in report.pairs],
        "beta0_mode": int(report.beta0_mode),
    }
