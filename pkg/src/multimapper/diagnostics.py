"""Detect simplices whose underlying intersection is disconnected.

A Mapper edge (or higher simplex) promises that its clusters' common points
form one piece; when they split into several components, the complex has
glued regions the data keeps apart. Two detectors are offered: cluster the
intersection directly (fast, clusterer-dependent) or run a small tower of
covers over it and take the mode of the component counts across scales
(clusterer choices wash out in the mode).

Each report also carries a correction hint: refine the simplex's region by
default, or coarsen when every intersection component already shows up as
its own node elsewhere in the complex — that pattern means the structure is
resolved at the current scale and the simplex is an artifact of overlap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .clustering import ClusterParams, cluster_bin
from .cover import CUBOIDAL
from .geometry import BoundingBox
from .mapper import Simplex
from .parallel import parallel_map
from .rescale import AnalysisState, MagnifyRequest
from .tower import build_tower, persistence0, tower_mappers

METHOD_CLUSTERING = "clustering"
METHOD_PERSISTENCE = "persistence"
REFINE = "refine"
COARSEN = "coarsen"
RESCALE_FACTOR = 2


@dataclass(frozen=True)
class TowerConfig:
    """Tower shape for the persistence detector."""

    K: int = 5
    base_cells_per_axis: int = 2
    g: float | None = None
    eps_lo_fraction: float = 0.5
    eps_hi_fraction: float = 1.0


@dataclass(frozen=True)
class ViolationReport:
    simplex: Simplex
    method: str
    beta0_found: int
    witness: tuple[int, int]
    suggested_action: str
    factor: int = RESCALE_FACTOR


def _intersection(state: AnalysisState, simplex: Simplex) -> np.ndarray:
    by_id = state.complex.node_by_id()
    common = set(by_id[simplex[0]].members)
    for v in simplex[1:]:
        common &= set(by_id[v].members)
    return np.array(sorted(common), dtype=int)


def _point_span(state: AnalysisState, ids: np.ndarray) -> float:
    pts = state.pc.points[ids]
    return max(float(np.linalg.norm(pts.max(axis=0) - pts.min(axis=0))), 1e-9)


def _direction(state: AnalysisState, simplex: Simplex, components) -> str:
    """Coarsen when every component is already a node outside the simplex."""
    inside = set(simplex)
    outside = [set(c.members) for c in state.clusters if c.id not in inside]
    for comp in components:
        comp_set = set(comp)
        if not any(comp_set <= node for node in outside):
            return REFINE
    return COARSEN if components else REFINE


def _witness(components) -> tuple[int, int]:
    ordered = sorted(components, key=min)
    return (min(ordered[0]), min(ordered[1]))


def _scan_simplices(state: AnalysisState, max_dim: int) -> list[Simplex]:
    if max_dim < 1:
        raise ValueError(f"max_dim must be >= 1, got {max_dim}")
    return [s for s in state.complex.simplices if len(s) <= max_dim + 1]


def check_clustering(
    state: AnalysisState, params: ClusterParams, max_dim: int = 1
) -> list[ViolationReport]:
    """Cluster each simplex's intersection; >1 cluster is a violation."""

    def check_one(simplex: Simplex) -> ViolationReport | None:
        ids = _intersection(state, simplex)
        found = cluster_bin(
            state.pc, ids, params, fallback_scale=_point_span(state, ids)
        )
        if len(found) <= 1:
            return None
        components = [c.members for c in found]
        return ViolationReport(
            simplex=simplex,
            method=METHOD_CLUSTERING,
            beta0_found=len(found),
            witness=_witness(components),
            suggested_action=_direction(state, simplex, components),
        )

    results = parallel_map(check_one, _scan_simplices(state, max_dim))
    return [r for r in results if r is not None]


def check_persistence(
    state: AnalysisState,
    tower_cfg: TowerConfig = TowerConfig(),
    max_dim: int = 1,
) -> tuple[list[ViolationReport], int]:
    """Tower of covers over each intersection; mode of beta0 > 1 is a violation.

    Intersections with fewer than 2 points cannot carry a scale sweep and are
    skipped (second return value counts them). Clustering inside tower bins
    uses the same parameters the Mapper itself was built with.
    """
    params = ClusterParams.parse(state.params_log[0])
    g = state.base_cover.g if tower_cfg.g is None else tower_cfg.g

    def check_one(simplex: Simplex) -> tuple[str, ViolationReport | None]:
        ids = _intersection(state, simplex)
        if ids.size < 2:
            return "skipped", None
        vals = state.lens.values[ids]
        bounds = BoundingBox(lo=tuple(vals.min(axis=0)), hi=tuple(vals.max(axis=0)))
        tower = build_tower(
            bounds,
            tower_cfg.base_cells_per_axis,
            g=g,
            K=tower_cfg.K,
            eps_lo_fraction=tower_cfg.eps_lo_fraction,
            eps_hi_fraction=tower_cfg.eps_hi_fraction,
        )
        mt = tower_mappers(state.pc, state.lens, tower, params, member_ids=ids)
        report = persistence0(mt)
        mode = report.beta0_mode
        if mode <= 1:
            return "ok", None
        level = report.beta0_per_level.index(mode)
        components = _level_components(mt, level)
        return "ok", ViolationReport(
            simplex=simplex,
            method=METHOD_PERSISTENCE,
            beta0_found=mode,
            witness=_witness(components),
            suggested_action=_direction(state, simplex, components),
        )

    results = parallel_map(check_one, _scan_simplices(state, max_dim))
    skipped = sum(1 for tag, _ in results if tag == "skipped")
    return [r for _, r in results if r is not None], skipped


def _level_components(mt, level: int) -> list[tuple[int, ...]]:
    """Point sets of the components of one tower level's complex."""
    mc = mt.complexes[level]
    parent = {c.id: c.id for c in mc.nodes}

    def find(v: int) -> int:
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for s in mc.simplices:
        for a, b in zip(s, s[1:]):
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[ra] = rb
    groups: dict[int, set[int]] = {}
    for c in mc.nodes:
        groups.setdefault(find(c.id), set()).update(c.members)
    return [tuple(sorted(g)) for g in sorted(groups.values(), key=min)]


def suggest_action(v: ViolationReport, state: AnalysisState) -> MagnifyRequest:
    """Turn a violation into a rescale request on its simplex's nodes."""
    per_axis = state.base_cover.bins_per_axis
    base = max(per_axis) if per_axis else max(
        1, round(math.sqrt(len(state.base_cover.bins)))
    )
    if v.suggested_action == COARSEN:
        bins = max(1, base // v.factor)
    else:
        bins = base * v.factor
    return MagnifyRequest(
        node_ids=tuple(v.simplex),
        scheme=CUBOIDAL,
        bins_per_axis=bins,
        g=state.base_cover.g,
        params=ClusterParams.parse(state.params_log[0]),
    )


def diagnose(
    state: AnalysisState,
    method: str,
    params: ClusterParams | None = None,
    tower_cfg: TowerConfig | None = None,
    max_dim: int = 1,
) -> dict:
    """Run one detector and shape the result for serialization."""
    if method == METHOD_CLUSTERING:
        check_params = params or ClusterParams.parse(state.params_log[0])
        violations = check_clustering(state, check_params, max_dim=max_dim)
        skipped = 0
    elif method == METHOD_PERSISTENCE:
        violations, skipped = check_persistence(
            state, tower_cfg or TowerConfig(), max_dim=max_dim
        )
    else:
        raise ValueError(
            f"method must be {METHOD_CLUSTERING!r} or {METHOD_PERSISTENCE!r}, "
            f"got {method!r}"
        )
    return violations_to_json(violations, skipped)


def violations_to_json(violations: list[ViolationReport], skipped: int) -> dict:
    return {
        "bad": len(violations) > 0,
        "violations": [
            {
                "simplex": list(v.simplex),
                "method": v.method,
                "beta0": v.beta0_found,
                "witness": list(v.witness),
                "suggestion": {"action": v.suggested_action, "factor": v.factor},
            }
            for v in violations
        ],
        "skipped": skipped,
    }
