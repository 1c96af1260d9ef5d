"""Independent reference implementations used to cross-check the package.

Everything here is deliberately written the slow, obvious way (brute force
enumeration, dense matrices) so tests compare two unrelated routes to the
same answer.
"""

from __future__ import annotations

from itertools import combinations

import numpy as np


def membership_breakpoints(bins, axis: int) -> list[float]:
    """All coordinates where bin membership can change along one axis."""
    coords = set()
    for b in bins:
        coords.add(b.base_lo[axis])
        coords.add(b.grown_hi[axis])
    return sorted(coords)


def probe_max_multiplicity(cover) -> int:
    """Exact max number of bins sharing a point, via the breakpoint grid.

    Membership in half-open boxes is constant between consecutive breakpoint
    coordinates, so probing just past every breakpoint on each axis visits
    every cell of the arrangement.
    """
    bins = cover.bins
    if not bins:
        return 0
    d = len(bins[0].base_lo)
    axes = []
    for k in range(d):
        pts = membership_breakpoints(bins, k)
        lo, hi = pts[0], pts[-1]
        delta = max((hi - lo), 1.0) * 1e-9
        axes.append(np.array([p + delta for p in pts if p < hi]))
    if d == 1:
        grid = axes[0].reshape(-1, 1)
    else:
        xx, yy = np.meshgrid(axes[0], axes[1], indexing="ij")
        grid = np.stack([xx.ravel(), yy.ravel()], axis=1)
    counts = np.zeros(len(grid), dtype=int)
    for b in bins:
        lo = np.array(b.base_lo)
        hi = np.array(b.grown_hi)
        counts += np.all((grid >= lo) & (grid < hi), axis=1)
    return int(counts.max())


def probe_max_multiplicity_grid(cover, per_axis: int) -> int:
    """Max membership over a uniform probe grid (the coarser, pinned probe)."""
    bins = cover.bins
    d = len(bins[0].base_lo)
    lo = np.min([b.base_lo for b in bins], axis=0)
    hi = np.max([b.grown_hi for b in bins], axis=0)
    axes = [np.linspace(lo[k], hi[k], per_axis, endpoint=False) for k in range(d)]
    if d == 1:
        grid = axes[0].reshape(-1, 1)
    else:
        xx, yy = np.meshgrid(axes[0], axes[1], indexing="ij")
        grid = np.stack([xx.ravel(), yy.ravel()], axis=1)
    counts = np.zeros(len(grid), dtype=int)
    for b in bins:
        blo = np.array(b.base_lo)
        bhi = np.array(b.grown_hi)
        counts += np.all((grid >= blo) & (grid < bhi), axis=1)
    return int(counts.max())


def brute_force_nerve(member_sets, dim_cap: int):
    """All subsets of clusters (size 2..dim_cap+1) with common intersection."""
    sets = [frozenset(m) for m in member_sets]
    found = set()
    for k in range(2, dim_cap + 2):
        for combo in combinations(range(len(sets)), k):
            inter = sets[combo[0]]
            for idx in combo[1:]:
                inter = inter & sets[idx]
                if not inter:
                    break
            if inter:
                found.add(combo)
    return found


def brute_dbscan(points: np.ndarray, eps: float, min_pts: int):
    """DBSCAN straight from the definition.

    Clusters are the connected components of the core-point graph (cores
    within eps of each other), ordered by their smallest core index; border
    points join the lowest-id cluster among in-range cores; everything else
    is noise. Returns (list of sorted member lists, sorted noise list).
    """
    n = len(points)
    diff = points[:, None, :] - points[None, :, :]
    dist = np.sqrt((diff**2).sum(axis=2))
    within = dist <= eps
    core = within.sum(axis=1) >= min_pts  # a point counts itself
    comp = [-1] * n
    comp_count = 0
    for i in range(n):
        if not core[i] or comp[i] != -1:
            continue
        stack = [i]
        comp[i] = comp_count
        while stack:
            j = stack.pop()
            for q in range(n):
                if core[q] and within[j][q] and comp[q] == -1:
                    comp[q] = comp_count
                    stack.append(q)
        comp_count += 1
    clusters = [[] for _ in range(comp_count)]
    noise = []
    for i in range(n):
        if core[i]:
            clusters[comp[i]].append(i)
            continue
        owners = [comp[q] for q in range(n) if core[q] and within[i][q]]
        if owners:
            clusters[min(owners)].append(i)
        else:
            noise.append(i)
    return [sorted(c) for c in clusters], sorted(noise)


def brute_single_linkage(points: np.ndarray, threshold: float):
    """Connected components of the at-most-threshold distance graph."""
    n = len(points)
    diff = points[:, None, :] - points[None, :, :]
    dist = np.sqrt((diff**2).sum(axis=2))
    adj = dist <= threshold
    comp = [-1] * n
    count = 0
    for i in range(n):
        if comp[i] != -1:
            continue
        stack = [i]
        comp[i] = count
        while stack:
            j = stack.pop()
            for q in range(n):
                if adj[j][q] and comp[q] == -1:
                    comp[q] = count
                    stack.append(q)
        count += 1
    clusters = [[] for _ in range(count)]
    for i in range(n):
        clusters[comp[i]].append(i)
    return [sorted(c) for c in clusters]


def betti_of_complex(n_nodes: int, node_ids, simplices) -> tuple[int, int]:
    """(b0, b1) of a simplicial complex up to dimension 2.

    b0 by union-find over edges; b1 = E - V + b0 minus the GF(2) rank of the
    triangle boundary matrix, so cycles bounded by filled triangles do not
    count. Higher-dimensional simplices cannot affect b0 or b1.
    """
    ids = sorted(node_ids)
    index = {v: i for i, v in enumerate(ids)}
    edges = sorted({tuple(s) for s in simplices if len(s) == 2})
    tris = sorted({tuple(s) for s in simplices if len(s) == 3})
    parent = list(range(len(ids)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in edges:
        ra, rb = find(index[a]), find(index[b])
        if ra != rb:
            parent[ra] = rb
    b0 = len({find(i) for i in range(len(ids))})
    edge_index = {e: i for i, e in enumerate(edges)}
    basis = []
    rank = 0
    for t in tris:
        row = 0
        for face in combinations(t, 2):
            row |= 1 << edge_index[face]
        for b in basis:
            row = min(row, row ^ b)
        if row:
            basis.append(row)
            basis.sort(reverse=True)
            rank += 1
    b1 = len(edges) - len(ids) + b0 - rank
    return b0, b1
