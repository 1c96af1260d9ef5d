"""Shatter a ring with an over-fine cover, then mend it with one coarsen call.

A dense blob and a sparse ring need different scales: a cover fine enough to
resolve the blob breaks the ring into fragments.  Coarsening just the ring
nodes glues it back while leaving every blob node untouched.

Run:  python3 scripts/shatter_repair_demo.py
"""

from __future__ import annotations

from multimapper.clustering import ClusterParams
from multimapper.cover import build_cuboidal_cover
from multimapper.fixtures import blob_ring
from multimapper.geometry import PointCloud, lens_bounds, lens_coordinate
from multimapper.mapper import graph_betti, one_skeleton, subcomplex
from multimapper.rescale import MagnifyRequest, coarsen, initial_state


def ring_ids(state):
    return [c.id for c in state.complex.nodes if all(m >= 500 for m in c.members)]


def sub_beta0(state, ids):
    sub = subcomplex(state.complex, ids)
    return graph_betti(one_skeleton(sub))[0]


def main() -> None:
    pts = blob_ring(seed=7)
    pc = PointCloud(points=pts)
    lens = lens_coordinate(pc, [0, 1])
    cover = build_cuboidal_cover(lens_bounds(lens), 16, 0.25)
    state, _ = initial_state(pc, lens, cover, ClusterParams.parse("single:auto"))

    fine_ids = ring_ids(state)
    print(f"fine cover (16 bins/axis): ring splits into {sub_beta0(state, fine_ids)} pieces")

    request = MagnifyRequest.from_json(
        {
            "node_ids": fine_ids,
            "cover": {"scheme": "cuboidal", "bins_per_axis": 4, "g": 0.3},
            "cluster": "single:auto",
        }
    )
    repaired = coarsen(state, request)
    new_ids = ring_ids(repaired)
    print(f"after one coarsen (4 bins/axis): ring has {sub_beta0(repaired, new_ids)} piece")

    before = sorted(c.members for c in state.complex.nodes if all(m < 500 for m in c.members))
    after = sorted(c.members for c in repaired.complex.nodes if all(m < 500 for m in c.members))
    print(f"blob node member sets unchanged: {before == after}")
    print(f"regions logged: {[r.region for r in repaired.region_log]}")


if __name__ == "__main__":
    main()
