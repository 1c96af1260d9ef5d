"""Catch a Mapper edge that glues two far-apart arcs of a circle.

Projecting a circle to its x coordinate folds the top and bottom arcs onto
the same interval; with a 2-bin cover each node contains both arcs and the
single edge between them hides a disconnection.  Both detectors flag it and
suggest a rescale.

Run:  python3 scripts/violation_demo.py
"""

from __future__ import annotations

import json

from multimapper.clustering import ClusterParams
from multimapper.cover import build_cuboidal_cover
from multimapper.diagnostics import diagnose
from multimapper.fixtures import circle
from multimapper.geometry import PointCloud, lens_bounds, lens_coordinate
from multimapper.rescale import initial_state


def main() -> None:
    pts = circle(n=500, noise=0.02, seed=7)
    pc = PointCloud(points=pts)
    lens = lens_coordinate(pc, [0])  # fold the circle onto the x axis
    cover = build_cuboidal_cover(lens_bounds(lens), 2, 0.4)
    state, _ = initial_state(pc, lens, cover, ClusterParams.parse("single:auto"))
    print(f"nodes: {len(state.complex.nodes)}, "
          f"edges: {sum(1 for s in state.complex.simplices if len(s) == 2)}")

    for method in ("clustering", "persistence"):
        data = diagnose(state, method)
        print(f"\n{method} detector -> bad={data['bad']}")
        print(json.dumps(data["violations"], indent=2))


if __name__ == "__main__":
    main()
