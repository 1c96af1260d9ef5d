"""Build a Mapper on a noisy circle and show it recovers the loop.

Run:  python3 scripts/circle_demo.py
"""

from __future__ import annotations

from multimapper.clustering import ClusterParams
from multimapper.cover import build_brick_cover
from multimapper.fixtures import circle
from multimapper.geometry import PointCloud, lens_bounds, lens_coordinate
from multimapper.mapper import build_mapper, graph_betti, one_skeleton


def main() -> None:
    pts = circle(n=500, noise=0.02, seed=7)
    pc = PointCloud(points=pts)
    lens = lens_coordinate(pc, [0, 1])
    cover = build_brick_cover(lens_bounds(lens), 8, 0.25)
    mc, report = build_mapper(
        pc, lens, cover, ClusterParams.parse("single:auto"), dim_cap=2
    )
    b0, b1 = graph_betti(one_skeleton(mc))
    print(f"points: {report.points_total} (noise dropped: {report.noise_dropped})")
    print(f"nodes: {len(mc.nodes)}")
    print(f"edges: {sum(1 for s in mc.simplices if len(s) == 2)}")
    print(f"triangles: {sum(1 for s in mc.simplices if len(s) == 3)}")
    print(f"1-skeleton components: {b0}")
    print(f"1-skeleton cycle rank: {b1} (each filled triangle adds one)")
    print("the single essential loop is the circle itself")


if __name__ == "__main__":
    main()
