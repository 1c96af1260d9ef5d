"""Command-line driver: build, rescale, and check Mapper complexes.

Exit codes: 0 success, 2 usage or configuration error, 3 I/O error
(missing or corrupt files).
"""

from __future__ import annotations

import argparse
import sys
from collections import Counter

from .clustering import ClusterParams
from .cover import build_brick_cover, build_cuboidal_cover
from .diagnostics import TowerConfig, diagnose
from .errors import CorruptSession, MultimapperError, ParseError
from .fixtures import FIXTURE_NAMES, make_fixture
from .geometry import lens_bounds, load_points_csv
from .mapper import complex_to_json, graph_betti, one_skeleton
from .rescale import MagnifyRequest, initial_state, magnify
from .session import (
    lens_from_source,
    lens_source_with_hash,
    load_session,
    save_session,
    write_json,
    write_points_csv,
)

BRICK_OVERLAP_WARNING = (
    "warning: overlap >= 0.5 voids the brick adjacency guarantee; "
    "bins may intersect beyond immediate neighbours"
)


def parse_lens_spec(spec: str) -> dict:
    """'coord:0,1' | 'pca:2' | 'csv:path' -> a lens source record."""
    kind, _, rest = spec.partition(":")
    if kind == "coord":
        axes = [int(tok) for tok in rest.split(",") if tok.strip()]
        if not axes:
            raise ParseError(f"lens spec {spec!r} names no axes")
        return {"kind": "coord", "axes": axes}
    if kind == "pca":
        return {"kind": "pca", "d": int(rest)}
    if kind == "csv":
        if not rest:
            raise ParseError(f"lens spec {spec!r} names no file")
        return {"kind": "csv", "path": rest}
    raise ParseError(f"unknown lens kind {kind!r}; expected coord, pca, or csv")


def build_cover_from_args(scheme: str, bounds, bins: int, g: float):
    if scheme == "brick":
        return build_brick_cover(bounds, bins, g)
    return build_cuboidal_cover(bounds, bins, g)


def print_complex_summary(mc, noise_count: int) -> None:
    b0, b1 = graph_betti(one_skeleton(mc))
    dims = Counter(len(s) - 1 for s in mc.simplices)
    dim_str = " ".join(f"dim{d}={dims.get(d, 0)}" for d in range(1, mc.dim_cap + 1))
    print(f"nodes: {len(mc.nodes)}")
    print(f"simplices: {dim_str}")
    print(f"beta0: {b0}")
    print(f"beta1: {b1}")
    print(f"truncated: {'true' if mc.truncated else 'false'}")
    print(f"noise: {noise_count}")


def cmd_mapper(args) -> int:
    pc = load_points_csv(args.points)
    source = lens_source_with_hash(parse_lens_spec(args.lens))
    lens = lens_from_source(pc, source)
    cover = build_cover_from_args(
        args.cover, lens_bounds(lens), args.bins, args.overlap
    )
    params = ClusterParams.parse(args.cluster)
    state, _report = initial_state(pc, lens, cover, params, dim_cap=args.dim_cap)
    if cover.warn_overlap:
        print(BRICK_OVERLAP_WARNING)
    print_complex_summary(state.complex, len(state.noise))
    if args.out:
        write_json(args.out, complex_to_json(state.complex, state.lens))
    if args.session:
        save_session(args.session, state, args.points, source)
    return 0


def cmd_magnify(args) -> int:
    state, meta = load_session(args.session)
    node_ids = tuple(int(tok) for tok in args.select.split(",") if tok.strip())
    base = state.base_cover
    bins = args.bins if args.bins is not None else max(base.bins_per_axis or (1,))
    req = MagnifyRequest(
        node_ids=node_ids,
        scheme=args.cover if args.cover is not None else base.scheme,
        bins_per_axis=bins,
        g=args.overlap if args.overlap is not None else base.g,
        params=ClusterParams.parse(
            args.cluster if args.cluster is not None else state.params_log[0]
        ),
    )
    before = len(state.complex.nodes)
    state = magnify(state, req)
    after = len(state.complex.nodes)
    print(f"nodes: {before} -> {after} ({after - before:+d})")
    save_session(
        args.session,
        state,
        meta["points_path"],
        meta["lens_source"],
        reports=meta["reports"],
    )
    if args.out:
        write_json(args.out, complex_to_json(state.complex, state.lens))
    return 0


def cmd_diagnose(args) -> int:
    state, _meta = load_session(args.session)
    cfg = TowerConfig(K=args.levels)
    data = diagnose(state, args.method, tower_cfg=cfg, max_dim=args.max_dim)
    print(f"bad: {'true' if data['bad'] else 'false'}")
    print(f"violations: {len(data['violations'])}")
    print(f"skipped: {data['skipped']}")
    if args.out:
        write_json(args.out, data)
    return 0


def cmd_fixtures(args) -> int:
    try:
        pts = make_fixture(args.name, seed=args.seed, n=args.n)
    except KeyError as exc:
        print(f"error: {exc.args[0]}", file=sys.stderr)
        return 2
    write_points_csv(args.out, pts)
    print(f"wrote {len(pts)} points to {args.out}")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(data_dir=args.data_dir, ui_dir=args.ui_dir)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="multimapper",
        description="Build, rescale, and check Mapper complexes.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("mapper", help="build a complex from a points CSV")
    p.add_argument("--points", required=True, help="CSV of input points")
    p.add_argument("--lens", default="coord:0,1", help="coord:i,j | pca:d | csv:PATH")
    p.add_argument("--cover", choices=("cuboidal", "brick"), default="cuboidal")
    p.add_argument("--bins", type=int, default=4, help="bins per axis")
    p.add_argument("--overlap", type=float, default=0.25, help="overlap fraction g")
    p.add_argument("--cluster", default="single:auto", help="e.g. single:threshold=0.3")
    p.add_argument("--dim-cap", type=int, default=3, help="maximum simplex dimension")
    p.add_argument("--out", help="write the complex JSON here")
    p.add_argument("--session", help="write a reloadable session file here")
    p.set_defaults(func=cmd_mapper)

    p = sub.add_parser("magnify", help="re-cluster selected nodes at a new scale")
    p.add_argument("--session", required=True, help="session file to update in place")
    p.add_argument("--select", default="", help="comma-separated node ids")
    p.add_argument("--cover", choices=("cuboidal", "brick"))
    p.add_argument("--bins", type=int, help="local bins per axis")
    p.add_argument("--overlap", type=float, help="local overlap fraction")
    p.add_argument("--cluster", help="cluster spec; defaults to the build's")
    p.add_argument("--out", help="also write the new complex JSON here")
    p.set_defaults(func=cmd_magnify)

    p = sub.add_parser("diagnose", help="scan edges and triangles for glued pieces")
    p.add_argument("--session", required=True)
    p.add_argument("--method", required=True, choices=("clustering", "persistence"))
    p.add_argument("--levels", type=int, default=5, help="tower levels (persistence)")
    p.add_argument("--max-dim", type=int, default=1)
    p.add_argument("--out", help="write the violation report JSON here")
    p.set_defaults(func=cmd_diagnose)

    p = sub.add_parser("fixtures", help="write a synthetic dataset CSV")
    p.add_argument("name", help=f"one of: {', '.join(FIXTURE_NAMES)}")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n", type=int, help="point count, where the fixture takes one")
    p.set_defaults(func=cmd_fixtures)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8765)
    p.add_argument("--data-dir", default="./multimapper-data")
    p.add_argument("--ui-dir", default=None)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CorruptSession as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except MultimapperError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
