"""Session files: a saved analysis that reloads to the same complex.

A session embeds memberships, covers, and logs, but never the coordinates:
points stay in their CSV, referenced by path and SHA-256. Loading re-reads
the CSV and refuses to proceed when the hash no longer matches — a session
silently applied to different data would produce confidently wrong output.

Serialization is canonical (sorted keys, two-space indent, shortest
round-trip floats, no timestamps), so saving the same state twice yields
byte-identical files.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

import numpy as np

from .cover import cover_from_json, cover_to_json
from .errors import CorruptSession
from .geometry import (
    LensMap,
    PointCloud,
    lens_coordinate,
    lens_pca,
    load_lens_csv,
    load_points_csv,
)
from .mapper import complex_from_json, complex_to_json
from .rescale import AnalysisState, RegionRecord, _uncovered

SESSION_VERSION = 1


def sha256_file(path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def write_points_csv(path, pts: np.ndarray) -> None:
    pts = np.asarray(pts, dtype=float)
    names = ["x", "y"][: pts.shape[1]] if pts.shape[1] <= 2 else [
        f"c{i}" for i in range(pts.shape[1])
    ]
    lines = [",".join(names)]
    lines.extend(",".join(repr(float(v)) for v in row) for row in pts)
    Path(path).write_text("\n".join(lines) + "\n")


def write_json(path, data: dict) -> None:
    Path(path).write_text(json.dumps(data, sort_keys=True, indent=2) + "\n")


def lens_from_source(pc: PointCloud, source: dict) -> LensMap:
    kind = source["kind"]
    if kind == "coord":
        return lens_coordinate(pc, source["axes"])
    if kind == "pca":
        return lens_pca(pc, source["d"])
    if kind == "csv":
        if sha256_file(source["path"]) != source["sha256"]:
            raise CorruptSession(
                f"lens file {source['path']} no longer matches its recorded hash"
            )
        return load_lens_csv(source["path"], len(pc))
    raise CorruptSession(f"unknown lens source kind {kind!r}")


def lens_source_with_hash(source: dict) -> dict:
    if source.get("kind") == "csv" and "sha256" not in source:
        return {**source, "sha256": sha256_file(source["path"])}
    return source


def save_session(
    path,
    state: AnalysisState,
    points_path,
    lens_source: dict,
    reports: dict | None = None,
) -> None:
    data = {
        "version": SESSION_VERSION,
        "points": {
            "path": str(points_path),
            "sha256": sha256_file(points_path),
        },
        "lens": lens_source_with_hash(lens_source),
        "dim_cap": state.dim_cap,
        "cover": cover_to_json(state.base_cover),
        "params_log": list(state.params_log),
        "region_log": [
            {
                "region": r.region,
                "node_ids": list(r.node_ids),
                "scheme": r.scheme,
                "bins_per_axis": r.bins_per_axis,
                "g": r.g,
                "cluster": r.cluster,
                "level": r.level,
            }
            for r in state.region_log
        ],
        "complex": complex_to_json(state.complex, state.lens),
        "noise": list(state.noise),
        "reports": reports or {},
    }
    write_json(path, data)


def load_session(path) -> tuple[AnalysisState, dict]:
    """Rebuild the state a session describes; returns (state, metadata)."""
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise CorruptSession(f"cannot read session {path}: {exc}") from exc
    try:
        points_path = data["points"]["path"]
        want_hash = data["points"]["sha256"]
        try:
            got_hash = sha256_file(points_path)
        except OSError as exc:
            raise CorruptSession(
                f"points file {points_path} is unreadable: {exc}"
            ) from exc
        if got_hash != want_hash:
            raise CorruptSession(
                f"points file {points_path} no longer matches its recorded hash"
            )
        pc = load_points_csv(points_path)
        lens = lens_from_source(pc, data["lens"])
        cover = cover_from_json(data["cover"])
        mc = complex_from_json(data["complex"])
        region_log = tuple(
            RegionRecord(
                region=r["region"],
                node_ids=tuple(r["node_ids"]),
                scheme=r["scheme"],
                bins_per_axis=r["bins_per_axis"],
                g=r["g"],
                cluster=r["cluster"],
                level=r["level"],
            )
            for r in data["region_log"]
        )
        state = AnalysisState(
            pc=pc,
            lens=lens,
            clusters=tuple(mc.nodes),
            complex=mc,
            dim_cap=data["dim_cap"],
            base_cover=cover,
            params_log=tuple(data["params_log"]),
            region_log=region_log,
            noise=tuple(data["noise"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise CorruptSession(f"session {path} is malformed: {exc}") from exc
    meta = {
        "reports": data.get("reports", {}),
        "points_path": points_path,
        "lens_source": data["lens"],
    }
    return state, meta
