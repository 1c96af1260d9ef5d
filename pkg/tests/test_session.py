"""Session files: lossless round-trip, dataset hashing, determinism."""

from __future__ import annotations

import json

import numpy as np
import pytest

from multimapper.clustering import ClusterParams
from multimapper.cover import build_cuboidal_cover
from multimapper.errors import CorruptSession
from multimapper.fixtures import blob_ring, circle
from multimapper.geometry import BoundingBox, PointCloud, lens_coordinate
from multimapper.mapper import canonical_form
from multimapper.rescale import MagnifyRequest, initial_state, magnify
from multimapper.session import load_session, save_session, write_points_csv


def build(tmp_path, pts, lens_axes=(0, 1), bins=4, g=0.25, spec="single:threshold=0.5"):
    points_path = tmp_path / "points.csv"
    write_points_csv(points_path, pts)
    pc = PointCloud(pts)
    lens = lens_coordinate(pc, list(lens_axes))
    vals = lens.values
    cover = build_cuboidal_cover(
        BoundingBox(lo=tuple(vals.min(0)), hi=tuple(vals.max(0))), bins, g
    )
    state, report = initial_state(pc, lens, cover, ClusterParams.parse(spec))
    lens_source = {"kind": "coord", "axes": list(lens_axes)}
    return state, report, points_path, lens_source


class TestRoundTrip:
    def test_canonical_equality(self, tmp_path):
        state, report, points_path, lens_source = build(tmp_path, circle(300, 0.02, 7))
        session = tmp_path / "s.json"
        save_session(session, state, points_path, lens_source, reports={"build": report.__dict__})
        loaded, meta = load_session(session)
        assert canonical_form(loaded.complex) == canonical_form(state.complex)
        assert [c.id for c in loaded.clusters] == [c.id for c in state.clusters]
        assert loaded.params_log == state.params_log
        assert loaded.dim_cap == state.dim_cap
        assert loaded.noise == state.noise
        assert meta["reports"]["build"]["points_total"] == 300

    def test_after_magnify_preserves_regions(self, tmp_path):
        state, _, points_path, lens_source = build(tmp_path, blob_ring(7), bins=3, g=0.1)
        blob = [c.id for c in state.complex.nodes if all(m < 500 for m in c.members)]
        after = magnify(
            state,
            MagnifyRequest.from_json(
                {
                    "node_ids": blob,
                    "cover": {"scheme": "cuboidal", "bins_per_axis": 3, "g": 0.3},
                    "cluster": "single:threshold=0.5",
                }
            ),
        )
        session = tmp_path / "s.json"
        save_session(session, after, points_path, lens_source)
        loaded, _ = load_session(session)
        assert canonical_form(loaded.complex) == canonical_form(after.complex)
        assert loaded.region_log == after.region_log
        assert {c.id for c in loaded.clusters} == {c.id for c in after.clusters}
        assert {c.region for c in loaded.clusters} == {0, 1}

    def test_byte_determinism(self, tmp_path):
        state, _, points_path, lens_source = build(tmp_path, circle(100, 0.02, 1))
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        save_session(a, state, points_path, lens_source)
        save_session(b, state, points_path, lens_source)
        assert a.read_bytes() == b.read_bytes()

    def test_no_timestamps(self, tmp_path):
        state, _, points_path, lens_source = build(tmp_path, circle(50, 0.02, 1))
        session = tmp_path / "s.json"
        save_session(session, state, points_path, lens_source)
        data = json.loads(session.read_text())

        def keys_of(x):
            if isinstance(x, dict):
                for k, v in x.items():
                    yield k
                    yield from keys_of(v)
            elif isinstance(x, list):
                for v in x:
                    yield from keys_of(v)

        for key in keys_of(data):
            for banned in ("time", "date", "stamp", "created", "updated"):
                assert banned not in key.lower()


class TestHashGuard:
    def test_tampered_points_rejected(self, tmp_path):
        state, _, points_path, lens_source = build(tmp_path, circle(60, 0.02, 2))
        session = tmp_path / "s.json"
        save_session(session, state, points_path, lens_source)
        points_path.write_text(points_path.read_text().replace("0", "1", 1))
        with pytest.raises(CorruptSession):
            load_session(session)

    def test_missing_points_rejected(self, tmp_path):
        state, _, points_path, lens_source = build(tmp_path, circle(60, 0.02, 2))
        session = tmp_path / "s.json"
        save_session(session, state, points_path, lens_source)
        points_path.unlink()
        with pytest.raises(CorruptSession):
            load_session(session)

    def test_garbled_session_rejected(self, tmp_path):
        session = tmp_path / "s.json"
        session.write_text("{not json")
        with pytest.raises(CorruptSession):
            load_session(session)

    def test_missing_session_rejected(self, tmp_path):
        with pytest.raises(CorruptSession):
            load_session(tmp_path / "absent.json")


class TestPointsCsv:
    def test_round_trip_exact(self, tmp_path):
        pts = circle(40, 0.02, 5)
        path = tmp_path / "p.csv"
        write_points_csv(path, pts)
        from multimapper.geometry import load_points_csv

        back = load_points_csv(path)
        assert np.array_equal(back.points, pts)

    def test_write_deterministic(self, tmp_path):
        pts = blob_ring(3)
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        write_points_csv(a, pts)
        write_points_csv(b, pts)
        assert a.read_bytes() == b.read_bytes()
