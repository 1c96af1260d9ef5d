"""HTTP session service: endpoints, status codes, persistence, locking."""

from __future__ import annotations

import json
import os
import time

import numpy as np
import pytest
from fastapi.testclient import TestClient

from multimapper.mapper import canonical_form, complex_from_json
from multimapper.service import create_app

from .oracles import betti_of_complex


@pytest.fixture()
def data_dir(tmp_path):
    return tmp_path / "data"


@pytest.fixture()
def client(data_dir):
    with TestClient(create_app(data_dir=data_dir)) as c:
        yield c


def circle_request(**over):
    base = {
        "fixture": "circle",
        "seed": 7,
        "n": 500,
        "lens": "coord:0,1",
        "cover": {"scheme": "brick", "bins_per_axis": 8, "g": 0.25},
        "cluster": "single:threshold=0.3",
    }
    base.update(over)
    return base


def blob_ring_request():
    return {
        "fixture": "blob_ring",
        "seed": 7,
        "lens": "coord:0,1",
        "cover": {"scheme": "cuboidal", "bins_per_axis": 3, "g": 0.1},
        "cluster": "single:threshold=0.5",
    }


def make_session(client, body):
    r = client.post("/sessions", json=body)
    assert r.status_code == 201, r.text
    return r.json()


def blob_node_ids(complex_json):
    return [
        n["id"]
        for n in complex_json["nodes"]
        if all(m < 500 for m in n["members"])
    ]


def magnify_body(node_ids, bins=3, g=0.3, cluster="single:threshold=0.5"):
    return {
        "node_ids": list(node_ids),
        "cover": {"scheme": "cuboidal", "bins_per_axis": bins, "g": g},
        "cluster": cluster,
    }


class TestCreateSession:
    def test_circle_fixture_201_with_circle_complex(self, client):
        data = make_session(client, circle_request())
        assert set(data) == {"session_id", "complex"}
        cx = data["complex"]
        assert set(cx) == {"nodes", "simplices", "dim_cap", "truncated"}
        b0, b1 = betti_of_complex(
            len(cx["nodes"]),
            [n["id"] for n in cx["nodes"]],
            [tuple(s) for s in cx["simplices"]],
        )
        assert (b0, b1) == (1, 1)

    def test_points_csv_upload(self, client):
        rows = ["x,y"] + [f"{x},{y}" for x, y in [(0, 0), (0.1, 0), (5, 5), (5.1, 5)]]
        body = {
            "points_csv": "\n".join(rows) + "\n",
            "lens": "coord:0,1",
            "cover": {"scheme": "cuboidal", "bins_per_axis": 2, "g": 0.3},
            "cluster": "single:threshold=0.5",
        }
        data = make_session(client, body)
        assert len(data["complex"]["nodes"]) == 2

    def test_bad_overlap_400(self, client):
        body = circle_request(cover={"scheme": "brick", "bins_per_axis": 8, "g": 1.5})
        r = client.post("/sessions", json=body)
        assert r.status_code == 400

    def test_empty_csv_400(self, client):
        r = client.post(
            "/sessions",
            json={
                "points_csv": "",
                "lens": "coord:0,1",
                "cover": {"scheme": "cuboidal", "bins_per_axis": 2, "g": 0.3},
                "cluster": "single:auto",
            },
        )
        assert r.status_code == 400

    def test_unknown_fixture_400(self, client):
        r = client.post("/sessions", json=circle_request(fixture="torus"))
        assert r.status_code == 400

    def test_oversized_upload_413(self, client):
        blob = b'{"points_csv":"' + b"0" * (51 * 2**20) + b'"}'
        r = client.post(
            "/sessions", content=blob, headers={"content-type": "application/json"}
        )
        assert r.status_code == 413


class TestMagnify:
    def test_blob_magnify_delta_positive(self, client):
        data = make_session(client, blob_ring_request())
        sid = data["session_id"]
        ids = blob_node_ids(data["complex"])
        assert ids
        r = client.post(f"/sessions/{sid}/magnify", json=magnify_body(ids))
        assert r.status_code == 200, r.text
        out = r.json()
        assert set(out) == {"complex", "degeneracy_points", "node_delta"}
        assert out["node_delta"] > 0
        assert isinstance(out["degeneracy_points"], list)
        snap = client.get(f"/sessions/{sid}").json()
        assert len(snap["region_log"]) == 1
        assert snap["complex"] == out["complex"]

    def test_empty_selection_complex_unchanged(self, client):
        data = make_session(client, blob_ring_request())
        sid = data["session_id"]
        r = client.post(f"/sessions/{sid}/magnify", json=magnify_body([]))
        assert r.status_code == 200
        assert r.json()["complex"] == data["complex"]
        assert r.json()["node_delta"] == 0

    def test_unknown_session_404(self, client):
        r = client.post("/sessions/nope/magnify", json=magnify_body([]))
        assert r.status_code == 404

    def test_unknown_node_400(self, client):
        sid = make_session(client, blob_ring_request())["session_id"]
        r = client.post(f"/sessions/{sid}/magnify", json=magnify_body([424242]))
        assert r.status_code == 400

    def test_concurrent_mutation_409(self, client):
        sid = make_session(client, blob_ring_request())["session_id"]
        lock = client.app.state.store.lock_for(sid)
        assert lock.acquire(blocking=False)
        try:
            r = client.post(f"/sessions/{sid}/magnify", json=magnify_body([]))
            assert r.status_code == 409
        finally:
            lock.release()
        r = client.post(f"/sessions/{sid}/magnify", json=magnify_body([]))
        assert r.status_code == 200


class TestDiagnose:
    def circle_edge_session(self, client):
        body = circle_request(
            lens="coord:0",
            cover={"scheme": "cuboidal", "bins_per_axis": 2, "g": 0.4},
            cluster="single:auto",
        )
        return make_session(client, body)["session_id"]

    def test_circle_x_lens_bad(self, client):
        sid = self.circle_edge_session(client)
        r = client.post(
            f"/sessions/{sid}/diagnose",
            json={"method": "persistence", "levels": 5},
        )
        assert r.status_code == 200, r.text
        data = r.json()
        assert data["bad"] is True
        assert len(data["violations"]) == 1

    def test_two_blob_clean(self, client):
        body = {
            "fixture": "two_blob",
            "seed": 0,
            "lens": "coord:0,1",
            "cover": {"scheme": "cuboidal", "bins_per_axis": 5, "g": 0.4},
            "cluster": "single:threshold=2",
        }
        sid = make_session(client, body)["session_id"]
        r = client.post(f"/sessions/{sid}/diagnose", json={"method": "clustering"})
        assert r.status_code == 200
        assert r.json()["bad"] is False

    def test_reports_persisted_in_snapshot(self, client):
        sid = self.circle_edge_session(client)
        client.post(f"/sessions/{sid}/diagnose", json={"method": "clustering"})
        snap = client.get(f"/sessions/{sid}").json()
        assert snap["reports"]["clustering"]["bad"] is True

    def test_bad_method_400(self, client):
        sid = self.circle_edge_session(client)
        r = client.post(f"/sessions/{sid}/diagnose", json={"method": "banana"})
        assert r.status_code == 400

    def test_unknown_session_404(self, client):
        r = client.post("/sessions/nope/diagnose", json={"method": "clustering"})
        assert r.status_code == 404


class TestSnapshot:
    def test_fresh_session_empty_region_log(self, client):
        sid = make_session(client, blob_ring_request())["session_id"]
        snap = client.get(f"/sessions/{sid}").json()
        assert snap["region_log"] == []
        assert snap["session_id"] == sid

    def test_unknown_404(self, client):
        assert client.get("/sessions/nope").status_code == 404

    def test_restart_returns_identical_snapshot(self, data_dir):
        with TestClient(create_app(data_dir=data_dir)) as c1:
            sid = make_session(c1, blob_ring_request())["session_id"]
            ids = blob_node_ids(c1.get(f"/sessions/{sid}").json()["complex"])
            c1.post(f"/sessions/{sid}/magnify", json=magnify_body(ids))
            before = c1.get(f"/sessions/{sid}").json()
        with TestClient(create_app(data_dir=data_dir)) as c2:
            after = c2.get(f"/sessions/{sid}").json()
        assert after == before

    def test_expiry_removes_session(self, data_dir):
        with TestClient(create_app(data_dir=data_dir, expire_hours=1.0)) as c:
            sid = make_session(c, blob_ring_request())["session_id"]
            stale = time.time() - 7200
            session_file = data_dir / sid / "session.json"
            os.utime(session_file, (stale, stale))
            assert c.get(f"/sessions/{sid}").status_code == 404
            assert not session_file.exists()


class TestLinearizability:
    def test_http_mutations_match_library_replay(self, client, data_dir):
        from multimapper.rescale import MagnifyRequest, magnify
        from multimapper.session import load_session

        data = make_session(client, blob_ring_request())
        sid = data["session_id"]
        initial = json.loads((data_dir / sid / "session.json").read_text())

        ids = blob_node_ids(data["complex"])
        bodies = [magnify_body(ids), magnify_body([], bins=2, g=0.2)]
        committed = []
        for body in bodies:
            r = client.post(f"/sessions/{sid}/magnify", json=body)
            assert r.status_code == 200
            committed.append(r.json()["complex"])

        replay_file = data_dir / "replay.json"
        replay_file.write_text(json.dumps(initial, indent=2, sort_keys=True) + "\n")
        state, _ = load_session(replay_file)
        for body, want in zip(bodies, committed):
            state = magnify(state, MagnifyRequest.from_json(body))
            assert canonical_form(state.complex) == canonical_form(
                complex_from_json(want)
            )
