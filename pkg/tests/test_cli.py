"""Command-line driver: flags, exit codes, byte determinism."""

from __future__ import annotations

import json
import subprocess
import sys

import pytest

from .oracles import betti_of_complex

CLI = [sys.executable, "-m", "multimapper"]


def run(*args, cwd=None):
    return subprocess.run(
        CLI + [str(a) for a in args],
        capture_output=True,
        text=True,
        cwd=cwd,
        timeout=120,
    )


def make_circle_csv(tmp_path, n=500, seed=7):
    out = tmp_path / "circle.csv"
    r = run("fixtures", "circle", "--seed", seed, "--n", n, "--out", out)
    assert r.returncode == 0, r.stderr
    return out


def make_session(tmp_path, points, *, lens="coord:0,1", cover="cuboidal", bins=4,
                 overlap=0.25, cluster="single:threshold=0.5"):
    session = tmp_path / "session.json"
    r = run(
        "mapper", "--points", points, "--lens", lens, "--cover", cover,
        "--bins", bins, "--overlap", overlap, "--cluster", cluster,
        "--session", session,
    )
    assert r.returncode == 0, r.stderr
    return session


class TestFixturesCommand:
    def test_writes_csv(self, tmp_path):
        out = make_circle_csv(tmp_path)
        lines = out.read_text().splitlines()
        assert lines[0] == "x,y"
        assert len(lines) == 501

    def test_byte_identical_reruns(self, tmp_path):
        a = tmp_path / "a.csv"
        b = tmp_path / "b.csv"
        assert run("fixtures", "blob_ring", "--seed", 7, "--out", a).returncode == 0
        assert run("fixtures", "blob_ring", "--seed", 7, "--out", b).returncode == 0
        assert a.read_bytes() == b.read_bytes()

    def test_unknown_fixture_exits_2(self, tmp_path):
        r = run("fixtures", "torus", "--out", tmp_path / "t.csv")
        assert r.returncode == 2
        assert "torus" in r.stderr


class TestMapperCommand:
    def test_circle_brick_example(self, tmp_path):
        points = make_circle_csv(tmp_path)
        out = tmp_path / "c.json"
        r = run(
            "mapper", "--points", points, "--lens", "coord:0,1",
            "--cover", "brick", "--bins", 8, "--overlap", 0.25,
            "--cluster", "single:threshold=0.3", "--out", out,
        )
        assert r.returncode == 0, r.stderr
        data = json.loads(out.read_text())
        assert set(data) == {"nodes", "simplices", "dim_cap", "truncated"}
        b0, b1 = betti_of_complex(
            len(data["nodes"]),
            [n["id"] for n in data["nodes"]],
            [tuple(s) for s in data["simplices"]],
        )
        assert (b0, b1) == (1, 1)
        for line in ("nodes:", "beta0:", "beta1:", "truncated:"):
            assert line in r.stdout

    def test_missing_points_flag_exits_2(self):
        r = run("mapper", "--lens", "coord:0,1")
        assert r.returncode == 2

    def test_missing_points_file_exits_3(self, tmp_path):
        r = run("mapper", "--points", tmp_path / "absent.csv")
        assert r.returncode == 3

    def test_bad_overlap_exits_2(self, tmp_path):
        points = make_circle_csv(tmp_path, n=50)
        r = run("mapper", "--points", points, "--overlap", 1.5)
        assert r.returncode == 2

    def test_brick_high_overlap_warns_but_runs(self, tmp_path):
        points = make_circle_csv(tmp_path, n=100)
        out = tmp_path / "c.json"
        r = run(
            "mapper", "--points", points, "--cover", "brick", "--bins", 4,
            "--overlap", 0.6, "--cluster", "single:threshold=0.3", "--out", out,
        )
        assert r.returncode == 0
        assert "warning" in r.stdout.lower()
        assert set(json.loads(out.read_text())) == {
            "nodes", "simplices", "dim_cap", "truncated",
        }

    def test_byte_deterministic_outputs(self, tmp_path):
        points = make_circle_csv(tmp_path, n=200)
        outs = []
        for name in ("a", "b"):
            out = tmp_path / f"{name}.json"
            ses = tmp_path / f"{name}-session.json"
            r = run(
                "mapper", "--points", points, "--bins", 5, "--overlap", 0.25,
                "--cluster", "single:auto", "--out", out, "--session", ses,
            )
            assert r.returncode == 0
            outs.append((out.read_bytes(), ses.read_bytes(), r.stdout))
        assert outs[0] == outs[1]


class TestDiagnoseCommand:
    def test_circle_x_lens_bad(self, tmp_path):
        points = make_circle_csv(tmp_path)
        session = make_session(
            tmp_path, points, lens="coord:0", bins=2, overlap=0.4,
            cluster="single:auto",
        )
        out = tmp_path / "v.json"
        r = run(
            "diagnose", "--session", session, "--method", "persistence",
            "--levels", 5, "--out", out,
        )
        assert r.returncode == 0, r.stderr
        data = json.loads(out.read_text())
        assert data["bad"] is True
        assert len(data["violations"]) == 1

    def test_two_blob_clean(self, tmp_path):
        blob_csv = tmp_path / "blobs.csv"
        assert run("fixtures", "two_blob", "--seed", 0, "--out", blob_csv).returncode == 0
        session = make_session(
            tmp_path, blob_csv, bins=5, overlap=0.4, cluster="single:threshold=2"
        )
        out = tmp_path / "v.json"
        r = run("diagnose", "--session", session, "--method", "clustering", "--out", out)
        assert r.returncode == 0
        assert json.loads(out.read_text())["bad"] is False

    def test_bad_method_exits_2(self, tmp_path):
        points = make_circle_csv(tmp_path, n=50)
        session = make_session(tmp_path, points)
        r = run("diagnose", "--session", session, "--method", "vibes")
        assert r.returncode == 2

    def test_corrupt_session_exits_3(self, tmp_path):
        points = make_circle_csv(tmp_path, n=50)
        session = make_session(tmp_path, points)
        points.write_text(points.read_text().replace("0", "9", 1))
        r = run("diagnose", "--session", session, "--method", "clustering")
        assert r.returncode == 3

    def test_missing_session_exits_3(self, tmp_path):
        r = run("diagnose", "--session", tmp_path / "no.json", "--method", "clustering")
        assert r.returncode == 3


class TestMagnifyCommand:
    def make_blob_ring_session(self, tmp_path):
        csv = tmp_path / "br.csv"
        assert run("fixtures", "blob_ring", "--seed", 7, "--out", csv).returncode == 0
        return make_session(tmp_path, csv, bins=3, overlap=0.1)

    def blob_node_ids(self, session):
        data = json.loads(session.read_text())
        return [
            n["id"]
            for n in data["complex"]["nodes"]
            if all(m < 500 for m in n["members"])
        ]

    def test_magnify_updates_session_and_prints_delta(self, tmp_path):
        session = self.make_blob_ring_session(tmp_path)
        before = json.loads(session.read_text())
        ids = self.blob_node_ids(session)
        r = run(
            "magnify", "--session", session, "--select", ",".join(map(str, ids)),
            "--bins", 3, "--overlap", 0.3, "--cluster", "single:threshold=0.5",
        )
        assert r.returncode == 0, r.stderr
        assert "->" in r.stdout and "+" in r.stdout
        after = json.loads(session.read_text())
        assert len(after["complex"]["nodes"]) > len(before["complex"]["nodes"])
        assert len(after["region_log"]) == 1

    def test_empty_select_keeps_complex(self, tmp_path):
        session = self.make_blob_ring_session(tmp_path)
        before = json.loads(session.read_text())["complex"]
        r = run("magnify", "--session", session, "--select", "")
        assert r.returncode == 0, r.stderr
        after = json.loads(session.read_text())
        assert after["complex"] == before
        assert len(after["region_log"]) == 1

    def test_unknown_node_exits_2(self, tmp_path):
        session = self.make_blob_ring_session(tmp_path)
        r = run("magnify", "--session", session, "--select", "424242")
        assert r.returncode == 2

    def test_stale_ids_after_remagnify_exit_2(self, tmp_path):
        session = self.make_blob_ring_session(tmp_path)
        ids = self.blob_node_ids(session)
        args = (
            "magnify", "--session", session, "--select", ",".join(map(str, ids)),
            "--bins", 3, "--overlap", 0.3, "--cluster", "single:threshold=0.5",
        )
        assert run(*args).returncode == 0
        r = run(*args)
        assert r.returncode == 2
