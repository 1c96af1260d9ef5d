"""HTTP JSON API exposing analysis sessions; the concurrency boundary.

One directory per session under ``data_dir`` holds the points CSV, the
canonical session file, and a timestamp sidecar.  Mutations are synchronous
and mutually exclusive per session (a second writer gets 409); reads serve
the last committed file without locking.
"""

from __future__ import annotations

import json
import re
import secrets
import shutil
import threading
import time
from pathlib import Path

from fastapi import Body, FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from .clustering import ClusterParams
from .cover import build_brick_cover, build_cuboidal_cover
from .diagnostics import TowerConfig, diagnose
from .errors import CorruptSession, MultimapperError, UnsupportedScheme
from .fixtures import make_fixture
from .geometry import lens_bounds, load_points_csv
from .mapper import complex_to_json
from .rescale import MagnifyRequest, degeneracy_guard, initial_state, magnify
from .session import (
    lens_from_source,
    lens_source_with_hash,
    load_session,
    save_session,
    write_points_csv,
)

MAX_UPLOAD_BYTES = 50 * 2**20
_SID_RE = re.compile(r"^[0-9a-f]{16}$")


class SessionStore:
    """Filesystem-backed sessions plus the per-session mutation locks."""

    def __init__(self, data_dir, expire_hours: float = 24.0):
        self.data_dir = Path(data_dir)
        self.data_dir.mkdir(parents=True, exist_ok=True)
        self.expire_seconds = float(expire_hours) * 3600.0
        self._locks: dict[str, threading.Lock] = {}
        self._registry = threading.Lock()

    def lock_for(self, sid: str) -> threading.Lock:
        with self._registry:
            return self._locks.setdefault(sid, threading.Lock())

    def session_dir(self, sid: str) -> Path:
        return self.data_dir / sid

    def session_file(self, sid: str) -> Path:
        return self.session_dir(sid) / "session.json"

    def new_session(self) -> tuple[str, Path]:
        sid = secrets.token_hex(8)
        sdir = self.session_dir(sid)
        sdir.mkdir(parents=True)
        return sid, sdir

    def _expired(self, session_file: Path) -> bool:
        return time.time() - session_file.stat().st_mtime > self.expire_seconds

    def drop(self, sid: str) -> None:
        shutil.rmtree(self.session_dir(sid), ignore_errors=True)
        with self._registry:
            self._locks.pop(sid, None)

    def exists(self, sid: str) -> bool:
        if not _SID_RE.fullmatch(sid):
            return False
        session_file = self.session_file(sid)
        if not session_file.is_file():
            return False
        if self._expired(session_file):
            self.drop(sid)
            return False
        return True

    def purge_expired(self) -> None:
        for entry in self.data_dir.iterdir():
            session_file = entry / "session.json"
            if entry.is_dir() and session_file.is_file() and self._expired(session_file):
                self.drop(entry.name)

    def load(self, sid: str):
        return load_session(self.session_file(sid))

    def save(self, sid, state, points_path, lens_source, reports) -> None:
        save_session(
            self.session_file(sid), state, points_path, lens_source, reports=reports
        )
        self._touch_meta(sid)

    def _touch_meta(self, sid: str) -> None:
        meta_file = self.session_dir(sid) / "meta.json"
        now = time.time()
        created = now
        if meta_file.is_file():
            try:
                created = json.loads(meta_file.read_text()).get("created", now)
            except (OSError, json.JSONDecodeError):
                pass
        meta_file.write_text(
            json.dumps({"created": created, "updated": now}, sort_keys=True) + "\n"
        )


def _lens_source(spec) -> dict:
    if isinstance(spec, dict):
        if "kind" not in spec:
            raise ValueError("lens source record needs a 'kind'")
        return spec
    from .cli import parse_lens_spec

    return parse_lens_spec(str(spec))


def _build_cover(scheme: str, bounds, bins: int, g: float):
    if scheme == "cuboidal":
        return build_cuboidal_cover(bounds, bins, g)
    if scheme == "brick":
        return build_brick_cover(bounds, bins, g)
    raise UnsupportedScheme(f"unknown cover scheme {scheme!r}")


def _fill_magnify_defaults(payload: dict, state) -> dict:
    base = state.base_cover
    cover = payload.get("cover") or {
        "scheme": base.scheme,
        "bins_per_axis": max(base.bins_per_axis or (1,)),
        "g": base.g,
    }
    return {
        "node_ids": payload.get("node_ids", []),
        "cover": cover,
        "cluster": payload.get("cluster") or state.params_log[0],
    }


def create_app(data_dir, expire_hours: float = 24.0, ui_dir=None) -> FastAPI:
    store = SessionStore(data_dir, expire_hours=expire_hours)
    app = FastAPI(title="multimapper session service")
    app.state.store = store

    @app.middleware("http")
    async def upload_limit(request, call_next):
        size = request.headers.get("content-length")
        if size is not None and size.isdigit() and int(size) > MAX_UPLOAD_BYTES:
            return JSONResponse(
                {"detail": "request body exceeds the 50 MB limit"}, status_code=413
            )
        return await call_next(request)

    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    def require_session(sid: str) -> None:
        if not store.exists(sid):
            raise HTTPException(404, f"unknown session {sid!r}")

    def load_or_404(sid: str):
        try:
            return store.load(sid)
        except CorruptSession as exc:
            raise HTTPException(404, f"session {sid!r} is unreadable: {exc}")

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok"}

    @app.post("/sessions", status_code=201)
    def create_session(payload: dict = Body(...)) -> dict:
        store.purge_expired()
        sid, sdir = store.new_session()
        try:
            points_path = sdir / "points.csv"
            if payload.get("points_csv") is not None:
                text = payload["points_csv"]
                if not isinstance(text, str) or not text.strip():
                    raise ValueError("points_csv is empty")
                points_path.write_text(text)
            elif payload.get("fixture") is not None:
                n = payload.get("n")
                pts = make_fixture(
                    str(payload["fixture"]),
                    seed=int(payload.get("seed", 0)),
                    n=None if n is None else int(n),
                )
                write_points_csv(points_path, pts)
            else:
                raise ValueError("request needs either points_csv or fixture")

            pc = load_points_csv(points_path)
            source = lens_source_with_hash(_lens_source(payload.get("lens", "coord:0,1")))
            lens = lens_from_source(pc, source)
            cover_spec = payload.get("cover") or {}
            cover = _build_cover(
                str(cover_spec.get("scheme", "cuboidal")),
                lens_bounds(lens),
                int(cover_spec.get("bins_per_axis", 4)),
                float(cover_spec.get("g", 0.25)),
            )
            params = ClusterParams.parse(str(payload.get("cluster", "single:auto")))
            state, _report = initial_state(
                pc, lens, cover, params, dim_cap=int(payload.get("dim_cap", 3))
            )
            store.save(sid, state, points_path, source, reports={})
        except (MultimapperError, ValueError, KeyError, TypeError) as exc:
            store.drop(sid)
            raise HTTPException(400, str(exc))
        except BaseException:
            store.drop(sid)
            raise
        return {
            "session_id": sid,
            "complex": complex_to_json(state.complex, state.lens),
        }

    @app.post("/sessions/{sid}/magnify")
    def magnify_session(sid: str, payload: dict = Body(...)) -> dict:
        require_session(sid)
        lock = store.lock_for(sid)
        if not lock.acquire(blocking=False):
            raise HTTPException(409, "a mutation is already in flight for this session")
        try:
            state, meta = load_or_404(sid)
            try:
                req = MagnifyRequest.from_json(_fill_magnify_defaults(payload, state))
                guard = degeneracy_guard(state, req)
                before = len(state.complex.nodes)
                new_state = magnify(state, req)
            except (MultimapperError, ValueError, KeyError, TypeError) as exc:
                raise HTTPException(400, str(exc))
            store.save(
                sid, new_state, meta["points_path"], meta["lens_source"], meta["reports"]
            )
            return {
                "complex": complex_to_json(new_state.complex, new_state.lens),
                "degeneracy_points": guard,
                "node_delta": len(new_state.complex.nodes) - before,
            }
        finally:
            lock.release()

    @app.post("/sessions/{sid}/diagnose")
    def diagnose_session(sid: str, payload: dict = Body(...)) -> dict:
        require_session(sid)
        lock = store.lock_for(sid)
        if not lock.acquire(blocking=False):
            raise HTTPException(409, "a mutation is already in flight for this session")
        try:
            state, meta = load_or_404(sid)
            try:
                method = str(payload.get("method", ""))
                cfg = TowerConfig(K=int(payload.get("levels", 5)))
                data = diagnose(
                    state, method, tower_cfg=cfg, max_dim=int(payload.get("max_dim", 1))
                )
            except (MultimapperError, ValueError, KeyError, TypeError) as exc:
                raise HTTPException(400, str(exc))
            reports = dict(meta["reports"])
            reports[method] = data
            store.save(sid, state, meta["points_path"], meta["lens_source"], reports)
            return data
        finally:
            lock.release()

    @app.get("/sessions/{sid}")
    def get_session(sid: str) -> dict:
        require_session(sid)
        try:
            snapshot = json.loads(store.session_file(sid).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise HTTPException(404, f"session {sid!r} is unreadable: {exc}")
        snapshot["session_id"] = sid
        return snapshot

    if ui_dir is not None and Path(ui_dir).is_dir():
        app.mount("/ui", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app
