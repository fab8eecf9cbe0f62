"""HTTP API for the annotation workflow: sessions, frames, first-frame boxes,
tracking, correction, finalize. Backs the browser UI; sessions persist to disk
so a restarted service resumes where labeling left off."""

from __future__ import annotations

import json
import os
import threading
import uuid

from fastapi import FastAPI, Request
from fastapi.responses import FileResponse, JSONResponse, Response

from .errors import GeometryError, TextvidError
from .failure import FailureParams
from .imgproc import load_image_u8
from .pipeline import FirstFrameBoxes, VideoSequence, assign_ids, retrack_from, run_pipeline
from .store import BoundingBox, from_json_obj, save_path, to_json_obj, validate
from .tracker import TrackerParams

STATES = ("created", "labeled", "tracked", "reviewed", "finalized")


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str, detail=None):
        self.status = status
        self.code = code
        self.message = message
        self.detail = detail
        super().__init__(message)


class Session:
    """Mutable server-side session; serialized to JSON on every state change."""

    def __init__(self, sid: str, frames_dir: str):
        self.id = sid
        self.frames_dir = frames_dir
        self.state = "created"
        self.revision = 0
        self.first_boxes: list[dict] = []
        self.doc_obj: dict | None = None
        self.finalized_path: str | None = None
        self.lock = threading.Lock()
        self.tracking = False
        self.frames_done = 0
        video = VideoSequence.open(frames_dir)
        self.n_frame = video.n_frame
        self.width = video.width
        self.height = video.height
        self.channels = video.channels
        self.frame_files = video.paths

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "frames_dir": self.frames_dir,
            "state": self.state,
            "revision": self.revision,
            "first_boxes": self.first_boxes,
            "document": self.doc_obj,
            "finalized_path": self.finalized_path,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "Session":
        s = cls(obj["id"], obj["frames_dir"])
        s.state = obj["state"]
        s.revision = obj["revision"]
        s.first_boxes = obj.get("first_boxes", [])
        s.doc_obj = obj.get("document")
        s.finalized_path = obj.get("finalized_path")
        return s

    def summary(self) -> dict:
        return {
            "id": self.id,
            "state": self.state,
            "revision": self.revision,
            "n_frame": self.n_frame,
            "frame_width": self.width,
            "frame_height": self.height,
            "degradation": (self.doc_obj or {}).get("degradation"),
        }


class SessionStore:
    def __init__(self, data_dir: str):
        self.data_dir = data_dir
        self.sessions_dir = os.path.join(data_dir, "sessions")
        self.documents_dir = os.path.join(data_dir, "documents")
        os.makedirs(self.sessions_dir, exist_ok=True)
        os.makedirs(self.documents_dir, exist_ok=True)
        self._cache: dict[str, Session] = {}
        self._cache_lock = threading.Lock()

    def persist(self, session: Session) -> None:
        path = os.path.join(self.sessions_dir, f"{session.id}.json")
        tmp = path + ".tmp"
        with open(tmp, "w") as f:
            json.dump(session.to_json(), f, indent=2)
        os.replace(tmp, path)

    def create(self, frames_dir: str) -> Session:
        session = Session(uuid.uuid4().hex[:12], frames_dir)
        with self._cache_lock:
            self._cache[session.id] = session
        self.persist(session)
        return session

    def get(self, sid: str) -> Session:
        with self._cache_lock:
            if sid in self._cache:
                return self._cache[sid]
        path = os.path.join(self.sessions_dir, f"{sid}.json")
        if not os.path.exists(path):
            raise ApiError(404, "session_not_found", f"no session {sid!r}")
        with open(path) as f:
            session = Session.from_json(json.load(f))
        with self._cache_lock:
            self._cache.setdefault(sid, session)
            return self._cache[sid]


def _parse_box(obj: dict) -> BoundingBox:
    try:
        return BoundingBox(float(obj["x"]), float(obj["y"]),
                           float(obj["w"]), float(obj["h"]))
    except (KeyError, TypeError, ValueError) as e:
        raise ApiError(422, "bad_box", f"malformed box: {e}")


def _require_state(session: Session, *allowed: str) -> None:
    if session.state not in allowed:
        raise ApiError(
            409, "illegal_state",
            f"operation requires state in {allowed}, session is {session.state!r}",
            detail={"state": session.state, "allowed": list(allowed)},
        )


def create_app(data_dir: str) -> FastAPI:
    app = FastAPI(title="textvid annotation service")
    store = SessionStore(data_dir)

    @app.exception_handler(ApiError)
    async def _api_error(request: Request, exc: ApiError):
        return JSONResponse(
            status_code=exc.status,
            content={"code": exc.code, "message": exc.message, "detail": exc.detail},
        )

    @app.exception_handler(TextvidError)
    async def _domain_error(request: Request, exc: TextvidError):
        return JSONResponse(
            status_code=422,
            content={"code": "domain_error", "message": str(exc), "detail": None},
        )

    @app.post("/sessions", status_code=201)
    async def create_session(body: dict):
        frames_dir = body.get("frames_dir")
        if not frames_dir or not os.path.isdir(frames_dir):
            raise ApiError(422, "bad_frames_dir", f"not a directory: {frames_dir!r}")
        try:
            video = VideoSequence.open(frames_dir)
        except TextvidError as e:
            raise ApiError(422, "bad_frames_dir", str(e))
        for t, path in enumerate(video.paths, start=1):
            u8 = load_image_u8(path)
            if u8.shape[:2] != (video.height, video.width):
                raise ApiError(
                    422, "mixed_geometry",
                    f"frame {t} geometry {u8.shape[1]}x{u8.shape[0]} differs from "
                    f"{video.width}x{video.height}",
                    detail={"frame": t},
                )
        session = store.create(frames_dir)
        return session.summary()

    @app.get("/sessions/{sid}")
    async def get_session(sid: str):
        return store.get(sid).summary()

    @app.get("/sessions/{sid}/frames/{t}")
    async def get_frame(sid: str, t: int):
        session = store.get(sid)
        if not (0 <= t < session.n_frame):
            raise ApiError(404, "frame_not_found",
                           f"frame {t} outside 0..{session.n_frame - 1}")
        return FileResponse(session.frame_files[t], media_type="image/png")

    @app.put("/sessions/{sid}/first-boxes")
    async def put_first_boxes(sid: str, body: dict):
        session = store.get(sid)
        with session.lock:
            _require_state(session, "created", "labeled")
            raw = body.get("boxes") or []
            if not raw:
                raise ApiError(422, "no_boxes", "at least one box is required")
            boxes = tuple(_parse_box(b) for b in raw)
            for b in boxes:
                if not b.is_valid():
                    raise ApiError(422, "bad_geometry", "degenerate box",
                                   detail={"box": [b.x, b.y, b.w, b.h]})
                if (b.x < 0 or b.y < 0 or b.x + b.w > session.width
                        or b.y + b.h > session.height):
                    raise ApiError(
                        422, "bad_geometry",
                        f"box ({b.x}, {b.y}, {b.w}, {b.h}) outside "
                        f"{session.width}x{session.height} frame",
                        detail={"box": [b.x, b.y, b.w, b.h]},
                    )
            try:
                first = FirstFrameBoxes("manual", boxes)
            except TextvidError as e:
                raise ApiError(422, "bad_boxes", str(e))
            assigned = assign_ids(first)
            session.first_boxes = [
                {"id": iid, "x": b.x, "y": b.y, "w": b.w, "h": b.h}
                for iid, b in assigned
            ]
            session.state = "labeled"
            session.revision += 1
            store.persist(session)
            return {"revision": session.revision, "instances": session.first_boxes}

    @app.post("/sessions/{sid}/track", status_code=202)
    async def start_tracking(sid: str, body: dict | None = None):
        session = store.get(sid)
        body = body or {}
        with session.lock:
            _require_state(session, "labeled", "tracked")
            if session.tracking:
                raise ApiError(409, "tracking_in_progress",
                               "a tracking run is already active for this session")
            params = (TrackerParams.from_dict(body["params"])
                      if body.get("params") else TrackerParams())
            fd_on = body.get("failure_detection", "on") == "on"
            fd = FailureParams(
                alpha=float(body.get("fd_alpha", 0.25)),
                beta=float(body.get("fd_beta", -0.2)),
            ) if fd_on else None
            session.tracking = True
            session.frames_done = 0

        def work():
            try:
                video = VideoSequence.open(session.frames_dir)
                boxes = tuple(BoundingBox(b["x"], b["y"], b["w"], b["h"])
                              for b in session.first_boxes)
                first = FirstFrameBoxes("manual", boxes)

                def progress(done):
                    session.frames_done = done

                doc = run_pipeline(video, first, params, fd, progress=progress)
                with session.lock:
                    session.doc_obj = to_json_obj(doc)
                    session.state = "tracked"
                    session.revision += 1
                    store.persist(session)
            finally:
                session.tracking = False

        threading.Thread(target=work, daemon=True).start()
        return {"revision": session.revision, "started": True}

    @app.get("/sessions/{sid}/progress")
    async def get_progress(sid: str):
        session = store.get(sid)
        instances = []
        if session.doc_obj:
            for inst in session.doc_obj["instances"]:
                instances.append({
                    "id": inst["id"],
                    "status": "stopped" if inst["stopped_at"] is not None else "active",
                    "stopped_at": inst["stopped_at"],
                })
        return {
            "running": session.tracking,
            "frames_done": session.frames_done if session.tracking
            else (session.n_frame if session.doc_obj else 0),
            "n_frame": session.n_frame,
            "revision": session.revision,
            "instances": instances,
        }

    @app.get("/sessions/{sid}/document")
    async def get_document(sid: str):
        session = store.get(sid)
        if session.doc_obj is None:
            raise ApiError(404, "no_document", "tracking has not produced a document yet")
        return {"revision": session.revision, "document": session.doc_obj}

    @app.post("/sessions/{sid}/corrections")
    async def submit_correction(sid: str, body: dict):
        session = store.get(sid)
        with session.lock:
            _require_state(session, "tracked", "reviewed")
            if session.tracking:
                raise ApiError(409, "tracking_in_progress",
                               "cannot correct while tracking is running")
            instance_id = body.get("instance")
            frame = body.get("frame")
            box = _parse_box(body.get("box") or {})
            doc = from_json_obj(session.doc_obj)
            video = VideoSequence.open(session.frames_dir)
            try:
                revised = retrack_from(doc, video, instance_id, int(frame), box)
            except KeyError:
                raise ApiError(404, "unknown_instance", f"no instance {instance_id!r}")
            except (GeometryError, TextvidError) as e:
                raise ApiError(422, "bad_correction", str(e))
            session.doc_obj = to_json_obj(revised)
            session.state = "tracked"
            session.revision += 1
            store.persist(session)
            inst = revised.instance(instance_id)
            return {
                "revision": session.revision,
                "instance": instance_id,
                "entries": len(inst.entries),
                "stopped_at": inst.stopped_at,
            }

    @app.post("/sessions/{sid}/finalize")
    async def finalize(sid: str):
        session = store.get(sid)
        with session.lock:
            if session.state == "finalized":
                return {"revision": session.revision, "path": session.finalized_path}
            _require_state(session, "tracked", "reviewed")
            doc = from_json_obj(session.doc_obj)
            violations = validate(doc)
            if violations:
                raise ApiError(422, "invalid_document",
                               "document fails validation",
                               detail=[str(v) for v in violations])
            path = os.path.join(store.documents_dir, f"{session.id}.json")
            save_path(doc, path)
            session.finalized_path = path
            session.state = "finalized"
            store.persist(session)
            return {"revision": session.revision, "path": path}

    ui_dir = os.environ.get("TEXTVID_UI_DIR")
    if ui_dir and os.path.isdir(ui_dir):
        from fastapi.staticfiles import StaticFiles
        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app
