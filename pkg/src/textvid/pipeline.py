"""Multi-instance track orchestration: first-frame intake, per-instance
tracker propagation, ID assignment, and error-correcting re-tracking."""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import GeometryError, TextvidError, ValidationError
from .failure import FailureParams, apply as apply_confidence, confidence
from .imgproc import Frame, frame_paths, load_frame, load_image_u8
from .store import AnnotationDocument, BoundingBox, Entry, Instance, Violation
from .tracker import Status, TrackerParams, detect, init_tracker, record_response, update


@dataclass(frozen=True)
class FirstFrameBoxes:
    source: str  # "manual" | "detector-import"
    boxes: tuple[BoundingBox, ...]

    def __post_init__(self):
        if not self.boxes:
            raise ValidationError([Violation("first-frame box list is empty")])
        seen = set()
        for b in self.boxes:
            key = (b.x, b.y, b.w, b.h)
            if key in seen:
                raise ValidationError([Violation(f"duplicate first-frame box {key}")])
            seen.add(key)


def polygon_to_box(points) -> BoundingBox:
    """Smallest axis-aligned bounding rectangle of a polygon (segmentation-style
    detector output)."""
    xs = [float(p[0]) for p in points]
    ys = [float(p[1]) for p in points]
    return BoundingBox(min(xs), min(ys), max(xs) - min(xs), max(ys) - min(ys))


@dataclass
class VideoSequence:
    """A directory of numbered PNG frames, optionally trimmed to [start, end]
    (1-based, inclusive)."""

    directory: str
    paths: list[str]
    width: int
    height: int
    channels: int

    @classmethod
    def open(cls, directory: str, trim: tuple[int, int] | None = None) -> "VideoSequence":
        paths = frame_paths(directory)
        if not paths:
            raise TextvidError(f"no frames found in {directory}")
        if trim is not None:
            start, end = trim
            if start < 1 or end > len(paths) or start > end:
                raise TextvidError(f"trim range {start}:{end} outside 1:{len(paths)}")
            paths = paths[start - 1:end]
        first = load_image_u8(paths[0])
        h, w = first.shape[:2]
        c = 1 if first.ndim == 2 else first.shape[2]
        return cls(directory=directory, paths=paths, width=w, height=h, channels=c)

    @property
    def n_frame(self) -> int:
        return len(self.paths)

    def frame(self, t: int) -> Frame:
        """1-based frame access with geometry consistency enforcement."""
        if not (1 <= t <= self.n_frame):
            raise TextvidError(f"frame index {t} outside 1:{self.n_frame}")
        try:
            f = load_frame(self.paths[t - 1], index=t - 1)
        except OSError as e:
            raise TextvidError(f"unreadable frame {t}: {e}") from e
        if f.width != self.width or f.height != self.height:
            raise TextvidError(
                f"geometry drift at frame {t}: {f.width}x{f.height} != "
                f"{self.width}x{self.height}"
            )
        return f


def assign_ids(first: FirstFrameBoxes) -> list[tuple[str, BoundingBox]]:
    """Number instances from the upper-left corner: sort by (top-left y, then x),
    zero-padded two-digit labels starting at "01"."""
    ordered = sorted(first.boxes, key=lambda b: (b.y, b.x))
    return [(f"{i + 1:02d}", box) for i, box in enumerate(ordered)]


def _check_first_boxes(video: VideoSequence, first: FirstFrameBoxes) -> None:
    for b in first.boxes:
        if not b.is_valid():
            raise GeometryError(f"invalid first-frame box ({b.x}, {b.y}, {b.w}, {b.h})")
        if not (0 <= b.x and 0 <= b.y and b.x + b.w <= video.width
                and b.y + b.h <= video.height):
            raise GeometryError(
                f"first-frame box ({b.x}, {b.y}, {b.w}, {b.h}) outside "
                f"{video.width}x{video.height} frame"
            )


def run_pipeline(
    video: VideoSequence,
    first: FirstFrameBoxes,
    params: TrackerParams | None = None,
    failure_params: FailureParams | None = None,
    progress=None,
) -> AnnotationDocument:
    """Propagate every first-frame instance through the video.

    ``failure_params=None`` disables the failure-detection guard. ``progress``
    is an optional callable invoked with the number of completed frames.
    """
    params = params or TrackerParams()
    _check_first_boxes(video, first)
    if video.n_frame < 2:
        raise TextvidError("tracking needs at least 2 frames")

    ids = assign_ids(first)
    frame1 = video.frame(1)
    # imported detector boxes are recorded as "manual" too: both are
    # human-supplied ground truth from the tracker's point of view
    source = "manual"

    trackers = {}
    entries: dict[str, list[Entry]] = {}
    stopped_at: dict[str, int | None] = {}
    for inst_id, box in ids:
        trackers[inst_id] = init_tracker(frame1, box, params)
        entries[inst_id] = [Entry(frame=1, box=box, source=source, confidence=None)]
        stopped_at[inst_id] = None
    if progress:
        progress(1)

    for t in range(2, video.n_frame + 1):
        frame = video.frame(t)
        for inst_id, _ in ids:
            state = trackers[inst_id]
            if state.status is not Status.ACTIVE:
                continue
            result = detect(state, frame)
            record_response(state, result.raw_peak)
            if failure_params is not None:
                rec = confidence(state.first_response_max, result.raw_peak,
                                 failure_params, frame=t)
                if rec.score == 0:
                    apply_confidence(state, rec)
                    stopped_at[inst_id] = t
                    entries[inst_id].append(
                        Entry(frame=t, box=result.box, source="tracked",
                              confidence=result.raw_peak)
                    )
                    continue
            update(state, frame, result.box, response_peak=result.raw_peak)
            entries[inst_id].append(
                Entry(frame=t, box=result.box, source="tracked",
                      confidence=result.raw_peak)
            )
        if progress:
            progress(t)

    instances = tuple(
        Instance(id=inst_id, entries=tuple(entries[inst_id]), stopped_at=stopped_at[inst_id])
        for inst_id, _ in ids
    )
    return AnnotationDocument(
        video=video.directory,
        n_frame=video.n_frame,
        frame_width=video.width,
        frame_height=video.height,
        frame_channels=video.channels,
        instances=instances,
        tracker_params=params.to_dict(),
    )


def retrack_from(
    doc: AnnotationDocument,
    video: VideoSequence,
    instance_id: str,
    frame_index: int,
    corrected_box: BoundingBox,
    failure_params: FailureParams | None = None,
) -> AnnotationDocument:
    """Error-correcting step: replace an instance's boxes from ``frame_index``
    on with a fresh propagation from the corrected box."""
    inst = doc.instance(instance_id)  # raises KeyError for unknown instances
    if not (1 <= frame_index <= video.n_frame):
        raise TextvidError(f"frame index {frame_index} outside 1:{video.n_frame}")
    if not corrected_box.is_valid():
        raise GeometryError("corrected box is degenerate")

    params = (TrackerParams.from_dict(doc.tracker_params)
              if doc.tracker_params else TrackerParams())

    kept = tuple(e for e in inst.entries if e.frame < frame_index)
    new_entries = list(kept)
    new_entries.append(
        Entry(frame=frame_index, box=corrected_box,
              source="corrected" if frame_index > 1 else "manual", confidence=None)
    )
    new_stopped: int | None = None

    state = init_tracker(video.frame(frame_index), corrected_box, params)
    for t in range(frame_index + 1, video.n_frame + 1):
        if state.status is not Status.ACTIVE:
            break
        frame = video.frame(t)
        result = detect(state, frame)
        record_response(state, result.raw_peak)
        if failure_params is not None:
            rec = confidence(state.first_response_max, result.raw_peak,
                             failure_params, frame=t)
            if rec.score == 0:
                apply_confidence(state, rec)
                new_stopped = t
                new_entries.append(
                    Entry(frame=t, box=result.box, source="tracked",
                          confidence=result.raw_peak)
                )
                break
        update(state, frame, result.box, response_peak=result.raw_peak)
        new_entries.append(
            Entry(frame=t, box=result.box, source="tracked", confidence=result.raw_peak)
        )

    new_inst = Instance(id=inst.id, entries=tuple(new_entries), stopped_at=new_stopped,
                        transcription=inst.transcription)
    instances = tuple(new_inst if i.id == instance_id else i for i in doc.instances)
    return replace(doc, instances=instances)
