"""Annotation document model, canonical JSON serialization, and validation.

The document is the toolkit's persistent contract: one document per
(video, degradation) pair, schema tag "text-rbl-annot/1". Boxes are stored
as continuous values; consumers round at use.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace

from .errors import SchemaVersionError, ValidationError

SCHEMA_VERSION = "text-rbl-annot/1"

SOURCES = ("manual", "tracked", "corrected")


@dataclass(frozen=True)
class BoundingBox:
    """Axis-aligned up-right rectangle, continuous pixel coordinates."""

    x: float
    y: float
    w: float
    h: float

    @property
    def cx(self) -> float:
        return self.x + self.w / 2.0

    @property
    def cy(self) -> float:
        return self.y + self.h / 2.0

    def is_valid(self) -> bool:
        vals = (self.x, self.y, self.w, self.h)
        return all(math.isfinite(v) for v in vals) and self.w > 0 and self.h > 0

    def scaled(self, factor: float) -> "BoundingBox":
        return BoundingBox(self.x * factor, self.y * factor, self.w * factor, self.h * factor)


@dataclass(frozen=True)
class Entry:
    """One box of one instance at one frame (1-based frame index)."""

    frame: int
    box: BoundingBox
    source: str  # manual | tracked | corrected
    confidence: float | None = None


@dataclass(frozen=True)
class Instance:
    id: str  # zero-padded two-digit label, "01" ...
    entries: tuple[Entry, ...]
    stopped_at: int | None = None
    transcription: str | None = None


@dataclass(frozen=True)
class AnnotationDocument:
    video: str
    n_frame: int
    frame_width: int
    frame_height: int
    frame_channels: int
    instances: tuple[Instance, ...]
    tracker_params: dict | None = None
    degradation: dict | None = None  # None | {"kind":"blur","n":N} | {"kind":"lr","m":M}
    source_document: str | None = None
    schema: str = SCHEMA_VERSION

    def instance(self, instance_id: str) -> Instance:
        for inst in self.instances:
            if inst.id == instance_id:
                return inst
        raise KeyError(f"unknown instance {instance_id!r}")


@dataclass(frozen=True)
class Violation:
    message: str
    instance: str | None = None
    frame: int | None = None
    field: str | None = None

    def __str__(self):
        where = "/".join(
            s for s in (self.instance, str(self.frame) if self.frame else None, self.field) if s
        )
        return f"{where}: {self.message}" if where else self.message


def validate(doc: AnnotationDocument) -> list[Violation]:
    """Check every document invariant; returns the full list of violations."""
    out: list[Violation] = []
    if doc.schema != SCHEMA_VERSION:
        out.append(Violation(f"unknown schema {doc.schema!r}", field="schema"))
    if doc.n_frame < 1:
        out.append(Violation("n_frame must be >= 1", field="n_frame"))
    if doc.frame_width < 1 or doc.frame_height < 1:
        out.append(Violation("frame geometry must be positive", field="frame_width"))

    seen_ids = set()
    for inst in doc.instances:
        if inst.id in seen_ids:
            out.append(Violation("duplicate instance id", instance=inst.id, field="id"))
        seen_ids.add(inst.id)
        if not inst.entries:
            out.append(Violation("instance has no entries", instance=inst.id))
            continue
        if inst.entries[0].frame != 1:
            out.append(
                Violation("entries must start at frame 1", instance=inst.id, field="entries")
            )
        prev = None
        for e in inst.entries:
            if prev is not None and e.frame != prev + 1:
                out.append(
                    Violation(
                        f"entries not contiguous ({prev} -> {e.frame})",
                        instance=inst.id,
                        frame=e.frame,
                        field="frame",
                    )
                )
            prev = e.frame
            if e.frame < 1 or e.frame > doc.n_frame:
                out.append(
                    Violation("frame index out of range", instance=inst.id, frame=e.frame)
                )
            if e.source not in SOURCES:
                out.append(
                    Violation(f"bad source {e.source!r}", instance=inst.id, frame=e.frame,
                              field="source")
                )
            if not e.box.is_valid():
                bad = "w" if not (math.isfinite(e.box.w) and e.box.w > 0) else (
                    "h" if not (math.isfinite(e.box.h) and e.box.h > 0) else "x")
                out.append(
                    Violation("degenerate or non-finite box", instance=inst.id, frame=e.frame,
                              field=bad)
                )
            else:
                # box must intersect the frame
                if (e.box.x + e.box.w <= 0 or e.box.y + e.box.h <= 0
                        or e.box.x >= doc.frame_width or e.box.y >= doc.frame_height):
                    out.append(
                        Violation("box outside frame", instance=inst.id, frame=e.frame)
                    )
            if e.source == "tracked" and e.frame > 1 and e.confidence is None:
                out.append(
                    Violation("tracked entry missing confidence", instance=inst.id,
                              frame=e.frame, field="confidence")
                )
        if inst.stopped_at is not None and inst.entries[-1].frame > inst.stopped_at:
            out.append(
                Violation("entries continue past stop frame", instance=inst.id,
                          frame=inst.entries[-1].frame)
            )
    return out


def _entry_to_json(e: Entry) -> dict:
    return {
        "frame": e.frame,
        "x": e.box.x, "y": e.box.y, "w": e.box.w, "h": e.box.h,
        "source": e.source,
        "confidence": e.confidence,
    }


def to_json_obj(doc: AnnotationDocument) -> dict:
    """Canonical dict form: fixed field order, instances by id, entries by frame."""
    return {
        "schema": doc.schema,
        "video": doc.video,
        "n_frame": doc.n_frame,
        "frame_width": doc.frame_width,
        "frame_height": doc.frame_height,
        "frame_channels": doc.frame_channels,
        "tracker_params": doc.tracker_params,
        "degradation": doc.degradation,
        "source_document": doc.source_document,
        "instances": [
            {
                "id": inst.id,
                "transcription": inst.transcription,
                "stopped_at": inst.stopped_at,
                "entries": [_entry_to_json(e) for e in inst.entries],
            }
            for inst in sorted(doc.instances, key=lambda i: i.id)
        ],
    }


def save(doc: AnnotationDocument) -> bytes:
    """Serialize to canonical UTF-8 JSON. Raises ValidationError on an invalid doc."""
    violations = validate(doc)
    if violations:
        raise ValidationError(violations)
    return (json.dumps(to_json_obj(doc), indent=2, ensure_ascii=False) + "\n").encode("utf-8")


def from_json_obj(obj: dict) -> AnnotationDocument:
    schema = obj.get("schema")
    if schema != SCHEMA_VERSION:
        raise SchemaVersionError(f"unsupported schema version {schema!r}")
    instances = []
    for i in obj.get("instances", []):
        entries = tuple(
            Entry(
                frame=int(e["frame"]),
                box=BoundingBox(float(e["x"]), float(e["y"]), float(e["w"]), float(e["h"])),
                source=e["source"],
                confidence=None if e.get("confidence") is None else float(e["confidence"]),
            )
            for e in i["entries"]
        )
        instances.append(
            Instance(
                id=i["id"],
                entries=entries,
                stopped_at=i.get("stopped_at"),
                transcription=i.get("transcription"),
            )
        )
    return AnnotationDocument(
        video=obj["video"],
        n_frame=int(obj["n_frame"]),
        frame_width=int(obj["frame_width"]),
        frame_height=int(obj["frame_height"]),
        frame_channels=int(obj.get("frame_channels", 3)),
        instances=tuple(instances),
        tracker_params=obj.get("tracker_params"),
        degradation=obj.get("degradation"),
        source_document=obj.get("source_document"),
        schema=schema,
    )


def load(data: bytes) -> AnnotationDocument:
    """Parse + validate. Schema mismatch raises SchemaVersionError, invariant
    breakage raises ValidationError listing every failing check."""
    doc = from_json_obj(json.loads(data.decode("utf-8")))
    violations = validate(doc)
    if violations:
        raise ValidationError(violations)
    return doc


def load_path(path: str) -> AnnotationDocument:
    with open(path, "rb") as f:
        return load(f.read())


def save_path(doc: AnnotationDocument, path: str) -> None:
    data = save(doc)
    with open(path, "wb") as f:
        f.write(data)


def with_metadata(doc: AnnotationDocument, **kwargs) -> AnnotationDocument:
    return replace(doc, **kwargs)
