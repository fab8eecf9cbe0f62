"""Paired video degradation: sliding-window blur averaging and bicubic
low-resolution generation, plus annotation remapping onto the pairs."""

from __future__ import annotations

import os
from dataclasses import dataclass, replace

import numpy as np

from .errors import ConfigError
from .imgproc import bicubic_resample_array, frame_paths, load_image_u8, save_image_u8
from .store import AnnotationDocument, BoundingBox, Entry, Instance


@dataclass(frozen=True)
class BlurConfig:
    n: int = 5  # window parameter: output frame t averages the n+1 frames
    # at offsets i - floor(n/2), i = 0..n

    def __post_init__(self):
        if self.n < 1:
            raise ConfigError("blur window parameter must be >= 1")


@dataclass(frozen=True)
class LRConfig:
    m: int = 4  # downsampling multiple

    def __post_init__(self):
        if self.m < 1:
            raise ConfigError("downsampling multiple must be >= 1")


def blur_window_offsets(n: int) -> list[int]:
    half = n // 2
    return [i - half for i in range(n + 1)]


def blur_frames_u8(frames: list[np.ndarray], cfg: BlurConfig) -> list[np.ndarray]:
    """Windowed mean in 8-bit intensity, round half up; window indices clamp
    to the sequence ends so output length equals input length."""
    n_frame = len(frames)
    offsets = blur_window_offsets(cfg.n)
    terms = cfg.n + 1
    out = []
    for t in range(n_frame):
        acc = np.zeros(frames[0].shape, dtype=np.int64)
        for off in offsets:
            acc += frames[int(np.clip(t + off, 0, n_frame - 1))]
        # integer round-half-up of acc / terms
        out.append(((2 * acc + terms) // (2 * terms)).astype(np.uint8))
    return out


def blur_video(in_dir: str, out_dir: str, cfg: BlurConfig) -> int:
    """Blur an entire frame directory; returns the number of frames written."""
    paths = frame_paths(in_dir)
    frames = [load_image_u8(p) for p in paths]
    os.makedirs(out_dir, exist_ok=True)
    for path, blurred in zip(paths, blur_frames_u8(frames, cfg)):
        save_image_u8(os.path.join(out_dir, os.path.basename(path)), blurred)
    return len(paths)


def lr_frame_u8(pixels: np.ndarray, cfg: LRConfig) -> np.ndarray:
    h, w = pixels.shape[:2]
    if cfg.m > w or cfg.m > h:
        raise ConfigError(f"downsampling multiple {cfg.m} exceeds frame size {w}x{h}")
    if cfg.m == 1:
        return pixels.copy()
    out = bicubic_resample_array(pixels.astype(np.float64) / 255.0, w // cfg.m, h // cfg.m)
    return np.clip(np.floor(out * 255.0 + 0.5), 0, 255).astype(np.uint8)


def lr_video(in_dir: str, out_dir: str, cfg: LRConfig) -> int:
    paths = frame_paths(in_dir)
    if not paths:
        return 0
    os.makedirs(out_dir, exist_ok=True)
    for path in paths:
        save_image_u8(os.path.join(out_dir, os.path.basename(path)),
                      lr_frame_u8(load_image_u8(path), cfg))
    return len(paths)


def remap_annotations(doc: AnnotationDocument, cfg) -> AnnotationDocument:
    """Transfer raw-video annotations onto a degraded pair. Blur keeps boxes
    as-is; LR divides every coordinate by the downsampling multiple so boxes
    land on the LR raster."""
    if isinstance(cfg, BlurConfig):
        return replace(
            doc,
            degradation={"kind": "blur", "n": cfg.n},
            source_document=doc.video,
        )
    if isinstance(cfg, LRConfig):
        m = float(cfg.m)
        instances = tuple(
            Instance(
                id=inst.id,
                entries=tuple(
                    Entry(frame=e.frame, box=e.box.scaled(1.0 / m),
                          source=e.source, confidence=e.confidence)
                    for e in inst.entries
                ),
                stopped_at=inst.stopped_at,
                transcription=inst.transcription,
            )
            for inst in doc.instances
        )
        return replace(
            doc,
            instances=instances,
            frame_width=doc.frame_width // cfg.m,
            frame_height=doc.frame_height // cfg.m,
            degradation={"kind": "lr", "m": cfg.m},
            source_document=doc.video,
        )
    raise ConfigError(f"unknown degradation config {cfg!r}")
