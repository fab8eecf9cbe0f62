"""Deterministic synthetic video fixtures with exact ground truth.

Used by the test suite and exposed through the CLI so every derived check
replays bit-for-bit: fixed RNG seed, integer pixel math only.
"""

from __future__ import annotations

import os

import numpy as np

from .errors import ConfigError
from .imgproc import save_image_u8
from .store import AnnotationDocument, BoundingBox, Entry, Instance

DEFAULT_SEED = 7
FRAME_W = 360
FRAME_H = 240
TARGET_W = 64
TARGET_H = 24
TRANSLATION_STEP = 2  # px/frame
ZOOM_FACTOR = 1.005  # per frame
OCCLUSION_START = 40  # 1-based, inclusive
OCCLUSION_END = 60

MOTIONS = ("translation", "zoom", "occlusion")


def _background(rng: np.random.Generator) -> np.ndarray:
    # low-contrast blocky noise: static, so only the target moves
    coarse = rng.integers(70, 110, size=(FRAME_H // 8, FRAME_W // 8), dtype=np.int64)
    return np.repeat(np.repeat(coarse, 8, axis=0), 8, axis=1).astype(np.uint8)


def _target_texture(rng: np.random.Generator, w: int = 128, h: int = 48) -> np.ndarray:
    """High-contrast blocky pattern, text-like: dark glyph blocks on a bright
    plate. Oversized base; renderers sample it down."""
    tex = np.full((h, w), 235, dtype=np.uint8)
    blocks = rng.integers(0, 2, size=(h // 8, w // 8), dtype=np.int64)
    dark = np.repeat(np.repeat(blocks, 8, axis=0), 8, axis=1)
    tex[dark == 1] = 25
    return tex


def _paste_target(canvas: np.ndarray, tex: np.ndarray, box: tuple[int, int, int, int]):
    """Nearest-neighbor paste of the texture into an integer box."""
    x, y, w, h = box
    ys = (np.arange(h) * tex.shape[0]) // h
    xs = (np.arange(w) * tex.shape[1]) // w
    patch = tex[np.ix_(ys, xs)]
    y0, y1 = max(0, y), min(canvas.shape[0], y + h)
    x0, x1 = max(0, x), min(canvas.shape[1], x + w)
    canvas[y0:y1, x0:x1] = patch[y0 - y:y1 - y, x0 - x:x1 - x]


def generate_fixture(
    motion: str,
    length: int,
    out_dir: str,
    seed: int = DEFAULT_SEED,
) -> AnnotationDocument:
    """Render a fixture video into ``out_dir`` and return its exact ground truth.

    translation: the target moves +2 px/frame in x.
    zoom: the target grows 1.005x/frame about its center.
    occlusion: translation motion, but frames 40-60 paint background over the
    target region.
    """
    if motion not in MOTIONS:
        raise ConfigError(f"unknown motion {motion!r}; choose from {MOTIONS}")
    if length < 2:
        raise ConfigError("fixture length must be >= 2")

    rng = np.random.default_rng(seed)
    tex = _target_texture(rng)
    os.makedirs(out_dir, exist_ok=True)

    entries = []
    for t in range(1, length + 1):
        # fresh noise every frame: the background must not correlate across
        # frames, otherwise occlusions keep a high response from context alone
        canvas = _background(rng)
        if motion == "zoom":
            scale = ZOOM_FACTOR ** (t - 1)
            w = TARGET_W * scale
            h = TARGET_H * scale
            cx = FRAME_W / 2.0
            cy = FRAME_H / 2.0
            gt = BoundingBox(cx - w / 2.0, cy - h / 2.0, w, h)
            ibox = (int(round(gt.x)), int(round(gt.y)), int(round(w)), int(round(h)))
            _paste_target(canvas, tex, ibox)
        else:
            x = 30 + TRANSLATION_STEP * (t - 1)
            y = 100
            gt = BoundingBox(float(x), float(y), float(TARGET_W), float(TARGET_H))
            occluded = motion == "occlusion" and OCCLUSION_START <= t <= OCCLUSION_END
            if not occluded:
                # occluded frames simply leave background noise over the
                # target region (featureless blanking)
                _paste_target(canvas, tex, (x, y, TARGET_W, TARGET_H))
        entries.append(Entry(frame=t, box=gt, source="manual", confidence=None))
        save_image_u8(os.path.join(out_dir, f"{t:06d}.png"), canvas)

    return AnnotationDocument(
        video=out_dir,
        n_frame=length,
        frame_width=FRAME_W,
        frame_height=FRAME_H,
        frame_channels=1,
        instances=(Instance(id="01", entries=tuple(entries)),),
        tracker_params=None,
        degradation=None,
    )
