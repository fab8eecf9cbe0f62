"""Windowed feature extraction around a candidate box.

Default feature is single-channel normalized grayscale on a fixed template
grid; the FeaturePatch contract leaves room for multi-channel features.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GeometryError
from .imgproc import Frame, bicubic_resample_array, hann_window, to_gray
from .store import BoundingBox

MIN_GRID = 4


def round_even(v: float) -> int:
    return max(MIN_GRID, int(round(v / 2.0)) * 2)


def template_grid(box_w: float, box_h: float, template_size: int) -> tuple[int, int]:
    """Feature-grid dimensions: longest side gets template_size cells, the
    shorter side preserves aspect, both rounded to even numbers."""
    if box_w >= box_h:
        return template_size, round_even(template_size * box_h / box_w)
    return round_even(template_size * box_w / box_h), template_size


@dataclass(frozen=True)
class PatchGeometry:
    """Extraction window: the target box inflated by the padding factor."""

    box: BoundingBox
    padding: float
    window_x: int  # top-left of the pixel crop (may be out of frame; clamped at read)
    window_y: int
    window_w: int  # crop size in pixels
    window_h: int


@dataclass(frozen=True)
class FeaturePatch:
    """Per-channel Hann-windowed feature planes on the template grid."""

    width: int
    height: int
    channels: int
    planes: np.ndarray  # (C, H, W)
    cell_size: int
    geometry: PatchGeometry

    @property
    def pixels_per_cell_x(self) -> float:
        return self.geometry.window_w / self.width

    @property
    def pixels_per_cell_y(self) -> float:
        return self.geometry.window_h / self.height


_window_cache: dict[tuple[int, int], np.ndarray] = {}


def _hann(width: int, height: int) -> np.ndarray:
    key = (width, height)
    w = _window_cache.get(key)
    if w is None:
        w = hann_window(width, height)
        _window_cache[key] = w
    return w


def crop_replicate(pixels: np.ndarray, x0: int, y0: int, w: int, h: int) -> np.ndarray:
    """Crop with replicate-border semantics: out-of-frame indices clamp to the edge."""
    ys = np.clip(y0 + np.arange(h), 0, pixels.shape[0] - 1)
    xs = np.clip(x0 + np.arange(w), 0, pixels.shape[1] - 1)
    return pixels[np.ix_(ys, xs)]


def extract_patch(
    frame: Frame,
    box: BoundingBox,
    padding: float,
    grid: tuple[int, int],
    scale: float = 1.0,
) -> FeaturePatch:
    """Crop the padded window around the box center (scaled by ``scale``),
    resample to the template grid, gray-convert, center on zero, Hann-window.
    """
    if box.w < 2 or box.h < 2:
        raise GeometryError(f"degenerate box {box.w}x{box.h}")
    cx, cy = box.cx, box.cy
    if not (0.0 <= cx < frame.width and 0.0 <= cy < frame.height):
        raise GeometryError(
            f"box center ({cx:.1f}, {cy:.1f}) outside {frame.width}x{frame.height} frame"
        )
    gw, gh = grid
    win_w = max(4, int(round(box.w * scale * padding)))
    win_h = max(4, int(round(box.h * scale * padding)))
    x0 = int(np.floor(cx - win_w / 2.0 + 0.5))
    y0 = int(np.floor(cy - win_h / 2.0 + 0.5))

    gray = to_gray(frame.pixels)
    crop = crop_replicate(gray, x0, y0, win_w, win_h)
    resampled = np.clip(bicubic_resample_array(crop, gw, gh), 0.0, 1.0)
    plane = (resampled - 0.5) * _hann(gw, gh)

    geometry = PatchGeometry(
        box=box, padding=padding,
        window_x=x0, window_y=y0, window_w=win_w, window_h=win_h,
    )
    return FeaturePatch(
        width=gw, height=gh, channels=1,
        planes=plane[None, :, :], cell_size=1, geometry=geometry,
    )
