"""Core image operations: frames, 2-D FFT, window functions, bicubic resampling.

All pixel data lives in memory as float64 arrays scaled to [0, 1]; 8-bit
only on disk. Everything here is a pure function over immutable inputs.
"""

from __future__ import annotations

import os
import re
from dataclasses import dataclass, field

import numpy as np
from PIL import Image

from .errors import DimensionError, GeometryError, NumericError

# Conventional luma weights for color -> gray conversion.
LUMA_WEIGHTS = (0.299, 0.587, 0.114)

# Keys cubic convolution parameter (Catmull-Rom).
BICUBIC_A = -0.5


@dataclass(frozen=True)
class Frame:
    """A decoded raster frame: 0-based index plus row-major pixels in [0, 1].

    ``pixels`` is (H, W) for grayscale or (H, W, 3) for color.
    """

    index: int
    pixels: np.ndarray = field(repr=False)

    def __post_init__(self):
        p = self.pixels
        if p.ndim not in (2, 3) or (p.ndim == 3 and p.shape[2] != 3):
            raise DimensionError(f"frame pixels must be (H,W) or (H,W,3), got {p.shape}")
        if p.shape[0] < 1 or p.shape[1] < 1:
            raise DimensionError("frame must be at least 1x1")

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def channels(self) -> int:
        return 1 if self.pixels.ndim == 2 else self.pixels.shape[2]


def fft2(plane: np.ndarray) -> np.ndarray:
    """Unnormalized 2-D DFT of a real plane. Accepts any size >= 1x1."""
    a = np.asarray(plane, dtype=np.float64)
    if a.ndim != 2:
        raise DimensionError(f"expected 2-D plane, got ndim={a.ndim}")
    if a.shape[0] < 1 or a.shape[1] < 1 or a.size == 0:
        raise DimensionError(f"zero-sized plane {a.shape}")
    return np.fft.fft2(a)


def ifft2(spectrum: np.ndarray, residual_tol: float = 1e-6) -> np.ndarray:
    """Inverse 2-D DFT; verifies the imaginary residue is negligible and drops it."""
    s = np.asarray(spectrum, dtype=np.complex128)
    if s.ndim != 2 or s.size == 0:
        raise DimensionError(f"zero-sized or non-2D spectrum {s.shape}")
    x = np.fft.ifft2(s)
    scale = max(1.0, float(np.max(np.abs(x.real))))
    residue = float(np.max(np.abs(x.imag)))
    if residue > residual_tol * scale:
        raise NumericError(f"imaginary residue {residue:.3e} exceeds tolerance")
    return np.ascontiguousarray(x.real)


def hann_window(width: int, height: int) -> np.ndarray:
    """Separable raised-cosine window with zero endpoints, peak 1 at center.

    Degenerate 1-sample axes use the value 1.0 (np.hanning convention).
    """
    if width < 1 or height < 1:
        raise DimensionError("window dimensions must be >= 1")
    return np.outer(np.hanning(height), np.hanning(width))


def _cubic_kernel(t: np.ndarray, a: float = BICUBIC_A) -> np.ndarray:
    t = np.abs(t)
    t2 = t * t
    t3 = t2 * t
    near = (a + 2.0) * t3 - (a + 3.0) * t2 + 1.0
    far = a * (t3 - 5.0 * t2 + 8.0 * t - 4.0)
    return np.where(t <= 1.0, near, np.where(t < 2.0, far, 0.0))


def _axis_taps(in_len: int, out_len: int):
    """Per-output-sample source indices (clamped) and cubic weights for one axis.

    Output sample k maps to input coordinate (k + 0.5) / scale - 0.5.
    """
    scale = out_len / in_len
    x = (np.arange(out_len) + 0.5) / scale - 0.5
    base = np.floor(x).astype(np.int64)
    offsets = np.arange(-1, 3)
    idx = base[:, None] + offsets[None, :]
    weights = _cubic_kernel(x[:, None] - idx)
    idx = np.clip(idx, 0, in_len - 1)
    return idx, weights


def bicubic_resample_array(img: np.ndarray, out_width: int, out_height: int) -> np.ndarray:
    """Cubic-convolution resample of an (H, W) or (H, W, C) array. No clamping."""
    if out_width < 1 or out_height < 1:
        raise DimensionError("output dimensions must be >= 1")
    img = np.asarray(img, dtype=np.float64)
    in_h, in_w = img.shape[:2]
    has_c = img.ndim == 3

    iy, wy = _axis_taps(in_h, out_height)
    rows = img[iy]  # (out_h, 4, W[, C])
    wyx = wy[:, :, None, None] if has_c else wy[:, :, None]
    tmp = (rows * wyx).sum(axis=1)  # (out_h, W[, C])

    ix, wx = _axis_taps(in_w, out_width)
    cols = tmp[:, ix]  # (out_h, out_w, 4[, C])
    wxx = wx[None, :, :, None] if has_c else wx[None, :, :]
    return (cols * wxx).sum(axis=2)


def bicubic_resample(frame: Frame, out_width: int, out_height: int) -> Frame:
    """Resample a frame with the cubic convolution kernel; output clamped to [0, 1]."""
    out = bicubic_resample_array(frame.pixels, out_width, out_height)
    return Frame(index=frame.index, pixels=np.clip(out, 0.0, 1.0))


def to_gray(pixels: np.ndarray) -> np.ndarray:
    """Luma conversion for color arrays; grayscale passes through."""
    if pixels.ndim == 2:
        return pixels
    r, g, b = LUMA_WEIGHTS
    return r * pixels[..., 0] + g * pixels[..., 1] + b * pixels[..., 2]


# --- frame sequence I/O (PNG directory, zero-padded numeric names) ---

_FRAME_RE = re.compile(r"^(\d+)\.png$")


def frame_paths(directory: str) -> list[str]:
    """Sorted paths of the numbered PNG frames in a directory."""
    entries = []
    for name in os.listdir(directory):
        m = _FRAME_RE.match(name)
        if m:
            entries.append((int(m.group(1)), os.path.join(directory, name)))
    entries.sort()
    return [p for _, p in entries]


def load_image_u8(path: str) -> np.ndarray:
    """8-bit pixel array straight from disk, (H, W) or (H, W, 3)."""
    with Image.open(path) as im:
        if im.mode not in ("L", "RGB"):
            im = im.convert("RGB")
        return np.asarray(im, dtype=np.uint8)


def save_image_u8(path: str, pixels: np.ndarray) -> None:
    Image.fromarray(pixels).save(path, format="PNG")


def load_frame(path: str, index: int = 0) -> Frame:
    u8 = load_image_u8(path)
    return Frame(index=index, pixels=u8.astype(np.float64) / 255.0)


def save_frame(frame: Frame, path: str) -> None:
    u8 = np.clip(np.floor(frame.pixels * 255.0 + 0.5), 0, 255).astype(np.uint8)
    save_image_u8(path, u8)


def check_box_inside(cx: float, cy: float, width: int, height: int) -> None:
    if not (0.0 <= cx < width and 0.0 <= cy < height):
        raise GeometryError(f"box center ({cx:.1f}, {cy:.1f}) outside {width}x{height} frame")
