"""Kernelized correlation-filter tracker with an optional scale pool.

The regression over all circular shifts of the template is solved in closed
form in the Fourier domain (the circulant structure turns matrix products
into Hadamard products), which is what makes per-frame train/detect cheap.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import DimensionError
from .features import FeaturePatch, extract_patch, template_grid
from .imgproc import Frame, fft2, ifft2
from .store import BoundingBox

# Conventional scale pool for the scale-adaptive variant.
SAMF_SCALE_POOL = (0.985, 0.99, 0.995, 1.0, 1.005, 1.01, 1.015)


@dataclass(frozen=True)
class TrackerParams:
    regularization: float = 1e-4  # ridge lambda
    kernel_sigma: float = 0.2  # Gaussian kernel bandwidth (raw-pixel features)
    label_sigma_factor: float = 0.06  # label sigma = sqrt(target area on grid) * factor
    interp_factor: float = 0.02  # model blend per frame
    padding: float = 2.0
    template_size: int = 64
    scale_pool: tuple[float, ...] = (1.0,)
    scale_penalty: float = 0.975

    def __post_init__(self):
        if self.regularization <= 0 or self.kernel_sigma <= 0:
            raise ValueError("regularization and kernel_sigma must be positive")
        if not (0.0 < self.interp_factor <= 1.0):
            raise ValueError("interp_factor must be in (0, 1]")
        if 1.0 not in self.scale_pool:
            raise ValueError("scale_pool must contain 1.0")

    def to_dict(self) -> dict:
        return {
            "regularization": self.regularization,
            "kernel_sigma": self.kernel_sigma,
            "label_sigma_factor": self.label_sigma_factor,
            "interp_factor": self.interp_factor,
            "padding": self.padding,
            "template_size": self.template_size,
            "scale_pool": list(self.scale_pool),
            "scale_penalty": self.scale_penalty,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TrackerParams":
        d = dict(d)
        if "scale_pool" in d:
            d["scale_pool"] = tuple(d["scale_pool"])
        return cls(**d)


def samf_params(**overrides) -> TrackerParams:
    overrides.setdefault("scale_pool", SAMF_SCALE_POOL)
    return TrackerParams(**overrides)


class Status(enum.Enum):
    ACTIVE = "active"
    STOPPED = "stopped"


@dataclass
class TrackerState:
    """Per-instance model: Fourier-domain dual coefficients + blended template."""

    params: TrackerParams
    box: BoundingBox
    grid: tuple[int, int]  # (gw, gh), fixed at init
    model_alphaf: np.ndarray  # (gh, gw) complex
    model_template: np.ndarray  # (C, gh, gw)
    first_response_max: float | None = None
    last_response_max: float | None = None
    status: Status = Status.ACTIVE


@dataclass(frozen=True)
class ResponseMap:
    scores: np.ndarray  # (gh, gw) real correlation scores for the chosen scale
    peak: float  # penalized peak used for scale selection
    raw_peak: float  # unpenalized response maximum (confidence value)
    peak_dx: float  # sub-cell shift in grid cells, signed
    peak_dy: float
    scale: float
    box: BoundingBox  # proposed box in image pixels
    clamped: bool  # True if the proposed center had to be pulled inside the frame


def gaussian_correlation(a: np.ndarray, b: np.ndarray, sigma: float) -> np.ndarray:
    """Gaussian kernel between ``a`` and every circular shift of ``b``.

    k(tau) = exp(-(|a|^2 + |b|^2 - 2*crosscorr(a,b)(tau)) / (sigma^2 * n)),
    crosscorr via FFT, summed over channels; n = cells * channels. The
    numerator is clamped at 0 before exponentiation.
    """
    if a.ndim == 2:
        a = a[None]
    if b.ndim == 2:
        b = b[None]
    if a.shape != b.shape:
        raise DimensionError(f"patch geometry mismatch {a.shape} vs {b.shape}")
    n = a.size
    cross = np.zeros(a.shape[1:], dtype=np.float64)
    for pa, pb in zip(a, b):
        cross += np.real(np.fft.ifft2(np.conj(np.fft.fft2(pa)) * np.fft.fft2(pb)))
    d = float(np.sum(a * a) + np.sum(b * b)) - 2.0 * cross
    return np.exp(-np.maximum(d, 0.0) / (sigma * sigma * n))


_label_cache: dict[tuple[int, int, float], np.ndarray] = {}


def gaussian_label(gw: int, gh: int, sigma: float) -> np.ndarray:
    """Centered Gaussian regression target, peak 1.0, circularly shifted so the
    peak sits at grid origin."""
    key = (gw, gh, sigma)
    y = _label_cache.get(key)
    if y is None:
        cy, cx = gh // 2, gw // 2
        ys = (np.arange(gh) - cy)[:, None]
        xs = (np.arange(gw) - cx)[None, :]
        y = np.exp(-0.5 * (ys * ys + xs * xs) / (sigma * sigma))
        y = np.roll(y, (-cy, -cx), axis=(0, 1))
        _label_cache[key] = y
    return y


def label_sigma(grid: tuple[int, int], params: TrackerParams) -> float:
    # target occupies grid/padding cells on each axis
    gw, gh = grid
    tw = gw / params.padding
    th = gh / params.padding
    return float(np.sqrt(tw * th) * params.label_sigma_factor)


def train(patch: FeaturePatch | np.ndarray, params: TrackerParams,
          grid: tuple[int, int] | None = None) -> tuple[np.ndarray, float]:
    """Closed-form kernel ridge regression: alphaf = yf / (fft2(kxx) + lambda).

    Returns (model_alphaf, label peak).
    """
    planes = patch.planes if isinstance(patch, FeaturePatch) else patch
    gh, gw = planes.shape[1], planes.shape[2]
    if grid is None:
        grid = (gw, gh)
    y = gaussian_label(gw, gh, label_sigma(grid, params))
    kxx = gaussian_correlation(planes, planes, params.kernel_sigma)
    alphaf = fft2(y) / (fft2(kxx) + params.regularization)
    return alphaf, 1.0


def init_tracker(frame: Frame, box: BoundingBox, params: TrackerParams) -> TrackerState:
    """Initialize a tracker from a first-frame box (Init step of the loop)."""
    grid = template_grid(box.w, box.h, params.template_size)
    patch = extract_patch(frame, box, params.padding, grid)
    alphaf, _ = train(patch, params, grid)
    return TrackerState(
        params=params,
        box=box,
        grid=grid,
        model_alphaf=alphaf,
        model_template=patch.planes.copy(),
    )


def _parabola_offset(left: float, center: float, right: float) -> float:
    denom = left - 2.0 * center + right
    if denom >= -1e-12:
        return 0.0
    off = 0.5 * (left - right) / denom
    return float(np.clip(off, -0.5, 0.5))


def _peak_with_refinement(response: np.ndarray) -> tuple[float, float, float]:
    """Peak value and signed sub-cell (dx, dy) offsets with wrap-around."""
    gh, gw = response.shape
    py, px = np.unravel_index(int(np.argmax(response)), response.shape)
    peak = float(response[py, px])
    ox = _parabola_offset(
        response[py, (px - 1) % gw], peak, response[py, (px + 1) % gw]
    )
    oy = _parabola_offset(
        response[(py - 1) % gh, px], peak, response[(py + 1) % gh, px]
    )
    dx = px + ox
    dy = py + oy
    if dx > gw / 2:
        dx -= gw
    if dy > gh / 2:
        dy -= gh
    return peak, dx, dy


def detect(state: TrackerState, frame: Frame) -> ResponseMap:
    """Locate the target near its previous box; evaluates every scale in the
    pool and keeps the (scale, shift) with the best penalized response."""
    assert state.status is Status.ACTIVE, "detect on a stopped tracker"
    p = state.params
    best = None
    for scale in p.scale_pool:
        patch = extract_patch(frame, state.box, p.padding, state.grid, scale=scale)
        kzx = gaussian_correlation(state.model_template, patch.planes, p.kernel_sigma)
        response = ifft2(fft2(kzx) * state.model_alphaf, residual_tol=1e-4)
        raw_peak, dx, dy = _peak_with_refinement(response)
        peak = raw_peak if scale == 1.0 else raw_peak * p.scale_penalty
        if best is None or peak > best[0]:
            best = (peak, raw_peak, dx, dy, scale, response, patch)

    peak, raw_peak, dx, dy, scale, response, patch = best
    cell_x = patch.geometry.window_w / state.grid[0]
    cell_y = patch.geometry.window_h / state.grid[1]
    new_w = state.box.w * scale
    new_h = state.box.h * scale
    cx = state.box.cx + dx * cell_x
    cy = state.box.cy + dy * cell_y

    clamped = False
    if not (0.0 <= cx < frame.width):
        cx = float(np.clip(cx, 0.0, frame.width - 1.0))
        clamped = True
    if not (0.0 <= cy < frame.height):
        cy = float(np.clip(cy, 0.0, frame.height - 1.0))
        clamped = True

    box = BoundingBox(cx - new_w / 2.0, cy - new_h / 2.0, new_w, new_h)
    return ResponseMap(
        scores=response, peak=peak, raw_peak=raw_peak,
        peak_dx=dx, peak_dy=dy, scale=scale, box=box, clamped=clamped,
    )


def update(state: TrackerState, frame: Frame, accepted_box: BoundingBox,
           response_peak: float | None = None) -> TrackerState:
    """Train on the accepted box and blend into the stored model in place."""
    assert state.status is Status.ACTIVE, "update on a stopped tracker"
    p = state.params
    patch = extract_patch(frame, accepted_box, p.padding, state.grid)
    new_alphaf, _ = train(patch, p, state.grid)
    eta = p.interp_factor
    state.model_alphaf = (1.0 - eta) * state.model_alphaf + eta * new_alphaf
    state.model_template = (1.0 - eta) * state.model_template + eta * patch.planes
    state.box = accepted_box
    if response_peak is not None:
        state.last_response_max = response_peak
        if state.first_response_max is None:
            state.first_response_max = response_peak
    return state


def record_response(state: TrackerState, response_peak: float) -> None:
    """Book-keeping for the failure detector: first peak is set once, then frozen."""
    state.last_response_max = response_peak
    if state.first_response_max is None:
        state.first_response_max = response_peak


def stop(state: TrackerState) -> TrackerState:
    state.status = Status.STOPPED
    return state
