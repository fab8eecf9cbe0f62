"""Response-based failure detection: stop a tracker whose peak is both
absolutely low and far below its initial peak."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ConfigError, NumericError
from .tracker import Status, TrackerState, stop

DEFAULT_ALPHA = 0.25
DEFAULT_BETA = -0.2


@dataclass(frozen=True)
class FailureParams:
    alpha: float = DEFAULT_ALPHA  # absolute response threshold
    beta: float = DEFAULT_BETA  # response-drop threshold

    def __post_init__(self):
        if self.alpha <= 0:
            raise ConfigError("alpha must be positive")
        if self.beta >= 0:
            raise ConfigError("beta must be negative")


@dataclass(frozen=True)
class ConfidenceRecord:
    frame: int
    response_max: float  # peak of the current frame's response map
    drop: float  # response_max - first response_max
    score: int  # 0 = failed, 1 = confident


def confidence(first_max: float, current_max: float, params: FailureParams,
               frame: int = 0) -> ConfidenceRecord:
    """Score is 0 iff current < alpha AND (current - first) < beta; both strict."""
    if not (math.isfinite(first_max) and math.isfinite(current_max)):
        raise NumericError("response maxima must be finite")
    drop = current_max - first_max
    failed = current_max < params.alpha and drop < params.beta
    return ConfidenceRecord(frame=frame, response_max=current_max, drop=drop,
                            score=0 if failed else 1)


def apply(state: TrackerState, record: ConfidenceRecord) -> TrackerState:
    """Score 0 stops the tracker for good; score 1 leaves it untouched."""
    if state.status is Status.STOPPED:
        return state
    if record.score == 0:
        return stop(state)
    return state
