"""Semi-automatic scene-text video annotation toolkit.

Correlation-filter tracking with failure detection, paired blur/LR video
generation, annotation storage, and detection-style evaluation.
"""

__version__ = "0.1.0"

from .store import AnnotationDocument, BoundingBox  # noqa: F401
from .tracker import TrackerParams, samf_params  # noqa: F401
