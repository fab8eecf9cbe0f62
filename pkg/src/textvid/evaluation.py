"""Scoring: box IoU, per-instance mean IoU between two annotation documents,
and the detection-style precision/recall/F-measure protocol."""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import ConfigError
from .store import AnnotationDocument, BoundingBox


def iou(a: BoundingBox, b: BoundingBox) -> float:
    """Intersection over union, continuous geometry."""
    ix = max(0.0, min(a.x + a.w, b.x + b.w) - max(a.x, b.x))
    iy = max(0.0, min(a.y + a.h, b.y + b.h) - max(a.y, b.y))
    inter = ix * iy
    union = a.w * a.h + b.w * b.h - inter
    return inter / union if union > 0 else 0.0


@dataclass(frozen=True)
class MiouResult:
    per_instance: dict  # id -> mean IoU over frames where both documents have a box
    uncovered: tuple  # ids present in only one document
    mean: float  # mean of per-instance values (0 if none)


def _boxes_by_frame(doc: AnnotationDocument, instance_id: str) -> dict:
    return {e.frame: e.box for e in doc.instance(instance_id).entries}


def miou(predicted: AnnotationDocument, reference: AnnotationDocument) -> MiouResult:
    """Instance-paired (by ID) mean IoU between two documents of the same video."""
    pred_ids = {i.id for i in predicted.instances}
    ref_ids = {i.id for i in reference.instances}
    shared = sorted(pred_ids & ref_ids)
    uncovered = tuple(sorted(pred_ids ^ ref_ids))
    per_instance = {}
    for inst_id in shared:
        pred = _boxes_by_frame(predicted, inst_id)
        ref = _boxes_by_frame(reference, inst_id)
        frames = sorted(set(pred) & set(ref))
        if not frames:
            continue
        per_instance[inst_id] = sum(iou(pred[t], ref[t]) for t in frames) / len(frames)
    mean = sum(per_instance.values()) / len(per_instance) if per_instance else 0.0
    return MiouResult(per_instance=per_instance, uncovered=uncovered, mean=mean)


@dataclass(frozen=True)
class EvalReport:
    precision: float
    recall: float
    f_measure: float
    correct: int
    total_detections: int
    total_ground_truth: int
    iou_threshold: float
    per_instance_miou: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "precision": self.precision,
            "recall": self.recall,
            "f_measure": self.f_measure,
            "correct": self.correct,
            "total_detections": self.total_detections,
            "total_ground_truth": self.total_ground_truth,
            "iou_threshold": self.iou_threshold,
            "per_instance_miou": self.per_instance_miou,
        }


def match_frame(pred_boxes: list, gt_boxes: list, threshold: float) -> int:
    """Greedy one-to-one matching for one frame: predictions in input order
    each take the highest-IoU unmatched ground-truth box (earlier box wins
    ties); a match counts correct only with IoU strictly above the threshold.
    Returns the number of correct detections."""
    taken = [False] * len(gt_boxes)
    correct = 0
    for pb in pred_boxes:
        best_j = -1
        best_iou = 0.0
        for j, gb in enumerate(gt_boxes):
            if taken[j]:
                continue
            v = iou(pb, gb)
            if v > best_iou:
                best_iou = v
                best_j = j
        if best_j >= 0 and best_iou > threshold:
            taken[best_j] = True
            correct += 1
    return correct


def prf(predicted: AnnotationDocument, reference: AnnotationDocument,
        threshold: float = 0.5) -> EvalReport:
    """Detection precision/recall/F-measure over all frames at an IoU threshold."""
    if not (0.0 < threshold < 1.0):
        raise ConfigError("IoU threshold must be in (0, 1)")

    frames = set()
    for doc in (predicted, reference):
        for inst in doc.instances:
            frames.update(e.frame for e in inst.entries)

    def frame_boxes(doc, t):
        # ordered by instance id for a deterministic greedy pass
        out = []
        for inst in sorted(doc.instances, key=lambda i: i.id):
            for e in inst.entries:
                if e.frame == t:
                    out.append(e.box)
        return out

    correct = 0
    total_pred = 0
    total_gt = 0
    for t in sorted(frames):
        pb = frame_boxes(predicted, t)
        gb = frame_boxes(reference, t)
        total_pred += len(pb)
        total_gt += len(gb)
        correct += match_frame(pb, gb, threshold)

    precision = correct / total_pred if total_pred else 0.0
    recall = correct / total_gt if total_gt else 0.0
    f = 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
    return EvalReport(
        precision=precision, recall=recall, f_measure=f,
        correct=correct, total_detections=total_pred, total_ground_truth=total_gt,
        iou_threshold=threshold,
        per_instance_miou=miou(predicted, reference).per_instance,
    )
