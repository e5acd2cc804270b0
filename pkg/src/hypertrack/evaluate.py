"""Tracking metrics: per-frame overlap and center error, precision and
success curves, and their serialized forms."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .parts import Box, Frame, box_bounds

SUCCESS_THRESHOLDS = np.linspace(0.0, 1.0, 21)
PRECISION_THRESHOLDS = np.arange(0, 51, dtype=np.float64)


def iou(a: Box, b: Box) -> float:
    """Intersection over union of two center+size boxes."""
    ax0, ay0, ax1, ay1 = box_bounds(a)
    bx0, by0, bx1, by1 = box_bounds(b)
    iw = min(ax1, bx1) - max(ax0, bx0)
    ih = min(ay1, by1) - max(ay0, by0)
    if iw <= 0 or ih <= 0:
        return 0.0
    inter = iw * ih
    union = a[2] * a[3] + b[2] * b[3] - inter
    return inter / union


def center_error(a: Box, b: Box) -> float:
    return math.hypot(a[0] - b[0], a[1] - b[1])


@dataclass(frozen=True)
class Metrics:
    precision_at_20: float
    success_auc: float
    per_frame: tuple[dict, ...]
    precision_curve: tuple[tuple[float, float], ...]
    success_curve: tuple[tuple[float, float], ...]

    @property
    def mean_iou(self) -> float:
        return float(np.mean([f["iou"] for f in self.per_frame]))

    @property
    def mean_center_error(self) -> float:
        return float(np.mean([f["center_error"] for f in self.per_frame]))


def compute_metrics(pred_boxes: Sequence[Box], gt_boxes: Sequence[Box]) -> Metrics:
    """Frame-aligned metrics.

    Success rates count frames with overlap at or above each threshold, so a
    pixel-perfect run scores 1.0 across the curve; the success score is the
    mean over the 21 thresholds.  Precision counts frames with center error
    at or below each pixel threshold; the headline number is taken at 20 px.
    """
    if len(pred_boxes) != len(gt_boxes):
        raise ValueError(f"frame count mismatch: {len(pred_boxes)} results vs {len(gt_boxes)} ground truth")
    if not pred_boxes:
        raise ValueError("cannot evaluate an empty sequence")
    ious = np.array([iou(p, g) for p, g in zip(pred_boxes, gt_boxes)])
    errs = np.array([center_error(p, g) for p, g in zip(pred_boxes, gt_boxes)])
    success = [(float(t), float(np.mean(ious >= t))) for t in SUCCESS_THRESHOLDS]
    precision = [(float(t), float(np.mean(errs <= t))) for t in PRECISION_THRESHOLDS]
    per_frame = tuple(
        {"frame": idx, "iou": float(i), "center_error": float(e)} for idx, (i, e) in enumerate(zip(ious, errs))
    )
    return Metrics(
        precision_at_20=float(np.mean(errs <= 20.0)),
        success_auc=float(np.mean([v for _, v in success])),
        per_frame=per_frame,
        precision_curve=tuple(precision),
        success_curve=tuple(success),
    )


def gt_boxes_of(frames: Sequence[Frame]) -> list[Box]:
    boxes = []
    for frame in frames:
        if frame.gt_box is None:
            raise ValueError(f"frame {frame.index} has no ground-truth box")
        boxes.append(frame.gt_box)
    return boxes


def metrics_to_json(metrics: Metrics) -> str:
    payload = {
        "precision_at_20": metrics.precision_at_20,
        "success_auc": metrics.success_auc,
        "per_frame": list(metrics.per_frame),
    }
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def curves_to_csv(metrics: Metrics) -> str:
    lines = ["kind,threshold,value"]
    for t, v in metrics.precision_curve:
        lines.append(f"precision,{t:.6g},{v:.9g}")
    for t, v in metrics.success_curve:
        lines.append(f"success,{t:.6g},{v:.9g}")
    return "\n".join(lines) + "\n"


def read_curves_csv(path: str | Path) -> dict[str, list[tuple[float, float]]]:
    curves: dict[str, list[tuple[float, float]]] = {"precision": [], "success": []}
    with Path(path).open("r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != "kind,threshold,value":
            raise ValueError(f"{path}: not a curves CSV (bad header {header!r})")
        for line in fh:
            line = line.strip()
            if not line:
                continue
            kind, thr, val = line.split(",")
            curves.setdefault(kind, []).append((float(thr), float(val)))
    return curves


def read_results_csv(path: str | Path) -> list[dict]:
    """Rows of a tracking results CSV: frame, box, score, n_reliable."""
    rows = []
    with Path(path).open("r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != "frame,cx,cy,w,h,score,n_reliable":
            raise ValueError(f"{path}: not a results CSV (bad header {header!r})")
        for line_no, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            fields = line.split(",")
            if len(fields) != 7:
                raise ValueError(f"{path}: line {line_no}: expected 7 fields")
            rows.append(
                {
                    "frame": int(fields[0]),
                    "box": (float(fields[1]), float(fields[2]), float(fields[3]), float(fields[4])),
                    "score": float(fields[5]),
                    "n_reliable": int(fields[6]),
                }
            )
    return rows
