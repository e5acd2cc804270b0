"""Domain types for parts, frames, and the part-sequence file format.

A "part" is a superpixel-like region summarized by its center, pixel area,
an optional foreground probability, and an L1-normalized feature histogram.
Sequences of per-frame part sets are stored as UTF-8 JSON Lines: one header
object followed by one object per frame (schema below).

Parts carry no pixel mask.  Wherever a region is needed (confidence maps,
ground-truth inflation) a part is treated as an axis-aligned square of side
sqrt(area) centered on its center; sqrt(area) is the part "diameter".
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

FEATURE_SUM_TOL = 1e-6

Box = tuple[float, float, float, float]  # (cx, cy, w, h)


class SequenceParseError(ValueError):
    """A sequence file line could not be decoded against the schema."""


class SequenceValidationError(ValueError):
    """Decoded content violates a part or frame invariant."""


def _as_float_pair(value, what: str) -> tuple[float, float]:
    x, y = float(value[0]), float(value[1])
    if not (math.isfinite(x) and math.isfinite(y)):
        raise SequenceValidationError(f"{what} must be finite, got {value!r}")
    return (x, y)


@dataclass(frozen=True, eq=False)
class Part:
    """One region hypothesis: center, area, feature histogram, fg probability.

    ``fg_prob`` may be ``None`` for pure point-set inputs; consumers treat an
    absent probability as 1.0 when deciding candidate eligibility.
    """

    id: int
    center: tuple[float, float]
    area: float
    feature: np.ndarray
    fg_prob: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "center", _as_float_pair(self.center, f"part {self.id}: center"))
        if not (self.area > 0 and math.isfinite(self.area)):
            raise SequenceValidationError(f"part {self.id}: area must be > 0, got {self.area!r}")
        feat = np.asarray(self.feature, dtype=np.float64).copy()
        if feat.ndim != 1 or feat.size == 0:
            raise SequenceValidationError(f"part {self.id}: feature must be a non-empty 1-D vector")
        if np.any(feat < 0) or not np.all(np.isfinite(feat)):
            raise SequenceValidationError(f"part {self.id}: feature entries must be finite and >= 0")
        total = float(feat.sum())
        if abs(total - 1.0) > FEATURE_SUM_TOL:
            raise SequenceValidationError(
                f"part {self.id}: feature must sum to 1 +- {FEATURE_SUM_TOL}, got {total!r}"
            )
        feat.setflags(write=False)
        object.__setattr__(self, "feature", feat)
        if self.fg_prob is not None:
            p = float(self.fg_prob)
            if not (0.0 <= p <= 1.0):
                raise SequenceValidationError(f"part {self.id}: fg_prob must lie in [0,1], got {p!r}")
            object.__setattr__(self, "fg_prob", p)

    @property
    def diameter(self) -> float:
        return math.sqrt(self.area)

    def eligible_fg(self, threshold: float) -> bool:
        """Foreground eligibility; an absent probability counts as 1.0."""
        return (1.0 if self.fg_prob is None else self.fg_prob) >= threshold

    def __eq__(self, other):
        if not isinstance(other, Part):
            return NotImplemented
        return (
            self.id == other.id
            and self.center == other.center
            and self.area == other.area
            and self.fg_prob == other.fg_prob
            and np.array_equal(self.feature, other.feature)
        )


@dataclass(frozen=True)
class Frame:
    """One frame: an index, its part set, and an optional ground-truth box."""

    index: int
    parts: tuple[Part, ...]
    gt_box: Box | None = None

    def __post_init__(self):
        if self.index < 0:
            raise SequenceValidationError(f"frame index must be >= 0, got {self.index}")
        object.__setattr__(self, "parts", tuple(self.parts))
        seen: set[int] = set()
        for part in self.parts:
            if part.id in seen:
                raise SequenceValidationError(f"part {part.id}: duplicate id in frame {self.index}")
            seen.add(part.id)
        if self.gt_box is not None:
            box = tuple(float(v) for v in self.gt_box)
            if len(box) != 4 or box[2] <= 0 or box[3] <= 0:
                raise SequenceValidationError(f"frame {self.index}: gt_box must be (cx,cy,w,h) with w,h > 0")
            object.__setattr__(self, "gt_box", box)


@dataclass(frozen=True)
class TargetPart:
    """A part of the tracked target, carried across frames.

    ``uid`` is a tracker-wide identifier (frame-local part ids collide once
    parts from several frames coexist in the target set).  ``miss_count``
    counts consecutive frames without a structural correspondence.
    """

    uid: int
    part: Part
    last_seen_frame: int
    last_center: tuple[float, float]
    miss_count: int = 0

    def __post_init__(self):
        if self.miss_count < 0:
            raise ValueError("miss_count must be >= 0")
        object.__setattr__(self, "last_center", _as_float_pair(self.last_center, "last_center"))


@dataclass(frozen=True)
class SearchArea:
    """Axis-aligned searching window, clamped to the canvas."""

    origin: tuple[float, float]
    width: float
    height: float

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise ValueError("search area must have positive extent")

    def contains(self, point: tuple[float, float]) -> bool:
        x, y = point
        ox, oy = self.origin
        return ox <= x <= ox + self.width and oy <= y <= oy + self.height


@dataclass(frozen=True)
class SequenceMeta:
    """Header payload of a sequence file."""

    feature_dim: int
    canvas: tuple[float, float]
    init_box: Box
    superpixel_range: tuple[int, int] = (0, 1_000_000)
    version: int = 1

    def __post_init__(self):
        if self.feature_dim < 1:
            raise SequenceValidationError("feature_dim must be >= 1")
        if self.canvas[0] <= 0 or self.canvas[1] <= 0:
            raise SequenceValidationError("canvas must have positive extent")
        box = tuple(float(v) for v in self.init_box)
        if len(box) != 4 or box[2] <= 0 or box[3] <= 0:
            raise SequenceValidationError("init_box must be (cx,cy,w,h) with w,h > 0")
        object.__setattr__(self, "init_box", box)
        object.__setattr__(self, "canvas", (float(self.canvas[0]), float(self.canvas[1])))
        object.__setattr__(self, "superpixel_range", (int(self.superpixel_range[0]), int(self.superpixel_range[1])))


def box_bounds(box: Box) -> tuple[float, float, float, float]:
    """(x0, y0, x1, y1) corners of a center+size box."""
    cx, cy, w, h = box
    return (cx - w / 2.0, cy - h / 2.0, cx + w / 2.0, cy + h / 2.0)


def point_in_box(point: tuple[float, float], box: Box) -> bool:
    x0, y0, x1, y1 = box_bounds(box)
    return x0 <= point[0] <= x1 and y0 <= point[1] <= y1


def search_area_of(prev_box: Box, canvas: tuple[float, float], scale: float = 3.0) -> SearchArea:
    """Searching window: ``scale`` times the previous box, clamped to the canvas.

    The previous center is clamped into the canvas first so the returned area
    always has positive extent and contains that (clamped) center.
    """
    cx, cy, w, h = prev_box
    if w <= 0 or h <= 0:
        raise ValueError("previous box must have positive size")
    cw, ch = float(canvas[0]), float(canvas[1])
    cx = min(max(cx, 0.0), cw)
    cy = min(max(cy, 0.0), ch)
    x0 = max(0.0, cx - scale * w / 2.0)
    y0 = max(0.0, cy - scale * h / 2.0)
    x1 = min(cw, cx + scale * w / 2.0)
    y1 = min(ch, cy + scale * h / 2.0)
    return SearchArea(origin=(x0, y0), width=x1 - x0, height=y1 - y0)


# --- sequence file I/O ------------------------------------------------------
#
# Line 1 header:
#   {"version":1,"feature_dim":F,"canvas":[w,h],"init_box":[cx,cy,w,h],
#    "superpixel_range":[lo,hi]}
# Each further line, one frame:
#   {"index":i,"parts":[{"id":n,"cx":x,"cy":y,"area":a,"fg":p?,"feat":[...]}],
#    "gt_box":[cx,cy,w,h]?}
#
# Plain JSON numbers; floats round-trip exactly (json emits repr, well above
# the 9 significant digits the format guarantees).


def _parse_line(raw: str, line_no: int) -> dict:
    try:
        obj = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise SequenceParseError(f"line {line_no}: invalid JSON ({exc.msg})") from exc
    if not isinstance(obj, dict):
        raise SequenceParseError(f"line {line_no}: expected a JSON object")
    return obj


def _require(obj: dict, key: str, line_no: int):
    if key not in obj:
        raise SequenceParseError(f"line {line_no}: missing required key {key!r}")
    return obj[key]


def read_sequence(path: str | Path) -> tuple[list[Frame], SequenceMeta]:
    """Load a part-sequence file.

    Raises ``SequenceParseError`` (malformed line, named by line number) or
    ``SequenceValidationError`` (violated invariant, named by part id).
    Frames are returned sorted by index.
    """
    path = Path(path)
    with path.open("r", encoding="utf-8") as fh:
        lines = [ln for ln in (line.strip() for line in fh) if ln]
    if not lines:
        raise SequenceParseError("line 1: empty file, expected header object")

    header = _parse_line(lines[0], 1)
    version = _require(header, "version", 1)
    if version != 1:
        raise SequenceParseError(f"line 1: unsupported version {version!r}")
    meta = SequenceMeta(
        feature_dim=int(_require(header, "feature_dim", 1)),
        canvas=tuple(_require(header, "canvas", 1)),
        init_box=tuple(_require(header, "init_box", 1)),
        superpixel_range=tuple(header.get("superpixel_range", (0, 1_000_000))),
    )

    frames: list[Frame] = []
    for line_no, raw in enumerate(lines[1:], start=2):
        obj = _parse_line(raw, line_no)
        index = int(_require(obj, "index", line_no))
        parts = []
        for entry in _require(obj, "parts", line_no):
            if not isinstance(entry, dict):
                raise SequenceParseError(f"line {line_no}: part entries must be objects")
            for key in ("id", "cx", "cy", "area", "feat"):
                if key not in entry:
                    raise SequenceParseError(f"line {line_no}: part missing key {key!r}")
            feat = np.asarray(entry["feat"], dtype=np.float64)
            if feat.shape != (meta.feature_dim,):
                raise SequenceValidationError(
                    f"part {entry['id']}: feature length {feat.size} != header feature_dim {meta.feature_dim}"
                )
            parts.append(
                Part(
                    id=int(entry["id"]),
                    center=(entry["cx"], entry["cy"]),
                    area=float(entry["area"]),
                    feature=feat,
                    fg_prob=entry.get("fg"),
                )
            )
        gt = obj.get("gt_box")
        frames.append(Frame(index=index, parts=tuple(parts), gt_box=tuple(gt) if gt is not None else None))

    frames.sort(key=lambda f: f.index)
    for prev, cur in zip(frames, frames[1:]):
        if cur.index == prev.index:
            raise SequenceValidationError(f"duplicate frame index {cur.index}")
    return frames, meta


def write_sequence(frames: Iterable[Frame], meta: SequenceMeta, path: str | Path) -> None:
    """Write a sequence file; ``read_sequence`` recovers it exactly."""
    path = Path(path)
    header = {
        "version": meta.version,
        "feature_dim": meta.feature_dim,
        "canvas": list(meta.canvas),
        "init_box": list(meta.init_box),
        "superpixel_range": list(meta.superpixel_range),
    }
    with path.open("w", encoding="utf-8") as fh:
        fh.write(json.dumps(header, separators=(",", ":")) + "\n")
        for frame in sorted(frames, key=lambda f: f.index):
            obj: dict = {
                "index": frame.index,
                "parts": [
                    {
                        "id": p.id,
                        "cx": p.center[0],
                        "cy": p.center[1],
                        "area": p.area,
                        **({"fg": p.fg_prob} if p.fg_prob is not None else {}),
                        "feat": p.feature.tolist(),
                    }
                    for p in frame.parts
                ],
            }
            if frame.gt_box is not None:
                obj["gt_box"] = list(frame.gt_box)
            fh.write(json.dumps(obj, separators=(",", ":")) + "\n")
