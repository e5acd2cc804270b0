"""Convert a video plus an initial box into a part-sequence file.

Each frame is cropped to a fixed working region (three times the initial
box, the ingest-side stand-in for the tracker's searching area), then
over-segmented into superpixels.  Every superpixel becomes one part:
centroid, pixel count, a coarse foreground probability from an HSV color
model seeded by the initial box, and an L1-normalized feature built from an
HSV histogram (8 bins per channel by default) concatenated with a uniform
texture block.  The output is the tracker's JSON Lines sequence format.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import cv2
import numpy as np
from skimage.segmentation import slic

Box = tuple[float, float, float, float]  # (cx, cy, w, h)

DEFAULT_COUNT_RANGE = (100, 450)
HSV_RANGES = (180.0, 256.0, 256.0)
SLIC_COMPACTNESS = 25.0
SLIC_MIN_SIZE = 0.25


class IngestError(ValueError):
    pass


def target_segment_count(region_area: float, pixels_per_superpixel: float, count_range: tuple[int, int]) -> int:
    """Nominal superpixel count for a region, clamped to the declared range."""
    if pixels_per_superpixel <= 0:
        raise IngestError("pixels-per-superpixel must be positive")
    nominal = int(round(region_area / pixels_per_superpixel))
    return max(count_range[0], min(count_range[1], nominal))


def _crop_region(box: Box, width: int, height: int, scale: float = 3.0) -> tuple[int, int, int, int]:
    cx, cy, w, h = box
    x0 = int(max(0, math.floor(cx - scale * w / 2)))
    y0 = int(max(0, math.floor(cy - scale * h / 2)))
    x1 = int(min(width, math.ceil(cx + scale * w / 2)))
    y1 = int(min(height, math.ceil(cy + scale * h / 2)))
    if x1 - x0 < 8 or y1 - y0 < 8:
        raise IngestError(f"degenerate working region from box {box}")
    return x0, y0, x1, y1


def _hsv_histograms(hsv_pixels: np.ndarray, bins: int) -> np.ndarray:
    """Per-channel normalized histograms, stacked as a (3, bins) array."""
    out = np.empty((3, bins))
    for c in range(3):
        hist, _ = np.histogram(hsv_pixels[:, c], bins=bins, range=(0.0, HSV_RANGES[c]))
        total = hist.sum()
        out[c] = hist / total if total else 1.0 / bins
    return out


class ForegroundColorModel:
    """Coarse foreground probability from inside-box vs ring color statistics.

    The probability of a pixel is the per-channel ratio of the (smoothed)
    inside-box histogram mass to the combined inside+ring mass, averaged over
    the three HSV channels.  The inside model follows the scene with an EMA
    over pixels classified as foreground.
    """

    SMOOTHING = 1e-3

    def __init__(self, hsv_frame: np.ndarray, box: Box, bins: int, alpha: float = 0.9):
        self.bins = bins
        self.alpha = alpha
        h, w = hsv_frame.shape[:2]
        bx0, by0, bx1, by1 = _crop_region(box, w, h, scale=1.0)
        rx0, ry0, rx1, ry1 = _crop_region(box, w, h, scale=1.8)
        inside = hsv_frame[by0:by1, bx0:bx1].reshape(-1, 3)
        ring_mask = np.ones((ry1 - ry0, rx1 - rx0), dtype=bool)
        ring_mask[by0 - ry0 : by1 - ry0, bx0 - rx0 : bx1 - rx0] = False
        ring = hsv_frame[ry0:ry1, rx0:rx1].reshape(-1, 3)[ring_mask.ravel()]
        if ring.size == 0:
            raise IngestError("initial box leaves no surrounding ring; cannot seed the color model")
        self.p_in = _hsv_histograms(inside.astype(np.float64), bins)
        self.p_out = _hsv_histograms(ring.astype(np.float64), bins)

    def _bin_indices(self, hsv_pixels: np.ndarray) -> np.ndarray:
        idx = np.empty(hsv_pixels.shape, dtype=np.int64)
        for c in range(3):
            idx[:, c] = np.clip(
                (hsv_pixels[:, c].astype(np.float64) / HSV_RANGES[c] * self.bins).astype(np.int64),
                0,
                self.bins - 1,
            )
        return idx

    def pixel_probabilities(self, hsv_pixels: np.ndarray) -> np.ndarray:
        idx = self._bin_indices(hsv_pixels)
        probs = np.empty((hsv_pixels.shape[0], 3))
        for c in range(3):
            p_in = self.p_in[c][idx[:, c]] + self.SMOOTHING
            p_out = self.p_out[c][idx[:, c]] + self.SMOOTHING
            probs[:, c] = p_in / (p_in + p_out)
        return probs.mean(axis=1)

    def update(self, fg_pixels: np.ndarray) -> None:
        if fg_pixels.shape[0] == 0:
            return
        fresh = _hsv_histograms(fg_pixels.astype(np.float64), self.bins)
        self.p_in = self.alpha * self.p_in + (1.0 - self.alpha) * fresh


@dataclass(frozen=True)
class IngestSummary:
    n_frames: int
    part_counts: tuple[int, ...]
    canvas: tuple[int, int]


def _read_video(path: str | Path) -> list[np.ndarray]:
    cap = cv2.VideoCapture(str(path))
    if not cap.isOpened():
        raise IngestError(f"unreadable video: {path}")
    frames = []
    while True:
        ok, frame = cap.read()
        if not ok:
            break
        frames.append(frame)
    cap.release()
    if not frames:
        raise IngestError(f"video has no decodable frames: {path}")
    return frames


def ingest_video(
    video_path: str | Path,
    init_box: Box,
    out_path: str | Path,
    pixels_per_superpixel: float = 50.0,
    bins: int = 8,
    count_range: tuple[int, int] = DEFAULT_COUNT_RANGE,
    ema_alpha: float = 0.9,
) -> IngestSummary:
    """Segment every frame and write the part-sequence file.

    The feature layout is ``[3 * bins HSV color | bins uniform texture]``,
    color and texture halves carrying equal weight; the texture block is a
    uniform placeholder (exact texture descriptors are out of scope here).
    """
    frames = _read_video(video_path)
    height, width = frames[0].shape[:2]
    cx, cy, w, h = init_box
    if w <= 1 or h <= 1:
        raise IngestError(f"degenerate initial box {init_box}")
    if not (0 <= cx - w / 2 and cx + w / 2 <= width and 0 <= cy - h / 2 and cy + h / 2 <= height):
        raise IngestError(f"initial box {init_box} falls outside frame 0 ({width}x{height})")

    x0, y0, x1, y1 = _crop_region(init_box, width, height, scale=3.0)
    n_target = target_segment_count((x1 - x0) * (y1 - y0), pixels_per_superpixel, count_range)
    model = ForegroundColorModel(cv2.cvtColor(frames[0], cv2.COLOR_BGR2HSV), init_box, bins, ema_alpha)

    texture = np.full(bins, 0.5 / bins)
    feature_dim = 3 * bins + bins
    lines = [
        json.dumps(
            {
                "version": 1,
                "feature_dim": feature_dim,
                "canvas": [width, height],
                "init_box": [float(cx), float(cy), float(w), float(h)],
                "superpixel_range": [int(count_range[0]), int(count_range[1])],
            },
            separators=(",", ":"),
        )
    ]
    part_counts = []
    for index, frame in enumerate(frames):
        sub = frame[y0:y1, x0:x1]
        hsv = cv2.cvtColor(sub, cv2.COLOR_BGR2HSV)
        rgb = cv2.cvtColor(cv2.GaussianBlur(sub, (5, 5), 1.0), cv2.COLOR_BGR2RGB)
        labels = slic(
            rgb,
            n_segments=n_target,
            compactness=SLIC_COMPACTNESS,
            min_size_factor=SLIC_MIN_SIZE,
            start_label=0,
        )
        hsv_flat = hsv.reshape(-1, 3)
        pixel_fg = model.pixel_probabilities(hsv_flat)
        labels_flat = labels.ravel()
        ys, xs = np.mgrid[0 : labels.shape[0], 0 : labels.shape[1]]
        xs = xs.ravel().astype(np.float64)
        ys = ys.ravel().astype(np.float64)

        parts = []
        n_labels = int(labels_flat.max()) + 1
        order = np.argsort(labels_flat, kind="stable")
        bounds = np.searchsorted(labels_flat[order], np.arange(n_labels + 1))
        for label in range(n_labels):
            sel = order[bounds[label] : bounds[label + 1]]
            if sel.size == 0:
                continue
            color = _hsv_histograms(hsv_flat[sel].astype(np.float64), bins).ravel()
            color_sum = color.sum()
            feat = np.concatenate([color / color_sum * 0.5, texture])
            parts.append(
                {
                    "id": label,
                    "cx": float(xs[sel].mean() + x0),
                    "cy": float(ys[sel].mean() + y0),
                    "area": float(sel.size),
                    "fg": float(pixel_fg[sel].mean()),
                    "feat": feat.tolist(),
                }
            )
        part_counts.append(len(parts))
        lines.append(json.dumps({"index": index, "parts": parts}, separators=(",", ":")))

        fg_mask = np.zeros(labels_flat.shape, dtype=bool)
        for part in parts:
            if part["fg"] >= 0.5:
                sel = order[bounds[part["id"]] : bounds[part["id"] + 1]]
                fg_mask[sel] = True
        model.update(hsv_flat[fg_mask])

    Path(out_path).write_text("\n".join(lines) + "\n", encoding="utf-8")
    return IngestSummary(n_frames=len(frames), part_counts=tuple(part_counts), canvas=(width, height))


def make_demo_video(path: str | Path, n_frames: int = 30, size: tuple[int, int] = (240, 180), seed: int = 0) -> Box:
    """Write a small synthetic clip: a textured block drifting over a textured
    background.  Returns the block's frame-0 bounding box (cx, cy, w, h)."""
    width, height = size
    rng = np.random.default_rng(seed)
    background = np.empty((height, width, 3), np.uint8)
    background[:, :, 0] = 110 + (rng.random((height, width)) * 50).astype(np.uint8)
    background[:, :, 1] = 140 + (rng.random((height, width)) * 40).astype(np.uint8)
    background[:, :, 2] = 60 + (rng.random((height, width)) * 30).astype(np.uint8)
    block_w, block_h = 50, 40
    block = np.empty((block_h, block_w, 3), np.uint8)
    block[:, :, 0] = 30 + (rng.random((block_h, block_w)) * 30).astype(np.uint8)
    block[:, :, 1] = 30 + (rng.random((block_h, block_w)) * 30).astype(np.uint8)
    block[:, :, 2] = 190 + (rng.random((block_h, block_w)) * 50).astype(np.uint8)

    writer = cv2.VideoWriter(str(path), cv2.VideoWriter_fourcc(*"MJPG"), 15, (width, height))
    if not writer.isOpened():
        raise IngestError(f"cannot open video writer for {path}")
    bx0, by0 = 30, 40
    for t in range(n_frames):
        frame = background.copy()
        x = bx0 + t
        y = by0 + t // 2
        frame[y : y + block_h, x : x + block_w] = block
        writer.write(frame)
    writer.release()
    return (bx0 + block_w / 2.0, by0 + block_h / 2.0, float(block_w), float(block_h))
