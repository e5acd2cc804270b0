"""Synthetic part-sequence generator.

Produces desk-scale tracking scenarios with known ground truth: a coherent
cloud of foreground parts that translates, scales and jitters over a field of
static background parts.  Part areas are sized so the foreground roughly
tiles its bounding box (like superpixels over a segmented target), and they
grow with the scale ramp.  Appearance is a per-part identity histogram
(drawn around a foreground or background prototype) plus fresh per-frame
noise, so association confidence is informative but ambiguous.  An optional
occlusion window removes a fixed fraction of foreground parts for a span of
frames.
"""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .correspondence import chi2_distance
from .parts import Frame, Part, SequenceMeta, point_in_box


@dataclass(frozen=True)
class GenSpec:
    """Generator parameters; serialized as plain JSON for the CLI."""

    canvas: tuple[float, float] = (400.0, 400.0)
    n_frames: int = 60
    n_fg: int = 30
    n_bg: int = 90
    translation: tuple[float, float] = (2.0, 0.0)
    scale_range: tuple[float, float] = (1.0, 1.5)
    jitter_sigma: float = 1.5
    scale_jitter: float = 0.0  # per-frame multiplicative scale "breathing"
    occlusion: tuple[int, int, float] | None = None  # (start, end) half-open + dropped fraction
    feature_dim: int = 16
    feature_separation: float = 0.5  # chi-square distance between prototypes
    identity_noise: float = 0.08
    frame_noise: float = 0.03
    bg_area_mean: float = 250.0
    area_spread: float = 0.25
    cloud_extent: float = 40.0  # half-width of the initial foreground cloud
    grid_jitter: float = 0.1  # static part-placement raggedness, fraction of a grid cell
    start_center: tuple[float, float] | None = None
    fg_prob_range: tuple[float, float] = (0.7, 1.0)
    bg_prob_range: tuple[float, float] = (0.0, 0.6)  # ~1/6 of background leaks past the 0.5 gate
    seed: int = 0

    def to_dict(self) -> dict:
        data = dataclasses.asdict(self)
        for key in ("canvas", "translation", "scale_range", "fg_prob_range", "bg_prob_range"):
            data[key] = list(data[key])
        if self.occlusion is not None:
            data["occlusion"] = list(self.occlusion)
        if self.start_center is not None:
            data["start_center"] = list(self.start_center)
        return data

    @classmethod
    def from_dict(cls, data: dict) -> "GenSpec":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown generator keys: {sorted(unknown)}")
        kwargs = dict(data)
        for key in ("canvas", "translation", "scale_range", "fg_prob_range", "bg_prob_range"):
            if key in kwargs:
                kwargs[key] = tuple(kwargs[key])
        if kwargs.get("occlusion") is not None:
            s, e, f = kwargs["occlusion"]
            kwargs["occlusion"] = (int(s), int(e), float(f))
        if kwargs.get("start_center") is not None:
            kwargs["start_center"] = tuple(kwargs["start_center"])
        return cls(**kwargs)

    @classmethod
    def from_json_file(cls, path: str | Path) -> "GenSpec":
        with Path(path).open("r", encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


def _normalized(vec: np.ndarray) -> np.ndarray:
    clipped = np.clip(vec, 1e-9, None)
    return clipped / clipped.sum()


def make_prototypes(dim: int, separation: float) -> tuple[np.ndarray, np.ndarray]:
    """Two histograms at (just above) the requested chi-square distance.

    The second prototype is a blend between the first and a disjoint-support
    histogram; the blend weight is bisected until the distance crosses the
    target from above.
    """
    if dim < 2:
        raise ValueError("feature_dim must be >= 2 to separate prototypes")
    half = dim // 2
    floor = np.full(dim, 1e-3)
    u = floor.copy()
    u[:half] += 1.0
    v = floor.copy()
    v[half:] += 1.0
    u = u / u.sum()
    v = v / v.sum()
    limit = chi2_distance(u, v)
    if separation >= limit:
        raise ValueError(f"feature_separation {separation} unreachable (max {limit:.3f} at dim {dim})")
    lo, hi = 0.0, 1.0
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        blend = _normalized((1.0 - mid) * u + mid * v)
        if chi2_distance(u, blend) < separation:
            lo = mid
        else:
            hi = mid
    proto_b = _normalized((1.0 - hi) * u + hi * v)
    return u, proto_b


def generate_sequence(spec: GenSpec) -> tuple[list[Frame], SequenceMeta]:
    """Build the frame list and header for a synthetic scenario.

    Raises ``ValueError`` when the configured trajectory cannot fit on the
    canvas (parts would overflow).
    """
    rng = np.random.default_rng(spec.seed)
    n_fg, n_bg, dim = spec.n_fg, spec.n_bg, spec.feature_dim
    canvas = np.asarray(spec.canvas, dtype=np.float64)

    proto_fg, proto_bg = make_prototypes(dim, spec.feature_separation)

    # foreground parts tile the cloud like superpixels tile a segmented
    # target: one square part per cell of a jittered square-cell grid, so at
    # zero spread the part squares cover the target region exactly
    grid_cols = max(1, int(math.ceil(math.sqrt(n_fg))))
    grid_rows = int(math.ceil(n_fg / grid_cols))
    cell = 2.0 * spec.cloud_extent / grid_cols
    half_h = grid_rows * cell / 2.0
    offsets = np.empty((n_fg, 2))
    for idx in range(n_fg):
        r, c = divmod(idx, grid_cols)
        offsets[idx, 0] = -spec.cloud_extent + (c + 0.5) * cell
        offsets[idx, 1] = -half_h + (r + 0.5) * cell
    offsets += rng.uniform(-spec.grid_jitter, spec.grid_jitter, size=(n_fg, 2)) * cell
    areas_fg = cell * cell * rng.uniform(1.0 - spec.area_spread, 1.0 + spec.area_spread, size=n_fg)
    areas_bg = spec.bg_area_mean * rng.uniform(1.0 - spec.area_spread, 1.0 + spec.area_spread, size=n_bg)
    ident_fg = np.stack([_normalized(proto_fg + rng.normal(0.0, spec.identity_noise / dim, dim)) for _ in range(n_fg)])
    ident_bg = np.stack([_normalized(proto_bg + rng.normal(0.0, spec.identity_noise / dim, dim)) for _ in range(n_bg)])
    bg_pos = rng.uniform([0.0, 0.0], canvas, size=(n_bg, 2))

    mean_diam = float(np.sqrt(areas_fg).mean())
    max_scale = max(spec.scale_range) * (1.0 + spec.scale_jitter)
    margin = (spec.cloud_extent + mean_diam) * max_scale + 4.0 * spec.jitter_sigma
    if spec.start_center is not None:
        start = np.asarray(spec.start_center, dtype=np.float64)
    else:
        drift = np.asarray(spec.translation) * (spec.n_frames - 1)
        start = np.where(drift >= 0, margin, canvas - margin).astype(np.float64)
    end = start + np.asarray(spec.translation) * (spec.n_frames - 1)
    for point in (start, end):
        if np.any(point - margin < 0) or np.any(point + margin > canvas):
            raise ValueError(
                f"parts overflow canvas: trajectory needs margin {margin:.1f} around {point.tolist()}"
            )

    dropped: np.ndarray = np.zeros(0, dtype=np.int64)
    if spec.occlusion is not None:
        occ_start, occ_end, frac = spec.occlusion
        n_drop = int(round(frac * n_fg))
        dropped = np.sort(rng.choice(n_fg, size=n_drop, replace=False))
    else:
        occ_start = occ_end = -1

    frames: list[Frame] = []
    for t in range(spec.n_frames):
        if spec.n_frames > 1:
            s = spec.scale_range[0] + (spec.scale_range[1] - spec.scale_range[0]) * t / (spec.n_frames - 1)
        else:
            s = spec.scale_range[0]
        if spec.scale_jitter > 0:
            s *= 1.0 + float(rng.uniform(-spec.scale_jitter, spec.scale_jitter))
        center_t = start + np.asarray(spec.translation) * t
        fg_centers = center_t + s * offsets + rng.normal(0.0, spec.jitter_sigma, size=(n_fg, 2))
        bg_centers = bg_pos + rng.normal(0.0, spec.jitter_sigma, size=(n_bg, 2))
        fg_feats = [_normalized(ident_fg[i] + rng.normal(0.0, spec.frame_noise / dim, dim)) for i in range(n_fg)]
        bg_feats = [_normalized(ident_bg[i] + rng.normal(0.0, spec.frame_noise / dim, dim)) for i in range(n_bg)]
        fg_probs = rng.uniform(*spec.fg_prob_range, size=n_fg)
        bg_probs = rng.uniform(*spec.bg_prob_range, size=n_bg)
        areas_t = areas_fg * s * s  # superpixels grow with the target

        lo = fg_centers.min(axis=0)
        hi = fg_centers.max(axis=0)
        gt = (
            float((lo[0] + hi[0]) / 2.0),
            float((lo[1] + hi[1]) / 2.0),
            float(hi[0] - lo[0] + mean_diam * s),
            float(hi[1] - lo[1] + mean_diam * s),
        )

        occluded = set(dropped.tolist()) if occ_start <= t < occ_end else set()
        parts = [
            Part(
                id=i,
                center=(float(fg_centers[i, 0]), float(fg_centers[i, 1])),
                area=float(areas_t[i]),
                feature=fg_feats[i],
                fg_prob=float(fg_probs[i]),
            )
            for i in range(n_fg)
            if i not in occluded
        ]
        # background parts under the target are hidden by it: a segmentation
        # partitions the image, so no background superpixel coexists there
        parts.extend(
            Part(
                id=n_fg + i,
                center=(float(bg_centers[i, 0]), float(bg_centers[i, 1])),
                area=float(areas_bg[i]),
                feature=bg_feats[i],
                fg_prob=float(bg_probs[i]),
            )
            for i in range(n_bg)
            if not point_in_box((float(bg_centers[i, 0]), float(bg_centers[i, 1])), gt)
        )
        frames.append(Frame(index=t, parts=tuple(parts), gt_box=gt))

    meta = SequenceMeta(
        feature_dim=dim,
        canvas=(float(canvas[0]), float(canvas[1])),
        init_box=frames[0].gt_box,
        superpixel_range=(0, n_fg + n_bg),
    )
    return frames, meta
