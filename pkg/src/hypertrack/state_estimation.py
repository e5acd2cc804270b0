"""Target state estimation over the searching area.

A per-pixel confidence map assigns one of three constants to every cell:
reliable-part regions, remaining candidate-part regions, and background.
Boxes are ranked by their cell sum, evaluated exactly through an integral
image.  The center is first voted by reliable-part displacements and then,
together with the scale, refined by scoring randomly perturbed states.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .mode_parsing import ReliablePart
from .parts import SearchArea

Square = tuple[float, float, float]  # (cx, cy, side)


@dataclass(frozen=True)
class TargetState:
    """Bounding box as center plus size for one frame."""

    center: tuple[float, float]
    scale: tuple[float, float]
    frame_index: int

    def __post_init__(self):
        if self.scale[0] <= 0 or self.scale[1] <= 0:
            raise ValueError("scale must be positive")

    @property
    def box(self) -> tuple[float, float, float, float]:
        return (self.center[0], self.center[1], self.scale[0], self.scale[1])


@dataclass(frozen=True)
class ConfidenceMap:
    """1 px grid over the searching area plus its integral image."""

    origin: tuple[float, float]
    grid: np.ndarray
    integral: np.ndarray


def _round_half_up(value: float) -> int:
    return int(math.floor(value + 0.5))


def _paint_square(grid: np.ndarray, origin: tuple[float, float], square: Square, value: float) -> None:
    cx, cy, side = square
    span = _round_half_up(side)
    ix0 = _round_half_up(cx - side / 2.0 - origin[0])
    iy0 = _round_half_up(cy - side / 2.0 - origin[1])
    h, w = grid.shape
    x0, x1 = max(0, ix0), min(w, ix0 + span)
    y0, y1 = max(0, iy0), min(h, iy0 + span)
    if x0 < x1 and y0 < y1:
        grid[y0:y1, x0:x1] = value


def build_confidence_map(
    search: SearchArea,
    reliable_squares: Sequence[Square],
    candidate_squares: Sequence[Square],
    lambdas: tuple[float, float, float],
) -> ConfidenceMap:
    """Rasterize region confidences at 1 px over the searching area.

    Reliable regions take precedence over candidate regions, which take
    precedence over the background constant.
    """
    w = max(1, int(math.ceil(search.width - 1e-9)))
    h = max(1, int(math.ceil(search.height - 1e-9)))
    grid = np.full((h, w), float(lambdas[2]), dtype=np.float64)
    for square in candidate_squares:
        _paint_square(grid, search.origin, square, float(lambdas[1]))
    for square in reliable_squares:
        _paint_square(grid, search.origin, square, float(lambdas[0]))
    integral = np.zeros((h + 1, w + 1), dtype=np.float64)
    integral[1:, 1:] = grid.cumsum(axis=0).cumsum(axis=1)
    return ConfidenceMap(origin=search.origin, grid=grid, integral=integral)


def box_cell_bounds(
    cmap: ConfidenceMap, center: tuple[float, float], scale: tuple[float, float]
) -> tuple[int, int, int, int]:
    """Grid-cell bounds (x0, y0, x1, y1) of a box, clipped to the map."""
    h, w = cmap.grid.shape
    ix0 = _round_half_up(center[0] - scale[0] / 2.0 - cmap.origin[0])
    iy0 = _round_half_up(center[1] - scale[1] / 2.0 - cmap.origin[1])
    ix1 = ix0 + _round_half_up(scale[0])
    iy1 = iy0 + _round_half_up(scale[1])
    return max(0, ix0), max(0, iy0), min(w, ix1), min(h, iy1)


def box_score(cmap: ConfidenceMap, center: tuple[float, float], scale: tuple[float, float]) -> float:
    """Sum of map cells under the box via a 4-tap integral-image lookup."""
    x0, y0, x1, y1 = box_cell_bounds(cmap, center, scale)
    if x0 >= x1 or y0 >= y1:
        return 0.0
    ii = cmap.integral
    return float(ii[y1, x1] - ii[y0, x1] - ii[y1, x0] + ii[y0, x0])


def rough_center(
    reliable: Sequence[ReliablePart],
    prev_center: tuple[float, float],
    target_centers: Mapping[int, tuple[float, float]],
    candidate_centers: Mapping[int, tuple[float, float]],
) -> tuple[float, float]:
    """Confidence-weighted mean of per-part displaced centers.

    Each reliable part votes for the previous center shifted by its own
    displacement.  An empty set falls back to the previous center (the
    lost-frame rule).
    """
    if not reliable:
        return prev_center
    wsum = 0.0
    vx = 0.0
    vy = 0.0
    for rp in reliable:
        tx, ty = target_centers[rp.target_part_id]
        qx, qy = candidate_centers[rp.matched_candidate_id]
        vx += rp.weight * (prev_center[0] + qx - tx)
        vy += rp.weight * (prev_center[1] + qy - ty)
        wsum += rp.weight
    return (vx / wsum, vy / wsum)


def refine_state(
    cmap: ConfidenceMap,
    center: tuple[float, float],
    scale: tuple[float, float],
    delta_max: float,
    sample_count: int,
    rng: np.random.Generator,
    frame_index: int,
) -> tuple[TargetState, float]:
    """Pick the best box among the unperturbed state and random perturbations.

    Center offsets and per-axis size offsets are drawn uniformly from
    ``[-delta_max, delta_max]``; sizes are clamped to one pixel.  Score ties
    keep the state with the smallest perturbation norm, so the unperturbed
    state is never abandoned without a strict improvement.
    """
    best_center = (float(center[0]), float(center[1]))
    best_scale = (float(scale[0]), float(scale[1]))
    best_score = box_score(cmap, best_center, best_scale)
    best_norm = 0.0
    if sample_count > 0 and delta_max > 0:
        deltas = rng.uniform(-delta_max, delta_max, size=(sample_count, 4))
        for dx, dy, dw, dh in deltas:
            cand_center = (center[0] + dx, center[1] + dy)
            cand_scale = (max(1.0, scale[0] + dw), max(1.0, scale[1] + dh))
            score = box_score(cmap, cand_center, cand_scale)
            norm = math.sqrt(dx * dx + dy * dy + dw * dw + dh * dh)
            if score > best_score or (score == best_score and norm < best_norm):
                best_score = score
                best_center = cand_center
                best_scale = cand_scale
                best_norm = norm
    state = TargetState(center=best_center, scale=best_scale, frame_index=frame_index)
    return state, best_score
