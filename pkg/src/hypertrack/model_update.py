"""Online update of the target part set after an accepted frame.

Matched parts are refreshed in place (position, consecutive-miss counter,
feature EMA); parts missing for too many consecutive frames are retired;
unclaimed foreground candidates inside the new box are admitted as new target
parts provided they keep the set spatially sparse.
"""

from __future__ import annotations

import dataclasses
import math
from typing import Iterable, Sequence

import numpy as np

from .config import TrackerConfig
from .mode_parsing import ReliablePart
from .parts import Box, Part, TargetPart, point_in_box


def _ema_feature(old: np.ndarray, new: np.ndarray, alpha: float) -> np.ndarray:
    mixed = alpha * old + (1.0 - alpha) * new
    return mixed / mixed.sum()


def update_target_set(
    targets: Sequence[TargetPart],
    reliable: Sequence[ReliablePart],
    candidates: Sequence[Part],
    excluded_candidate_ids: Iterable[int],
    new_box: Box,
    frame_index: int,
    mean_diameter: float,
    config: TrackerConfig,
    next_uid: int,
) -> tuple[list[TargetPart], int]:
    """Apply the per-frame target set update; returns the new set and uid counter.

    Matched parts move to their candidate's center with a feature EMA and a
    reset miss counter.  Unmatched parts accumulate misses and are dropped at
    ``config.miss_limit`` consecutive ones.  Candidates not claimed by any
    accepted mode, lying inside the new box, are admitted (in ascending id
    order) when farther than ``config.sparsity_factor * mean_diameter`` from
    every current target part center.
    """
    cand_by_id = {p.id: p for p in candidates}
    matched = {rp.target_part_id: rp for rp in reliable}
    excluded = set(excluded_candidate_ids)

    updated: list[TargetPart] = []
    for tp in targets:
        rp = matched.get(tp.uid)
        if rp is not None:
            q = cand_by_id[rp.matched_candidate_id]
            part = dataclasses.replace(
                tp.part, feature=_ema_feature(tp.part.feature, q.feature, config.feature_alpha)
            )
            updated.append(
                TargetPart(
                    uid=tp.uid,
                    part=part,
                    last_seen_frame=frame_index,
                    last_center=q.center,
                    miss_count=0,
                )
            )
        else:
            misses = tp.miss_count + 1
            if misses >= config.miss_limit:
                continue
            updated.append(dataclasses.replace(tp, miss_count=misses))

    radius = config.sparsity_factor * mean_diameter
    centers = [tp.last_center for tp in updated]
    for q in sorted(candidates, key=lambda p: p.id):
        if q.id in excluded or not point_in_box(q.center, new_box):
            continue
        if all(math.dist(q.center, c) > radius for c in centers):
            updated.append(
                TargetPart(
                    uid=next_uid,
                    part=q,
                    last_seen_frame=frame_index,
                    last_center=q.center,
                    miss_count=0,
                )
            )
            centers.append(q.center)
            next_uid += 1
    return updated, next_uid
