"""Per-frame tracking pipeline.

Frame 0 seeds the target part set from the parts inside the initial box.
Every later frame runs: searching area, candidate gating, vertex reduction,
hyperedge sampling, mode seeking from every vertex, conflict removal,
confidence-map voting with perturbation refinement, and the online target
set update.  A frame with no reliable correspondences is declared lost: the
previous state is kept and the model is left untouched.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import TrackerConfig
from .correspondence import build_vertex_set
from .hypergraph import sample_hyperedges
from .mode_parsing import parse_modes
from .mode_seeking import seek_all_modes
from .model_update import update_target_set
from .parts import Frame, SequenceMeta, TargetPart, point_in_box, search_area_of
from .state_estimation import TargetState, build_confidence_map, refine_state, rough_center


@dataclass(frozen=True)
class FrameRecord:
    """One results row: estimated box, its map score, and |S|."""

    frame: int
    center: tuple[float, float]
    scale: tuple[float, float]
    score: float
    n_reliable: int

    def csv_row(self) -> str:
        return (
            f"{self.frame},{self.center[0]:.6f},{self.center[1]:.6f},"
            f"{self.scale[0]:.6f},{self.scale[1]:.6f},{self.score:.6f},{self.n_reliable}"
        )


RESULTS_CSV_HEADER = "frame,cx,cy,w,h,score,n_reliable"


class Tracker:
    """Stateful frame-by-frame tracker over one sequence."""

    def __init__(self, meta: SequenceMeta, config: TrackerConfig):
        self.meta = meta
        self.config = config
        self.rng = np.random.default_rng(config.rng_seed)
        self.targets: list[TargetPart] = []
        self.state: TargetState | None = None
        self.next_uid = 0
        self.graph_dump: list[dict] = []
        self.mode_dump: list[dict] = []
        self.collect_graph = False
        self.collect_modes = False

    def initialize(self, frame: Frame) -> FrameRecord:
        box = self.meta.init_box
        for part in frame.parts:
            if point_in_box(part.center, box):
                self.targets.append(
                    TargetPart(
                        uid=self.next_uid,
                        part=part,
                        last_seen_frame=frame.index,
                        last_center=part.center,
                        miss_count=0,
                    )
                )
                self.next_uid += 1
        if not self.targets:
            raise ValueError("no parts inside the initial box; cannot initialize the target model")
        self.state = TargetState(center=(box[0], box[1]), scale=(box[2], box[3]), frame_index=frame.index)
        return FrameRecord(
            frame=frame.index,
            center=self.state.center,
            scale=self.state.scale,
            score=0.0,
            n_reliable=len(self.targets),
        )

    def _lost(self, frame: Frame) -> FrameRecord:
        assert self.state is not None
        return FrameRecord(
            frame=frame.index, center=self.state.center, scale=self.state.scale, score=0.0, n_reliable=0
        )

    def step(self, frame: Frame) -> FrameRecord:
        assert self.state is not None, "initialize() must run before step()"
        cfg = self.config
        prev = self.state
        search = search_area_of(prev.box, self.meta.canvas, cfg.search_scale)

        in_area = [p for p in frame.parts if search.contains(p.center)]
        rho = len(in_area)
        if rho == 0 or not self.targets:
            return self._lost(frame)
        candidates = [p for p in in_area if p.eligible_fg(cfg.fg_threshold)]
        if not candidates:
            return self._lost(frame)

        vset = build_vertex_set(
            self.targets,
            candidates,
            search,
            rho,
            cfg.assoc_scale_sq,
            cfg.appearance_threshold,
            cfg.max_matches_per_target,
        )
        if len(vset) == 0:
            return self._lost(frame)

        graph = sample_hyperedges(
            vset,
            cfg.order,
            cfg.max_edges_per_vertex,
            cfg.geom_scale_sq,
            self.rng,
            cfg.rejection_factor,
            cfg.degenerate_angle,
        )
        if self.collect_graph:
            self.graph_dump.append({"frame": frame.index, **graph.to_json_dict()})

        modes = seek_all_modes(graph, cfg)
        if self.collect_modes:
            self.mode_dump.append(
                {
                    "frame": frame.index,
                    "modes": [
                        {
                            "support": sorted(m.vertex_ids),
                            "omega": m.omega,
                            "start": m.start_vertex,
                            "updates": m.n_updates,
                        }
                        for m in modes
                    ],
                }
            )
        accepted, reliable = parse_modes(modes, graph, cfg.assoc_weight, cfg.geom_weight)
        if not reliable:
            return self._lost(frame)

        q_by_id = {p.id: p for p in candidates}
        accepted_cand_ids = sorted({int(vset.cand_key[v]) for m in accepted for v in m.vertex_ids})
        reliable_squares = [
            (q_by_id[cid].center[0], q_by_id[cid].center[1], q_by_id[cid].diameter) for cid in accepted_cand_ids
        ]
        candidate_squares = [
            (q_by_id[cid].center[0], q_by_id[cid].center[1], q_by_id[cid].diameter)
            for cid in sorted(vset.by_candidate)
        ]
        cmap = build_confidence_map(search, reliable_squares, candidate_squares, cfg.lambdas)

        target_centers = {tp.uid: tp.last_center for tp in self.targets}
        candidate_centers = {p.id: p.center for p in candidates}
        rough = rough_center(reliable, prev.center, target_centers, candidate_centers)
        mean_diameter = float(np.mean([p.diameter for p in candidates]))
        state, score = refine_state(
            cmap, rough, prev.scale, mean_diameter, cfg.refine_samples, self.rng, frame.index
        )

        self.targets, self.next_uid = update_target_set(
            self.targets,
            reliable,
            candidates,
            accepted_cand_ids,
            state.box,
            frame.index,
            mean_diameter,
            cfg,
            self.next_uid,
        )
        self.state = state
        return FrameRecord(
            frame=frame.index, center=state.center, scale=state.scale, score=score, n_reliable=len(reliable)
        )


def track_sequence(
    frames: list[Frame],
    meta: SequenceMeta,
    config: TrackerConfig,
    collect_graph: bool = False,
    collect_modes: bool = False,
) -> tuple[list[FrameRecord], Tracker]:
    """Run the tracker over a whole sequence; returns records and the tracker
    (whose dump lists are populated when collection was requested)."""
    if not frames:
        raise ValueError("sequence has no frames")
    tracker = Tracker(meta, config)
    tracker.collect_graph = collect_graph
    tracker.collect_modes = collect_modes
    records = [tracker.initialize(frames[0])]
    for frame in frames[1:]:
        records.append(tracker.step(frame))
    return records, tracker


def records_to_csv(records: list[FrameRecord]) -> str:
    return "\n".join([RESULTS_CSV_HEADER] + [r.csv_row() for r in records]) + "\n"
