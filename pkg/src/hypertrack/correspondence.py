"""Correspondence hypotheses between target parts and candidate parts.

Each vertex pairs one target part with one candidate part and carries an
association confidence derived from the chi-square distance between their
feature histograms.  The deterministic reduction step keeps, per target
part, only the few best-scoring hypotheses above an appearance threshold.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .parts import Part, SearchArea, TargetPart

CHI2_EPS = 1e-12


def chi2_distance(h1: np.ndarray, h2: np.ndarray) -> float:
    """Symmetric chi-square distance between two L1-normalized histograms."""
    a = np.asarray(h1, dtype=np.float64)
    b = np.asarray(h2, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"histogram length mismatch: {a.shape} vs {b.shape}")
    diff = a - b
    return float(0.5 * np.sum(diff * diff / (a + b + CHI2_EPS)))


def chi2_matrix(rows_a: np.ndarray, rows_b: np.ndarray) -> np.ndarray:
    """Pairwise chi-square distances between two stacks of histograms."""
    a = np.asarray(rows_a, dtype=np.float64)[:, None, :]
    b = np.asarray(rows_b, dtype=np.float64)[None, :, :]
    diff = a - b
    return 0.5 * np.sum(diff * diff / (a + b + CHI2_EPS), axis=2)


def association_confidence(p: Part, q: Part, assoc_scale_sq: float) -> float:
    """exp(-chi2(p, q) / sigma^2): probability the two parts share a class."""
    return math.exp(-chi2_distance(p.feature, q.feature) / assoc_scale_sq)


def distance_threshold(search: SearchArea, rho: int) -> float:
    """Center-distance gate: 3 * sqrt(W*H / rho) for rho parts in the area."""
    if rho < 1:
        raise ValueError("rho must be >= 1")
    return 3.0 * math.sqrt(search.width * search.height / rho)


def distance_gate(
    targets: Sequence[TargetPart],
    candidates: Sequence[Part],
    search: SearchArea,
    rho: int,
) -> list[tuple[int, int]]:
    """Index pairs (target, candidate) whose centers lie within the gate."""
    if not targets or not candidates:
        return []
    tau = distance_threshold(search, rho)
    t_xy = np.array([t.last_center for t in targets], dtype=np.float64)
    q_xy = np.array([q.center for q in candidates], dtype=np.float64)
    d2 = ((t_xy[:, None, :] - q_xy[None, :, :]) ** 2).sum(axis=2)
    ti, qi = np.nonzero(d2 <= tau * tau)
    return list(zip(ti.tolist(), qi.tolist()))


@dataclass(frozen=True)
class Vertex:
    """One correspondence hypothesis target-part ~ candidate-part."""

    id: int
    target_part_id: int
    candidate_part_id: int
    gamma: float
    gamma_hat: float


class VertexSet:
    """Reduced vertex set with dense per-vertex arrays for the geometry stages.

    Arrays are index-aligned with ``vertices`` (vertex id == array row):
    ``gamma``, ``gamma_hat``, ``tgt_xy``, ``cand_xy``, ``tgt_key`` (target
    part uid) and ``cand_key`` (candidate part id).
    """

    def __init__(
        self,
        vertices: Sequence[Vertex],
        tgt_xy: np.ndarray,
        cand_xy: np.ndarray,
    ):
        self.vertices: tuple[Vertex, ...] = tuple(vertices)
        n = len(self.vertices)
        self.tgt_xy = np.asarray(tgt_xy, dtype=np.float64).reshape(n, 2)
        self.cand_xy = np.asarray(cand_xy, dtype=np.float64).reshape(n, 2)
        self.gamma = np.array([v.gamma for v in self.vertices], dtype=np.float64)
        self.gamma_hat = np.array([v.gamma_hat for v in self.vertices], dtype=np.float64)
        self.tgt_key = np.array([v.target_part_id for v in self.vertices], dtype=np.int64)
        self.cand_key = np.array([v.candidate_part_id for v in self.vertices], dtype=np.int64)
        self.by_target: dict[int, tuple[int, ...]] = {}
        self.by_candidate: dict[int, tuple[int, ...]] = {}
        for v in self.vertices:
            self.by_target.setdefault(v.target_part_id, ())
            self.by_target[v.target_part_id] += (v.id,)
            self.by_candidate.setdefault(v.candidate_part_id, ())
            self.by_candidate[v.candidate_part_id] += (v.id,)

    def __len__(self) -> int:
        return len(self.vertices)

    def conflicting(self, i: int, j: int) -> bool:
        """True when two vertices share a target part or a candidate part."""
        return bool(self.tgt_key[i] == self.tgt_key[j] or self.cand_key[i] == self.cand_key[j])


def reduce_vertices(
    targets: Sequence[TargetPart],
    candidates: Sequence[Part],
    scored_pairs: Sequence[tuple[int, int, float]],
    appearance_threshold: float,
    max_per_target: int,
) -> VertexSet:
    """Keep, per target part, the top pairs by association confidence.

    Pairs below ``appearance_threshold`` are dropped; ties break toward the
    smaller candidate part id.  ``gamma_hat`` is each survivor's confidence
    normalized by the maximum over the surviving set, so the best vertex
    receives the full hyperedge sampling budget downstream.
    """
    per_target: dict[int, list[tuple[float, int, int, int]]] = {}
    for t_idx, q_idx, gamma in scored_pairs:
        if gamma < appearance_threshold:
            continue
        uid = targets[t_idx].uid
        per_target.setdefault(uid, []).append((-gamma, candidates[q_idx].id, t_idx, q_idx))

    survivors: list[tuple[int, int, int, int, float]] = []  # (tgt uid, cand id, t_idx, q_idx, gamma)
    for uid in sorted(per_target):
        ranked = sorted(per_target[uid])[:max_per_target]
        for neg_gamma, cand_id, t_idx, q_idx in ranked:
            survivors.append((uid, cand_id, t_idx, q_idx, -neg_gamma))
    survivors.sort(key=lambda s: (s[0], s[1]))

    if not survivors:
        return VertexSet([], np.zeros((0, 2)), np.zeros((0, 2)))

    gamma_max = max(s[4] for s in survivors)
    vertices = []
    tgt_xy = np.zeros((len(survivors), 2))
    cand_xy = np.zeros((len(survivors), 2))
    for vid, (uid, cand_id, t_idx, q_idx, gamma) in enumerate(survivors):
        vertices.append(
            Vertex(
                id=vid,
                target_part_id=uid,
                candidate_part_id=cand_id,
                gamma=gamma,
                gamma_hat=gamma / gamma_max,
            )
        )
        tgt_xy[vid] = targets[t_idx].last_center
        cand_xy[vid] = candidates[q_idx].center
    return VertexSet(vertices, tgt_xy, cand_xy)


def build_vertex_set(
    targets: Sequence[TargetPart],
    candidates: Sequence[Part],
    search: SearchArea,
    rho: int,
    assoc_scale_sq: float,
    appearance_threshold: float,
    max_per_target: int,
) -> VertexSet:
    """Distance gate, association scoring, and vertex reduction in one pass."""
    pairs = distance_gate(targets, candidates, search, rho)
    if not pairs:
        return reduce_vertices(targets, candidates, [], appearance_threshold, max_per_target)
    t_feats = np.stack([t.part.feature for t in targets])
    q_feats = np.stack([q.feature for q in candidates])
    gamma = np.exp(-chi2_matrix(t_feats, q_feats) / assoc_scale_sq)
    scored = [(t_idx, q_idx, float(gamma[t_idx, q_idx])) for t_idx, q_idx in pairs]
    return reduce_vertices(targets, candidates, scored, appearance_threshold, max_per_target)
