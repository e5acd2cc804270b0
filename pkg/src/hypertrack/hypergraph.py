"""Hyperedge sampling and geometric confidence over correspondence vertices.

Geometric confidence compares the layout of target parts against the layout
of their matched candidates.  At order 2 it penalizes the difference of the
two displacement vectors, which is cheap but not scale invariant.  At order 3
it compares the sines of corresponding triangle angles, which is invariant to
translation, rotation and uniform scaling of the candidate side.

The hypergraph is never built exhaustively: per vertex, a budget proportional
to its normalized association confidence is drawn at random from the reduced
vertex set, rejecting conflicting tuples, degenerate triangles and duplicates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .correspondence import VertexSet


def round_half_up(value: float) -> int:
    return int(math.floor(value + 0.5))


def pairwise_geometric_confidence(vset: VertexSet, i: int, j: int, geom_scale_sq: float) -> float:
    """exp(-||L(p_i,p_j) - L(q_i,q_j)|| / sigma^2) for two non-conflicting vertices."""
    dp = vset.tgt_xy[j] - vset.tgt_xy[i]
    dq = vset.cand_xy[j] - vset.cand_xy[i]
    return math.exp(-float(np.linalg.norm(dp - dq)) / geom_scale_sq)


def _interior_angles(points: np.ndarray) -> np.ndarray:
    """Interior angles (radians) of a triangle given as a (3,2) array."""
    angles = np.empty(3)
    for a in range(3):
        u = points[(a + 1) % 3] - points[a]
        v = points[(a + 2) % 3] - points[a]
        cross = u[0] * v[1] - u[1] * v[0]
        dot = u[0] * v[0] + u[1] * v[1]
        angles[a] = math.atan2(abs(cross), dot)
    return angles


def triangle_is_degenerate(points: np.ndarray, angle_tol: float = 1e-6) -> bool:
    """Duplicate corners or a minimum interior angle below ``angle_tol``."""
    pts = np.asarray(points, dtype=np.float64).reshape(3, 2)
    for a in range(3):
        if np.linalg.norm(pts[a] - pts[(a + 1) % 3]) < 1e-9:
            return True
    return bool(_interior_angles(pts).min() < angle_tol)


def triangle_geometric_confidence(
    vset: VertexSet, i: int, j: int, k: int, geom_scale_sq: float, angle_tol: float = 1e-6
) -> float:
    """exp(-sum_i |sin(theta_i^P) - sin(theta_i^Q)| / sigma^2) over matched corners.

    The angle at each corner of the target triangle is compared with the angle
    at the same vertex's candidate corner, so the value does not depend on the
    order the three vertices are listed in.  Degenerate triangles must be
    filtered beforehand; they raise ``ValueError`` here.
    """
    ids = (i, j, k)
    tgt = vset.tgt_xy[list(ids)]
    cand = vset.cand_xy[list(ids)]
    if triangle_is_degenerate(tgt, angle_tol) or triangle_is_degenerate(cand, angle_tol):
        raise ValueError("degenerate triangle; hyperedge should have been discarded at sampling time")
    sin_p = np.sin(_interior_angles(tgt))
    sin_q = np.sin(_interior_angles(cand))
    return math.exp(-float(np.abs(sin_p - sin_q).sum()) / geom_scale_sq)


@dataclass(frozen=True)
class Hyperedge:
    """A k-tuple of mutually non-conflicting vertices with its confidence."""

    vertex_ids: tuple[int, ...]
    xi: float

    def __post_init__(self):
        ids = tuple(self.vertex_ids)
        if any(b <= a for a, b in zip(ids, ids[1:])):
            raise ValueError("vertex_ids must be strictly increasing")
        object.__setattr__(self, "vertex_ids", ids)


class Hypergraph:
    """Sampled hypergraph: vertex set, edge table, and incidence index.

    ``edges`` is an (M, k) int array of sorted vertex ids, ``xi`` the matching
    confidences.  ``sampled_counts[v]`` is the number of stored hyperedges
    charged to vertex ``v``'s sampling budget (an edge drawn again from another
    start vertex is stored once and charged to the first drawer only).
    """

    def __init__(
        self,
        vertices: VertexSet,
        order: int,
        edges: np.ndarray,
        xi: np.ndarray,
        sampled_counts: np.ndarray | None = None,
        eta: np.ndarray | None = None,
    ):
        self.vertices = vertices
        self.order = int(order)
        n = len(vertices)
        k = max(self.order, 1)
        self.edges = np.asarray(edges, dtype=np.int64).reshape(-1, k) if self.order >= 2 else np.zeros((0, 1), np.int64)
        self.xi = np.asarray(xi, dtype=np.float64).reshape(-1)
        if self.edges.shape[0] != self.xi.shape[0]:
            raise ValueError("edges and xi must have matching length")
        self.sampled_counts = (
            np.zeros(n, dtype=np.int64) if sampled_counts is None else np.asarray(sampled_counts, dtype=np.int64)
        )
        self.eta = np.zeros(n, dtype=np.int64) if eta is None else np.asarray(eta, dtype=np.int64)
        self.gamma = vertices.gamma
        self._build_incidence(n)

    def _build_incidence(self, n: int) -> None:
        m, k = self.edges.shape
        if m == 0:
            self.inc_indptr = np.zeros(n + 1, dtype=np.int64)
            self.inc_edges = np.zeros(0, dtype=np.int64)
            return
        flat = self.edges.ravel()
        edge_ids = np.repeat(np.arange(m, dtype=np.int64), k)
        order = np.argsort(flat, kind="stable")
        counts = np.bincount(flat, minlength=n)
        self.inc_indptr = np.concatenate(([0], np.cumsum(counts))).astype(np.int64)
        self.inc_edges = edge_ids[order]

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_edges(self) -> int:
        return int(self.xi.shape[0])

    def incident_edges(self, v: int) -> np.ndarray:
        return self.inc_edges[self.inc_indptr[v] : self.inc_indptr[v + 1]]

    def neighbors(self, v: int) -> np.ndarray:
        """Vertices sharing at least one hyperedge with ``v``."""
        eids = self.incident_edges(v)
        if eids.size == 0:
            return np.zeros(0, dtype=np.int64)
        vs = np.unique(self.edges[eids])
        return vs[vs != v]

    def hyperedges(self) -> list[Hyperedge]:
        return [Hyperedge(tuple(row), float(x)) for row, x in zip(self.edges.tolist(), self.xi.tolist())]

    def interior_edge_ids(self, support: Iterable[int]) -> np.ndarray:
        """Ids of hyperedges whose endpoints all lie inside ``support``."""
        members = np.fromiter(support, dtype=np.int64)
        if members.size == 0 or self.n_edges == 0:
            return np.zeros(0, dtype=np.int64)
        cand = np.unique(np.concatenate([self.incident_edges(v) for v in members]))
        if cand.size == 0:
            return cand
        inside = np.isin(self.edges[cand], members).all(axis=1)
        return cand[inside]

    def to_json_dict(self) -> dict:
        return {
            "order": self.order,
            "vertices": [
                {
                    "id": v.id,
                    "target": v.target_part_id,
                    "candidate": v.candidate_part_id,
                    "gamma": v.gamma,
                    "gamma_hat": v.gamma_hat,
                }
                for v in self.vertices.vertices
            ],
            "hyperedges": [
                {"vertices": row, "xi": x} for row, x in zip(self.edges.tolist(), self.xi.tolist())
            ],
        }


def mode_confidence(support: Iterable[int], graph: Hypergraph, assoc_weight: float, geom_weight: float) -> float:
    """Combined confidence of a vertex group: weighted association plus weighted
    geometric confidence of the hyperedges fully contained in the group."""
    members = np.fromiter(support, dtype=np.int64)
    if members.size == 0:
        return 0.0
    total = assoc_weight * float(graph.gamma[members].sum())
    interior = graph.interior_edge_ids(members)
    if interior.size:
        total += geom_weight * float(graph.xi[interior].sum())
    return total


def _batch_degenerate(points: np.ndarray, angle_tol: float) -> np.ndarray:
    """Vectorized degeneracy test for (B, 3, 2) triangle batches."""
    bad = np.zeros(points.shape[0], dtype=bool)
    for a in range(3):
        u = points[:, (a + 1) % 3] - points[:, a]
        v = points[:, (a + 2) % 3] - points[:, a]
        bad |= np.hypot(u[:, 0], u[:, 1]) < 1e-9
        cross = np.abs(u[:, 0] * v[:, 1] - u[:, 1] * v[:, 0])
        dot = u[:, 0] * v[:, 0] + u[:, 1] * v[:, 1]
        bad |= np.arctan2(cross, dot) < angle_tol
    return bad


def _batch_sin_angles(points: np.ndarray) -> np.ndarray:
    """Sines of interior angles for (B, 3, 2) triangle batches -> (B, 3)."""
    out = np.empty((points.shape[0], 3))
    for a in range(3):
        u = points[:, (a + 1) % 3] - points[:, a]
        v = points[:, (a + 2) % 3] - points[:, a]
        cross = np.abs(u[:, 0] * v[:, 1] - u[:, 1] * v[:, 0])
        dot = u[:, 0] * v[:, 0] + u[:, 1] * v[:, 1]
        out[:, a] = np.sin(np.arctan2(cross, dot))
    return out


def sample_hyperedges(
    vertices: VertexSet,
    order: int,
    max_edges_per_vertex: int,
    geom_scale_sq: float,
    rng: np.random.Generator,
    rejection_factor: int = 20,
    angle_tol: float = 1e-6,
) -> Hypergraph:
    """Confidence-aware hyperedge sampling.

    For each vertex ``v`` (ascending id), up to ``eta(v) = round(gamma_hat(v)
    * max_edges_per_vertex)`` hyperedges are formed by drawing ``order-1``
    companions uniformly from the whole vertex set.  Draws are rejected when
    companions repeat, any two members share a target or candidate part, either
    side's triangle is degenerate (order 3), or the sorted tuple was stored
    already.  At most ``rejection_factor * eta`` draws are spent per vertex.

    Order 1 yields no hyperedges; the tracker then runs on association
    confidence alone.
    """
    n = len(vertices)
    k = order
    eta = np.array(
        [round_half_up(float(g) * max_edges_per_vertex) for g in vertices.gamma_hat], dtype=np.int64
    )
    counts = np.zeros(n, dtype=np.int64)
    if k == 1 or n < k:
        return Hypergraph(vertices, k, np.zeros((0, max(k, 1)), np.int64), np.zeros(0), counts, eta)

    tgt_key = vertices.tgt_key
    cand_key = vertices.cand_key
    seen: set[tuple[int, ...]] = set()
    rows: list[tuple[int, ...]] = []

    def valid_rows(v: int, draws: np.ndarray) -> np.ndarray:
        ok = np.all(draws != v, axis=1)
        for c in range(k - 1):
            ok &= tgt_key[draws[:, c]] != tgt_key[v]
            ok &= cand_key[draws[:, c]] != cand_key[v]
        if k == 3:
            ok &= draws[:, 0] != draws[:, 1]
            ok &= tgt_key[draws[:, 0]] != tgt_key[draws[:, 1]]
            ok &= cand_key[draws[:, 0]] != cand_key[draws[:, 1]]
            idx = np.where(ok)[0]
            if idx.size:
                tri = np.empty((idx.size, 3), dtype=np.int64)
                tri[:, 0] = v
                tri[:, 1:] = draws[idx]
                ok_tri = ~_batch_degenerate(vertices.tgt_xy[tri], angle_tol)
                ok_tri &= ~_batch_degenerate(vertices.cand_xy[tri], angle_tol)
                sub = np.zeros(ok.shape, dtype=bool)
                sub[idx[ok_tri]] = True
                return np.where(sub)[0]
        return np.where(ok)[0]

    for v in range(n):
        budget = int(eta[v])
        if budget <= 0:
            continue
        accepted = 0
        remaining = rejection_factor * budget
        # draw in growing chunks: accepting the budget rarely needs the full
        # rejection allowance, and chunks keep the vectorized filters cheap
        chunk = min(2 * budget, remaining)
        while remaining > 0 and accepted < budget:
            draws = rng.integers(0, n, size=(chunk, k - 1))
            remaining -= chunk
            for row in valid_rows(v, draws):
                tup = tuple(sorted((v, *draws[row].tolist())))
                if tup in seen:
                    continue
                seen.add(tup)
                rows.append(tup)
                accepted += 1
                if accepted >= budget:
                    break
            chunk = min(max(2 * chunk, 64), remaining)
        counts[v] = accepted

    if not rows:
        return Hypergraph(vertices, k, np.zeros((0, k), np.int64), np.zeros(0), counts, eta)

    edges = np.array(rows, dtype=np.int64)
    if k == 2:
        dp = vertices.tgt_xy[edges[:, 1]] - vertices.tgt_xy[edges[:, 0]]
        dq = vertices.cand_xy[edges[:, 1]] - vertices.cand_xy[edges[:, 0]]
        diff = dp - dq
        xi = np.exp(-np.hypot(diff[:, 0], diff[:, 1]) / geom_scale_sq)
    else:
        sin_p = _batch_sin_angles(vertices.tgt_xy[edges])
        sin_q = _batch_sin_angles(vertices.cand_xy[edges])
        xi = np.exp(-np.abs(sin_p - sin_q).sum(axis=1) / geom_scale_sq)
    return Hypergraph(vertices, k, edges, xi, counts, eta)
