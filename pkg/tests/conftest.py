"""Shared builders for synthetic parts, vertex sets, and hypergraphs."""

from __future__ import annotations

import numpy as np
import pytest

from hypertrack.correspondence import Vertex, VertexSet
from hypertrack.hypergraph import Hypergraph
from hypertrack.parts import Part, SearchArea, TargetPart


def normalized_feature(raw) -> np.ndarray:
    vec = np.clip(np.asarray(raw, dtype=np.float64), 1e-12, None)
    return vec / vec.sum()


def make_part(pid: int, center=(0.0, 0.0), area: float = 100.0, feature=None, fg=None, dim: int = 4) -> Part:
    if feature is None:
        feature = np.full(dim, 1.0 / dim)
    return Part(id=pid, center=center, area=area, feature=normalized_feature(feature), fg_prob=fg)


def make_target(uid: int, center=(0.0, 0.0), feature=None, dim: int = 4) -> TargetPart:
    part = make_part(uid, center=center, feature=feature, dim=dim)
    return TargetPart(uid=uid, part=part, last_seen_frame=0, last_center=center, miss_count=0)


def make_vertex_set(
    gamma,
    tgt_xy=None,
    cand_xy=None,
    tgt_keys=None,
    cand_keys=None,
) -> VertexSet:
    """Vertex set from raw arrays; default keys make all vertices non-conflicting."""
    gamma = np.asarray(gamma, dtype=np.float64)
    n = gamma.size
    tgt_keys = list(range(n)) if tgt_keys is None else list(tgt_keys)
    cand_keys = list(range(n)) if cand_keys is None else list(cand_keys)
    if tgt_xy is None:
        rng = np.random.default_rng(7)
        tgt_xy = rng.uniform(0, 100, size=(n, 2))
    if cand_xy is None:
        cand_xy = np.asarray(tgt_xy) + 1.0
    gmax = float(gamma.max()) if n and float(gamma.max()) > 0 else 1.0
    vertices = [
        Vertex(id=i, target_part_id=tgt_keys[i], candidate_part_id=cand_keys[i], gamma=float(gamma[i]), gamma_hat=float(gamma[i]) / gmax)
        for i in range(n)
    ]
    return VertexSet(vertices, np.asarray(tgt_xy, dtype=np.float64), np.asarray(cand_xy, dtype=np.float64))


def make_graph(gamma, edges=(), xi=(), order: int = 3, **vset_kwargs) -> Hypergraph:
    """Hypergraph over a synthetic vertex set; edges given as sorted tuples."""
    vset = make_vertex_set(gamma, **vset_kwargs)
    k = max(order, 2)
    edges_arr = np.array(sorted(tuple(sorted(e)) for e in edges), dtype=np.int64).reshape(-1, k)
    xi_arr = np.asarray(xi, dtype=np.float64).reshape(-1)
    if order == 1:
        edges_arr = np.zeros((0, 1), np.int64)
        xi_arr = np.zeros(0)
    return Hypergraph(vset, order, edges_arr, xi_arr)


def random_graph(rng: np.random.Generator, n: int, n_edges: int, order: int = 3) -> Hypergraph:
    """Random non-conflicting instance for optimizer tests."""
    gamma = rng.uniform(0.05, 1.0, size=n)
    edges = set()
    while len(edges) < n_edges:
        pick = tuple(sorted(rng.choice(n, size=order, replace=False).tolist()))
        edges.add(pick)
    edges = sorted(edges)
    xi = rng.uniform(0.05, 1.0, size=len(edges))
    return make_graph(gamma, edges, xi, order=order)


def planted_clique_graph(rng: np.random.Generator, n_total: int = 12, clique_size: int = 4):
    """A strong 4-clique of unit-confidence vertices among weak distractors.

    Returns (graph, clique_ids).  Clique vertices carry gamma 1 and all four
    interior triples at xi 1; distractors have gamma around a tenth of that
    and no hyperedges.
    """
    ids = rng.permutation(n_total)[:clique_size]
    clique = sorted(int(v) for v in ids)
    gamma = rng.uniform(0.02, 0.1, size=n_total)
    gamma[clique] = 1.0
    from itertools import combinations

    edges = [tuple(c) for c in combinations(clique, 3)]
    xi = np.ones(len(edges))
    return make_graph(gamma, edges, xi, order=3), clique


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
