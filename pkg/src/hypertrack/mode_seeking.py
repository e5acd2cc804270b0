"""Mode seeking on the sampled hypergraph via pairwise coordinate ascent.

The relaxed problem maximizes

    assoc_weight * sum_v gamma_v x_v  +  geom_weight * sum_e xi_e prod_{v in e} x_v

over the capped simplex ``sum x = 1, 0 <= x_v <= mass_cap``.  The cap forces
every mode to contain at least ``1/mass_cap`` vertices, which prevents the
degenerate single-correspondence solution.  Each update redistributes the
joint mass of two coordinates: with the rest fixed, the restricted objective
is a concave quadratic (every hyperedge contains a coordinate at most once),
so the exact one-dimensional maximizer is available in closed form.

Ascents are started from every vertex; an ascent is a pure function of the
graph, so results are deterministic and starts may run in any order.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import _fast
from .config import TrackerConfig
from .hypergraph import Hypergraph, mode_confidence


@dataclass(frozen=True)
class ModeState:
    """Converged probability vector with its thresholded support."""

    x: np.ndarray
    support: frozenset[int]
    objective: float
    n_updates: int


@dataclass(frozen=True)
class Mode:
    """Support of a converged ascent, scored on the discrete vertex set."""

    vertex_ids: frozenset[int]
    omega: float
    start_vertex: int
    n_updates: int = 0


def objective(x: np.ndarray, graph: Hypergraph, assoc_weight: float, geom_weight: float) -> float:
    """Relaxed mode objective at ``x``."""
    value = assoc_weight * float(graph.gamma @ x)
    if graph.n_edges:
        value += geom_weight * float(graph.xi @ np.prod(x[graph.edges], axis=1))
    return value


def gradient(x: np.ndarray, graph: Hypergraph, assoc_weight: float, geom_weight: float) -> np.ndarray:
    """Partial derivatives of the objective at ``x``."""
    g = assoc_weight * graph.gamma.copy()
    if graph.n_edges:
        cols = x[graph.edges]
        for p in range(graph.edges.shape[1]):
            prod = graph.xi.copy()
            for p2 in range(graph.edges.shape[1]):
                if p2 != p:
                    prod *= cols[:, p2]
            np.add.at(g, graph.edges[:, p], geom_weight * prod)
    return g


def _partial_derivative(x: np.ndarray, graph: Hypergraph, v: int, assoc_weight: float, geom_weight: float) -> float:
    g = assoc_weight * float(graph.gamma[v])
    eids = graph.incident_edges(v)
    if eids.size:
        rows = graph.edges[eids]
        prods = graph.xi[eids].copy()
        for p in range(rows.shape[1]):
            col = rows[:, p]
            prods *= np.where(col == v, 1.0, x[col])
        g += geom_weight * float(prods.sum())
    return g


def _quad_coefficient(x: np.ndarray, graph: Hypergraph, i: int, j: int, geom_weight: float) -> float:
    """Coefficient of x_i * x_j in the restricted objective."""
    eids = graph.incident_edges(i)
    if eids.size == 0:
        return 0.0
    rows = graph.edges[eids]
    both = (rows == j).any(axis=1)
    if not both.any():
        return 0.0
    rows = rows[both]
    prods = graph.xi[eids[both]].copy()
    for p in range(rows.shape[1]):
        col = rows[:, p]
        prods *= np.where((col == i) | (col == j), 1.0, x[col])
    return geom_weight * float(prods.sum())


def _pairwise_step(
    x: np.ndarray, i: int, j: int, graph: Hypergraph, assoc_weight: float, geom_weight: float, mass_cap: float
) -> tuple[float, float]:
    """Exact maximizer of the restricted objective and its gain.

    With ``c = x_i + x_j`` fixed, the objective restricted to ``t = x_i`` is
    ``-b t^2 + beta t + const`` with ``b >= 0``; the maximum over
    ``[max(0, c - mu), min(c, mu)]`` is at an endpoint or the stationary point.
    """
    if i == j:
        raise ValueError("pairwise update requires two distinct coordinates")
    c = float(x[i] + x[j])
    lo = max(0.0, c - mass_cap)
    hi = min(c, mass_cap)
    b = _quad_coefficient(x, graph, i, j, geom_weight)
    gi = _partial_derivative(x, graph, i, assoc_weight, geom_weight)
    gj = _partial_derivative(x, graph, j, assoc_weight, geom_weight)
    x_i0 = float(x[i])
    beta = gi - gj + 2.0 * b * x_i0

    def gain(t: float) -> float:
        return -b * (t * t - x_i0 * x_i0) + beta * (t - x_i0)

    best_t, best_gain = lo, gain(lo)
    if gain(hi) > best_gain:
        best_t, best_gain = hi, gain(hi)
    if b > 0.0:
        ts = beta / (2.0 * b)
        if lo < ts < hi:
            if gain(ts) > best_gain:
                best_t, best_gain = ts, gain(ts)
    return best_t, best_gain


def pairwise_update(
    x: np.ndarray, i: int, j: int, graph: Hypergraph, assoc_weight: float, geom_weight: float, mass_cap: float
) -> np.ndarray:
    """Optimally redistribute the joint mass of coordinates ``i`` and ``j``.

    Returns a new vector; the objective never decreases and both the simplex
    sum and the per-coordinate cap are preserved.
    """
    c = float(x[i] + x[j])
    t, _ = _pairwise_step(x, i, j, graph, assoc_weight, geom_weight, mass_cap)
    out = np.array(x, dtype=np.float64, copy=True)
    out[i] = t
    out[j] = c - t
    return out


# Selection eligibility tolerances.  A coordinate a rounding error away from
# the cap cannot absorb meaningful mass but would hog the argmax slot forever;
# likewise sub-epsilon residues are not worth draining.  Both sit far below
# the support threshold, so they never leak into reported modes.
CAP_EPS = 1e-12
FLOOR_EPS = 1e-15


def select_pair(x: np.ndarray, g: np.ndarray, mass_cap: float) -> tuple[int, int] | None:
    """Extreme-gradient pair: fill the steepest coordinate below the cap from
    the flattest positive coordinate.  ``None`` when no admissible pair exists."""
    below = x < mass_cap - CAP_EPS
    if not below.any():
        return None
    i = int(np.argmax(np.where(below, g, -np.inf)))
    positive = x > FLOOR_EPS
    positive[i] = False
    if not positive.any():
        return None
    j = int(np.argmin(np.where(positive, g, np.inf)))
    return i, j


def ascend(
    graph: Hypergraph,
    x0: np.ndarray,
    assoc_weight: float,
    geom_weight: float,
    mass_cap: float,
    tol: float,
    max_updates: int,
    support_threshold: float,
    use_fast: bool | None = None,
    record: bool = False,
) -> tuple[ModeState, list[np.ndarray]]:
    """Run the ascent to convergence from ``x0``.

    ``record=True`` forces the reference path and returns the vector after
    every single update (used by the optimizer correctness checks).
    """
    fast = _fast.NUMBA_AVAILABLE if use_fast is None else use_fast
    if record:
        fast = False
    x = np.array(x0, dtype=np.float64, copy=True)
    trace: list[np.ndarray] = []

    if fast:
        n_updates = int(
            _fast.ascend_kernel(
                x,
                graph.gamma,
                graph.edges,
                graph.xi,
                graph.inc_indptr,
                graph.inc_edges,
                float(assoc_weight),
                float(geom_weight),
                float(mass_cap),
                float(tol),
                int(max_updates),
            )
        )
    else:
        n_updates = 0
        while n_updates < max_updates:
            g = gradient(x, graph, assoc_weight, geom_weight)
            pair = select_pair(x, g, mass_cap)
            if pair is None:
                break
            i, j = pair
            c = float(x[i] + x[j])
            t, gain = _pairwise_step(x, i, j, graph, assoc_weight, geom_weight, mass_cap)
            if gain < tol:
                break
            x[i] = t
            x[j] = c - t
            n_updates += 1
            if record:
                trace.append(x.copy())

    support = frozenset(int(v) for v in np.nonzero(x > support_threshold)[0])
    state = ModeState(
        x=x, support=support, objective=objective(x, graph, assoc_weight, geom_weight), n_updates=n_updates
    )
    return state, trace


def _initial_vector(graph: Hypergraph, start_vertex: int, mass_cap: float) -> np.ndarray | None:
    """Start mass: cap on the start vertex, rest spread over its hyperedge
    neighborhood (all other vertices when the neighborhood is too small for
    the cap to hold)."""
    n = graph.n_vertices
    min_support = math.ceil(1.0 / mass_cap - 1e-9)
    if n < min_support:
        return None
    spread_min = math.ceil((1.0 - mass_cap) / mass_cap - 1e-9)
    neigh = graph.neighbors(start_vertex)
    if neigh.size >= spread_min:
        spread = neigh
    else:
        spread = np.array([v for v in range(n) if v != start_vertex], dtype=np.int64)
        if spread.size < spread_min:
            return None
    x0 = np.zeros(n)
    x0[start_vertex] = mass_cap
    x0[spread] = (1.0 - mass_cap) / spread.size
    return x0


def seek_mode(
    graph: Hypergraph, start_vertex: int, config: TrackerConfig, use_fast: bool | None = None
) -> Mode | None:
    """Ascend from one start vertex and report the converged support."""
    x0 = _initial_vector(graph, start_vertex, config.mass_cap)
    if x0 is None:
        return None
    state, _ = ascend(
        graph,
        x0,
        config.assoc_weight,
        config.geom_weight,
        config.mass_cap,
        config.convergence_tol,
        config.update_budget_factor * graph.n_vertices,
        config.support_threshold,
        use_fast=use_fast,
    )
    if not state.support:
        return None
    omega = mode_confidence(state.support, graph, config.assoc_weight, config.geom_weight)
    return Mode(vertex_ids=state.support, omega=omega, start_vertex=start_vertex, n_updates=state.n_updates)


def seek_all_modes(graph: Hypergraph, config: TrackerConfig, use_fast: bool | None = None) -> list[Mode]:
    """One independent ascent per vertex; deduplicate identical supports and
    sort by confidence (descending), then start vertex.

    With numba available the ascents run batched (and in parallel); each
    start writes its own row, so the merged output is identical to the
    sequential loop.
    """
    fast = _fast.NUMBA_AVAILABLE if use_fast is None else use_fast
    n = graph.n_vertices
    found: dict[frozenset[int], Mode] = {}
    if not fast:
        for start in range(n):
            mode = seek_mode(graph, start, config, use_fast=False)
            if mode is None:
                continue
            if mode.vertex_ids not in found:
                found[mode.vertex_ids] = mode
        return sorted(found.values(), key=lambda m: (-m.omega, m.start_vertex))

    starts = []
    rows = []
    for start in range(n):
        x0 = _initial_vector(graph, start, config.mass_cap)
        if x0 is not None:
            starts.append(start)
            rows.append(x0)
    if not starts:
        return []
    x0s = np.ascontiguousarray(np.stack(rows))
    out_updates = np.zeros(len(starts), dtype=np.int64)
    _fast.ascend_many(
        x0s,
        graph.gamma,
        graph.edges,
        graph.xi,
        graph.inc_indptr,
        graph.inc_edges,
        float(config.assoc_weight),
        float(config.geom_weight),
        float(config.mass_cap),
        float(config.convergence_tol),
        int(config.update_budget_factor * n),
        out_updates,
    )
    for row, start, updates in zip(x0s, starts, out_updates):
        support = frozenset(int(v) for v in np.nonzero(row > config.support_threshold)[0])
        if not support or support in found:
            continue
        omega = mode_confidence(support, graph, config.assoc_weight, config.geom_weight)
        found[support] = Mode(vertex_ids=support, omega=omega, start_vertex=start, n_updates=int(updates))
    return sorted(found.values(), key=lambda m: (-m.omega, m.start_vertex))


def brute_force_oracle(
    graph: Hypergraph,
    support_size_range: tuple[int, int],
    mass_cap: float,
    assoc_weight: float,
    geom_weight: float,
) -> tuple[frozenset[int], float]:
    """Exhaustive search over cap-uniform supports; only valid on tiny graphs.

    Enumerates every support whose size ``m`` satisfies ``m * mass_cap == 1``
    (the only sizes a cap-uniform vector can realize) within the given range
    and returns the objective maximizer.  Ties keep the lexicographically
    smallest support.
    """
    n = graph.n_vertices
    if n > 14:
        raise ValueError(f"oracle refused: {n} vertices exceeds the exhaustive limit of 14")
    sizes = [m for m in range(support_size_range[0], support_size_range[1] + 1) if abs(m * mass_cap - 1.0) <= 1e-9]
    if not sizes:
        raise ValueError("no support size in range is compatible with the mass cap")
    best_support: tuple[int, ...] | None = None
    best_value = -math.inf
    for m in sizes:
        for combo in itertools.combinations(range(n), m):
            x = np.zeros(n)
            x[list(combo)] = mass_cap
            value = objective(x, graph, assoc_weight, geom_weight)
            if value > best_value:
                best_value = value
                best_support = combo
    assert best_support is not None
    return frozenset(best_support), best_value
