"""Pairwise coordinate ascent: contracts, oracles, and both execution paths."""

import numpy as np
import pytest

from hypertrack.config import TrackerConfig
from hypertrack.mode_seeking import (
    ascend,
    brute_force_oracle,
    gradient,
    objective,
    pairwise_update,
    seek_all_modes,
    seek_mode,
    select_pair,
)

from conftest import make_graph, planted_clique_graph, random_graph

W1, W2 = 10.0, 15.0


def test_objective_indicator_support_no_edges():
    gamma = [0.9, 0.8, 0.7, 0.6, 0.5]
    graph = make_graph(gamma, order=1)
    x = np.array([0.25, 0.25, 0.25, 0.25, 0.0])
    assert objective(x, graph, W1, W2) == pytest.approx(W1 * 0.25 * (0.9 + 0.8 + 0.7 + 0.6))


def test_objective_single_hyperedge_product():
    graph = make_graph([1.0, 1.0, 1.0, 1.0], edges=[(0, 1, 2)], xi=[0.8])
    x = np.full(4, 0.25)
    expected = W1 * 0.25 * 4 + W2 * 0.8 * 0.25**3
    assert objective(x, graph, W1, W2) == pytest.approx(expected)


def test_objective_uniform_mass_decays_cubically():
    # same single hyperedge, uniform x over N: edge term scales as N^-3
    vals = {}
    for n in (8, 16):
        graph = make_graph([0.0] * n, edges=[(0, 1, 2)], xi=[1.0])
        x = np.full(n, 1.0 / n)
        vals[n] = objective(x, graph, 0.0, 1.0)
    assert vals[8] / vals[16] == pytest.approx(8.0, rel=1e-12)


def test_pairwise_update_linear_case_moves_mass_to_larger_gamma():
    graph = make_graph([0.9, 0.2, 0.5, 0.5], order=1)
    x = np.array([0.1, 0.3, 0.3, 0.3])
    out = pairwise_update(x, 0, 1, graph, W1, W2, mass_cap=0.25)
    assert out[0] == pytest.approx(0.25)  # filled to the cap
    assert out[1] == pytest.approx(0.15)
    assert out.sum() == pytest.approx(1.0, abs=1e-12)


def test_pairwise_update_shared_edge_with_zero_third_coordinate():
    graph = make_graph([0.9, 0.2, 0.5, 0.5], edges=[(0, 1, 2)], xi=[1.0])
    x = np.array([0.1, 0.3, 0.0, 0.6])
    out = pairwise_update(x, 0, 1, graph, W1, W2, mass_cap=0.6)
    # third coordinate zero kills the quadratic term: behaves like the linear case
    assert out[0] == pytest.approx(0.4)
    assert out[1] == pytest.approx(0.0)


def test_pairwise_update_matches_grid_search_oracle():
    graph = make_graph([0.6, 0.5, 0.9, 0.3], edges=[(0, 1, 2)], xi=[0.9])
    x = np.array([0.20, 0.30, 0.35, 0.15])
    mass_cap = 0.4
    c = x[0] + x[1]
    lo, hi = max(0.0, c - mass_cap), min(c, mass_cap)
    ts = np.linspace(lo, hi, int((hi - lo) / 1e-4) + 1)
    best_t, best_val = None, -np.inf
    for t in ts:
        trial = x.copy()
        trial[0], trial[1] = t, c - t
        val = objective(trial, graph, W1, W2)
        if val > best_val:
            best_t, best_val = t, val
    out = pairwise_update(x, 0, 1, graph, W1, W2, mass_cap)
    assert out[0] == pytest.approx(best_t, abs=2e-4)
    assert objective(out, graph, W1, W2) >= best_val - 1e-9


def _assert_valid_trajectory(graph, x0, mass_cap):
    state, trace = ascend(graph, x0, W1, W2, mass_cap, 1e-8, 200 * graph.n_vertices, 1e-6, record=True)
    prev_obj = objective(x0, graph, W1, W2)
    for snapshot in trace:
        assert abs(snapshot.sum() - 1.0) <= 1e-12
        assert snapshot.min() >= -1e-12
        assert snapshot.max() <= mass_cap + 1e-12
        obj = objective(snapshot, graph, W1, W2)
        assert obj >= prev_obj - 1e-12
        prev_obj = obj
    return state


def test_every_update_preserves_simplex_and_monotonicity(rng):
    for _ in range(20):
        n = int(rng.integers(5, 13))
        graph = random_graph(rng, n, n_edges=int(rng.integers(1, 10)))
        x0 = np.zeros(n)
        x0[:4] = 0.25
        state = _assert_valid_trajectory(graph, x0, mass_cap=0.25)
        assert len(state.support) >= 4  # cap forces at least 1/mu members


def test_seek_mode_recovers_planted_clique(rng):
    graph, clique = planted_clique_graph(rng, n_total=12)
    cfg = TrackerConfig(rng_seed=0)
    mode = seek_mode(graph, clique[0], cfg)
    assert mode is not None
    assert sorted(mode.vertex_ids) == clique
    oracle_support, _ = brute_force_oracle(graph, (4, 4), 0.25, W1, W2)
    assert mode.vertex_ids == oracle_support


def test_seek_mode_k1_returns_top_gamma_vertices():
    gamma = [0.9, 0.05, 0.8, 0.3, 0.7, 0.6, 0.2, 0.1]
    graph = make_graph(gamma, order=1)
    cfg = TrackerConfig(order=3)  # mass_cap 0.25 -> support of 4
    mode = seek_mode(graph, 1, cfg)
    assert mode is not None
    assert sorted(mode.vertex_ids) == [0, 2, 4, 5]


def test_reduction_consistency_zero_geometric_weight(rng):
    graph = random_graph(rng, 10, n_edges=8)
    top4 = set(np.argsort(-graph.gamma)[:4].tolist())
    for start in range(10):
        x0 = np.zeros(10)
        x0[start] = 0.25
        rest = [v for v in range(10) if v != start]
        x0[rest] = 0.75 / len(rest)
        state, _ = ascend(graph, x0, W1, 0.0, 0.25, 1e-8, 2000, 1e-6)
        assert state.support == frozenset(top4)


def test_seek_all_modes_single_basin_dedup(rng):
    graph, clique = planted_clique_graph(rng, n_total=10)
    cfg = TrackerConfig()
    modes = seek_all_modes(graph, cfg)
    assert modes, "expected at least one mode"
    assert sorted(modes[0].vertex_ids) == clique
    supports = [m.vertex_ids for m in modes]
    assert len(set(supports)) == len(supports)  # dedup removed repeats
    omegas = [m.omega for m in modes]
    assert omegas == sorted(omegas, reverse=True)


def test_two_disjoint_planted_cliques_found():
    gamma = np.full(12, 0.05)
    gamma[[0, 1, 2, 3]] = 1.0
    gamma[[6, 7, 8, 9]] = 0.95
    from itertools import combinations

    edges, xi = [], []
    for group in ([0, 1, 2, 3], [6, 7, 8, 9]):
        for combo in combinations(group, 3):
            edges.append(combo)
            xi.append(1.0)
    graph = make_graph(gamma.tolist(), edges=edges, xi=xi)
    modes = seek_all_modes(graph, TrackerConfig())
    supports = {tuple(sorted(m.vertex_ids)) for m in modes}
    assert (0, 1, 2, 3) in supports
    assert (6, 7, 8, 9) in supports


def test_seek_all_modes_deterministic(rng):
    graph = random_graph(rng, 12, n_edges=20)
    cfg = TrackerConfig()
    a = seek_all_modes(graph, cfg)
    b = seek_all_modes(graph, cfg)
    assert [(sorted(m.vertex_ids), m.omega, m.start_vertex) for m in a] == [
        (sorted(m.vertex_ids), m.omega, m.start_vertex) for m in b
    ]


def test_oracle_only_candidate_size():
    graph = make_graph([0.5, 0.6, 0.7, 0.8], order=1)
    support, value = brute_force_oracle(graph, (1, 8), 0.25, W1, W2)
    assert support == frozenset({0, 1, 2, 3})
    assert value == pytest.approx(W1 * 0.25 * (0.5 + 0.6 + 0.7 + 0.8))


def test_oracle_refuses_large_graphs(rng):
    graph = random_graph(rng, 15, n_edges=3)
    with pytest.raises(ValueError, match="refused"):
        brute_force_oracle(graph, (4, 4), 0.25, W1, W2)


def test_oracle_never_below_converged_uniform_support(rng):
    # when ascent lands on a cap-uniform support, the oracle dominates it
    for _ in range(10):
        graph = random_graph(rng, 10, n_edges=12)
        cfg = TrackerConfig()
        modes = seek_all_modes(graph, cfg)
        oracle_support, oracle_val = brute_force_oracle(graph, (4, 4), 0.25, W1, W2)
        for mode in modes:
            if len(mode.vertex_ids) != 4:
                continue
            x = np.zeros(10)
            x[sorted(mode.vertex_ids)] = 0.25
            assert oracle_val >= objective(x, graph, W1, W2) - 1e-6


def test_fast_and_reference_paths_agree(rng):
    import hypertrack._fast as fast

    if not fast.NUMBA_AVAILABLE:
        pytest.skip("numba not available")
    for _ in range(10):
        n = int(rng.integers(6, 14))
        graph = random_graph(rng, n, n_edges=int(rng.integers(2, 18)))
        start = int(rng.integers(0, n))
        cfg = TrackerConfig()
        slow = seek_mode(graph, start, cfg, use_fast=False)
        quick = seek_mode(graph, start, cfg, use_fast=True)
        assert slow is not None and quick is not None
        assert slow.vertex_ids == quick.vertex_ids
        assert slow.omega == pytest.approx(quick.omega, rel=1e-9)


def test_batched_starts_match_per_start_loop(rng):
    # seek_all_modes runs starts batched; it must agree with the one-at-a-time path
    for _ in range(5):
        n = int(rng.integers(6, 14))
        graph = random_graph(rng, n, n_edges=int(rng.integers(2, 15)))
        cfg = TrackerConfig()
        batched = seek_all_modes(graph, cfg)
        found = {}
        for start in range(n):
            mode = seek_mode(graph, start, cfg)
            if mode is not None and mode.vertex_ids not in found:
                found[mode.vertex_ids] = mode
        looped = sorted(found.values(), key=lambda m: (-m.omega, m.start_vertex))
        assert [(sorted(m.vertex_ids), m.start_vertex) for m in batched] == [
            (sorted(m.vertex_ids), m.start_vertex) for m in looped
        ]


def test_select_pair_skips_capped_and_empty_coordinates():
    graph = make_graph([0.9, 0.1, 0.5, 0.4], order=1)
    x = np.array([0.25, 0.25, 0.25, 0.25])
    g = gradient(x, graph, W1, W2)
    assert select_pair(x, g, 0.25) is None  # everybody at the cap
    x = np.array([0.25, 0.0, 0.5, 0.25])
    pair = select_pair(x, g, 0.5)
    assert pair is not None
    i, j = pair
    assert x[j] > 0.0 and x[i] < 0.5
