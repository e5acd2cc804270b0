"""Compiled inner loops for the pairwise coordinate ascent.

The kernels mirror ``mode_seeking``'s reference implementation exactly: same
pair selection, same restricted-quadratic maximization, same stopping rule.
They differ only in maintaining the gradient incrementally: an update changes
two coordinates, so only products of hyperedges incident to them move, and
each moves by a closed-form delta.  ``ascend_many`` runs independent starts
in parallel; every start writes its own row, so the merged result does not
depend on thread scheduling.  Falls back to the pure-NumPy path when numba
is unavailable.
"""

from __future__ import annotations

import numpy as np

try:
    from numba import njit, prange

    NUMBA_AVAILABLE = True
except ImportError:  # pragma: no cover - exercised only without numba
    NUMBA_AVAILABLE = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn

        if args and callable(args[0]):
            return args[0]
        return wrap

    prange = range

# keep in sync with mode_seeking.CAP_EPS / FLOOR_EPS
_CAP_EPS = 1e-12
_FLOOR_EPS = 1e-15


@njit(cache=True)
def _init_gradient(x, gamma, edges, xi, assoc_w, geom_w, g):
    n = x.shape[0]
    m = xi.shape[0]
    k = edges.shape[1]
    for v in range(n):
        g[v] = assoc_w * gamma[v]
    for e in range(m):
        for p in range(k):
            prod = xi[e]
            for p2 in range(k):
                if p2 != p:
                    prod *= x[edges[e, p2]]
            g[edges[e, p]] += geom_w * prod


@njit(cache=True)
def _ascend_core(x, g, gamma, edges, xi, inc_indptr, inc_edges, assoc_w, geom_w, mu, tol, max_updates):
    n = x.shape[0]
    k = edges.shape[1]
    n_updates = 0

    while n_updates < max_updates:
        i = -1
        gi = -1e300
        for v in range(n):
            if x[v] < mu - _CAP_EPS and g[v] > gi:
                gi = g[v]
                i = v
        j = -1
        gj = 1e300
        for v in range(n):
            if v != i and x[v] > _FLOOR_EPS and g[v] < gj:
                gj = g[v]
                j = v
        if i < 0 or j < 0:
            break

        c = x[i] + x[j]
        lo = c - mu
        if lo < 0.0:
            lo = 0.0
        hi = c if c < mu else mu

        # quadratic coefficient from hyperedges containing both coordinates
        b = 0.0
        for t in range(inc_indptr[i], inc_indptr[i + 1]):
            e = inc_edges[t]
            has_j = False
            for p in range(k):
                if edges[e, p] == j:
                    has_j = True
                    break
            if has_j:
                prod = xi[e]
                for p in range(k):
                    w = edges[e, p]
                    if w != i and w != j:
                        prod *= x[w]
                b += geom_w * prod

        x_i0 = x[i]
        x_j0 = x[j]
        beta = g[i] - g[j] + 2.0 * b * x_i0

        best_t = lo
        best_gain = -b * (lo * lo - x_i0 * x_i0) + beta * (lo - x_i0)
        gain_hi = -b * (hi * hi - x_i0 * x_i0) + beta * (hi - x_i0)
        if gain_hi > best_gain:
            best_gain = gain_hi
            best_t = hi
        if b > 0.0:
            ts = beta / (2.0 * b)
            if lo < ts < hi:
                gain_s = -b * (ts * ts - x_i0 * x_i0) + beta * (ts - x_i0)
                if gain_s > best_gain:
                    best_gain = gain_s
                    best_t = ts
        if best_gain < tol:
            break

        x_i1 = best_t
        x_j1 = c - best_t
        dxi = x_i1 - x_i0
        dxj = x_j1 - x_j0
        pij_delta = x_i1 * x_j1 - x_i0 * x_j0

        # gradient deltas from edges incident to i (j-containing handled here)
        for t in range(inc_indptr[i], inc_indptr[i + 1]):
            e = inc_edges[t]
            has_j = False
            for p in range(k):
                if edges[e, p] == j:
                    has_j = True
                    break
            if has_j:
                prod_rest = xi[e]
                for p in range(k):
                    u = edges[e, p]
                    if u != i and u != j:
                        prod_rest *= x[u]
                g[i] += geom_w * prod_rest * dxj
                g[j] += geom_w * prod_rest * dxi
                for p in range(k):
                    v = edges[e, p]
                    if v != i and v != j:
                        prod_v = xi[e]
                        for p2 in range(k):
                            u = edges[e, p2]
                            if u != i and u != j and u != v:
                                prod_v *= x[u]
                        g[v] += geom_w * prod_v * pij_delta
            else:
                for p in range(k):
                    v = edges[e, p]
                    if v != i:
                        prod_v = xi[e]
                        for p2 in range(k):
                            u = edges[e, p2]
                            if u != i and u != v:
                                prod_v *= x[u]
                        g[v] += geom_w * prod_v * dxi

        # edges incident to j only
        for t in range(inc_indptr[j], inc_indptr[j + 1]):
            e = inc_edges[t]
            has_i = False
            for p in range(k):
                if edges[e, p] == i:
                    has_i = True
                    break
            if has_i:
                continue
            for p in range(k):
                v = edges[e, p]
                if v != j:
                    prod_v = xi[e]
                    for p2 in range(k):
                        u = edges[e, p2]
                        if u != j and u != v:
                            prod_v *= x[u]
                    g[v] += geom_w * prod_v * dxj

        x[i] = x_i1
        x[j] = x_j1
        n_updates += 1

    return n_updates


@njit(cache=True)
def ascend_kernel(x, gamma, edges, xi, inc_indptr, inc_edges, assoc_w, geom_w, mu, tol, max_updates):
    """Run one ascent in place; returns the update count."""
    g = np.empty(x.shape[0], dtype=np.float64)
    _init_gradient(x, gamma, edges, xi, assoc_w, geom_w, g)
    return _ascend_core(x, g, gamma, edges, xi, inc_indptr, inc_edges, assoc_w, geom_w, mu, tol, max_updates)


@njit(cache=True, parallel=True)
def ascend_many(x0s, gamma, edges, xi, inc_indptr, inc_edges, assoc_w, geom_w, mu, tol, max_updates, out_updates):
    """Independent ascents over the rows of ``x0s`` (modified in place)."""
    n_starts = x0s.shape[0]
    for s in prange(n_starts):
        x = x0s[s]
        g = np.empty(x.shape[0], dtype=np.float64)
        _init_gradient(x, gamma, edges, xi, assoc_w, geom_w, g)
        out_updates[s] = _ascend_core(
            x, g, gamma, edges, xi, inc_indptr, inc_edges, assoc_w, geom_w, mu, tol, max_updates
        )
