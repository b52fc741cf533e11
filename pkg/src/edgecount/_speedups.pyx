# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot loops: permutation resampling, layered Kruskal, bootstrap MC.

Mirrors ``edgecount._pure``.  Integer outputs are bit-identical across the
two backends; floating-point accumulators may differ at rounding-order
level (~1e-15 relative).
"""

import numpy as np

from libc.stdint cimport int64_t, uint8_t, uint64_t
from libc.math cimport fabs


# ---------------------------------------------------------------------------
# splitmix64 (see edgecount.rng for the python reference)

cdef inline uint64_t _sm_next(uint64_t* state) noexcept nogil:
    cdef uint64_t z
    state[0] = state[0] + <uint64_t>0x9E3779B97F4A7C15
    z = state[0]
    z = (z ^ (z >> 30)) * <uint64_t>0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * <uint64_t>0x94D049BB133111EB
    return z ^ (z >> 31)


cdef inline uint64_t _derive(uint64_t base, uint64_t index) noexcept nogil:
    cdef uint64_t state = base ^ index
    return _sm_next(&state)


cdef inline uint64_t _below(uint64_t* state, uint64_t bound) noexcept nogil:
    # unbiased bounded draw; rejection threshold = (2^64 - bound) % bound
    cdef uint64_t threshold = (<uint64_t>0 - bound) % bound
    cdef uint64_t x
    while True:
        x = _sm_next(state)
        if x >= threshold:
            return x % bound


cdef inline double _unit_double(uint64_t* state) noexcept nogil:
    return <double>(_sm_next(state) >> 11) * (1.0 / 9007199254740992.0)


# ---------------------------------------------------------------------------
# edge counting

def edge_counts_for_labels(const int64_t[::1] eu, const int64_t[::1] ev, const uint8_t[::1] in_x):
    """(R1, R2) for a single labeling; in_x[i] is 1 when node i is in sample X."""
    cdef Py_ssize_t n_edges = eu.shape[0]
    cdef Py_ssize_t e
    cdef int64_t r1 = 0, r2 = 0
    cdef uint8_t a, b
    with nogil:
        for e in range(n_edges):
            a = in_x[eu[e]]
            b = in_x[ev[e]]
            if a and b:
                r1 += 1
            elif (not a) and (not b):
                r2 += 1
    return int(r1), int(r2)


def perm_edge_counts(const int64_t[::1] eu, const int64_t[::1] ev, Py_ssize_t n_nodes,
                     Py_ssize_t m, Py_ssize_t n_draws, object seed):
    """(R1, R2) arrays over ``n_draws`` uniform m-subset label assignments.

    Draw ``b`` is a function of (seed, b) only: its stream seed is
    derive_seed(seed, b) and the m-subset comes from a partial Fisher-Yates
    shuffle of the identity permutation.
    """
    r1_arr = np.empty(n_draws, dtype=np.int64)
    r2_arr = np.empty(n_draws, dtype=np.int64)
    perm_arr = np.empty(n_nodes, dtype=np.int64)
    inx_arr = np.zeros(n_nodes, dtype=np.uint8)
    cdef int64_t[::1] r1 = r1_arr
    cdef int64_t[::1] r2 = r2_arr
    cdef int64_t[::1] perm = perm_arr
    cdef uint8_t[::1] in_x = inx_arr
    cdef uint64_t base = <uint64_t>(int(seed) & 0xFFFFFFFFFFFFFFFF)
    cdef uint64_t state
    cdef Py_ssize_t n_edges = eu.shape[0]
    cdef Py_ssize_t b, i, t, j, e
    cdef int64_t tmp, c1, c2
    cdef uint8_t xu, xv
    with nogil:
        for b in range(n_draws):
            state = _derive(base, <uint64_t>b)
            for i in range(n_nodes):
                perm[i] = i
            for t in range(m):
                j = t + <Py_ssize_t>_below(&state, <uint64_t>(n_nodes - t))
                tmp = perm[t]
                perm[t] = perm[j]
                perm[j] = tmp
                in_x[perm[t]] = 1
            c1 = 0
            c2 = 0
            for e in range(n_edges):
                xu = in_x[eu[e]]
                xv = in_x[ev[e]]
                if xu and xv:
                    c1 += 1
                elif (not xu) and (not xv):
                    c2 += 1
            r1[b] = c1
            r2[b] = c2
            for t in range(m):
                in_x[perm[t]] = 0
    return r1_arr, r2_arr


# ---------------------------------------------------------------------------
# layered Kruskal

cdef inline int64_t _find(int64_t* parent, int64_t x) noexcept nogil:
    cdef int64_t root = x, nxt
    while parent[root] != root:
        root = parent[root]
    while parent[x] != root:
        nxt = parent[x]
        parent[x] = root
        x = nxt
    return root


def kruskal_kmst(const int64_t[::1] order, const int64_t[::1] eu, const int64_t[::1] ev,
                 Py_ssize_t n_nodes, Py_ssize_t k):
    """Edge-disjoint spanning forests, layer by layer, over pre-sorted edges.

    ``order`` indexes the candidate edges from cheapest to costliest; each
    layer runs Kruskal over the edges not used by earlier layers.  A layer
    is a spanning tree (n_nodes - 1 edges) whenever the remaining graph is
    connected, and a maximal spanning forest otherwise.  Returns
    (out_u, out_v, layer_sizes) with layer-1 edges first.
    """
    cdef Py_ssize_t n_edges = eu.shape[0]
    out_u_arr = np.empty(k * (n_nodes - 1), dtype=np.int64)
    out_v_arr = np.empty(k * (n_nodes - 1), dtype=np.int64)
    sizes_arr = np.zeros(k, dtype=np.int64)
    used_arr = np.zeros(n_edges, dtype=np.uint8)
    parent_arr = np.empty(n_nodes, dtype=np.int64)
    rank_arr = np.empty(n_nodes, dtype=np.int64)
    cdef int64_t[::1] out_u = out_u_arr
    cdef int64_t[::1] out_v = out_v_arr
    cdef int64_t[::1] sizes = sizes_arr
    cdef uint8_t[::1] used = used_arr
    cdef int64_t[::1] parent = parent_arr
    cdef int64_t[::1] rank = rank_arr
    cdef Py_ssize_t layer, oi, pos = 0
    cdef int64_t e, ru, rv, added
    with nogil:
        for layer in range(k):
            for e in range(n_nodes):
                parent[e] = e
                rank[e] = 0
            added = 0
            for oi in range(n_edges):
                e = order[oi]
                if used[e]:
                    continue
                ru = _find(&parent[0], eu[e])
                rv = _find(&parent[0], ev[e])
                if ru == rv:
                    continue
                if rank[ru] < rank[rv]:
                    parent[ru] = rv
                elif rank[ru] > rank[rv]:
                    parent[rv] = ru
                else:
                    parent[rv] = ru
                    rank[ru] += 1
                used[e] = 1
                out_u[pos] = eu[e]
                out_v[pos] = ev[e]
                pos += 1
                added += 1
                if added == n_nodes - 1:
                    break
            sizes[layer] = added
            if added == 0:
                break  # every remaining layer would also be empty
    return out_u_arr[:pos], out_v_arr[:pos], sizes_arr


# ---------------------------------------------------------------------------
# Stein-bound Monte Carlo over bootstrap label assignments

def stein_mc(const int64_t[::1] eu, const int64_t[::1] ev,
             const int64_t[::1] indptr, const int64_t[::1] nbr,
             double b0, const double[::1] b, double p,
             Py_ssize_t n_samples, object seed):
    """Monte Carlo accumulators for the three Stein-bound terms.

    Per sample: draw g_i ~ Bernoulli(p) iid, set h_i = 1{g_i=1} - p, and with
    xi_e = b0 h(e+) h(e-), xi_i = b_i h_i, eta as the sums of xi over the
    dependency neighborhoods, evaluate

      T1 = | sum_i xi_i eta_i + sum_e xi_e eta_e - centering |,
      T2 = sum_i |xi_i| eta_i^2,    T3 = sum_e |xi_e| eta_e^2,

    where centering = pq sum_i b_i^2 + |G| b0^2 (pq)^2 is exact.  Also
    accumulates W = sum xi for the variance cross-check.

    Returns (t1_mean, t1_var, t2_mean, t3_mean, w_mean, w_var) with the
    variances being unbiased sample variances over the draws.
    """
    cdef Py_ssize_t n_nodes = b.shape[0]
    cdef Py_ssize_t n_edges = eu.shape[0]
    h_arr = np.empty(n_nodes, dtype=np.float64)
    s_arr = np.empty(n_nodes, dtype=np.float64)
    cdef double[::1] h = h_arr
    cdef double[::1] s_sum = s_arr
    cdef uint64_t base = <uint64_t>(int(seed) & 0xFFFFFFFFFFFFFFFF)
    cdef uint64_t state
    cdef double q = 1.0 - p, pq = p * (1.0 - p)
    cdef double centering = 0.0
    cdef Py_ssize_t i, e, smp, jj
    cdef double acc, hi, hx, hy, eta, xi
    cdef double t1, t2, t3, w_edges, w_nodes, w
    cdef double sum_t1 = 0.0, sumsq_t1 = 0.0
    cdef double sum_t2 = 0.0, sum_t3 = 0.0
    cdef double sum_w = 0.0, sumsq_w = 0.0
    with nogil:
        for i in range(n_nodes):
            centering += b[i] * b[i]
        centering = pq * centering + n_edges * b0 * b0 * pq * pq
        for smp in range(n_samples):
            state = _derive(base, <uint64_t>smp)
            for i in range(n_nodes):
                h[i] = q if _unit_double(&state) < p else -p
            for i in range(n_nodes):
                acc = 0.0
                for jj in range(indptr[i], indptr[i + 1]):
                    acc += h[nbr[jj]]
                s_sum[i] = acc
            t1 = 0.0
            t2 = 0.0
            w_nodes = 0.0
            for i in range(n_nodes):
                hi = h[i]
                eta = hi * (b[i] + b0 * s_sum[i])
                xi = b[i] * hi
                t1 += xi * eta
                t2 += fabs(xi) * eta * eta
                w_nodes += xi
            t3 = 0.0
            w_edges = 0.0
            for e in range(n_edges):
                hx = h[eu[e]]
                hy = h[ev[e]]
                xi = b0 * hx * hy
                eta = b[eu[e]] * hx + b[ev[e]] * hy \
                    + b0 * (hx * s_sum[eu[e]] + hy * s_sum[ev[e]] - hx * hy)
                t1 += xi * eta
                t3 += fabs(xi) * eta * eta
                w_edges += hx * hy
            t1 = fabs(t1 - centering)
            w = b0 * w_edges + w_nodes
            sum_t1 += t1
            sumsq_t1 += t1 * t1
            sum_t2 += t2
            sum_t3 += t3
            sum_w += w
            sumsq_w += w * w
    cdef double inv = 1.0 / n_samples
    cdef double t1_mean = sum_t1 * inv
    cdef double w_mean = sum_w * inv
    cdef double t1_var = 0.0, w_var = 0.0
    if n_samples > 1:
        t1_var = (sumsq_t1 - n_samples * t1_mean * t1_mean) / (n_samples - 1)
        w_var = (sumsq_w - n_samples * w_mean * w_mean) / (n_samples - 1)
        if t1_var < 0.0:
            t1_var = 0.0
        if w_var < 0.0:
            w_var = 0.0
    return t1_mean, t1_var, sum_t2 * inv, sum_t3 * inv, w_mean, w_var


def stein_mc_node_moments(const int64_t[::1] indptr, const int64_t[::1] nbr,
                          double b0, const double[::1] b, double p,
                          Py_ssize_t n_samples, object seed):
    """Per-node MC mean and sample variance of xi_i eta_i.

    Consumes the exact same random stream as ``stein_mc`` for a given seed,
    so node-level diagnostics line up with a bound estimate sample for
    sample.
    """
    cdef Py_ssize_t n_nodes = b.shape[0]
    h_arr = np.empty(n_nodes, dtype=np.float64)
    sum_arr = np.zeros(n_nodes, dtype=np.float64)
    sumsq_arr = np.zeros(n_nodes, dtype=np.float64)
    cdef double[::1] h = h_arr
    cdef double[::1] psum = sum_arr
    cdef double[::1] psumsq = sumsq_arr
    cdef uint64_t base = <uint64_t>(int(seed) & 0xFFFFFFFFFFFFFFFF)
    cdef uint64_t state
    cdef double q = 1.0 - p
    cdef Py_ssize_t i, smp, jj
    cdef double acc, prod
    with nogil:
        for smp in range(n_samples):
            state = _derive(base, <uint64_t>smp)
            for i in range(n_nodes):
                h[i] = q if _unit_double(&state) < p else -p
            for i in range(n_nodes):
                acc = 0.0
                for jj in range(indptr[i], indptr[i + 1]):
                    acc += h[nbr[jj]]
                prod = b[i] * h[i] * h[i] * (b[i] + b0 * acc)
                psum[i] += prod
                psumsq[i] += prod * prod
    mean = sum_arr / n_samples
    if n_samples > 1:
        var = (sumsq_arr - n_samples * mean * mean) / (n_samples - 1)
        np.maximum(var, 0.0, out=var)
    else:
        var = np.zeros(n_nodes, dtype=np.float64)
    return mean, var
