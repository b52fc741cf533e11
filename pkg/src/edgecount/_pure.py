"""Pure-python/numpy fallbacks for the compiled kernels.

Same algorithms and the same splitmix64 streams as ``_speedups``; integer
results match bit for bit, float accumulators agree to rounding order.
splitmix64's state after t steps is ``state0 + t*GAMMA (mod 2^64)``, which
lets the Bernoulli draws be vectorized without changing the stream.
"""

from __future__ import annotations

import numpy as np

from .rng import SM_GAMMA, Splitmix64, derive_seed

_U64 = np.uint64


def _stream_doubles(state0: int, count: int) -> np.ndarray:
    """The next ``count`` unit doubles of a splitmix64 stream, vectorized."""
    with np.errstate(over="ignore"):
        steps = np.arange(1, count + 1, dtype=_U64)
        z = _U64(state0 & 0xFFFFFFFFFFFFFFFF) + _U64(SM_GAMMA) * steps
        z = (z ^ (z >> _U64(30))) * _U64(0xBF58476D1CE4E5B9)
        z = (z ^ (z >> _U64(27))) * _U64(0x94D049BB133111EB)
        z = z ^ (z >> _U64(31))
    return (z >> _U64(11)) * (1.0 / 9007199254740992.0)


def edge_counts_for_labels(eu, ev, in_x):
    both_x = in_x[eu] & in_x[ev]
    both_y = (1 - in_x[eu]) & (1 - in_x[ev])
    return int(both_x.sum()), int(both_y.sum())


def perm_edge_counts(eu, ev, n_nodes, m, n_draws, seed):
    r1 = np.empty(n_draws, dtype=np.int64)
    r2 = np.empty(n_draws, dtype=np.int64)
    in_x = np.zeros(n_nodes, dtype=np.uint8)
    for b in range(n_draws):
        stream = Splitmix64(derive_seed(seed, b))
        perm = np.arange(n_nodes, dtype=np.int64)
        for t in range(m):
            j = t + stream.next_below(n_nodes - t)
            perm[t], perm[j] = perm[j], perm[t]
            in_x[perm[t]] = 1
        r1[b], r2[b] = edge_counts_for_labels(eu, ev, in_x)
        in_x[perm[:m]] = 0
    return r1, r2


def kruskal_kmst(order, eu, ev, n_nodes, k):
    parent = np.empty(n_nodes, dtype=np.int64)
    rank = np.empty(n_nodes, dtype=np.int64)
    used = np.zeros(len(eu), dtype=bool)
    out_u = np.empty(k * (n_nodes - 1), dtype=np.int64)
    out_v = np.empty(k * (n_nodes - 1), dtype=np.int64)
    sizes = np.zeros(k, dtype=np.int64)
    pos = 0

    def find(x):
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    for layer in range(k):
        parent[:] = np.arange(n_nodes)
        rank[:] = 0
        added = 0
        for e in order:
            if used[e]:
                continue
            ru, rv = find(eu[e]), find(ev[e])
            if ru == rv:
                continue
            if rank[ru] < rank[rv]:
                parent[ru] = rv
            elif rank[ru] > rank[rv]:
                parent[rv] = ru
            else:
                parent[rv] = ru
                rank[ru] += 1
            used[e] = True
            out_u[pos] = eu[e]
            out_v[pos] = ev[e]
            pos += 1
            added += 1
            if added == n_nodes - 1:
                break
        sizes[layer] = added
        if added == 0:
            break  # every remaining layer would also be empty
    return out_u[:pos], out_v[:pos], sizes


def _bernoulli_h(seed, sample_index, n_nodes, p):
    u = _stream_doubles(derive_seed(seed, sample_index), n_nodes)
    return np.where(u < p, 1.0 - p, -p)


def stein_mc(eu, ev, indptr, nbr, b0, b, p, n_samples, seed):
    n_nodes = len(b)
    n_edges = len(eu)
    pq = p * (1.0 - p)
    centering = pq * float(np.sum(b * b)) + n_edges * b0 * b0 * pq * pq
    rows = np.repeat(np.arange(n_nodes), np.diff(indptr))
    sum_t1 = sumsq_t1 = sum_t2 = sum_t3 = sum_w = sumsq_w = 0.0
    for smp in range(n_samples):
        h = _bernoulli_h(seed, smp, n_nodes, p)
        s_sum = np.bincount(rows, weights=h[nbr], minlength=n_nodes)
        eta_i = h * (b + b0 * s_sum)
        xi_i = b * h
        hx, hy = h[eu], h[ev]
        xi_e = b0 * hx * hy
        eta_e = b[eu] * hx + b[ev] * hy + b0 * (hx * s_sum[eu] + hy * s_sum[ev] - hx * hy)
        t1 = abs(float(np.sum(xi_i * eta_i)) + float(np.sum(xi_e * eta_e)) - centering)
        t2 = float(np.sum(np.abs(xi_i) * eta_i * eta_i))
        t3 = float(np.sum(np.abs(xi_e) * eta_e * eta_e))
        w = b0 * float(np.sum(hx * hy)) + float(np.sum(xi_i))
        sum_t1 += t1
        sumsq_t1 += t1 * t1
        sum_t2 += t2
        sum_t3 += t3
        sum_w += w
        sumsq_w += w * w
    t1_mean = sum_t1 / n_samples
    w_mean = sum_w / n_samples
    t1_var = w_var = 0.0
    if n_samples > 1:
        t1_var = max(0.0, (sumsq_t1 - n_samples * t1_mean**2) / (n_samples - 1))
        w_var = max(0.0, (sumsq_w - n_samples * w_mean**2) / (n_samples - 1))
    return t1_mean, t1_var, sum_t2 / n_samples, sum_t3 / n_samples, w_mean, w_var


def stein_mc_node_moments(indptr, nbr, b0, b, p, n_samples, seed):
    n_nodes = len(b)
    rows = np.repeat(np.arange(n_nodes), np.diff(indptr))
    psum = np.zeros(n_nodes)
    psumsq = np.zeros(n_nodes)
    for smp in range(n_samples):
        h = _bernoulli_h(seed, smp, n_nodes, p)
        s_sum = np.bincount(rows, weights=h[nbr], minlength=n_nodes)
        prod = b * h * h * (b + b0 * s_sum)
        psum += prod
        psumsq += prod * prod
    mean = psum / n_samples
    if n_samples > 1:
        var = np.maximum(0.0, (psumsq - n_samples * mean * mean) / (n_samples - 1))
    else:
        var = np.zeros(n_nodes)
    return mean, var
