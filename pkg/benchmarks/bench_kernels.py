"""Benchmark the compiled kernels against the pure-python fallbacks.

Run:  python benchmarks/bench_kernels.py
"""

import time

import numpy as np

from edgecount import _pure, construct

try:
    from edgecount import _speedups
except ImportError:
    _speedups = None


def timeit(fn, *args, repeats=3):
    best = float("inf")
    out = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def bench(name, args_c, args_p, fn_name, repeats=3):
    pure_fn = getattr(_pure, fn_name)
    t_pure, _ = timeit(pure_fn, *args_p, repeats=repeats)
    if _speedups is None:
        print(f"{name:34s} pure {t_pure * 1e3:9.1f} ms   (no compiled build)")
        return
    comp_fn = getattr(_speedups, fn_name)
    t_comp, _ = timeit(comp_fn, *args_c, repeats=repeats)
    print(
        f"{name:34s} compiled {t_comp * 1e3:9.1f} ms   "
        f"pure {t_pure * 1e3:9.1f} ms   speedup {t_pure / t_comp:8.1f}x"
    )


def main():
    rng = np.random.default_rng(0)

    # permutation resampling on a 5-MST, N = 200
    pts = rng.standard_normal((200, 50))
    dm = construct.euclidean_distances(pts)
    g = construct.kmst(dm, 5)
    args = (g.edge_u, g.edge_v, g.n_nodes, 100, 2000, 42)
    bench("perm_edge_counts (B=2000, N=200)", args, args, "perm_edge_counts")

    # layered Kruskal, N = 1000, K = 20
    pts = rng.standard_normal((1000, 20))
    dm = construct.euclidean_distances(pts)
    iu, iv = np.triu_indices(1000, k=1)
    iu = iu.astype(np.int64)
    iv = iv.astype(np.int64)
    order = np.lexsort((iv, iu, dm.condensed)).astype(np.int64)
    args = (order, iu, iv, 1000, 20)
    bench("kruskal_kmst (N=1000, K=20)", args, args, "kruskal_kmst", repeats=2)

    # Stein MC on a 5-MST, N = 500
    pts = rng.standard_normal((500, 100))
    g = construct.kmst(construct.euclidean_distances(pts), 5)
    b = rng.standard_normal(500) * 0.01
    args = (g.edge_u, g.edge_v, g.indptr, g.indices, 0.05, b, 0.5, 2000, 7)
    bench("stein_mc (2000 samples, N=500)", args, args, "stein_mc")


if __name__ == "__main__":
    main()
