"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines; the two heaviest studies carry the `slow` marker.
"""

import itertools
import math
from fractions import Fraction

import numpy as np
import pytest

from edgecount import (
    Graph,
    Labels,
    SampleSizes,
    boot_moments,
    brute_force_boot_oracle,
    brute_force_perm_oracle,
    count_squares,
    degree_stats,
    edge_neighborhood_sizes,
    euclidean_distances,
    kmst,
    perm_moments,
    statistics,
)
from edgecount.experiments import (
    max_degree_study,
    resolve_workers,
    run_power_experiment,
    run_size_experiment,
    run_stein_experiment,
    run_validity_experiment,
)
from edgecount.graph import crosspair_sum
from edgecount.stein import node_product_diagnostic

from conftest import named_small_graphs, random_graph

WORKERS = resolve_workers(None)


def report(num, name, ok, detail):
    print(f"\n[criterion {num}] {name}: {'PASS' if ok else 'FAIL'} ({detail})")
    assert ok, f"criterion {num} ({name}): {detail}"


def _exact_cov_rw_rd(g, m):
    """Cov_P(R_w, R_d) as an exact rational via integer enumeration."""
    big_n = g.n_nodes
    n = big_n - m
    sum_w = sum_d = sum_wd = 0
    count = 0
    for chosen in itertools.combinations(range(big_n), m):
        in_x = np.zeros(big_n, dtype=bool)
        in_x[list(chosen)] = True
        r1 = int(np.count_nonzero(in_x[g.edge_u] & in_x[g.edge_v]))
        r2 = int(np.count_nonzero(~in_x[g.edge_u] & ~in_x[g.edge_v]))
        w_scaled = r1 * (n - 1) + r2 * (m - 1)  # R_w * (N - 2), integer
        d = r1 - r2
        sum_w += w_scaled
        sum_d += d
        sum_wd += w_scaled * d
        count += 1
    cov = Fraction(count * sum_wd - sum_w * sum_d, count * count * (big_n - 2))
    return float(cov)


def test_criterion_1_oracle_equivalence():
    rng = np.random.default_rng(101)
    graphs = list(named_small_graphs().values())
    while len(graphs) < 200 + len(named_small_graphs()):
        n = int(rng.integers(4, 11))
        g = random_graph(rng, n, p=float(rng.uniform(0.15, 0.9)))
        if g.num_edges > 0:
            graphs.append(g)
    checked = 0
    worst_rel = 0.0
    worst_cov = 0.0

    def rel_err(a, b):
        # relative error with an absolute floor of 1 (zero-variance cases
        # compare float noise against an exact 0)
        return abs(a - b) / max(1.0, abs(a), abs(b))

    for g in graphs:
        ds = degree_stats(g)
        big_n = g.n_nodes
        for m in range(2, big_n - 1):
            sz = SampleSizes(m, big_n - m)
            closed = perm_moments(ds, sz)
            enum = brute_force_perm_oracle(g, sz)
            for field in ("mu_w", "sigma_w", "mu_d", "sigma_d", "mu_o", "sigma_o"):
                rel = rel_err(getattr(closed, field), getattr(enum.moments, field))
                worst_rel = max(worst_rel, rel)
                assert rel < 1e-10, (field, m, g.edges())
            worst_cov = max(worst_cov, abs(_exact_cov_rw_rd(g, m)))
            bc = boot_moments(ds, sz)
            be = brute_force_boot_oracle(g, sz)
            for field in ("mu_w_b", "sigma_w_b", "mu_d_b", "sigma_d_b", "sigma_nx",
                          "cov_zw_zd", "cov_zw_zx", "cov_zd_zx"):
                a, b = getattr(bc, field), getattr(be, field)
                if math.isnan(a) or math.isnan(b):
                    assert math.isnan(a) and math.isnan(b)
                    continue
                rel = rel_err(a, b)
                worst_rel = max(worst_rel, rel)
                assert rel < 1e-10, (field, m, g.edges())
            checked += 1
    report(
        1, "oracle equivalence",
        worst_rel < 1e-10 and worst_cov <= 1e-12,
        f"{len(graphs)} graphs, {checked} (graph, m) cells; worst rel err "
        f"{worst_rel:.2e}, worst |Cov(R_w,R_d)| {worst_cov:.2e}",
    )


def test_criterion_2_decomposition_identity():
    rng = np.random.default_rng(202)
    pairs = 0
    worst = 0.0
    while pairs < 10000:
        n = int(rng.integers(6, 13))
        g = random_graph(rng, n, p=float(rng.uniform(0.3, 0.8)))
        ds = degree_stats(g)
        if g.num_edges < 3 or ds.v_g == 0:
            continue
        m = int(rng.integers(2, n - 1))
        sz = SampleSizes(m, n - m)
        mom = perm_moments(ds, sz)
        if mom.sigma_w == 0 or mom.sigma_d == 0:
            continue
        # exact (enumerated) covariance of (R1, R2) for the quadratic form
        r1s, r2s = [], []
        for chosen in itertools.combinations(range(n), m):
            in_x = np.zeros(n, dtype=bool)
            in_x[list(chosen)] = True
            r1s.append(int(np.count_nonzero(in_x[g.edge_u] & in_x[g.edge_v])))
            r2s.append(int(np.count_nonzero(~in_x[g.edge_u] & ~in_x[g.edge_v])))
        r1s = np.array(r1s, dtype=np.float64)
        r2s = np.array(r2s, dtype=np.float64)
        sigma = np.cov(np.vstack([r1s, r2s]), bias=True)
        sigma_inv = np.linalg.inv(sigma)
        mu = np.array([r1s.mean(), r2s.mean()])
        for _ in range(50):
            in_x = np.zeros(n, dtype=bool)
            in_x[rng.choice(n, m, replace=False)] = True
            lab = Labels.from_membership(in_x)
            out = statistics(g, lab, mom)
            r1 = int(np.count_nonzero(in_x[g.edge_u] & in_x[g.edge_v]))
            r2 = int(np.count_nonzero(~in_x[g.edge_u] & ~in_x[g.edge_v]))
            vec = np.array([r1, r2]) - mu
            s_quadform = float(vec @ sigma_inv @ vec)
            worst = max(worst, abs(s_quadform - (out.z_w**2 + out.z_d**2)))
            assert out.s == pytest.approx(out.z_w**2 + out.z_d**2, abs=1e-12)
            pairs += 1
    report(
        2, "decomposition identity S = Z_w^2 + Z_d^2",
        worst < 1e-9,
        f"{pairs} (graph, labeling) pairs; worst |quadform - decomposition| {worst:.2e}",
    )


def test_criterion_3_table2_cell():
    cfg = dict(
        experiment="size", seed=20240817, distribution="gaussian", d=100,
        m=100, n=100, exponents=[0.5], trials=1000, tests=["get"],
        level=0.05, pvalue="asymptotic",
    )
    res = run_size_experiment(cfg, workers=WORKERS)
    rate = res.rows[0]["rejection_rate"]
    lo, hi = 0.042 - 0.021, 0.042 + 0.021
    report(
        3, "empirical-size cell (gaussian, d=100, |G|=floor(M^0.5))",
        lo <= rate <= hi,
        f"rejection {rate:.3f} in [{lo:.3f}, {hi:.3f}], target 0.042, 1000 trials",
    )


def test_criterion_4_null_calibration_all_tests():
    cfg = dict(
        experiment="size", seed=404, distribution="gaussian", d=50,
        m=50, n=50, k_values=[5], trials=500,
        tests=["oet", "get", "wet", "met"], level=0.05,
        pvalue="permutation", permutations=500,
    )
    res = run_size_experiment(cfg, workers=WORKERS)
    rates = {r["test"]: r["rejection_rate"] for r in res.rows}
    ok = all(0.02 <= v <= 0.09 for v in rates.values())
    report(
        4, "null calibration of OET/GET/WET/MET (permutation p-values)",
        ok,
        "rejection at 0.05: " + ", ".join(f"{t}={v:.3f}" for t, v in rates.items())
        + " (band [0.02, 0.09], 500 trials, B=500)",
    )


@pytest.mark.slow
def test_criterion_5_power_ordering():
    cfg = dict(
        experiment="power", seed=505, scenario="i", d=500, m=100, n=100,
        k_values=[5, 50], trials=300, tests=["get"], level=0.05,
    )
    res = run_power_experiment(cfg, workers=WORKERS)
    power = {r["k"]: r["power"] for r in res.rows}
    ok = power[50] >= power[5] - 0.05
    report(
        5, "power ordering GET_50 vs GET_5 (setting (i), d=500)",
        ok,
        f"power(GET_50)={power[50]:.3f} >= power(GET_5)={power[5]:.3f} - 0.05, 300 trials",
    )


@pytest.mark.slow
def test_criterion_6_chi2_validity_map():
    cfg = dict(
        experiment="validity", seed=314159,
        rules=[{"rule": "ii", "alpha": 0.8}, {"rule": "i", "alpha": 0.3}],
        n_nodes=500, graphs=50, permutations=2000, level=0.05,
    )
    res = run_validity_experiment(cfg, workers=WORKERS)
    rates = {(r["rule"], r["alpha"]): r["ks_rejection_rate"] for r in res.rows}
    bad_rule = rates[("ii", 0.8)]
    good_rule = rates[("i", 0.3)]
    ok = bad_rule > 0.5 and good_rule < 0.2
    report(
        6, "chi-square(2) validity map (N=500, 50 graphs, 2000 perms)",
        ok,
        f"rule ii @ 0.8 -> {bad_rule:.2f} (> 0.5); rule i @ 0.3 -> {good_rule:.2f} (< 0.2)",
    )


def test_criterion_7_stein_bound_trend():
    s3 = 1.0 / math.sqrt(3.0)
    cfg = dict(
        experiment="stein", seed=20240818, d=100, k=5, n_values=[200, 1000],
        direction=[s3, s3, s3], m_frac=0.5, mc_samples=20000, replicates=20,
    )
    res = run_stein_experiment(cfg, workers=WORKERS)
    by_n = {}
    for row in res.rows:
        by_n.setdefault(row["n"], []).append(row["bound"])
    mean200 = float(np.mean(by_n[200]))
    mean1000 = float(np.mean(by_n[1000]))
    trend_ok = mean1000 < mean200

    # analytic centering agreement on every node of a 200-node test graph
    rng = np.random.default_rng(707)
    pts = rng.standard_normal((200, 100))
    g = kmst(euclidean_distances(pts), 5)
    mean, se, analytic = node_product_diagnostic(
        g, SampleSizes(100, 100), (s3, s3, s3), n_samples=50000, seed=708
    )
    node_dev = np.abs(mean - analytic) / np.maximum(se, 1e-300)
    nodes_ok = bool(np.all(node_dev <= 4.0))
    report(
        7, "Stein bound decreasing in N + node-level centering agreement",
        trend_ok and nodes_ok,
        f"mean bound N=1000 {mean1000:.3f} < N=200 {mean200:.3f}; "
        f"max node deviation {node_dev.max():.2f} MC SEs (<= 4), 200 nodes",
    )


def test_criterion_8_max_degree_exponent():
    res = max_degree_study(50, 1000, [2, 4, 8, 16, 32, 64, 128], seed=3)
    gamma = res.extras["gamma"]
    report(
        8, "K-MST max-degree growth exponent (d=50, N=1000)",
        0.55 <= gamma <= 0.85,
        f"gamma={gamma:.3f} in [0.55, 0.85] over K in {{2,...,128}}",
    )


def test_criterion_9_structural_invariants():
    rng = np.random.default_rng(909)

    # 4-cycle counts vs brute force on all named graphs and random <= 8 nodes
    def squares_brute(g):
        has = {(u, v) for u, v in g.edges()} | {(v, u) for u, v in g.edges()}
        total = 0
        for quad in itertools.combinations(range(g.n_nodes), 4):
            a, b, c, d = quad
            for w, x, y, z in ((a, b, c, d), (a, c, b, d), (a, b, d, c)):
                if ((w, x) in has and (x, y) in has and (y, z) in has
                        and (z, w) in has):
                    total += 1
        return total

    graphs = list(named_small_graphs().values())
    for _ in range(100):
        n = int(rng.integers(4, 9))
        graphs.append(random_graph(rng, n, p=float(rng.uniform(0.2, 0.9))))
    for g in graphs:
        assert count_squares(g) == squares_brute(g)

    # |A_e| closed form vs explicit set union on random graphs
    for _ in range(30):
        g = random_graph(rng, int(rng.integers(5, 25)), p=0.4)
        if g.num_edges == 0:
            continue
        a_sizes, _ = edge_neighborhood_sizes(g)
        incident = [set() for _ in range(g.n_nodes)]
        for idx, (u, v) in enumerate(g.edges()):
            incident[u].add(idx)
            incident[v].add(idx)
        for idx, (u, v) in enumerate(g.edges()):
            assert a_sizes[idx] == len(incident[u] | incident[v])

    # relabeling invariance of every graph_core scalar
    for _ in range(20):
        g = random_graph(rng, 15, p=0.4)
        if g.num_edges == 0:
            continue
        h = g.permuted(rng.permutation(15))
        dg, dh = degree_stats(g), degree_stats(h)
        assert dg.v_g == pytest.approx(dh.v_g, rel=1e-9)
        assert dg.moment2 == dh.moment2 and dg.moment3 == dh.moment3
        assert dg.abs_centered3 == pytest.approx(dh.abs_centered3, rel=1e-9)
        assert count_squares(g) == count_squares(h)
        assert crosspair_sum(g) == pytest.approx(crosspair_sum(h), rel=1e-9, abs=1e-9)
        ag, bg = edge_neighborhood_sizes(g)
        ah, bh = edge_neighborhood_sizes(h)
        assert sorted(ag.tolist()) == sorted(ah.tolist())
        assert sorted(bg.tolist()) == sorted(bh.tolist())

    # kmst: layer disjointness and layer 1 == textbook MST on 100 point sets
    from scipy.sparse.csgraph import minimum_spanning_tree
    from scipy.spatial.distance import squareform

    from edgecount.construct import kmst_layers

    for _ in range(100):
        n = int(rng.integers(5, 35))
        pts = rng.standard_normal((n, int(rng.integers(1, 5))))
        dm = euclidean_distances(pts)
        k = int(rng.integers(1, max(2, n // 3)))
        g, sizes = kmst_layers(dm, k)
        assert sizes.tolist() == [n - 1] * k
        edges = g.edges()
        layers = [set(edges[(n - 1) * j : (n - 1) * (j + 1)]) for j in range(k)]
        for i in range(k):
            for j in range(i + 1, k):
                assert not (layers[i] & layers[j])
        mine = sum(dm.get(u, v) for u, v in edges[: n - 1])
        ref = float(minimum_spanning_tree(squareform(dm.condensed)).sum())
        assert mine == pytest.approx(ref, rel=1e-10)

    report(
        9, "structural invariant suite",
        True,
        f"{len(graphs)} square-count graphs, A_e set oracle, relabeling, "
        "kmst layer disjointness + 100 textbook-MST cross-checks",
    )
