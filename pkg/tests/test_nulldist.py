import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from edgecount import (
    Graph,
    SampleSizes,
    boot_moments,
    brute_force_boot_oracle,
    brute_force_perm_oracle,
    degree_stats,
    perm_moments,
)
from edgecount.errors import InvalidArgumentError

from conftest import named_small_graphs, random_graph


def _close(a, b, tol=1e-10):
    return a == pytest.approx(b, rel=tol, abs=tol)


def _assert_perm_match(g, m, n):
    sz = SampleSizes(m, n)
    closed = perm_moments(degree_stats(g), sz)
    enum = brute_force_perm_oracle(g, sz)
    for field in ("mu_w", "sigma_w", "mu_d", "sigma_d", "mu_o", "sigma_o"):
        assert _close(getattr(closed, field), getattr(enum.moments, field)), (
            field, m, n, g.edges())
    assert abs(enum.cov_w_d) < 1e-12


def _assert_boot_match(g, m, n):
    sz = SampleSizes(m, n)
    closed = boot_moments(degree_stats(g), sz)
    enum = brute_force_boot_oracle(g, sz)
    for field in ("mu_w_b", "sigma_w_b", "mu_d_b", "sigma_d_b", "sigma_nx",
                  "cov_zw_zd", "cov_zw_zx", "cov_zd_zx"):
        a, b = getattr(closed, field), getattr(enum, field)
        if math.isnan(a) or math.isnan(b):
            assert math.isnan(a) and math.isnan(b), (field, a, b)
        else:
            assert _close(a, b), (field, a, b, m, n, g.edges())


def test_sample_sizes_validation():
    with pytest.raises(InvalidArgumentError):
        SampleSizes(0, 3)
    sz = SampleSizes(3, 9)
    assert sz.total == 12 and sz.p == 0.25 and sz.q == 0.75


def test_perm_moments_examples(small_graphs):
    g = small_graphs["cycle6"]
    m = perm_moments(degree_stats(g), SampleSizes(3, 3))
    assert m.mu_d == 0.0  # m = n
    assert m.sigma_d == 0.0  # regular graph


def test_perm_moments_m1_rejected(small_graphs):
    with pytest.raises(InvalidArgumentError):
        perm_moments(degree_stats(small_graphs["k4"]), SampleSizes(1, 3))


def test_perm_oracle_p3_hand_enumeration():
    g = Graph(3, [(0, 1), (1, 2)])
    # three assignments of m = 2: E(R1) = 2/3 = |G| m(m-1)/(N(N-1))
    vals = []
    for chosen in itertools.combinations(range(3), 2):
        in_x = np.zeros(3, bool)
        in_x[list(chosen)] = True
        vals.append(sum(1 for u, v in g.edges() if in_x[u] and in_x[v]))
    assert np.mean(vals) == pytest.approx(2 / 3)
    assert np.mean(vals) == pytest.approx(2 * 2 * 1 / (3 * 2))


def test_perm_oracle_symmetry_m_equals_n(small_graphs):
    g = small_graphs["bowtie"]
    enum = brute_force_perm_oracle(g, SampleSizes(2, 3))
    # E(R1) = E(R2) requires m = n; check the m = n case via mu_d = 0
    enum_eq = brute_force_perm_oracle(Graph(4, [(0, 1), (1, 2)]), SampleSizes(2, 2))
    assert enum_eq.moments.mu_d == pytest.approx(0.0, abs=1e-14)
    assert enum.moments.mu_d != 0.0


def test_perm_oracle_guard():
    g = random_graph(np.random.default_rng(0), 40, p=0.2)
    with pytest.raises(InvalidArgumentError):
        brute_force_perm_oracle(g, SampleSizes(20, 20))


def test_cov_zero_k4():
    enum = brute_force_perm_oracle(named_small_graphs()["k4"], SampleSizes(2, 2))
    assert abs(enum.cov_w_d) < 1e-12


def test_closed_forms_match_oracles_small_graphs(rng, small_graphs):
    for g in small_graphs.values():
        n_nodes = g.n_nodes
        for m in range(2, n_nodes - 1):
            _assert_perm_match(g, m, n_nodes - m)
        if n_nodes <= 12:
            for m in range(1, n_nodes):
                _assert_boot_match(g, m, n_nodes - m)
    for _ in range(25):
        n_nodes = int(rng.integers(4, 13))
        g = random_graph(rng, n_nodes, p=float(rng.uniform(0.2, 0.9)))
        for m in range(2, n_nodes - 1):
            _assert_perm_match(g, m, n_nodes - m)
        for m in range(1, n_nodes):
            _assert_boot_match(g, m, n_nodes - m)


def test_boot_moments_examples(small_graphs):
    g = small_graphs["k4"]
    bm = boot_moments(degree_stats(g), SampleSizes(2, 2))
    assert bm.cov_zw_zd == pytest.approx(0.0, abs=1e-14)  # carries n - m
    assert bm.cov_zw_zx == pytest.approx(0.0, abs=1e-14)
    assert bm.sigma_nx == pytest.approx(1.0)  # Npq = 4/4


def test_boot_oracle_empty_graph():
    g = Graph(5, [])
    out = brute_force_boot_oracle(g, SampleSizes(2, 3))
    assert out.mu_w_b == 0 and out.sigma_w_b == 0 and out.mu_d_b == 0
    assert out.sigma_nx**2 == pytest.approx(5 * 0.4 * 0.6)
    assert math.isnan(out.cov_zw_zd)


def test_boot_oracle_degenerate_p_one():
    g = Graph(3, [(0, 1), (1, 2)])
    out = brute_force_boot_oracle(g, (3, 0))  # p = 1: R1 = |G| surely
    # R_w = (R1(n-1) + R2(m-1))/(N-2) = (-R1)/(N-2) wait n-1 = -1 here; check R_d instead
    assert out.mu_d_b == pytest.approx(2.0)  # R1 - R2 = 2 surely
    assert out.sigma_d_b == pytest.approx(0.0, abs=1e-14)


def test_boot_oracle_guard():
    g = random_graph(np.random.default_rng(1), 21, p=0.1)
    with pytest.raises(InvalidArgumentError):
        brute_force_boot_oracle(g, SampleSizes(10, 11))


def test_boot_mu_d_equals_perm_mu_d(rng):
    for _ in range(10):
        n_nodes = int(rng.integers(5, 12))
        g = random_graph(rng, n_nodes, p=0.4)
        m = int(rng.integers(2, n_nodes - 1))
        sz = SampleSizes(m, n_nodes - m)
        ds = degree_stats(g)
        assert boot_moments(ds, sz).mu_d_b == pytest.approx(
            perm_moments(ds, sz).mu_d, rel=1e-14, abs=1e-14
        )


@settings(max_examples=60, deadline=None)
@given(
    n_nodes=st.integers(5, 12),
    m=st.integers(2, 6),
    bits=st.integers(0, 2**40 - 1),
    edge_seed=st.integers(0, 2**31 - 1),
)
def test_oet_linear_identity(n_nodes, m, bits, edge_seed):
    # R1 + R2 = 2 R_w + ((m - n)/(N - 2)) R_d for every labeling of every graph
    if m >= n_nodes - 1:
        m = n_nodes - 2
    n = n_nodes - m
    g = random_graph(np.random.default_rng(edge_seed), n_nodes, p=0.5)
    in_x = np.zeros(n_nodes, bool)
    in_x[np.random.default_rng(bits).choice(n_nodes, m, replace=False)] = True
    r1 = sum(1 for u, v in g.edges() if in_x[u] and in_x[v])
    r2 = sum(1 for u, v in g.edges() if not in_x[u] and not in_x[v])
    r_w = (r1 * (n - 1) + r2 * (m - 1)) / (n_nodes - 2)
    r_d = r1 - r2
    assert r1 + r2 == pytest.approx(2 * r_w + (m - n) / (n_nodes - 2) * r_d, abs=1e-12)


def test_sigma_w_boot_to_perm_ratio_stabilizes(rng):
    # sigma_w^B / sigma_w^P on growing K-MST families: monitored, not asserted
    from edgecount import euclidean_distances, kmst

    ratios = []
    for n_nodes in (50, 100, 200):
        pts = rng.standard_normal((n_nodes, 10))
        g = kmst(euclidean_distances(pts), 3)
        ds = degree_stats(g)
        sz = SampleSizes(n_nodes // 2, n_nodes - n_nodes // 2)
        ratios.append(
            boot_moments(ds, sz).sigma_w_b / perm_moments(ds, sz).sigma_w
        )
    assert all(0.1 < r < 10 for r in ratios)  # both Theta(sqrt(|G|))
