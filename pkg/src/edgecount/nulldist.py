"""Closed-form moments of the edge-count statistics under the permutation
and bootstrap nulls, plus exact enumeration oracles for tiny instances.

Permutation null: uniform over the C(N, m) assignments of the pooled
observations to sample X.  Bootstrap null: each node lands in sample X
independently with probability p = m/N; conditioning on the realized count
n_X = m recovers the permutation null.

The R1+R2 (original-test) moments follow from the exact identity
R1 + R2 = 2 R_w + ((m - n)/(N - 2)) R_d together with Cov_P(R_w, R_d) = 0,
so every formula here is either a verified display or a one-line algebraic
consequence.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import InvalidArgumentError
from .graph import DegreeStats, Graph, degree_stats

# radicand round-off tolerance for sigma_w under the permutation null
_RADICAND_TOL = 1e-9


@dataclass(frozen=True)
class SampleSizes:
    """Pooled two-sample sizes; p and q are the sample-X/-Y proportions."""

    m: int
    n: int

    def __post_init__(self):
        if self.m < 1 or self.n < 1:
            raise InvalidArgumentError("both samples must be nonempty")

    @property
    def total(self) -> int:
        return self.m + self.n

    @property
    def p(self) -> float:
        return self.m / self.total

    @property
    def q(self) -> float:
        return self.n / self.total


@dataclass(frozen=True)
class PermNullMoments:
    """Mean/SD of R_w, R_d and R1+R2 under the permutation null."""

    mu_w: float
    sigma_w: float
    mu_d: float
    sigma_d: float
    mu_o: float
    sigma_o: float

    def to_dict(self) -> dict:
        return {
            "mu_w": self.mu_w,
            "sigma_w": self.sigma_w,
            "mu_d": self.mu_d,
            "sigma_d": self.sigma_d,
            "mu_o": self.mu_o,
            "sigma_o": self.sigma_o,
        }


@dataclass(frozen=True)
class BootNullMoments:
    """Bootstrap-null moments and the standardized covariances with Z_X.

    sigma_nx is the SD of the realized sample-X count (sigma_nx^2 = N p q).
    Covariance entries are NaN where a standardizing SD vanishes.
    """

    mu_w_b: float
    sigma_w_b: float
    mu_d_b: float
    sigma_d_b: float
    sigma_nx: float
    cov_zw_zd: float
    cov_zw_zx: float
    cov_zd_zx: float


@dataclass(frozen=True)
class PermEnumeration:
    """Full-enumeration result: the moments plus the raw Cov(R_w, R_d)."""

    moments: PermNullMoments
    cov_w_d: float


def perm_moments(ds: DegreeStats, sz: SampleSizes) -> PermNullMoments:
    """Closed-form permutation-null moments from degree statistics.

    Needs m, n >= 2 (the sigma_d factor has m-1 and n-1 denominators) and
    hence N >= 4, which the N-3 factor also requires.
    """
    m, n = sz.m, sz.n
    big_n = sz.total
    if m < 2 or n < 2:
        raise InvalidArgumentError("permutation moments need m >= 2 and n >= 2")
    ne = ds.num_edges
    v_g = ds.v_g
    mu_w = (n - 1) * (m - 1) / ((big_n - 1) * (big_n - 2)) * ne
    mu_d = (m - n) / big_n * ne
    # product of four ratios; avoids overflow at N ~ 1e5
    factor = (m / big_n) * ((m - 1) / (big_n - 1)) * (n / (big_n - 2)) * ((n - 1) / (big_n - 3))
    var_d = factor * ((m - 2) / (n - 1) + (n - 2) / (m - 1) + 2.0) * v_g
    radicand = ne - 2.0 * ne * ne / (big_n * (big_n - 1)) - v_g / (big_n - 2)
    if radicand < 0:
        if radicand < -_RADICAND_TOL * max(ne, 1):
            raise InvalidArgumentError(
                f"sigma_w radicand {radicand} is negative beyond round-off; "
                "graph/size combination is inconsistent"
            )
        warnings.warn("sigma_w radicand within round-off of zero; clipping to 0")
        radicand = 0.0
    var_w = factor * radicand
    mu_o = 2.0 * mu_w + (m - n) / (big_n - 2) * mu_d
    var_o = 4.0 * var_w + ((m - n) / (big_n - 2)) ** 2 * var_d
    return PermNullMoments(
        mu_w=mu_w,
        sigma_w=math.sqrt(var_w),
        mu_d=mu_d,
        sigma_d=math.sqrt(var_d),
        mu_o=mu_o,
        sigma_o=math.sqrt(var_o),
    )


def boot_moments(ds: DegreeStats, sz: SampleSizes) -> BootNullMoments:
    """Closed-form bootstrap-null moments.

    The Var_B(W) consumers rely on sigma_w_b; note its two contributions,
    (pq)^2 |G| and pq (p-q)^2 sum|G_i|^2 / (N-2)^2.
    """
    m, n = sz.m, sz.n
    big_n = sz.total
    if big_n < 3:
        raise InvalidArgumentError("bootstrap moments need N >= 3")
    p, q = sz.p, sz.q
    ne = ds.num_edges
    t_g = float(ds.moment2)
    mu_w_b = (m * n * big_n - m * m - n * n) / (big_n**2 * (big_n - 2)) * ne
    mu_d_b = (m - n) / big_n * ne
    sigma_d_b = math.sqrt(p * q * t_g)
    sigma_w_b = math.sqrt(
        (p * q) ** 2 * ne + p * q * (p - q) ** 2 * t_g / (big_n - 2) ** 2
    )
    sigma_nx = math.sqrt(big_n * p * q)
    if sigma_w_b > 0 and sigma_d_b > 0:
        cov_zw_zd = p * q * (n - m) / (big_n - 2) * t_g / (big_n * sigma_w_b * sigma_d_b)
    else:
        cov_zw_zd = math.nan
    if sigma_w_b > 0:
        cov_zw_zx = p * q * 2.0 * (n - m) / (big_n - 2) * ne / (big_n * sigma_w_b * sigma_nx)
    else:
        cov_zw_zx = math.nan
    if sigma_d_b > 0:
        cov_zd_zx = 2.0 * p * q * ne / (sigma_d_b * sigma_nx)
    else:
        cov_zd_zx = math.nan
    return BootNullMoments(
        mu_w_b=mu_w_b,
        sigma_w_b=sigma_w_b,
        mu_d_b=mu_d_b,
        sigma_d_b=sigma_d_b,
        sigma_nx=sigma_nx,
        cov_zw_zd=cov_zw_zd,
        cov_zw_zx=cov_zw_zx,
        cov_zd_zx=cov_zd_zx,
    )


def _counts_for_membership(g: Graph, in_x: np.ndarray) -> tuple[int, int]:
    both_x = in_x[g.edge_u] & in_x[g.edge_v]
    both_y = ~in_x[g.edge_u] & ~in_x[g.edge_v]
    return int(both_x.sum()), int(both_y.sum())


def brute_force_perm_oracle(g: Graph, sz: SampleSizes) -> PermEnumeration:
    """Exact permutation-null moments by enumerating all C(N, m) assignments."""
    big_n = sz.total
    if big_n != g.n_nodes:
        raise InvalidArgumentError("sample sizes must sum to the node count")
    n_assign = math.comb(big_n, sz.m)
    if n_assign > 10**6:
        raise InvalidArgumentError(
            f"{n_assign} assignments exceed the enumeration guard (1e6)"
        )
    m, n = sz.m, sz.n
    r_w = np.empty(n_assign)
    r_d = np.empty(n_assign)
    for idx, chosen in enumerate(combinations(range(big_n), m)):
        in_x = np.zeros(big_n, dtype=bool)
        in_x[list(chosen)] = True
        r1, r2 = _counts_for_membership(g, in_x)
        r_w[idx] = (r1 * (n - 1) + r2 * (m - 1)) / (big_n - 2)
        r_d[idx] = r1 - r2
    r_o = 2.0 * r_w + (m - n) / (big_n - 2) * r_d
    moments = PermNullMoments(
        mu_w=float(r_w.mean()),
        sigma_w=float(r_w.std()),
        mu_d=float(r_d.mean()),
        sigma_d=float(r_d.std()),
        mu_o=float(r_o.mean()),
        sigma_o=float(r_o.std()),
    )
    cov = float(np.mean((r_w - r_w.mean()) * (r_d - r_d.mean())))
    return PermEnumeration(moments=moments, cov_w_d=cov)


def brute_force_boot_oracle(g: Graph, sz) -> BootNullMoments:
    """Exact bootstrap-null moments over all 2^N assignments.

    Assignment weights are p^{n_X} q^{N - n_X}.  ``sz`` may be a
    SampleSizes or a plain (m, n) tuple; the tuple form admits degenerate
    sizes (n = 0, i.e. p = 1), where sigmas are zero and covariances NaN.
    """
    m, n = (sz.m, sz.n) if isinstance(sz, SampleSizes) else (int(sz[0]), int(sz[1]))
    big_n = m + n
    if big_n != g.n_nodes:
        raise InvalidArgumentError("sample sizes must sum to the node count")
    if big_n > 20:
        raise InvalidArgumentError("2^N enumeration is guarded at N <= 20")
    p, q = m / big_n, n / big_n
    codes = np.arange(2**big_n, dtype=np.int64)
    bits = (codes[:, None] >> np.arange(big_n)) & 1  # bit i: node i in sample X
    n_x = bits.sum(axis=1)
    with np.errstate(divide="ignore"):  # 0^0 = 1 handled by numpy power
        weights = p**n_x * q ** (big_n - n_x)
    in_u = bits[:, np.asarray(g.edge_u)].astype(bool)
    in_v = bits[:, np.asarray(g.edge_v)].astype(bool)
    r1 = (in_u & in_v).sum(axis=1)
    r2 = (~in_u & ~in_v).sum(axis=1)
    r_w = (r1 * (n - 1) + r2 * (m - 1)) / (big_n - 2)
    r_d = (r1 - r2).astype(np.float64)

    def wmean(x):
        return float(np.sum(weights * x))

    def wvar(x):
        mu = wmean(x)
        return float(np.sum(weights * (x - mu) ** 2))

    def wcov(x, y):
        return float(np.sum(weights * (x - wmean(x)) * (y - wmean(y))))

    sigma_w_b = math.sqrt(wvar(r_w))
    sigma_d_b = math.sqrt(wvar(r_d))
    sigma_nx = math.sqrt(wvar(n_x.astype(np.float64)))
    nxf = n_x.astype(np.float64)
    cov_zw_zd = (
        wcov(r_w, r_d) / (sigma_w_b * sigma_d_b)
        if sigma_w_b > 0 and sigma_d_b > 0
        else math.nan
    )
    cov_zw_zx = (
        wcov(r_w, nxf) / (sigma_w_b * sigma_nx)
        if sigma_w_b > 0 and sigma_nx > 0
        else math.nan
    )
    cov_zd_zx = (
        wcov(r_d, nxf) / (sigma_d_b * sigma_nx)
        if sigma_d_b > 0 and sigma_nx > 0
        else math.nan
    )
    return BootNullMoments(
        mu_w_b=wmean(r_w),
        sigma_w_b=sigma_w_b,
        mu_d_b=wmean(r_d),
        sigma_d_b=sigma_d_b,
        sigma_nx=sigma_nx,
        cov_zw_zd=cov_zw_zd,
        cov_zw_zx=cov_zw_zx,
        cov_zd_zx=cov_zd_zx,
    )


def perm_moments_for_graph(g: Graph, sz: SampleSizes) -> PermNullMoments:
    """Convenience wrapper: degree stats then closed-form moments."""
    return perm_moments(degree_stats(g), sz)
