"""The four edge-count two-sample tests on a labeled similarity graph.

Statistics (all standardized under the permutation null):

  * original (OET): Z_o from R1 + R2, upper tail (well-separated samples
    have few between-sample edges, i.e. many within-sample edges);
  * generalized (GET): S = Z_w^2 + Z_d^2, chi-square(2) reference;
  * weighted (WET): Z_w from R_w = (R1 (n-1) + R2 (m-1)) / (N-2), upper tail;
  * max-type (MET): max(Z_w, Z_d), Bonferroni over the two one-sided parts.

On regular graphs Var(R_d) = 0, so Z_d is undefined; GET then degrades to
S = Z_w^2 against chi-square(1) and MET to Z_w alone, both flagged.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import InvalidArgumentError
from .graph import Graph, degree_stats
from .nulldist import PermNullMoments, SampleSizes, perm_moments

TESTS = ("oet", "get", "wet", "met")


def normal_sf(z: float) -> float:
    """Upper-tail standard normal probability, P(Z > z)."""
    return 0.5 * math.erfc(z / math.sqrt(2.0))


def chi2_2_sf(s: float) -> float:
    """P(chi-square_2 > s) = exp(-s/2)."""
    return math.exp(-0.5 * s)


def chi2_1_sf(s: float) -> float:
    return math.erfc(math.sqrt(0.5 * s))


@dataclass(frozen=True)
class Labels:
    """Group labels over the pooled nodes: 1 for sample X, 2 for sample Y."""

    assignment: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.assignment, dtype=np.int64)
        if arr.ndim != 1 or not np.all((arr == 1) | (arr == 2)):
            raise InvalidArgumentError("labels must be a 1-d array of 1s and 2s")
        if not ((arr == 1).any() and (arr == 2).any()):
            raise InvalidArgumentError("both samples must be nonempty")
        object.__setattr__(self, "assignment", arr)

    @classmethod
    def from_membership(cls, in_x) -> "Labels":
        in_x = np.asarray(in_x, dtype=bool)
        return cls(np.where(in_x, 1, 2))

    @classmethod
    def from_sizes(cls, m: int, n: int) -> "Labels":
        """First m pooled nodes are sample X, the rest sample Y."""
        return cls(np.concatenate([np.ones(m, np.int64), np.full(n, 2, np.int64)]))

    @property
    def m(self) -> int:
        return int(np.count_nonzero(self.assignment == 1))

    @property
    def n(self) -> int:
        return int(np.count_nonzero(self.assignment == 2))

    @property
    def in_x(self) -> np.ndarray:
        return (self.assignment == 1).astype(np.uint8)

    def sizes(self) -> SampleSizes:
        return SampleSizes(self.m, self.n)


@dataclass(frozen=True)
class EdgeCounts:
    r1: int
    r2: int
    r_w: float
    r_d: int


def count_edges(g: Graph, lab: Labels) -> EdgeCounts:
    """Within-sample edge counts R1, R2 and the derived R_w, R_d."""
    if len(lab.assignment) != g.n_nodes:
        raise InvalidArgumentError("label length must equal the node count")
    big_n = g.n_nodes
    if big_n < 3:
        raise InvalidArgumentError("R_w needs N >= 3")
    r1, r2 = kernels.edge_counts_for_labels(g.edge_u, g.edge_v, lab.in_x)
    m, n = lab.m, lab.n
    return EdgeCounts(
        r1=r1,
        r2=r2,
        r_w=(r1 * (n - 1) + r2 * (m - 1)) / (big_n - 2),
        r_d=r1 - r2,
    )


@dataclass(frozen=True)
class StatValues:
    """Standardized statistics for one labeling; z_d is NaN when degenerate."""

    z_o: float
    z_w: float
    z_d: float
    s: float
    degenerate: bool


def _assemble_stats(r1, r2, m, n, big_n, mom: PermNullMoments):
    """Vectorized standardization; r1/r2 may be scalars or arrays."""
    r1 = np.asarray(r1, dtype=np.float64)
    r2 = np.asarray(r2, dtype=np.float64)
    r_w = (r1 * (n - 1) + r2 * (m - 1)) / (big_n - 2)
    r_d = r1 - r2
    r_o = r1 + r2
    z_w = (r_w - mom.mu_w) / mom.sigma_w
    z_o = (r_o - mom.mu_o) / mom.sigma_o
    if mom.sigma_d > 0:
        z_d = (r_d - mom.mu_d) / mom.sigma_d
        s = z_w**2 + z_d**2
        degenerate = False
    else:
        z_d = np.full_like(z_w, np.nan)
        s = z_w**2
        degenerate = True
    return z_o, z_w, z_d, s, degenerate


def statistics(g: Graph, lab: Labels, mom: PermNullMoments | None = None) -> StatValues:
    """(Z_o, Z_w, Z_d, S) for one labeling under the permutation null."""
    if g.n_nodes < 4:
        raise InvalidArgumentError("standardized statistics need N >= 4")
    sz = lab.sizes()
    if mom is None:
        mom = perm_moments(degree_stats(g), sz)
    if mom.sigma_w <= 0:
        raise InvalidArgumentError("sigma_w = 0: the weighted count is constant")
    counts = count_edges(g, lab)
    z_o, z_w, z_d, s, degenerate = _assemble_stats(
        counts.r1, counts.r2, sz.m, sz.n, g.n_nodes, mom
    )
    return StatValues(
        z_o=float(z_o), z_w=float(z_w), z_d=float(z_d), s=float(s),
        degenerate=degenerate,
    )


def asymptotic_p(test: str, stats: StatValues, met_abs_zd: bool = False) -> float:
    """Asymptotic p-value of one test from its standardized statistics."""
    if test not in TESTS:
        raise InvalidArgumentError(f"unknown test {test!r}")
    if test == "get":
        return chi2_1_sf(stats.s) if stats.degenerate else chi2_2_sf(stats.s)
    if test == "wet":
        return normal_sf(stats.z_w)
    if test == "oet":
        return normal_sf(stats.z_o)
    if stats.degenerate:
        return normal_sf(stats.z_w)
    z_d = abs(stats.z_d) if met_abs_zd else stats.z_d
    return min(1.0, 2.0 * min(normal_sf(stats.z_w), normal_sf(z_d)))


def _observed_statistic(test: str, stats: StatValues, met_abs_zd: bool) -> float:
    if test == "get":
        return stats.s
    if test == "wet":
        return stats.z_w
    if test == "oet":
        return stats.z_o
    if stats.degenerate:
        return stats.z_w
    return max(stats.z_w, abs(stats.z_d) if met_abs_zd else stats.z_d)


@dataclass(frozen=True)
class TestResult:
    """A test outcome with the null moments it used."""

    test: str
    statistic: float
    p_value: float
    method: str  # "asymptotic" | "permutation"
    moments: PermNullMoments
    z_w: float
    z_d: float
    degenerate: bool
    n_permutations: int | None = None
    seed: int | None = None

    def to_dict(self) -> dict:
        def clean(x):
            return None if (isinstance(x, float) and math.isnan(x)) else x

        return {
            "test": self.test,
            "statistic": clean(self.statistic),
            "p_value": self.p_value,
            "method": self.method,
            "moments": self.moments.to_dict(),
            "z_w": clean(self.z_w),
            "z_d": clean(self.z_d),
            "degenerate": self.degenerate,
            "n_permutations": self.n_permutations,
            "seed": self.seed,
        }


def run_test(
    g: Graph,
    lab: Labels,
    test: str = "get",
    method: str = "asymptotic",
    n_permutations: int = 1000,
    seed: int | None = None,
    met_abs_zd: bool = False,
) -> TestResult:
    """Run one edge-count test and return the result with its p-value."""
    if test not in TESTS:
        raise InvalidArgumentError(f"unknown test {test!r}")
    if method not in ("asymptotic", "permutation"):
        raise InvalidArgumentError(f"unknown p-value method {method!r}")
    sz = lab.sizes()
    mom = perm_moments(degree_stats(g), sz)
    stats = statistics(g, lab, mom)
    observed = _observed_statistic(test, stats, met_abs_zd)
    if method == "asymptotic":
        return TestResult(
            test=test,
            statistic=observed,
            p_value=asymptotic_p(test, stats, met_abs_zd),
            method="asymptotic",
            moments=mom,
            z_w=stats.z_w,
            z_d=stats.z_d,
            degenerate=stats.degenerate,
        )
    if seed is None:
        raise InvalidArgumentError("permutation p-values need a seed")
    p = permutation_p(
        g, lab, test, n_permutations, seed, moments=mom, met_abs_zd=met_abs_zd
    )
    return TestResult(
        test=test,
        statistic=observed,
        p_value=p,
        method="permutation",
        moments=mom,
        z_w=stats.z_w,
        z_d=stats.z_d,
        degenerate=stats.degenerate,
        n_permutations=n_permutations,
        seed=seed,
    )


def resampled_statistics(
    g: Graph,
    sz: SampleSizes,
    n_draws: int,
    seed: int,
    mom: PermNullMoments | None = None,
):
    """Statistic arrays (z_o, z_w, z_d, s) over random permutation draws.

    Draw j depends only on (seed, j); see kernels.perm_edge_counts.
    """
    if mom is None:
        mom = perm_moments(degree_stats(g), sz)
    r1, r2 = kernels.perm_edge_counts(
        g.edge_u, g.edge_v, g.n_nodes, sz.m, n_draws, seed
    )
    return _assemble_stats(r1, r2, sz.m, sz.n, g.n_nodes, mom)


def permutation_pvalues(
    g: Graph,
    lab: Labels,
    tests,
    n_permutations: int,
    seed: int,
    moments: PermNullMoments | None = None,
    met_abs_zd: bool = False,
) -> dict[str, float]:
    """Monte-Carlo permutation p-values, one draw set shared across tests.

    p = (1 + #{resampled statistic >= observed}) / (B + 1); the >= is on the
    test's own statistic (S for GET, max component for MET, z otherwise).
    """
    if n_permutations < 100:
        raise InvalidArgumentError("use at least 100 permutations")
    bad = sorted(set(tests) - set(TESTS))
    if bad:
        raise InvalidArgumentError(f"unknown tests: {bad}")
    sz = lab.sizes()
    if moments is None:
        moments = perm_moments(degree_stats(g), sz)
    obs = statistics(g, lab, moments)
    z_o, z_w, z_d, s, degenerate = resampled_statistics(
        g, sz, n_permutations, seed, moments
    )
    out = {}
    for test in tests:
        observed = _observed_statistic(test, obs, met_abs_zd)
        if test == "get":
            draws = s
        elif test == "wet":
            draws = z_w
        elif test == "oet":
            draws = z_o
        elif degenerate:
            draws = z_w
        else:
            draws = np.maximum(z_w, np.abs(z_d) if met_abs_zd else z_d)
        exceed = int(np.count_nonzero(draws >= observed))
        out[test] = (1 + exceed) / (n_permutations + 1)
    return out


def permutation_p(
    g: Graph,
    lab: Labels,
    test: str,
    n_permutations: int,
    seed: int,
    moments: PermNullMoments | None = None,
    met_abs_zd: bool = False,
) -> float:
    return permutation_pvalues(
        g, lab, [test], n_permutations, seed, moments, met_abs_zd
    )[test]
