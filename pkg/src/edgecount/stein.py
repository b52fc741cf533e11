"""Monte Carlo estimate of the finite-sample Stein upper bound on the
normal approximation error under the bootstrap null.

The target is W = a1 Z_w^B + a2 sqrt(T_G/V_G)(Z_d^B - sqrt(1 - V_G/T_G) Z_X)
+ a3 Z_X, rewritten as W = sum_e xi_e + sum_i xi_i with xi_e = b0 h(e+)h(e-)
and xi_i = b_i h(i), where h(i) = 1{g_i = 1} - p over iid Bernoulli(p)
assignments.  The bound is

    sqrt(2/pi) * E|sum (xi eta - E xi eta)| / Var(W)
      + (sum E|xi_i eta_i^2| + sum E|xi_e eta_e^2|) / Var(W)^1.5

with eta the xi-sums over dependency neighborhoods (edge: its endpoints
plus all coincident edges; node: itself plus its incident edges).  The
centering expectations are exact Bernoulli moments, E(xi_i eta_i) = b_i^2 pq
and E(xi_e eta_e) = b0^2 (pq)^2; only the outer absolute moments are MC.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import InvalidArgumentError
from .graph import DegreeStats, Graph, degree_stats
from .nulldist import SampleSizes, boot_moments


@dataclass(frozen=True)
class SteinCoefficients:
    """Projection-direction coefficients of the W sum."""

    a: tuple[float, float, float]
    b0: float
    b: np.ndarray


@dataclass(frozen=True)
class SteinBoundEstimate:
    """The three bound terms, the exact Var(W), and the assembled bound."""

    var_w: float
    term_a1: float
    term_a2: float
    term_a3: float
    bound: float
    mc_se: float
    n_samples: int
    seed: int
    mc_var_w: float

    def to_dict(self) -> dict:
        return {
            "var_w": self.var_w,
            "term_a1": self.term_a1,
            "term_a2": self.term_a2,
            "term_a3": self.term_a3,
            "bound": self.bound,
            "mc_se": self.mc_se,
            "n_samples": self.n_samples,
            "seed": self.seed,
            "mc_var_w": self.mc_var_w,
        }


def _check_direction(a) -> tuple[float, float, float]:
    a = tuple(float(x) for x in a)
    if len(a) != 3:
        raise InvalidArgumentError("direction must have three components")
    if all(x == 0.0 for x in a):
        raise InvalidArgumentError("direction must be nonzero")
    return a


def stein_coefficients(ds: DegreeStats, sz: SampleSizes, a) -> SteinCoefficients:
    """b0 and the per-node b_i of the xi decomposition of W."""
    a1, a2, a3 = _check_direction(a)
    p, q = sz.p, sz.q
    big_n = sz.total
    bm = boot_moments(ds, sz)
    if a1 != 0.0 and bm.sigma_w_b <= 0:
        raise InvalidArgumentError(
            "a1 != 0 needs sigma_w > 0 under the bootstrap null"
        )
    if a2 != 0.0 and ds.v_g <= 0:
        raise InvalidArgumentError(
            "a2 != 0 needs V_G > 0 (regular graphs have a constant R_d)"
        )
    b = np.full(ds.n_nodes, a3 / math.sqrt(p * q * big_n))
    if a1 != 0.0:
        deg = ds.degrees.astype(np.float64)
        b = b - a1 * (p - q) * deg / (bm.sigma_w_b * (big_n - 2))
    if a2 != 0.0:
        b = b + a2 * ds.centered / math.sqrt(p * q * ds.v_g)
    b0 = a1 / bm.sigma_w_b if a1 != 0.0 else 0.0
    return SteinCoefficients(a=(a1, a2, a3), b0=b0, b=b)


def var_b_w(ds: DegreeStats, sz: SampleSizes, a) -> float:
    """Exact Var_B(W): unit diagonal plus two vanishing cross terms.

    The a1*a3 and a1*a2 cross terms both carry (n - m) and a sqrt(pq)
    factor; the whole expression reduces to a1^2 + a2^2 + a3^2 at m = n.
    """
    a1, a2, a3 = _check_direction(a)
    m, n = sz.m, sz.n
    big_n = sz.total
    p, q = sz.p, sz.q
    bm = boot_moments(ds, sz)
    if a1 != 0.0 and bm.sigma_w_b <= 0:
        raise InvalidArgumentError("a1 != 0 needs sigma_w > 0 under the bootstrap null")
    if a2 != 0.0 and ds.v_g <= 0:
        raise InvalidArgumentError("a2 != 0 needs V_G > 0")
    out = a1 * a1 + a2 * a2 + a3 * a3
    if a1 == 0.0:
        return out
    spq = math.sqrt(p * q)
    out += 4.0 * a1 * a3 * spq * (n - m) / (big_n - 2) * ds.num_edges / (
        big_n**1.5 * bm.sigma_w_b
    )
    out += 2.0 * a1 * a2 * spq * (n - m) / (big_n - 2) * math.sqrt(max(ds.v_g, 0.0)) / (
        bm.sigma_w_b * big_n
    )
    return out


def mc_stein_bound(
    g: Graph,
    sz: SampleSizes,
    a=(1.0, 1.0, 1.0),
    n_samples: int = 20000,
    seed: int = 0,
) -> SteinBoundEstimate:
    """Estimate the Stein bound by Monte Carlo over bootstrap assignments."""
    if n_samples < 1000:
        raise InvalidArgumentError("use at least 1000 MC samples")
    if g.n_nodes != sz.total:
        raise InvalidArgumentError("sample sizes must sum to the node count")
    ds = degree_stats(g)
    coef = stein_coefficients(ds, sz, a)
    var_w = var_b_w(ds, sz, a)
    t1_mean, t1_var, t2_mean, t3_mean, _w_mean, w_var = kernels.stein_mc(
        g.edge_u, g.edge_v, g.indptr, g.indices,
        coef.b0, coef.b, sz.p, n_samples, seed,
    )
    bound = math.sqrt(2.0 / math.pi) * t1_mean / var_w + (t2_mean + t3_mean) / var_w**1.5
    return SteinBoundEstimate(
        var_w=var_w,
        term_a1=t1_mean,
        term_a2=t2_mean,
        term_a3=t3_mean,
        bound=bound,
        mc_se=math.sqrt(t1_var / n_samples),
        n_samples=n_samples,
        seed=seed,
        mc_var_w=w_var,
    )


def node_product_diagnostic(
    g: Graph,
    sz: SampleSizes,
    a=(1.0, 1.0, 1.0),
    n_samples: int = 20000,
    seed: int = 0,
):
    """Per-node MC mean/SE of xi_i eta_i next to the analytic b_i^2 pq.

    Returns (mc_mean, mc_se, analytic) arrays; used to certify that the
    analytic centering constants match what the sampler actually produces.
    """
    ds = degree_stats(g)
    coef = stein_coefficients(ds, sz, a)
    mean, var = kernels.stein_mc_node_moments(
        g.indptr, g.indices, coef.b0, coef.b, sz.p, n_samples, seed
    )
    analytic = coef.b * coef.b * sz.p * sz.q
    return mean, np.sqrt(var / n_samples), analytic
