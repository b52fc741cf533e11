"""Experiment runners: empirical size, power vs graph density, chi-square(2)
validity of the generalized statistic, max-degree growth, and Stein-bound
curves.

Reproducibility contract: every work unit (trial, graph replicate, MC
replicate) receives seed ``derive_seed(derive_seed(base, cell), unit)``, so
results are bit-identical for a fixed config and base seed regardless of
worker count or scheduling order.
"""

from __future__ import annotations

import csv
import hashlib
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .construct import (
    euclidean_distances,
    gen_rule,
    kmst,
    kmst_at_least,
    kmst_layers,
    truncate_to_size,
)
from .errors import InvalidArgumentError
from .graph import degree_stats
from .ks import chi2_2_cdf, ks_test
from .nulldist import SampleSizes, perm_moments
from .rng import derive_seed
from .samplers import beta_scenario, sample_scenario, size_distribution
from .stein import mc_stein_bound
from .twosample import (
    TESTS,
    Labels,
    asymptotic_p,
    permutation_pvalues,
    resampled_statistics,
    statistics,
)

EXPERIMENTS = ("size", "power", "validity", "max_degree", "stein")


@dataclass
class ExperimentResult:
    """One experiment run: per-cell rows plus provenance."""

    experiment: str
    config: dict
    rows: list[dict]
    seeds_digest: str
    wall_time_s: float
    extras: dict = field(default_factory=dict)

    def summary(self) -> dict:
        return {
            "experiment": self.experiment,
            "config": self.config,
            "rows": self.rows,
            "extras": self.extras,
            "seeds_digest": self.seeds_digest,
            "wall_time_s": self.wall_time_s,
        }

    def write_csv(self, path) -> None:
        if not self.rows:
            raise InvalidArgumentError("no rows to write")
        fields = list(self.rows[0].keys())
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.DictWriter(fh, fieldnames=fields)
            writer.writeheader()
            writer.writerows(self.rows)


def resolve_workers(workers=None) -> int:
    if workers is None:
        env = os.environ.get("EDGECOUNT_THREADS", "").strip()
        if env:
            workers = int(env)
        else:
            workers = os.cpu_count() or 1
    workers = int(workers)
    if workers < 1:
        raise InvalidArgumentError("worker count must be positive")
    return workers


def _map_units(fn, payloads, workers):
    if workers <= 1 or len(payloads) <= 1:
        return [fn(p) for p in payloads]
    chunk = max(1, math.ceil(len(payloads) / (workers * 8)))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, payloads, chunksize=chunk))


def _digest_seeds(seeds) -> str:
    h = hashlib.sha256()
    for s in seeds:
        h.update(int(s).to_bytes(8, "little"))
    return h.hexdigest()


# --- config handling ---------------------------------------------------------

_DEFAULTS = {
    "size": dict(
        tests=["get"], level=0.05, pvalue="asymptotic", permutations=500,
        exponents=[], k_values=[],
    ),
    "power": dict(tests=["get"], level=0.05, k_values=[], betas=[]),
    "validity": dict(level=0.05, m=None, permutations=2000),
    "max_degree": dict(),
    "stein": dict(
        direction=[1.0, 1.0, 1.0], m_frac=0.5, mc_samples=20000, replicates=20,
    ),
}

_REQUIRED = {
    "size": {"distribution", "d", "m", "n", "trials"},
    "power": {"scenario", "d", "m", "n", "trials"},
    "validity": {"rules", "n_nodes", "graphs"},
    "max_degree": {"d", "n_nodes", "k_grid"},
    "stein": {"d", "k", "n_values"},
}


def resolve_config(config: dict) -> dict:
    """Validate a config dict and fill defaults; rejects unknown keys."""
    if not isinstance(config, dict):
        raise InvalidArgumentError("config must be a JSON object")
    exp = config.get("experiment")
    if exp not in EXPERIMENTS:
        raise InvalidArgumentError(
            f"config key 'experiment' must be one of {EXPERIMENTS}, got {exp!r}"
        )
    allowed = {"experiment", "seed"} | _REQUIRED[exp] | set(_DEFAULTS[exp])
    unknown = sorted(set(config) - allowed)
    if unknown:
        raise InvalidArgumentError(f"unknown config keys: {', '.join(unknown)}")
    missing = sorted(_REQUIRED[exp] - set(config))
    if missing:
        raise InvalidArgumentError(f"missing config keys: {', '.join(missing)}")
    if "seed" not in config:
        raise InvalidArgumentError("config needs a 'seed'")
    resolved = dict(_DEFAULTS[exp])
    resolved.update(config)
    if exp in ("size", "power"):
        bad = sorted(set(resolved["tests"]) - set(TESTS))
        if bad:
            raise InvalidArgumentError(f"unknown tests: {', '.join(bad)}")
    if exp == "size" and not (resolved["exponents"] or resolved["k_values"]):
        raise InvalidArgumentError("size config needs 'exponents' or 'k_values'")
    if exp == "power" and not (resolved["k_values"] or resolved["betas"]):
        raise InvalidArgumentError("power config needs 'k_values' or 'betas'")
    return resolved


# --- empirical size ----------------------------------------------------------

def _size_trial(payload):
    (dist, d, m, n, k, target, tests, level, pvalue, permutations, seed) = payload
    spec = size_distribution(dist, d)
    x, y = sample_scenario(spec, m, n, seed)
    dm = euclidean_distances(np.vstack([x, y]))
    if target is not None:
        g = truncate_to_size(kmst_at_least(dm, target), target)
    else:
        g = kmst(dm, k)
    lab = Labels.from_sizes(m, n)
    if pvalue == "asymptotic":
        mom = perm_moments(degree_stats(g), lab.sizes())
        stats = statistics(g, lab, mom)
        pvals = {t: asymptotic_p(t, stats) for t in tests}
    else:
        pvals = permutation_pvalues(
            g, lab, tests, permutations, derive_seed(seed, 1)
        )
    return {t: int(pvals[t] <= level) for t in tests}


def run_size_experiment(config: dict, workers=None) -> ExperimentResult:
    """Rejection rate of the chosen tests on null data per graph-size cell."""
    cfg = resolve_config({**config, "experiment": "size"})
    workers = resolve_workers(workers)
    if cfg["trials"] < 100:
        raise InvalidArgumentError("size experiments need at least 100 trials")
    if cfg["pvalue"] not in ("asymptotic", "permutation"):
        raise InvalidArgumentError("pvalue must be 'asymptotic' or 'permutation'")
    m, n, d = cfg["m"], cfg["n"], cfg["d"]
    big_n = m + n
    max_pairs = big_n * (big_n - 1) // 2
    cells = [("exponent", e) for e in cfg["exponents"]]
    cells += [("k", k) for k in cfg["k_values"]]
    t0 = time.perf_counter()
    rows = []
    all_seeds = []
    for cell_idx, (kind, value) in enumerate(cells):
        if kind == "exponent":
            target = math.floor(max_pairs**value)
            k = max(1, math.ceil(target / (big_n - 1)))
        else:
            target = None
            k = int(value)
        feasible = k * (big_n - 1) <= max_pairs and (target is None or target >= 1)
        base_row = {
            "distribution": cfg["distribution"], "d": d, "m": m, "n": n,
            "cell": f"{kind}={value}", "k": k,
            "target_edges": target if target is not None else k * (big_n - 1),
            "trials": cfg["trials"], "level": cfg["level"], "pvalue": cfg["pvalue"],
        }
        if not feasible:
            for t in cfg["tests"]:
                rows.append({**base_row, "test": t, "rejection_rate": None, "skipped": True})
            continue
        cell_seed = derive_seed(cfg["seed"], cell_idx)
        seeds = [derive_seed(cell_seed, t) for t in range(cfg["trials"])]
        all_seeds.extend(seeds)
        payloads = [
            (cfg["distribution"], d, m, n, k, target, tuple(cfg["tests"]),
             cfg["level"], cfg["pvalue"], cfg["permutations"], s)
            for s in seeds
        ]
        outcomes = _map_units(_size_trial, payloads, workers)
        for t in cfg["tests"]:
            rate = sum(o[t] for o in outcomes) / cfg["trials"]
            rows.append({**base_row, "test": t, "rejection_rate": rate, "skipped": False})
    return ExperimentResult(
        experiment="size",
        config=cfg,
        rows=rows,
        seeds_digest=_digest_seeds(all_seeds),
        wall_time_s=time.perf_counter() - t0,
    )


# --- power vs graph density --------------------------------------------------

def _power_trial(payload):
    (scenario, d, m, n, k_list, tests, level, seed) = payload
    spec = beta_scenario(scenario, d)
    x, y = sample_scenario(spec, m, n, seed)
    dm = euclidean_distances(np.vstack([x, y]))
    g_full, sizes = kmst_layers(dm, max(k_list))
    prefix = np.cumsum(sizes)
    lab = Labels.from_sizes(m, n)
    out = {}
    for k in k_list:
        g = truncate_to_size(g_full, int(prefix[k - 1]))
        mom = perm_moments(degree_stats(g), lab.sizes())
        stats = statistics(g, lab, mom)
        for t in tests:
            out[(k, t)] = int(asymptotic_p(t, stats) <= level)
    return out


def run_power_experiment(config: dict, workers=None) -> ExperimentResult:
    """Rejection rate under an alternative, per K (or per beta with
    K = ceil(N^beta)) on the pooled K-MST."""
    cfg = resolve_config({**config, "experiment": "power"})
    workers = resolve_workers(workers)
    if cfg["trials"] < 100:
        raise InvalidArgumentError("power experiments need at least 100 trials")
    m, n = cfg["m"], cfg["n"]
    big_n = m + n
    k_of = {}
    for k in cfg["k_values"]:
        k_of.setdefault(int(k), {"k": int(k), "beta": None})
    for beta in cfg["betas"]:
        k = max(1, math.ceil(big_n**beta))
        k_of.setdefault(k, {"k": k, "beta": beta})
    k_list = sorted(k_of)
    if k_list and k_list[-1] * (big_n - 1) > big_n * (big_n - 1) // 2:
        raise InvalidArgumentError(
            f"K={k_list[-1]} infeasible for N={big_n}"
        )
    t0 = time.perf_counter()
    seeds = [derive_seed(derive_seed(cfg["seed"], 0), t) for t in range(cfg["trials"])]
    payloads = [
        (cfg["scenario"], cfg["d"], m, n, tuple(k_list), tuple(cfg["tests"]),
         cfg["level"], s)
        for s in seeds
    ]
    outcomes = _map_units(_power_trial, payloads, workers)
    rows = []
    for k in k_list:
        for t in cfg["tests"]:
            power = sum(o[(k, t)] for o in outcomes) / cfg["trials"]
            rows.append({
                "scenario": cfg["scenario"], "d": cfg["d"], "m": m, "n": n,
                "k": k, "beta": k_of[k]["beta"], "test": t,
                "trials": cfg["trials"], "level": cfg["level"], "power": power,
            })
    return ExperimentResult(
        experiment="power",
        config=cfg,
        rows=rows,
        seeds_digest=_digest_seeds(seeds),
        wall_time_s=time.perf_counter() - t0,
    )


# --- chi-square(2) validity --------------------------------------------------

def _validity_graph(payload):
    (rule, alpha, n_nodes, m, permutations, level, seed) = payload
    g = gen_rule(rule, n_nodes, alpha, seed)
    sz = SampleSizes(m, n_nodes - m)
    _z_o, _z_w, _z_d, s, _deg = resampled_statistics(
        g, sz, permutations, derive_seed(seed, 1)
    )
    _d, p = ks_test(s, chi2_2_cdf)
    return int(p <= level)


def run_validity_experiment(config: dict, workers=None) -> ExperimentResult:
    """KS rejection rate of the permutation distribution of S against
    chi-square(2), per generating rule and alpha."""
    cfg = resolve_config({**config, "experiment": "validity"})
    workers = resolve_workers(workers)
    if cfg["graphs"] < 20:
        raise InvalidArgumentError("use at least 20 graphs per cell")
    if cfg["permutations"] < 1000:
        raise InvalidArgumentError("use at least 1000 permutations per graph")
    n_nodes = cfg["n_nodes"]
    m = cfg["m"] if cfg["m"] is not None else n_nodes // 2
    t0 = time.perf_counter()
    rows = []
    all_seeds = []
    for cell_idx, cell in enumerate(cfg["rules"]):
        rule, alpha = cell["rule"], cell["alpha"]
        cell_seed = derive_seed(cfg["seed"], cell_idx)
        seeds = [derive_seed(cell_seed, i) for i in range(cfg["graphs"])]
        all_seeds.extend(seeds)
        payloads = [
            (rule, alpha, n_nodes, m, cfg["permutations"], cfg["level"], s)
            for s in seeds
        ]
        rejections = _map_units(_validity_graph, payloads, workers)
        rows.append({
            "rule": rule, "alpha": alpha, "n_nodes": n_nodes, "m": m,
            "n": n_nodes - m, "graphs": cfg["graphs"],
            "permutations": cfg["permutations"], "level": cfg["level"],
            "ks_rejection_rate": sum(rejections) / cfg["graphs"],
        })
    return ExperimentResult(
        experiment="validity",
        config=cfg,
        rows=rows,
        seeds_digest=_digest_seeds(all_seeds),
        wall_time_s=time.perf_counter() - t0,
    )


# --- max degree of the K-MST -------------------------------------------------

def max_degree_study(d: int, n_nodes: int, k_grid, seed: int) -> ExperimentResult:
    """Max K-MST degree over a K grid on one Gaussian sample, with the
    log-log least-squares exponent gamma (max_degree ~ c K^gamma)."""
    k_grid = sorted(int(k) for k in k_grid)
    if not k_grid or k_grid[0] < 1:
        raise InvalidArgumentError("k_grid must hold positive integers")
    t0 = time.perf_counter()
    from .rng import spawn_generator

    data_seed = derive_seed(seed, 0)
    points = spawn_generator(data_seed).standard_normal((n_nodes, d))
    g_full, sizes = kmst_layers(euclidean_distances(points), k_grid[-1])
    prefix = np.cumsum(sizes)
    rows = []
    endpoints = np.concatenate([g_full.edge_u, g_full.edge_v])
    n_total = g_full.num_edges
    for k in k_grid:
        cut = int(prefix[k - 1])
        deg = np.bincount(
            np.concatenate([endpoints[:cut], endpoints[n_total : n_total + cut]]),
            minlength=n_nodes,
        )
        rows.append({"k": k, "max_degree": int(deg.max()), "d": d, "n_nodes": n_nodes})
    logk = np.log([r["k"] for r in rows])
    logm = np.log([r["max_degree"] for r in rows])
    gamma, logc = np.polyfit(logk, logm, 1)
    return ExperimentResult(
        experiment="max_degree",
        config={"experiment": "max_degree", "d": d, "n_nodes": n_nodes,
                "k_grid": k_grid, "seed": seed},
        rows=rows,
        seeds_digest=_digest_seeds([data_seed]),
        wall_time_s=time.perf_counter() - t0,
        extras={"gamma": float(gamma), "intercept": float(math.exp(logc))},
    )


# --- Stein bound curves ------------------------------------------------------

def _stein_unit(payload):
    (n_nodes, d, k, direction, m, mc_samples, seed) = payload
    from .rng import spawn_generator

    data_seed = derive_seed(seed, 0)
    mc_seed = derive_seed(seed, 1)
    points = spawn_generator(data_seed).standard_normal((n_nodes, d))
    g = kmst(euclidean_distances(points), k)
    est = mc_stein_bound(
        g, SampleSizes(m, n_nodes - m), direction, mc_samples, mc_seed
    )
    return {
        "n": n_nodes, "d": d, "k": k,
        "a1": direction[0], "a2": direction[1], "a3": direction[2],
        "bound": est.bound, "mc_se": est.mc_se,
        "n_samples": est.n_samples, "seed": seed,
    }


def run_stein_experiment(config: dict, workers=None) -> ExperimentResult:
    """Stein-bound estimates over N, one row per dataset replicate."""
    cfg = resolve_config({**config, "experiment": "stein"})
    workers = resolve_workers(workers)
    direction = tuple(float(x) for x in cfg["direction"])
    t0 = time.perf_counter()
    payloads = []
    all_seeds = []
    for cell_idx, n_nodes in enumerate(cfg["n_values"]):
        n_nodes = int(n_nodes)
        d = n_nodes if cfg["d"] == "n" else int(cfg["d"])
        k = max(1, math.ceil(math.sqrt(n_nodes))) if cfg["k"] == "sqrt" else int(cfg["k"])
        m = int(math.floor(n_nodes * cfg["m_frac"]))
        cell_seed = derive_seed(cfg["seed"], cell_idx)
        for rep in range(cfg["replicates"]):
            seed = derive_seed(cell_seed, rep)
            all_seeds.append(seed)
            payloads.append((n_nodes, d, k, direction, m, cfg["mc_samples"], seed))
    rows = _map_units(_stein_unit, payloads, workers)
    return ExperimentResult(
        experiment="stein",
        config=cfg,
        rows=rows,
        seeds_digest=_digest_seeds(all_seeds),
        wall_time_s=time.perf_counter() - t0,
    )


def run_experiment(config: dict, workers=None) -> ExperimentResult:
    """Dispatch on config['experiment']."""
    cfg = resolve_config(config)
    exp = cfg["experiment"]
    if exp == "size":
        return run_size_experiment(cfg, workers)
    if exp == "power":
        return run_power_experiment(cfg, workers)
    if exp == "validity":
        return run_validity_experiment(cfg, workers)
    if exp == "max_degree":
        return max_degree_study(cfg["d"], cfg["n_nodes"], cfg["k_grid"], cfg["seed"])
    return run_stein_experiment(cfg, workers)
