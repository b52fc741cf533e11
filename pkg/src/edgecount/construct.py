"""Similarity-graph construction: K-MSTs and K-NNGs from point clouds or
distance matrices, synthetic rule-based graphs, and edge-count truncation.

The K-MST is the union of K successively edge-disjoint minimum spanning
trees; its edge list keeps construction order (layer 1 first, Kruskal
acceptance order within a layer), which is what ``truncate_to_size`` keys
on when realizing arbitrary target edge counts.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import pdist

from . import kernels
from .errors import InternalInconsistencyError, InvalidArgumentError
from .graph import Graph
from .rng import spawn_generator


@dataclass(frozen=True)
class PointCloud:
    """n observations in d dimensions, one row per observation."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim != 2:
            raise InvalidArgumentError("point cloud must be a 2-d array")
        if v.shape[0] < 2:
            raise InvalidArgumentError("point cloud needs at least two observations")
        if not np.all(np.isfinite(v)):
            raise InvalidArgumentError("point cloud contains non-finite values")
        object.__setattr__(self, "values", v)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def d(self) -> int:
        return self.values.shape[1]


def as_point_cloud(x) -> PointCloud:
    if isinstance(x, PointCloud):
        return x
    return PointCloud(np.asarray(x, dtype=np.float64))


@dataclass(frozen=True)
class DistanceMatrix:
    """Pairwise distances in condensed (upper-triangle, row-major) form."""

    n: int
    condensed: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.condensed, dtype=np.float64)
        if c.shape != (self.n * (self.n - 1) // 2,):
            raise InvalidArgumentError("condensed length does not match n")
        if not np.all(np.isfinite(c)) or np.any(c < 0):
            raise InvalidArgumentError("distances must be finite and nonnegative")
        object.__setattr__(self, "condensed", c)

    def index(self, i: int, j: int) -> int:
        if i == j:
            raise InvalidArgumentError("no condensed entry for the diagonal")
        if i > j:
            i, j = j, i
        return self.n * i - i * (i + 3) // 2 + j - 1

    def get(self, i: int, j: int) -> float:
        return float(self.condensed[self.index(i, j)])

    def row(self, i: int) -> np.ndarray:
        """Distances from node i to every other node, indexed by the other id."""
        out = np.empty(self.n, dtype=np.float64)
        out[i] = 0.0
        if i > 0:
            js = np.arange(i)
            out[:i] = self.condensed[self.n * js - js * (js + 3) // 2 + i - 1]
        if i < self.n - 1:
            base = self.index(i, i + 1)
            out[i + 1 :] = self.condensed[base : base + (self.n - 1 - i)]
        return out


def euclidean_distances(points) -> DistanceMatrix:
    pc = as_point_cloud(points)
    return DistanceMatrix(pc.n, pdist(pc.values))


def _pair_arrays(n: int) -> tuple[np.ndarray, np.ndarray]:
    iu, iv = np.triu_indices(n, k=1)
    return iu.astype(np.int64), iv.astype(np.int64)


def _run_layers(dm: DistanceMatrix, k: int) -> tuple[Graph, np.ndarray]:
    n = dm.n
    eu, ev = _pair_arrays(n)
    order = np.lexsort((ev, eu, dm.condensed)).astype(np.int64)
    out_u, out_v, sizes = kernels.kruskal_kmst(order, eu, ev, n, k)
    return Graph(n, np.column_stack([out_u, out_v])), sizes


def kmst_layers(
    dm: DistanceMatrix, k: int, on_deficit: str = "forest"
) -> tuple[Graph, np.ndarray]:
    """K-MST plus the per-layer edge counts.

    Layer j is the minimum spanning tree of the complete graph minus the
    edges of layers 1..j-1 (Kruskal with a used-edge mask; distance ties
    broken by the smaller node pair).  Greedy layering can strand a node:
    a hub may spend all N-1 incident edges before layer K, after which no
    spanning tree exists on the remainder.  With on_deficit="forest" such
    layers degrade to maximal spanning forests (layer_sizes records the
    true counts); with "error" the construction refuses instead.
    """
    n = dm.n
    if n < 2:
        raise InvalidArgumentError("K-MST needs at least two nodes")
    if k < 1:
        raise InvalidArgumentError("K must be positive")
    if on_deficit not in ("forest", "error"):
        raise InvalidArgumentError("on_deficit must be 'forest' or 'error'")
    if k * (n - 1) > n * (n - 1) // 2:
        raise InvalidArgumentError(
            f"K={k} infeasible: K(N-1)={k * (n - 1)} exceeds the "
            f"{n * (n - 1) // 2} edges of the complete graph"
        )
    g, sizes = _run_layers(dm, k)
    if on_deficit == "error" and g.num_edges < k * (n - 1):
        short = int(np.argmax(sizes < n - 1)) + 1
        raise InvalidArgumentError(
            f"layer {short} cannot span: a node exhausted its incident edges"
        )
    return g, sizes


def kmst(dm: DistanceMatrix, k: int, on_deficit: str = "forest") -> Graph:
    """Union of the 1st..Kth MSTs on the complete distance graph.

    See kmst_layers for the disconnected-remainder (deficit) semantics;
    a deficit is warned about here since only the union is returned.
    """
    g, _sizes = kmst_layers(dm, k, on_deficit)
    if g.num_edges < k * (dm.n - 1):
        warnings.warn(
            f"K-MST deficit: {g.num_edges} edges instead of {k * (dm.n - 1)} "
            "(some layers could not span; see kmst_layers)"
        )
    return g


def kmst_at_least(dm: DistanceMatrix, min_edges: int) -> Graph:
    """Smallest K-MST union with at least ``min_edges`` edges.

    Starts at K = ceil(min_edges / (N-1)) and deepens past deficits; K may
    exceed N/2 here because deficit layers shrink.  Used to realize
    absolute edge-count targets before truncation.
    """
    n = dm.n
    max_pairs = n * (n - 1) // 2
    if not 1 <= min_edges <= max_pairs:
        raise InvalidArgumentError(
            f"min_edges must be in [1, {max_pairs}], got {min_edges}"
        )
    k = max(1, math.ceil(min_edges / (n - 1)))
    while True:
        g, sizes = _run_layers(dm, k)
        if g.num_edges >= min_edges:
            return g
        if np.any(sizes == 0):  # all pair edges consumed already
            raise InternalInconsistencyError(
                "exhausted the complete graph below the requested edge count"
            )
        k += max(1, math.ceil((min_edges - g.num_edges) / (n - 1)))


def knng(dm: DistanceMatrix, k: int) -> Graph:
    """Undirected K-nearest-neighbor graph (mutual edges collapsed).

    Edge (i, j) is present iff j is among i's K nearest or i among j's K
    nearest; distance ties resolve toward the smaller node index.
    """
    n = dm.n
    if not 1 <= k <= n - 1:
        raise InvalidArgumentError("K must be in [1, N-1]")
    edges: dict[tuple[int, int], None] = {}
    others_template = np.arange(n)
    for i in range(n):
        row = dm.row(i)
        others = np.delete(others_template, i)
        ranked = others[np.lexsort((others, row[others]))]
        for j in ranked[:k].tolist():
            pair = (i, j) if i < j else (j, i)
            edges.setdefault(pair, None)
    return Graph(n, list(edges))


def truncate_to_size(g: Graph, target: int) -> Graph:
    """Keep the first ``target`` edges in construction order."""
    if not 1 <= target <= g.num_edges:
        raise InvalidArgumentError(
            f"target {target} not in [1, {g.num_edges}]"
        )
    return Graph(g.n_nodes, np.column_stack([g.edge_u[:target], g.edge_v[:target]]))


def _pair_from_index(idx: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Invert the condensed (upper-triangle row-major) pair index."""
    idx = np.asarray(idx, dtype=np.int64)
    i = (n - 2 - np.floor(
        np.sqrt(4.0 * n * (n - 1) - 8.0 * idx - 7.0) / 2.0 - 0.5
    )).astype(np.int64)

    def row_start(r):  # condensed index of pair (r, r+1)
        return n * r - r * (r + 1) // 2

    # guard against float rounding at row boundaries
    i = np.where(row_start(i) > idx, i - 1, i)
    i = np.where(row_start(i + 1) <= idx, i + 1, i)
    j = idx - row_start(i) + i + 1
    return i, j


GEN_RULES = ("i", "ii", "iii", "iv", "v", "vi")


def gen_rule(rule: str, n_nodes: int, alpha: float, seed: int) -> Graph:
    """Synthetic graphs from the six generating rules.

    (i)   hub: node 0 joined to ceil(N^alpha) random nodes, plus N random
          edges among nodes 1..N-1;
    (ii)  hub plus the cycle through nodes 1..N-1;
    (iii) complete graph on the first ceil(N^alpha) nodes, 2(N-M) random
          edges among the rest, one connector edge;
    (iv)  circulant: every node joined to its next ceil(N^alpha) nodes on a
          circle, plus the single extra edge (node 0, node 1+ceil(N^alpha));
    (v)   K-MST on N iid standard 2-d Gaussians, K = ceil(N^alpha);
    (vi)  same as (v) with 50-d Gaussians.
    """
    if rule not in GEN_RULES:
        raise InvalidArgumentError(f"unknown rule {rule!r}; expected one of {GEN_RULES}")
    if not 0 <= alpha < 1:
        # alpha = 0 is the hub-size-1 / K=1 edge of the grid
        raise InvalidArgumentError("alpha must be in [0, 1)")
    if n_nodes < 5:
        raise InvalidArgumentError("rules need at least 5 nodes")
    rng = spawn_generator(seed)
    hub_size = math.ceil(n_nodes**alpha)

    if rule in ("i", "ii"):
        if hub_size > n_nodes - 1:
            raise InvalidArgumentError("hub size exceeds available nodes")
        targets = rng.choice(np.arange(1, n_nodes), size=hub_size, replace=False)
        edges = [(0, int(t)) for t in sorted(targets.tolist())]
        if rule == "i":
            rest_pairs = (n_nodes - 1) * (n_nodes - 2) // 2
            if n_nodes > rest_pairs:
                raise InvalidArgumentError("not enough pairs for the random edges")
            pick = rng.choice(rest_pairs, size=n_nodes, replace=False)
            pu, pv = _pair_from_index(np.sort(pick), n_nodes - 1)
            edges.extend(zip((pu + 1).tolist(), (pv + 1).tolist()))
        else:
            edges.extend((i, i + 1) for i in range(1, n_nodes - 1))
            edges.append((1, n_nodes - 1))
        return Graph(n_nodes, edges)

    if rule == "iii":
        m_clique = hub_size
        if m_clique < 2 or m_clique > n_nodes - 1:
            raise InvalidArgumentError("clique size must be in [2, N-1]")
        rest = n_nodes - m_clique
        want = 2 * rest
        rest_pairs = rest * (rest - 1) // 2
        if want > rest_pairs:
            raise InvalidArgumentError(
                f"rule iii needs {want} edges among {rest} nodes "
                f"but only {rest_pairs} pairs exist"
            )
        edges = [(a, b) for a in range(m_clique) for b in range(a + 1, m_clique)]
        pick = rng.choice(rest_pairs, size=want, replace=False)
        pu, pv = _pair_from_index(np.sort(pick), rest)
        edges.extend(zip((pu + m_clique).tolist(), (pv + m_clique).tolist()))
        edges.append((m_clique - 1, m_clique))
        return Graph(n_nodes, edges)

    if rule == "iv":
        span = hub_size
        if span >= n_nodes:
            raise InvalidArgumentError("circulant span must be below N")
        edges: dict[tuple[int, int], None] = {}
        for i in range(n_nodes):
            for step in range(1, span + 1):
                j = (i + step) % n_nodes
                pair = (i, j) if i < j else (j, i)
                edges.setdefault(pair, None)
        extra_target = 1 + span
        if extra_target >= n_nodes:
            raise InvalidArgumentError("extra edge target out of range")
        edges.setdefault((0, extra_target), None)
        return Graph(n_nodes, list(edges))

    d = 2 if rule == "v" else 50
    k = hub_size
    points = rng.standard_normal((n_nodes, d))
    return kmst(euclidean_distances(points), k)
