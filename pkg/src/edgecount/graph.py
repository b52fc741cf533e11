"""Simple undirected graphs and the degree/neighborhood functionals used by
the edge-count tests and their graph-condition diagnostics.

Notation (used throughout the package): for node i, ``G_i`` is the set of
edges incident to i (so ``|G_i|`` is the degree) and ``G_{i,2}`` the set of
edges touching any neighbor of i.  For an edge e = (e+, e-), ``A_e`` is the
union of the endpoint edge sets and ``B_e`` the union of the endpoint
second neighborhoods.  The centered degree is ``dt_i = |G_i| - 2|G|/N`` and
``V_G = sum dt_i^2``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import InternalInconsistencyError, InvalidArgumentError


def _exact_sum(values: np.ndarray) -> int:
    """Exact integer sum with a wraparound check on the int64 fast path."""
    fast = int(values.sum(dtype=np.int64))
    approx = float(values.astype(np.float64).sum())
    if abs(fast - approx) > max(1.0, 1e-6 * abs(approx)):
        return int(sum(int(x) for x in values))
    return fast


class Graph:
    """Immutable simple undirected graph with a preserved edge order.

    Edges are kept as parallel int64 arrays with u < v per edge.  The order
    of the edge list is significant: layered constructions append per-layer
    and truncation keeps a prefix.
    """

    __slots__ = ("n_nodes", "edge_u", "edge_v", "indptr", "indices")

    def __init__(self, n_nodes: int, edges) -> None:
        n_nodes = int(n_nodes)
        if n_nodes < 1:
            raise InvalidArgumentError("graph needs at least one node")
        arr = np.asarray(edges, dtype=np.int64)
        if arr.size == 0:
            arr = arr.reshape(0, 2)
        if arr.ndim != 2 or arr.shape[1] != 2:
            raise InvalidArgumentError("edges must be an (E, 2) array of node pairs")
        u = np.minimum(arr[:, 0], arr[:, 1]).copy()
        v = np.maximum(arr[:, 0], arr[:, 1]).copy()
        if arr.size:
            if u.min() < 0 or v.max() >= n_nodes:
                raise InvalidArgumentError("edge endpoint out of range")
            if np.any(u == v):
                raise InvalidArgumentError("self-loops are not allowed")
            key = u * n_nodes + v
            if np.unique(key).size != key.size:
                raise InvalidArgumentError("duplicate edges are not allowed")
        self.n_nodes = n_nodes
        self.edge_u = u
        self.edge_v = v
        # CSR adjacency with sorted neighbor lists
        endpoints = np.concatenate([u, v])
        others = np.concatenate([v, u])
        counts = np.bincount(endpoints, minlength=n_nodes)
        indptr = np.zeros(n_nodes + 1, dtype=np.int64)
        np.cumsum(counts, out=indptr[1:])
        order = np.lexsort((others, endpoints))
        self.indptr = indptr
        self.indices = others[order]
        for a in (self.edge_u, self.edge_v, self.indptr, self.indices):
            a.setflags(write=False)

    @property
    def num_edges(self) -> int:
        return len(self.edge_u)

    @property
    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    @property
    def edge_array(self) -> np.ndarray:
        return np.column_stack([self.edge_u, self.edge_v])

    def edges(self):
        """Edge list as (u, v) tuples, in construction order."""
        return list(zip(self.edge_u.tolist(), self.edge_v.tolist()))

    def neighbors(self, i: int) -> np.ndarray:
        return self.indices[self.indptr[i] : self.indptr[i + 1]]

    def has_edge(self, i: int, j: int) -> bool:
        nbr = self.neighbors(i)
        pos = np.searchsorted(nbr, j)
        return pos < len(nbr) and nbr[pos] == j

    def permuted(self, mapping) -> "Graph":
        """Relabel nodes (mapping[old] = new), keeping the edge order."""
        mapping = np.asarray(mapping, dtype=np.int64)
        if sorted(mapping.tolist()) != list(range(self.n_nodes)):
            raise InvalidArgumentError("mapping must be a permutation of node ids")
        return Graph(
            self.n_nodes,
            np.column_stack([mapping[self.edge_u], mapping[self.edge_v]]),
        )

    def __repr__(self) -> str:
        return f"Graph(n_nodes={self.n_nodes}, num_edges={self.num_edges})"


@dataclass(frozen=True)
class DegreeStats:
    """Degree-derived functionals of one graph.

    ``centered`` is dt_i = |G_i| - 2|G|/N and ``v_g`` its sum of squares;
    integer moments are exact.
    """

    degrees: np.ndarray
    num_edges: int
    centered: np.ndarray
    v_g: float
    moment2: int
    moment3: int
    abs_centered3: float
    signed_centered3: float
    max_degree: int
    max_abs_centered: float

    @property
    def n_nodes(self) -> int:
        return len(self.degrees)


def degree_stats(g: Graph) -> DegreeStats:
    deg = g.degrees.astype(np.int64)
    ne = g.num_edges
    centered = deg - 2.0 * ne / g.n_nodes
    return DegreeStats(
        degrees=deg,
        num_edges=ne,
        centered=centered,
        v_g=float(np.sum(centered * centered)),
        moment2=_exact_sum(deg * deg),
        moment3=_exact_sum(deg * deg * deg),
        abs_centered3=float(np.sum(np.abs(centered) ** 3)),
        signed_centered3=float(np.sum(centered**3)),
        max_degree=int(deg.max()) if len(deg) else 0,
        max_abs_centered=float(np.max(np.abs(centered))) if len(centered) else 0.0,
    )


def common_neighbors(g: Graph, i: int, j: int) -> int:
    """N_{i,j}: number of nodes adjacent to both i and j."""
    if i == j:
        raise InvalidArgumentError("common_neighbors needs two distinct nodes")
    if not (0 <= i < g.n_nodes and 0 <= j < g.n_nodes):
        raise InvalidArgumentError("node id out of range")
    return int(
        np.intersect1d(g.neighbors(i), g.neighbors(j), assume_unique=True).size
    )


def count_squares(g: Graph) -> int:
    """Number of 4-cycles (as unordered vertex cycles with cyclic adjacency).

    Each 4-cycle has exactly two diagonal pairs, so summing C(N_{i,j}, 2)
    over unordered pairs double counts:  N_sq = (1/2) sum_{i<j} C(N_{i,j}, 2).
    Chorded cycles are included; see ``count_squares_induced`` for the
    chord-free variant.
    """
    if g.num_edges == 0:
        return 0
    adj = sp.csr_matrix(
        (np.ones(len(g.indices), dtype=np.int64), g.indices, g.indptr),
        shape=(g.n_nodes, g.n_nodes),
    )
    paths2 = (adj @ adj).tocoo()
    mask = paths2.row < paths2.col
    c = paths2.data[mask]
    total = _exact_sum(c * (c - 1) // 2)
    if total % 2:
        raise InternalInconsistencyError("diagonal-pair count must be even")
    return total // 2


def count_squares_induced(g: Graph) -> int:
    """4-cycles without chords (informational; quadratic in neighborhood size)."""
    nbr_sets = [set(g.neighbors(i).tolist()) for i in range(g.n_nodes)]
    total = 0
    for i in range(g.n_nodes):
        for j in range(i + 1, g.n_nodes):
            if j in nbr_sets[i]:
                continue  # diagonal of an induced 4-cycle is a non-edge
            common = sorted(nbr_sets[i] & nbr_sets[j])
            for a_idx in range(len(common)):
                for b_idx in range(a_idx + 1, len(common)):
                    if common[b_idx] not in nbr_sets[common[a_idx]]:
                        total += 1
    if total % 2:
        raise InternalInconsistencyError("diagonal-pair count must be even")
    return total // 2


def second_neighborhood_size(g: Graph, i: int) -> int:
    """|G_{i,2}|: edges with at least one endpoint among the neighbors of i."""
    if not 0 <= i < g.n_nodes:
        raise InvalidArgumentError("node id out of range")
    mark = np.zeros(g.n_nodes, dtype=bool)
    mark[g.neighbors(i)] = True
    return int(np.count_nonzero(mark[g.edge_u] | mark[g.edge_v]))


def _incidence_bitmasks(g: Graph) -> list[int]:
    """Per-node bitmask over edge indices of the incident edges."""
    inc = [0] * g.n_nodes
    for e, (u, v) in enumerate(zip(g.edge_u.tolist(), g.edge_v.tolist())):
        bit = 1 << e
        inc[u] |= bit
        inc[v] |= bit
    return inc


def edge_neighborhood_sizes(g: Graph) -> tuple[np.ndarray, np.ndarray]:
    """Per-edge (|A_e|, |B_e|).

    |A_e| has the closed form deg(e+) + deg(e-) - 1 (the endpoints share
    only e itself in a simple graph).  |B_e| has no closed form; it is the
    popcount of the union of the endpoints' second-neighborhood edge masks.
    """
    deg = g.degrees
    a_sizes = deg[g.edge_u] + deg[g.edge_v] - 1
    inc = _incidence_bitmasks(g)
    second = [0] * g.n_nodes
    for i in range(g.n_nodes):
        acc = 0
        for j in g.neighbors(i).tolist():
            acc |= inc[j]
        second[i] = acc
    b_sizes = np.fromiter(
        (
            (second[u] | second[v]).bit_count()
            for u, v in zip(g.edge_u.tolist(), g.edge_v.tolist())
        ),
        dtype=np.int64,
        count=g.num_edges,
    )
    return a_sizes.astype(np.int64), b_sizes


def crosspair_sum(g: Graph) -> float:
    """sum_i sum_{j != k in nbr(i)} dt_j dt_k, via the square-minus-diagonal trick."""
    ds = degree_stats(g)
    dt = ds.centered
    rows = np.repeat(np.arange(g.n_nodes), g.degrees)
    vals = dt[g.indices]
    s1 = np.bincount(rows, weights=vals, minlength=g.n_nodes)
    s2 = np.bincount(rows, weights=vals * vals, minlength=g.n_nodes)
    return float(np.sum(s1 * s1 - s2))


@dataclass(frozen=True)
class ConditionReport:
    """Finite-graph values of the asymptotic-condition ratios.

    Raw numbers, no pass/fail verdict: the conditions are o(.) statements
    over graph sequences, so only the trend is meaningful.  Centered-degree
    ratios are None on regular graphs (V_G = 0).
    """

    n_nodes: int
    num_edges: int
    v_g: float
    c1_ratio_a: float
    c1_ratio_b: float
    c2_ratio_a: float | None
    c2_ratio_b: float | None
    c2_ratio_c: float | None
    c3_ratio: float | None
    c4_ratio_a: float
    c4_ratio_b: float
    c4_ratio_c: float
    legacy_ae2: float
    legacy_aebe: float
    degree_mean: float
    degree_var: float
    degree_third_moment: float
    n_squares: int
    regular: bool
    n_squares_induced: int | None = None

    def to_dict(self) -> dict:
        return {
            "n_nodes": self.n_nodes,
            "num_edges": self.num_edges,
            "v_g": self.v_g,
            "c1_ratio_a": self.c1_ratio_a,
            "c1_ratio_b": self.c1_ratio_b,
            "c2_ratio_a": self.c2_ratio_a,
            "c2_ratio_b": self.c2_ratio_b,
            "c2_ratio_c": self.c2_ratio_c,
            "c3_ratio": self.c3_ratio,
            "c4_ratio_a": self.c4_ratio_a,
            "c4_ratio_b": self.c4_ratio_b,
            "c4_ratio_c": self.c4_ratio_c,
            "legacy_ae2": self.legacy_ae2,
            "legacy_aebe": self.legacy_aebe,
            "degree_mean": self.degree_mean,
            "degree_var": self.degree_var,
            "degree_third_moment": self.degree_third_moment,
            "n_squares": self.n_squares,
            "n_squares_induced": self.n_squares_induced,
            "regular": self.regular,
        }


def condition_report(g: Graph, include_induced_squares: bool = False) -> ConditionReport:
    """All condition ratios plus degree-distribution moments for one graph."""
    if g.num_edges == 0:
        raise InvalidArgumentError("condition report needs a nonempty graph")
    ds = degree_stats(g)
    ne = ds.num_edges
    n = g.n_nodes
    nsq = count_squares(g)
    cross = crosspair_sum(g)
    a_sizes, b_sizes = edge_neighborhood_sizes(g)
    sum_ae2 = _exact_sum(a_sizes * a_sizes)
    sum_aebe = _exact_sum(a_sizes * b_sizes)
    t = ne + ds.v_g
    regular = ds.v_g <= 0.0
    if regular:
        c2a = c2b = c2c = c3 = None
    else:
        c2a = ds.abs_centered3 / ds.v_g**1.5
        c2b = ds.signed_centered3 / (ds.v_g * np.sqrt(ne))
        c2c = cross / (ne * ds.v_g)
        c3 = ds.max_abs_centered**2 / ds.v_g
    return ConditionReport(
        n_nodes=n,
        num_edges=ne,
        v_g=ds.v_g,
        c1_ratio_a=ds.moment2 / ne**1.5,
        c1_ratio_b=nsq / ne**2,
        c2_ratio_a=c2a,
        c2_ratio_b=c2b,
        c2_ratio_c=c2c,
        c3_ratio=c3,
        c4_ratio_a=ds.moment2 / t**1.5,
        c4_ratio_b=ds.abs_centered3 / t**1.5,
        c4_ratio_c=cross / t**2,
        legacy_ae2=sum_ae2 / (ne * np.sqrt(n)),
        legacy_aebe=sum_aebe / ne**1.5,
        degree_mean=2.0 * ne / n,
        degree_var=ds.v_g / n,
        degree_third_moment=ds.moment3 / n,
        n_squares=nsq,
        regular=regular,
        n_squares_induced=count_squares_induced(g) if include_induced_squares else None,
    )
