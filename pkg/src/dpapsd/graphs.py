"""Weighted undirected graphs and exact / hop-limited shortest-distance oracles."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse import csgraph

from .hoplimit import hop_limited_matrix


def _canonical_edge(u, v):
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class Path:
    """A vertex sequence; hop count is the number of edges."""

    vertices: tuple

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(int(v) for v in self.vertices))
        if not self.vertices:
            raise ValueError("a path needs at least one vertex")

    @property
    def hops(self):
        return len(self.vertices) - 1

    def is_in(self, g):
        """True when every consecutive pair is an edge of g."""
        return all(
            g.has_edge(u, v) for u, v in zip(self.vertices, self.vertices[1:])
        )

    def weight(self, g):
        """Total weight along the path; raises if a step is not an edge."""
        return sum(g.weight(u, v) for u, v in zip(self.vertices, self.vertices[1:]))


class WeightedGraph:
    """Simple undirected graph with real edge weights on vertices 0..n-1.

    No self-loops, no parallel edges; each edge carries exactly one weight.
    Weights are normally non-negative (the private input). Negative values
    are tolerated by the container so the same type can hold noise-perturbed
    weights; operations that require non-negativity (`exact_apsd`, the file
    codec) check and reject explicitly.
    """

    __slots__ = ("n", "_weights", "_eu", "_ev", "_ew")

    def __init__(self, n, weights):
        if n < 0:
            raise ValueError(f"vertex count must be >= 0, got {n}")
        self.n = int(n)
        canon = {}
        for (u, v), w in weights.items():
            u, v = int(u), int(v)
            if u == v:
                raise ValueError(f"self-loop on vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) out of range for n={n}")
            key = _canonical_edge(u, v)
            if key in canon:
                raise ValueError(f"duplicate edge {key}")
            w = float(w)
            if not np.isfinite(w):
                raise ValueError(f"edge {key} has non-finite weight {w}")
            canon[key] = w
        keys = sorted(canon)
        self._weights = {k: canon[k] for k in keys}
        self._eu = np.array([k[0] for k in keys], dtype=np.int64)
        self._ev = np.array([k[1] for k in keys], dtype=np.int64)
        self._ew = np.array([canon[k] for k in keys], dtype=np.float64)
        for arr in (self._eu, self._ev, self._ew):
            arr.setflags(write=False)

    @classmethod
    def from_edges(cls, n, edges):
        """Build from an iterable of (u, v, weight) triples."""
        return cls(n, {(u, v): w for u, v, w in edges})

    @property
    def edges(self):
        return tuple(self._weights)

    @property
    def weights(self):
        return dict(self._weights)

    @property
    def edge_count(self):
        return len(self._weights)

    def weight(self, u, v):
        return self._weights[_canonical_edge(u, v)]

    def has_edge(self, u, v):
        return _canonical_edge(u, v) in self._weights

    def edge_arrays(self):
        """Canonically ordered (eu, ev, ew) arrays; do not mutate."""
        return self._eu, self._ev, self._ew

    def with_weights(self, weights):
        """Same topology, new weight map (must cover the same edge set)."""
        new = {_canonical_edge(u, v): float(w) for (u, v), w in weights.items()}
        if set(new) != set(self._weights):
            raise ValueError("weight map does not match the edge set")
        return WeightedGraph(self.n, new)

    def adjacency(self):
        adj = {v: {} for v in range(self.n)}
        for (u, v), w in self._weights.items():
            adj[u][v] = w
            adj[v][u] = w
        return adj

    def csr(self, weights=None):
        """Symmetric CSR adjacency; explicit zeros are kept as real edges."""
        w = self._ew if weights is None else np.asarray(weights, dtype=np.float64)
        data = np.concatenate([w, w])
        rows = np.concatenate([self._eu, self._ev])
        cols = np.concatenate([self._ev, self._eu])
        return sp.coo_matrix((data, (rows, cols)), shape=(self.n, self.n)).tocsr()

    def is_connected(self):
        if self.n <= 1:
            return True
        ncomp, _ = csgraph.connected_components(self.csr(), directed=False)
        return ncomp == 1

    def __eq__(self, other):
        if not isinstance(other, WeightedGraph):
            return NotImplemented
        return self.n == other.n and self._weights == other._weights

    def __hash__(self):
        return hash((self.n, tuple(self._weights.items())))

    def __repr__(self):
        return f"WeightedGraph(n={self.n}, m={self.edge_count})"


class DistanceMatrix:
    """Dense matrix of pairwise distances; +inf marks unreachable pairs."""

    __slots__ = ("_values",)

    def __init__(self, values):
        arr = np.asarray(values, dtype=np.float64)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {arr.shape}")
        arr = arr.copy()
        arr.setflags(write=False)
        self._values = arr

    @property
    def n(self):
        return self._values.shape[0]

    @property
    def values(self):
        return self._values

    def __getitem__(self, pair):
        u, v = pair
        return float(self._values[u, v])

    def max_abs_difference(self, other):
        """Largest entry-wise gap; inf if reachability disagrees anywhere."""
        a, b = self._values, other.values
        if a.shape != b.shape:
            raise ValueError("matrix sizes differ")
        inf_a, inf_b = np.isinf(a), np.isinf(b)
        if (inf_a != inf_b).any():
            return float("inf")
        finite = ~inf_a
        if not finite.any():
            return 0.0
        return float(np.abs(a[finite] - b[finite]).max())

    def allclose(self, other, tol=1e-9):
        return self.max_abs_difference(other) <= tol

    def __repr__(self):
        return f"DistanceMatrix(n={self.n})"


def exact_apsd(g):
    """Exact all-pairs shortest distances for non-negative weights.

    Backed by per-source Dijkstra relaxations; disconnected pairs map to
    +inf, the diagonal is zero and the result is symmetrized.
    """
    _, _, ew = g.edge_arrays()
    if ew.size and ew.min() < 0:
        raise ValueError("exact_apsd requires non-negative weights")
    if g.n == 0:
        return DistanceMatrix(np.zeros((0, 0)))
    dist = csgraph.dijkstra(g.csr(), directed=True)
    dist = np.minimum(dist, dist.T)
    np.fill_diagonal(dist, 0.0)
    return DistanceMatrix(dist)


def k_hop_apsd(g, k):
    """Minimum weight over walks with at most k edges, for every pair.

    Computed via the layered recurrence d(v,u,j) = min over edges (z,u) of
    d(v,z,j-1) + w(z,u), with the stay-put option so budgets nest. Weights
    may be negative (noisy graphs); the hop cap keeps the values finite.
    """
    if k < 1:
        raise ValueError(f"hop budget must be >= 1, got {k}")
    eu, ev, ew = g.edge_arrays()
    dist = hop_limited_matrix(g.n, eu, ev, ew, k)
    dist = np.minimum(dist, dist.T)
    return DistanceMatrix(dist)


def l1_weight_distance(w1, w2):
    """L1 distance between two weight maps over the same edge set."""
    a = {_canonical_edge(u, v): float(w) for (u, v), w in w1.items()}
    b = {_canonical_edge(u, v): float(w) for (u, v), w in w2.items()}
    if set(a) != set(b):
        raise ValueError("weight maps cover different edge sets")
    return float(sum(abs(a[k] - b[k]) for k in a))


def components_after_removal(g, removed):
    """Connected components of the graph with `removed` vertices deleted.

    Returns a tuple of sorted vertex tuples, ordered by minimum vertex index.
    Removing every vertex yields the empty partition.
    """
    removed = frozenset(int(v) for v in removed)
    for v in removed:
        if not 0 <= v < g.n:
            raise ValueError(f"removed vertex {v} out of range for n={g.n}")
    keep = np.ones(g.n, dtype=bool)
    keep[list(removed)] = False
    idx = np.flatnonzero(keep)
    if idx.size == 0:
        return ()
    sub = g.csr()[idx][:, idx]
    ncomp, labels = csgraph.connected_components(sub, directed=False)
    groups = [[] for _ in range(ncomp)]
    for local, lab in enumerate(labels):
        groups[lab].append(int(idx[local]))
    groups.sort(key=min)
    return tuple(tuple(sorted(grp)) for grp in groups)
