"""Shortcut construction for low tree-width graphs.

Recursively splits the graph at balanced separator bags, emitting distance
triples that anchor every pair of vertices to nearby separators, so that true
shortest distances survive in the augmented graph under a logarithmic hop
budget. Also provides the instance-exact sensitivity accountant used to
calibrate noise.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.sparse import csgraph

from .graphs import WeightedGraph
from .treedec import (
    DecompositionError,
    _first_balanced_bag,
    _reduce_bag_list,
    validate_decomposition,
)


@dataclass
class CallTrace:
    """Telemetry for one recursion call, with children in component order.

    `edge_ids` indexes the root graph's canonical edge list and identifies
    the call's subgraph; `span` is the call's slice of the flat triple list
    (children's triples are not included in the parent's span).
    """

    depth: int
    n_vertices: int
    v0_size: int
    v0_prime_size: int | None
    separator_index: int | None
    separator: frozenset | None
    width: int
    shortcut_count: int
    span: tuple
    edge_ids: np.ndarray
    children: list = field(default_factory=list)

    def iter_calls(self):
        yield self
        for child in self.children:
            yield from child.iter_calls()

    @property
    def max_depth(self):
        return max(node.depth for node in self.iter_calls())

    @property
    def call_count(self):
        return sum(1 for _ in self.iter_calls())

    @property
    def total_shortcuts(self):
        return sum(node.shortcut_count for node in self.iter_calls())


class ShortcutList:
    """Flat list of (u, v, x) triples in deterministic emission order."""

    __slots__ = ("us", "vs", "xs")

    def __init__(self, us, vs, xs):
        self.us = np.asarray(us, dtype=np.int64)
        self.vs = np.asarray(vs, dtype=np.int64)
        self.xs = np.asarray(xs, dtype=np.float64)
        for arr in (self.us, self.vs, self.xs):
            arr.setflags(write=False)

    def __len__(self):
        return self.us.size

    def __iter__(self):
        for u, v, x in zip(self.us, self.vs, self.xs):
            yield int(u), int(v), float(x)

    def triples(self):
        return list(self)


@dataclass(frozen=True)
class IntermediateGraph:
    """The input graph with shortcut edges folded in at minimum weight."""

    graph: WeightedGraph

    @property
    def n(self):
        return self.graph.n

    @property
    def weights(self):
        return self.graph.weights


@dataclass(frozen=True)
class SensitivityAccount:
    """Instance-exact L1 sensitivity bound for the emitted triple weights.

    `contributions[e]` sums the shortcut counts of every recursion call whose
    subgraph contains the original edge e; `delta` is the maximum, and bounds
    the L1 change of the emitted weight vector under any unit perturbation of
    the input weights (each emitted distance is 1-Lipschitz in its call's
    weights, and same-level calls are edge-disjoint).
    """

    delta: float
    contributions: dict


class _Builder:
    def __init__(self, g):
        self.eu, self.ev, self.ew = g.edge_arrays()
        self.tag = np.full(g.n, -2, dtype=np.int64)
        self.us = []
        self.vs = []
        self.xs = []
        self.emitted = 0

    def append(self, us, vs, xs):
        self.us.append(np.asarray(us, dtype=np.int64))
        self.vs.append(np.asarray(vs, dtype=np.int64))
        self.xs.append(np.asarray(xs, dtype=np.float64))
        self.emitted += len(xs)

    def shortcuts(self):
        if not self.us:
            empty = np.empty(0)
            return ShortcutList(empty, empty, empty)
        return ShortcutList(
            np.concatenate(self.us), np.concatenate(self.vs), np.concatenate(self.xs)
        )


def _local_csr(builder, verts, edge_ids):
    lu = np.searchsorted(verts, builder.eu[edge_ids])
    lv = np.searchsorted(verts, builder.ev[edge_ids])
    w = builder.ew[edge_ids]
    n = verts.size
    return sp.coo_matrix(
        (np.concatenate([w, w]), (np.concatenate([lu, lv]), np.concatenate([lv, lu]))),
        shape=(n, n),
    ).tocsr()


def _recurse(builder, verts, edge_ids, bags, tree_edges, v0, depth):
    n_call = verts.size
    bag_limit = max(len(b) for b in bags)
    width = bag_limit - 1
    adj = _local_csr(builder, verts, edge_ids)
    start = builder.emitted

    if n_call <= 6 * bag_limit:
        if n_call > 1:
            dist = csgraph.dijkstra(adj, directed=True)
            iu, iv = np.triu_indices(n_call, k=1)
            vals = dist[iu, iv]
            finite = np.isfinite(vals)
            builder.append(verts[iu[finite]], verts[iv[finite]], vals[finite])
        return CallTrace(
            depth=depth,
            n_vertices=n_call,
            v0_size=len(v0),
            v0_prime_size=None,
            separator_index=None,
            separator=None,
            width=width,
            shortcut_count=builder.emitted - start,
            span=(start, builder.emitted),
            edge_ids=edge_ids,
        )

    local_bags = [
        np.array(sorted(np.searchsorted(verts, sorted(b))), dtype=np.int64)
        for b in bags
    ]
    sep_idx = _first_balanced_bag(adj, n_call, local_bags)
    if sep_idx is None:
        raise DecompositionError(
            f"no balanced separator bag at depth {depth} "
            f"(call size {n_call}, {len(bags)} bags); decomposition is invalid"
        )
    separator = bags[sep_idx]
    v0_prime = frozenset(v0) | separator

    sources = np.array(sorted(v0_prime), dtype=np.int64)
    src_local = np.searchsorted(verts, sources)
    dist = csgraph.dijkstra(adj, directed=True, indices=src_local)
    row_of = {int(g): i for i, g in enumerate(sources)}
    sep_sorted = sorted(separator)
    pairs = sorted(
        {(min(v, u), max(v, u)) for v in v0_prime for u in sep_sorted if v != u}
    )
    us, vs, xs = [], [], []
    for a, b in pairs:
        x = dist[row_of[a], np.searchsorted(verts, b)]
        if np.isfinite(x):
            us.append(a)
            vs.append(b)
            xs.append(float(x))
    builder.append(us, vs, xs)
    end = builder.emitted

    # components of the call graph minus the separator, by minimum vertex
    sep_local = local_bags[sep_idx]
    keep = np.ones(n_call, dtype=bool)
    keep[sep_local] = False
    kept = np.flatnonzero(keep)
    sub = adj[kept][:, kept]
    _, labels = csgraph.connected_components(sub, directed=False)
    ncomp = labels.max() + 1 if labels.size else 0
    comps = [verts[kept[labels == c]] for c in range(ncomp)]
    comps.sort(key=lambda c: int(c[0]))

    # classify this call's edges: child component, or intra-separator (dropped)
    tag = builder.tag
    sep_arr = verts[sep_local]
    tag[sep_arr] = -1
    for ci, comp in enumerate(comps):
        tag[comp] = ci
    te1 = tag[builder.eu[edge_ids]]
    te2 = tag[builder.ev[edge_ids]]
    child_of = np.where(te1 >= 0, te1, te2)
    child_of[(te1 == -1) & (te2 == -1)] = -1
    tag[verts] = -2

    children_args = []
    for ci, comp in enumerate(comps):
        child_verts = np.union1d(comp, sep_arr)
        child_edges = edge_ids[child_of == ci]
        child_v0 = (frozenset(v0) & frozenset(comp.tolist())) | separator
        child_keep = frozenset(int(v) for v in child_verts)
        child_bags, child_tree = _reduce_bag_list(bags, tree_edges, child_keep)
        children_args.append((child_verts, child_edges, child_bags, child_tree, child_v0))

    node = CallTrace(
        depth=depth,
        n_vertices=n_call,
        v0_size=len(v0),
        v0_prime_size=len(v0_prime),
        separator_index=sep_idx,
        separator=separator,
        width=width,
        shortcut_count=end - start,
        span=(start, end),
        edge_ids=edge_ids,
    )
    for args in children_args:
        node.children.append(_recurse(builder, *args, depth=depth + 1))
    return node


def _check_inputs(g, t, starting):
    _, _, ew = g.edge_arrays()
    if ew.size and ew.min() < 0:
        raise ValueError("shortcut construction requires non-negative weights")
    report = validate_decomposition(g, t)
    if not report.ok:
        raise DecompositionError(
            "invalid decomposition:\n" + "\n".join(report.violations)
        )
    starting = frozenset(int(v) for v in starting)
    for v in starting:
        if not 0 <= v < g.n:
            raise ValueError(f"starting vertex {v} out of range")
    if g.n > 1 and not g.is_connected():
        raise ValueError("shortcut construction requires a connected graph")
    return starting


def compute_edges(g, t, starting=()):
    """Emit the shortcut triples (u, v, x) and the full recursion trace.

    Small calls (at most 6 times the bag size) emit exact all-pairs
    distances of their subgraph; larger calls pick a balanced separator bag
    S, emit distances between the inherited starting set union S and S, and
    recurse on each component C with the subgraph (C u S, E(C) u E[C, S]).
    Distances are always measured inside the current call's subgraph, and
    unreachable pairs are skipped.
    """
    starting = _check_inputs(g, t, starting)
    builder = _Builder(g)
    if g.n == 0:
        empty = np.empty(0)
        trace = CallTrace(
            depth=1, n_vertices=0, v0_size=0, v0_prime_size=None,
            separator_index=None, separator=None, width=t.width,
            shortcut_count=0, span=(0, 0), edge_ids=np.empty(0, dtype=np.int64),
        )
        return ShortcutList(empty, empty, empty), trace
    verts = np.arange(g.n, dtype=np.int64)
    edge_ids = np.arange(g.edge_count, dtype=np.int64)
    trace = _recurse(
        builder, verts, edge_ids, list(t.bags), list(t.tree_edges), starting, depth=1
    )
    return builder.shortcuts(), trace


def construct_graph(g, t, starting=()):
    """Build the shortcut-augmented graph: copy (G, w), insert every triple
    as an edge keeping the minimum weight when the edge already exists."""
    shortcuts, trace = compute_edges(g, t, starting)
    n = g.n
    eu, ev, ew = g.edge_arrays()
    keys = np.concatenate([eu * n + ev, shortcuts.us * n + shortcuts.vs])
    vals = np.concatenate([ew, shortcuts.xs])
    uniq, inverse = np.unique(keys, return_inverse=True)
    folded = np.full(uniq.size, np.inf)
    np.minimum.at(folded, inverse, vals)
    weights = {
        (int(k // n), int(k % n)): float(w) for k, w in zip(uniq, folded)
    }
    return IntermediateGraph(graph=WeightedGraph(n, weights)), trace


def sensitivity_bound(trace, g):
    """Instance-exact L1 sensitivity of the shortcut weight vector.

    For each original edge, sums the shortcut counts of every call whose
    subgraph contains it; delta is the maximum over edges.
    """
    m = g.edge_count
    contributions = np.zeros(m)
    for call in trace.iter_calls():
        contributions[call.edge_ids] += call.shortcut_count
    eu, ev, _ = g.edge_arrays()
    per_edge = {
        (int(u), int(v)): float(c) for u, v, c in zip(eu, ev, contributions)
    }
    delta = float(contributions.max()) if m else 0.0
    return SensitivityAccount(delta=delta, contributions=per_edge)
