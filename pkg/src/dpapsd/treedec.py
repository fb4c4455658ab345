"""Tree decompositions: validation, reduction to subgraphs, separator bags."""

from __future__ import annotations

import heapq
from dataclasses import dataclass

import numpy as np
from scipy.sparse import csgraph


class DecompositionError(RuntimeError):
    """Raised when an operation needs a valid decomposition and finds none."""


@dataclass(frozen=True)
class TreeDecomposition:
    """A labeled tree of bags (vertex subsets) over some graph's vertices.

    `bags[i]` is the vertex set of tree node i; `tree_edges` are unordered
    pairs of bag indices. Structural sanity (index ranges, no duplicate or
    self tree-edges) is enforced here; the decomposition axioms relative to
    a concrete graph are checked by `validate_decomposition`.
    """

    bags: tuple
    tree_edges: tuple

    def __post_init__(self):
        bags = tuple(frozenset(int(v) for v in b) for b in self.bags)
        edges = []
        seen = set()
        for i, j in self.tree_edges:
            i, j = int(i), int(j)
            if i == j:
                raise ValueError(f"bag tree edge ({i}, {j}) is a self-loop")
            if not (0 <= i < len(bags) and 0 <= j < len(bags)):
                raise ValueError(f"bag tree edge ({i}, {j}) references a missing bag")
            key = (min(i, j), max(i, j))
            if key in seen:
                raise ValueError(f"duplicate bag tree edge {key}")
            seen.add(key)
            edges.append(key)
        object.__setattr__(self, "bags", bags)
        object.__setattr__(self, "tree_edges", tuple(sorted(edges)))

    @property
    def bag_count(self):
        return len(self.bags)

    @property
    def width(self):
        if not self.bags:
            return -1
        return max(len(b) for b in self.bags) - 1

    def neighbors(self):
        adj = {i: set() for i in range(len(self.bags))}
        for i, j in self.tree_edges:
            adj[i].add(j)
            adj[j].add(i)
        return adj


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    violations: tuple

    def __str__(self):
        if self.ok:
            return "ok"
        return "\n".join(self.violations)


class _DSU:
    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, x):
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[rb] = ra
        return True


def validate_decomposition(g, t):
    """Check the three decomposition axioms plus bag-tree shape.

    Violations are data, not failures: the report names every uncovered
    vertex/edge, every vertex whose bags are disconnected in the tree, and
    any structural defect of the bag tree itself.
    """
    violations = []
    nbags = t.bag_count
    if nbags == 0 and g.n > 0:
        violations.append("decomposition has no bags")
    for i, bag in enumerate(t.bags):
        for v in bag:
            if not 0 <= v < g.n:
                violations.append(f"bag {i} contains vertex {v} outside graph range")
    if nbags > 0:
        dsu = _DSU(nbags)
        for i, j in t.tree_edges:
            if not dsu.union(i, j):
                violations.append(f"bag tree edge ({i}, {j}) closes a cycle")
        roots = {dsu.find(i) for i in range(nbags)}
        if len(roots) > 1:
            violations.append("bag tree is not connected")

    in_bags = {}
    for i, bag in enumerate(t.bags):
        for v in bag:
            in_bags.setdefault(v, []).append(i)

    for v in range(g.n):
        if v not in in_bags:
            violations.append(f"vertex {v} not covered by any bag")
    for u, v in g.edges:
        hosts = set(in_bags.get(u, ()))
        if not hosts.intersection(in_bags.get(v, ())):
            violations.append(f"edge ({u}, {v}) not covered by any bag")

    # vertex connectivity: the bags holding v must induce a connected subtree
    for v in sorted(in_bags):
        holders = in_bags[v]
        if len(holders) <= 1:
            continue
        pos = {b: k for k, b in enumerate(holders)}
        dsu = _DSU(len(holders))
        for i, j in t.tree_edges:
            if i in pos and j in pos:
                dsu.union(pos[i], pos[j])
        if len({dsu.find(k) for k in range(len(holders))}) > 1:
            violations.append(
                f"bags containing vertex {v} do not form a connected subtree"
            )

    return ValidationReport(ok=not violations, violations=tuple(violations))


def _reduce_bag_list(bags, tree_edges, keep):
    """Intersect bags with `keep`, then splice away bags absorbed by a
    tree-neighbor. Ties (equal bags) remove the higher index. Returns
    (bags, tree_edges) re-indexed in ascending original order."""
    bags = [frozenset(b) & keep for b in bags]
    nbags = len(bags)
    adj = {i: set() for i in range(nbags)}
    for i, j in tree_edges:
        adj[i].add(j)
        adj[j].add(i)
    alive = [True] * nbags

    def absorber(i):
        for j in sorted(adj[i]):
            if bags[i] < bags[j] or (bags[i] == bags[j] and i > j):
                return j
        return None

    heap = list(range(nbags))
    heapq.heapify(heap)
    while heap:
        i = heapq.heappop(heap)
        if not alive[i]:
            continue
        j = absorber(i)
        if j is None:
            continue
        alive[i] = False
        others = adj[i] - {j}
        adj[j].discard(i)
        adj[j].update(others)
        for k in others:
            adj[k].discard(i)
            adj[k].add(j)
            heapq.heappush(heap, k)
        adj[i].clear()
        heapq.heappush(heap, j)

    survivors = [i for i in range(nbags) if alive[i]]
    remap = {old: new for new, old in enumerate(survivors)}
    out_bags = [bags[i] for i in survivors]
    out_edges = sorted(
        (min(remap[i], remap[j]), max(remap[i], remap[j]))
        for i in survivors
        for j in adj[i]
        if i < j
    )
    return out_bags, out_edges


def reduce_decomposition(t, h_vertices):
    """Restrict a decomposition to a vertex subset (subgraph reduction).

    Every bag is intersected with `h_vertices`; bags that become subsets of
    a tree-adjacent bag are repeatedly removed, splicing the tree through
    the absorbing bag. Width never increases, and no surviving bag is a
    subset of a tree-adjacent one.
    """
    keep = frozenset(int(v) for v in h_vertices)
    if not keep:
        raise ValueError("h_vertices must be non-empty")
    bags, edges = _reduce_bag_list(t.bags, t.tree_edges, keep)
    return TreeDecomposition(bags=tuple(bags), tree_edges=tuple(edges))


def _first_balanced_bag(adj_csr, n_verts, local_bags):
    """Smallest index whose removal leaves components of size <= n/2."""
    half = n_verts / 2.0
    for idx, bag in enumerate(local_bags):
        keep = np.ones(n_verts, dtype=bool)
        keep[bag] = False
        kept = np.flatnonzero(keep)
        if kept.size == 0:
            return idx
        if kept.size <= half:
            return idx
        sub = adj_csr[kept][:, kept]
        _, labels = csgraph.connected_components(sub, directed=False)
        if np.bincount(labels).max() <= half:
            return idx
    return None


def find_separator_bag(g, t):
    """Smallest bag index that balances the graph when removed.

    Removing the returned bag leaves connected components with at most
    |V|/2 vertices each; a bag like this always exists for a valid
    decomposition. Raises DecompositionError when no bag qualifies.
    """
    if t.bag_count == 0:
        raise DecompositionError("decomposition has no bags")
    adj = g.csr()
    locals_ = [np.fromiter((v for v in sorted(b)), dtype=np.int64) for b in t.bags]
    for arr in locals_:
        if arr.size and (arr.min() < 0 or arr.max() >= g.n):
            raise DecompositionError("bag references vertices outside the graph")
    idx = _first_balanced_bag(adj, g.n, locals_)
    if idx is None:
        raise DecompositionError(
            f"no bag balances the graph (n={g.n}, bags={t.bag_count}); "
            "the decomposition is invalid"
        )
    return idx


def heuristic_decomposition(g):
    """Min-degree elimination ordering decomposition (width upper bound).

    Convenience constructor for graphs that arrive without a decomposition;
    the result always validates, but its width is only a heuristic bound on
    the true tree-width.
    """
    n = g.n
    if n == 0:
        return TreeDecomposition(bags=(), tree_edges=())
    adj = {v: set() for v in range(n)}
    for u, v in g.edges:
        adj[u].add(v)
        adj[v].add(u)

    order = []
    fill_neighbors = {}
    active = set(range(n))
    while active:
        v = min(active, key=lambda x: (len(adj[x]), x))
        nbrs = sorted(adj[v])
        fill_neighbors[v] = nbrs
        order.append(v)
        for a in nbrs:
            adj[a].discard(v)
        for i, a in enumerate(nbrs):
            for b in nbrs[i + 1:]:
                adj[a].add(b)
                adj[b].add(a)
        del adj[v]
        active.discard(v)

    elim_pos = {v: i for i, v in enumerate(order)}
    bags = [frozenset([v, *fill_neighbors[v]]) for v in order]
    edges = []
    roots = []
    for i, v in enumerate(order):
        nbrs = fill_neighbors[v]
        if nbrs:
            parent = min(nbrs, key=lambda u: elim_pos[u])
            edges.append((i, elim_pos[parent]))
        else:
            roots.append(i)
    for a, b in zip(roots, roots[1:]):
        edges.append((a, b))
    return TreeDecomposition(bags=tuple(bags), tree_edges=tuple(edges))
