"""Independent reference implementations used as test oracles.

These deliberately avoid the library's code paths: Floyd-Warshall and
per-source Bellman-Ford for exact distances, exhaustive walk enumeration
for hop-limited distances, and union-find for components.
"""

import numpy as np


def floyd_warshall(g):
    """Dense all-pairs relaxation; independent of the scipy-backed oracle."""
    n = g.n
    dist = np.full((n, n), np.inf)
    np.fill_diagonal(dist, 0.0)
    for (u, v), w in g.weights.items():
        dist[u, v] = min(dist[u, v], w)
        dist[v, u] = min(dist[v, u], w)
    for k in range(n):
        dist = np.minimum(dist, dist[:, k, None] + dist[None, k, :])
    return dist


def single_source_relax(g, source):
    """Textbook Bellman-Ford from one source (non-negative use only here)."""
    dist = [float("inf")] * g.n
    dist[source] = 0.0
    edges = [(u, v, w) for (u, v), w in g.weights.items()]
    for _ in range(max(0, g.n - 1)):
        changed = False
        for u, v, w in edges:
            if dist[u] + w < dist[v]:
                dist[v] = dist[u] + w
                changed = True
            if dist[v] + w < dist[u]:
                dist[u] = dist[v] + w
                changed = True
        if not changed:
            break
    return dist


def walk_min_weight(g, source, target, max_hops, weights=None):
    """Minimum weight over walks with at most max_hops edges, by exhaustive
    recursive enumeration. Exponential; keep instances tiny."""
    adj = {v: [] for v in range(g.n)}
    wmap = g.weights if weights is None else weights
    for (u, v), w in wmap.items():
        adj[u].append((v, w))
        adj[v].append((u, w))
    best = [0.0 if source == target else float("inf")]

    def explore(node, hops_left, acc):
        if node == target and acc < best[0]:
            best[0] = acc
        if hops_left == 0:
            return
        for nxt, w in adj[node]:
            explore(nxt, hops_left - 1, acc + w)

    explore(source, max_hops, 0.0)
    return best[0]


def union_find_components(g, removed):
    """Reference partition of V minus removed, via union-find."""
    removed = set(removed)
    parent = {v: v for v in range(g.n) if v not in removed}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v in g.edges:
        if u not in removed and v not in removed:
            parent[find(u)] = find(v)
    groups = {}
    for v in parent:
        groups.setdefault(find(v), []).append(v)
    comps = sorted((sorted(grp) for grp in groups.values()), key=lambda c: c[0])
    return tuple(tuple(c) for c in comps)


def path_graph(n, weights=None):
    """Path 0-1-...-n-1; unit weights unless given."""
    from dpapsd import WeightedGraph

    if weights is None:
        weights = [1.0] * (n - 1)
    return WeightedGraph(n, {(i, i + 1): float(w) for i, w in enumerate(weights)})


def path_decomposition(n):
    """Canonical width-1 decomposition of the n-vertex path."""
    from dpapsd import TreeDecomposition

    bags = tuple(frozenset({i, i + 1}) for i in range(n - 1))
    edges = tuple((i, i + 1) for i in range(n - 2))
    return TreeDecomposition(bags=bags, tree_edges=edges)
