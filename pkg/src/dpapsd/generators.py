"""Random partial k-tree instances with their natural width-k decompositions."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .graphs import WeightedGraph
from .treedec import TreeDecomposition

ATTACH_RANDOM = "random"
ATTACH_CHAIN = "chain"


@dataclass(frozen=True)
class InstanceBundle:
    """A graph, a matching decomposition, external labels, and provenance."""

    graph: WeightedGraph
    decomposition: TreeDecomposition
    labels: tuple
    provenance: dict = field(hash=False)


def _spanning_edge_ids(n, edges):
    # first edge (in canonical order) that connects two components is critical
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    critical = set()
    for idx, (u, v) in enumerate(edges):
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[rv] = ru
            critical.add(idx)
    return critical


def generate_partial_ktree(
    n,
    k,
    edge_keep_prob=1.0,
    weight_range=(0.0, 10.0),
    seed=0,
    attachment=ATTACH_RANDOM,
    integer_weights=False,
):
    """Generate a connected partial k-tree with uniform random weights.

    Starts from a k-clique and attaches each remaining vertex to a k-clique
    of the current graph (chosen uniformly, or always the newest one with
    attachment="chain", which yields path-like instances of linear
    diameter). The natural decomposition (one bag per attachment) has width
    exactly k. Non-spanning-critical edges are then dropped independently
    with probability 1 - edge_keep_prob, which preserves connectivity and
    keeps the decomposition valid. Weights are uniform over weight_range
    (integers in that range with integer_weights=True).
    """
    if k < 1:
        raise ValueError(f"width parameter k must be >= 1, got {k}")
    if n <= k:
        raise ValueError(f"need n > k, got n={n}, k={k}")
    if not 0 < edge_keep_prob <= 1:
        raise ValueError(f"edge_keep_prob must lie in (0, 1], got {edge_keep_prob}")
    lo, hi = float(weight_range[0]), float(weight_range[1])
    if lo < 0 or hi < lo:
        raise ValueError(f"invalid weight range {weight_range}")
    if attachment not in (ATTACH_RANDOM, ATTACH_CHAIN):
        raise ValueError(f"unknown attachment strategy {attachment!r}")

    rng = np.random.default_rng(seed)
    edges = set()
    base = tuple(range(k))
    for u, v in combinations(base, 2):
        edges.add((u, v))
    cliques = [base]
    clique_home = [0]
    bags = [frozenset(base)]
    tree_edges = []
    for v in range(k, n):
        if attachment == ATTACH_RANDOM:
            ci = int(rng.integers(len(cliques)))
        else:
            ci = len(cliques) - 1
        host = cliques[ci]
        for u in host:
            edges.add((min(u, v), max(u, v)))
        bag_idx = len(bags)
        bags.append(frozenset((*host, v)))
        tree_edges.append((clique_home[ci], bag_idx))
        # newest clique last drops the oldest host vertex, so chain mode
        # walks forward and produces linear-diameter instances
        for drop in reversed(range(k)):
            new_clique = tuple(sorted(host[:drop] + host[drop + 1:] + (v,)))
            cliques.append(new_clique)
            clique_home.append(bag_idx)

    ordered = sorted(edges)
    if edge_keep_prob < 1.0:
        critical = _spanning_edge_ids(n, ordered)
        kept = []
        for idx, e in enumerate(ordered):
            if idx in critical or rng.random() < edge_keep_prob:
                kept.append(e)
        ordered = kept

    if integer_weights:
        draws = rng.integers(int(np.ceil(lo)), int(np.floor(hi)) + 1, len(ordered))
        weights = {e: float(w) for e, w in zip(ordered, draws)}
    else:
        draws = rng.uniform(lo, hi, len(ordered))
        weights = {e: float(w) for e, w in zip(ordered, draws)}

    graph = WeightedGraph(n, weights)
    decomposition = TreeDecomposition(bags=tuple(bags), tree_edges=tuple(tree_edges))
    provenance = {
        "kind": "generated",
        "seed": int(seed),
        "n": int(n),
        "k": int(k),
        "edge_keep_prob": float(edge_keep_prob),
        "weight_range": (lo, hi),
        "attachment": attachment,
        "integer_weights": bool(integer_weights),
    }
    labels = tuple(str(v + 1) for v in range(n))
    return InstanceBundle(
        graph=graph, decomposition=decomposition, labels=labels, provenance=provenance
    )
