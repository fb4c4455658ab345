import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dpapsd import (
    DecompositionError,
    TreeDecomposition,
    WeightedGraph,
    components_after_removal,
    find_separator_bag,
    generate_partial_ktree,
    heuristic_decomposition,
    reduce_decomposition,
    validate_decomposition,
)

from helpers import path_decomposition, path_graph


def balanced(g, bag):
    comps = components_after_removal(g, bag)
    return all(len(c) <= g.n / 2 for c in comps)


class TestTreeDecomposition:
    def test_width(self):
        t = TreeDecomposition(bags=({0, 1}, {1, 2, 3}), tree_edges=((0, 1),))
        assert t.width == 2 and t.bag_count == 2

    def test_rejects_bad_tree_edges(self):
        with pytest.raises(ValueError):
            TreeDecomposition(bags=({0},), tree_edges=((0, 0),))
        with pytest.raises(ValueError):
            TreeDecomposition(bags=({0}, {1}), tree_edges=((0, 2),))
        with pytest.raises(ValueError):
            TreeDecomposition(bags=({0}, {1}), tree_edges=((0, 1), (1, 0)))


class TestValidateDecomposition:
    def test_canonical_path_decomposition(self):
        g = path_graph(3)
        report = validate_decomposition(g, path_decomposition(3))
        assert report.ok and not report.violations

    def test_uncovered_edge(self):
        g = path_graph(3)
        t = TreeDecomposition(bags=({0, 1}, {2}), tree_edges=((0, 1),))
        report = validate_decomposition(g, t)
        assert not report.ok
        assert any("edge (1, 2)" in v for v in report.violations)

    def test_disconnected_vertex_bags(self):
        g = path_graph(4)
        t = TreeDecomposition(bags=({0, 1}, {2, 3}, {0, 3}), tree_edges=((0, 1), (1, 2)))
        report = validate_decomposition(g, t)
        assert not report.ok
        assert any("vertex 0" in v and "connected subtree" in v for v in report.violations)

    def test_uncovered_vertex(self):
        g = WeightedGraph(3, {(0, 1): 1.0})
        t = TreeDecomposition(bags=({0, 1},), tree_edges=())
        report = validate_decomposition(g, t)
        assert any("vertex 2 not covered" in v for v in report.violations)

    def test_cycle_and_disconnection_flagged(self):
        g = path_graph(3)
        t = TreeDecomposition(
            bags=({0, 1}, {1, 2}, {1}), tree_edges=((0, 1), (1, 2), (0, 2))
        )
        report = validate_decomposition(g, t)
        assert any("cycle" in v for v in report.violations)
        t2 = TreeDecomposition(bags=({0, 1}, {1, 2}), tree_edges=())
        report2 = validate_decomposition(g, t2)
        assert any("not connected" in v for v in report2.violations)

    def test_generated_instances_validate(self, small_corpus):
        for bundle in small_corpus:
            assert validate_decomposition(bundle.graph, bundle.decomposition).ok


class TestReduceDecomposition:
    def test_absorbs_contained_bag(self):
        t = path_decomposition(3)  # bags {0,1},{1,2}
        reduced = reduce_decomposition(t, {0, 1})
        assert reduced.bags == (frozenset({0, 1}),)
        assert reduced.tree_edges == ()

    def test_full_vertex_set_keeps_structure(self):
        t = path_decomposition(5)
        reduced = reduce_decomposition(t, set(range(5)))
        assert reduced.bags == t.bags
        assert reduced.tree_edges == t.tree_edges

    def test_rejects_empty_target(self):
        with pytest.raises(ValueError):
            reduce_decomposition(path_decomposition(3), set())

    def test_equal_bags_keep_lowest_index(self):
        t = TreeDecomposition(bags=({0, 1}, {0, 1}, {0, 1}), tree_edges=((0, 1), (1, 2)))
        reduced = reduce_decomposition(t, {0, 1})
        assert reduced.bags == (frozenset({0, 1}),)

    @settings(max_examples=20, deadline=None)
    @given(st.integers(0, 10**6))
    def test_reduction_validates_on_subgraphs(self, seed):
        bundle = generate_partial_ktree(n=40, k=3, edge_keep_prob=0.85, seed=seed)
        g, t = bundle.graph, bundle.decomposition
        rng = np.random.default_rng(seed)
        keep = set(rng.choice(40, size=rng.integers(1, 40), replace=False).tolist())
        reduced = reduce_decomposition(t, keep)
        assert reduced.width <= t.width
        sub_weights = {
            (u, v): w for (u, v), w in g.weights.items() if u in keep and v in keep
        }
        relabel = {v: i for i, v in enumerate(sorted(keep))}
        sub = WeightedGraph(
            len(keep), {(relabel[u], relabel[v]): w for (u, v), w in sub_weights.items()}
        )
        relabeled = TreeDecomposition(
            bags=tuple(frozenset(relabel[v] for v in b) for b in reduced.bags),
            tree_edges=reduced.tree_edges,
        )
        assert validate_decomposition(sub, relabeled).ok
        # no surviving bag is a subset of a tree-adjacent bag
        for i, j in relabeled.tree_edges:
            assert not relabeled.bags[i] <= relabeled.bags[j]
            assert not relabeled.bags[j] <= relabeled.bags[i]


class TestFindSeparatorBag:
    def test_path_returns_smallest_balanced_index(self):
        g = path_graph(7)
        t = path_decomposition(7)
        idx = find_separator_bag(g, t)
        assert balanced(g, t.bags[idx])
        scan = [i for i, bag in enumerate(t.bags) if balanced(g, bag)]
        assert idx == scan[0]

    def test_single_bag(self):
        g = WeightedGraph(3, {(0, 1): 1.0, (1, 2): 1.0, (0, 2): 1.0})
        t = TreeDecomposition(bags=({0, 1, 2},), tree_edges=())
        assert find_separator_bag(g, t) == 0

    def test_random_instance_balanced_and_minimal(self):
        bundle = generate_partial_ktree(n=100, k=2, edge_keep_prob=0.9, seed=11)
        g, t = bundle.graph, bundle.decomposition
        idx = find_separator_bag(g, t)
        assert balanced(g, t.bags[idx])
        qualifying = [i for i, bag in enumerate(t.bags) if balanced(g, bag)]
        assert qualifying and idx == qualifying[0]

    def test_failure_is_diagnosed(self):
        g = path_graph(8)
        bad = TreeDecomposition(bags=({0, 7},), tree_edges=())
        with pytest.raises(DecompositionError, match="no bag balances"):
            find_separator_bag(g, bad)


class TestHeuristicDecomposition:
    def test_tree_gets_width_one(self):
        g = WeightedGraph(
            6, {(0, 1): 1.0, (0, 2): 1.0, (1, 3): 1.0, (1, 4): 1.0, (2, 5): 1.0}
        )
        t = heuristic_decomposition(g)
        assert validate_decomposition(g, t).ok
        assert t.width == 1

    def test_clique_width(self):
        for k in (3, 4, 5):
            g = WeightedGraph(k, {(i, j): 1.0 for i in range(k) for j in range(i + 1, k)})
            t = heuristic_decomposition(g)
            assert validate_decomposition(g, t).ok
            assert t.width == k - 1

    def test_partial_ktree_width_bound(self):
        bundle = generate_partial_ktree(n=50, k=3, edge_keep_prob=0.9, seed=5)
        t = heuristic_decomposition(bundle.graph)
        assert validate_decomposition(bundle.graph, t).ok
        assert t.width <= 8

    def test_disconnected_graph(self):
        g = WeightedGraph(5, {(0, 1): 1.0, (2, 3): 1.0})
        t = heuristic_decomposition(g)
        assert validate_decomposition(g, t).ok

    @settings(max_examples=20, deadline=None)
    @given(st.integers(0, 10**6))
    def test_always_validates(self, seed):
        bundle = generate_partial_ktree(n=25, k=2, edge_keep_prob=0.7, seed=seed)
        t = heuristic_decomposition(bundle.graph)
        assert validate_decomposition(bundle.graph, t).ok
