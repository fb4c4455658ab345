import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dpapsd import (
    Path,
    WeightedGraph,
    components_after_removal,
    exact_apsd,
    generate_partial_ktree,
    k_hop_apsd,
    l1_weight_distance,
)
from dpapsd.hoplimit import _relax_rounds_py, hop_limited_matrix

from helpers import (
    floyd_warshall,
    path_graph,
    single_source_relax,
    union_find_components,
    walk_min_weight,
)


class TestWeightedGraph:
    def test_rejects_self_loop(self):
        with pytest.raises(ValueError, match="self-loop"):
            WeightedGraph(3, {(1, 1): 2.0})

    def test_rejects_duplicate_edge(self):
        with pytest.raises(ValueError, match="duplicate"):
            WeightedGraph(3, {(0, 1): 1.0, (1, 0): 2.0})

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError, match="out of range"):
            WeightedGraph(3, {(0, 3): 1.0})

    def test_rejects_non_finite_weight(self):
        with pytest.raises(ValueError, match="non-finite"):
            WeightedGraph(3, {(0, 1): float("inf")})

    def test_canonical_edge_order(self):
        g = WeightedGraph(4, {(3, 2): 5.0, (1, 0): 1.0})
        assert g.edges == ((0, 1), (2, 3))
        assert g.weight(2, 3) == 5.0 and g.weight(3, 2) == 5.0

    def test_with_weights_requires_same_edges(self):
        g = WeightedGraph(3, {(0, 1): 1.0})
        with pytest.raises(ValueError):
            g.with_weights({(1, 2): 1.0})
        g2 = g.with_weights({(0, 1): 7.0})
        assert g2.weight(0, 1) == 7.0 and g2.n == 3


class TestPath:
    def test_hops_is_edge_count(self):
        p = Path((0, 1, 2, 3))
        assert p.hops == 3
        assert Path((4,)).hops == 0

    def test_membership_and_weight(self):
        g = path_graph(4, [1.0, 2.0, 3.0])
        p = Path((0, 1, 2))
        assert p.is_in(g)
        assert p.weight(g) == 3.0
        assert not Path((0, 2)).is_in(g)

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            Path(())


class TestExactApsd:
    def test_path_distances(self):
        g = path_graph(4, [1.0, 2.0, 3.0])
        d = exact_apsd(g)
        assert d[0, 3] == 6.0
        assert d[0, 2] == 3.0
        assert d[1, 3] == 5.0

    def test_single_vertex(self):
        d = exact_apsd(WeightedGraph(1, {}))
        assert d.values.shape == (1, 1) and d[0, 0] == 0.0

    def test_disconnected_pairs_are_inf(self):
        g = WeightedGraph(4, {(0, 1): 1.0, (2, 3): 1.0})
        d = exact_apsd(g)
        assert math.isinf(d[0, 2])
        assert d[2, 3] == 1.0

    def test_rejects_negative_weights(self):
        g = WeightedGraph(2, {(0, 1): -1.0})
        with pytest.raises(ValueError, match="non-negative"):
            exact_apsd(g)

    def test_matches_independent_oracles(self):
        bundle = generate_partial_ktree(n=20, k=2, edge_keep_prob=0.8, seed=3)
        g = bundle.graph
        d = exact_apsd(g)
        assert np.allclose(d.values, floyd_warshall(g), atol=1e-9)
        for src in range(g.n):
            ref = single_source_relax(g, src)
            assert np.allclose(d.values[src], ref, atol=1e-9)

    def test_zero_weight_edges(self):
        g = WeightedGraph(3, {(0, 1): 0.0, (1, 2): 2.0})
        d = exact_apsd(g)
        assert d[0, 1] == 0.0 and d[0, 2] == 2.0

    @settings(max_examples=15, deadline=None)
    @given(st.integers(0, 10**6))
    def test_invariants(self, seed):
        bundle = generate_partial_ktree(n=18, k=2, edge_keep_prob=0.8, seed=seed)
        d = exact_apsd(bundle.graph).values
        assert np.all(np.diag(d) == 0.0)
        assert np.array_equal(d, d.T)
        finite = np.where(np.isinf(d), 1e18, d)
        for k in range(bundle.graph.n):
            assert np.all(finite <= finite[:, k, None] + finite[None, k, :] + 1e-9)

    @settings(max_examples=15, deadline=None)
    @given(st.integers(0, 10**6), st.floats(0.1, 5.0))
    def test_monotone_in_single_weight(self, seed, bump):
        bundle = generate_partial_ktree(n=15, k=2, edge_keep_prob=0.8, seed=seed)
        g = bundle.graph
        rng = np.random.default_rng(seed)
        edge = g.edges[rng.integers(g.edge_count)]
        before = exact_apsd(g).values
        w2 = g.weights
        w2[edge] += bump
        after = exact_apsd(g.with_weights(w2)).values
        assert np.all(after >= before - 1e-9)

    @settings(max_examples=15, deadline=None)
    @given(st.integers(0, 10**6))
    def test_unit_perturbation_is_1_lipschitz(self, seed):
        bundle = generate_partial_ktree(n=15, k=3, edge_keep_prob=0.9, seed=seed)
        g = bundle.graph
        rng = np.random.default_rng(seed + 1)
        shares = rng.dirichlet(np.ones(g.edge_count))
        signs = rng.choice([-1.0, 1.0], g.edge_count)
        w2 = {}
        for (e, w), s, sg in zip(g.weights.items(), shares, signs):
            w2[e] = max(0.0, w + sg * s)
        assert l1_weight_distance(g.weights, w2) <= 1.0 + 1e-9
        a = exact_apsd(g).values
        b = exact_apsd(g.with_weights(w2)).values
        finite = np.isfinite(a)
        assert np.abs(a[finite] - b[finite]).max() <= 1.0 + 1e-9


class TestKHopApsd:
    def test_triangle_hop_budgets(self):
        g = WeightedGraph(3, {(0, 1): 1.0, (1, 2): 1.0, (0, 2): 3.0})
        assert k_hop_apsd(g, 1)[0, 2] == 3.0
        assert k_hop_apsd(g, 2)[0, 2] == 2.0

    def test_rejects_small_budget(self):
        g = WeightedGraph(2, {(0, 1): 1.0})
        with pytest.raises(ValueError):
            k_hop_apsd(g, 0)

    def test_equals_exact_at_full_budget(self, small_corpus):
        for bundle in small_corpus[:6]:
            g = bundle.graph
            full = k_hop_apsd(g, g.n - 1)
            assert full.allclose(exact_apsd(g), tol=1e-9)

    @settings(max_examples=10, deadline=None)
    @given(st.integers(0, 10**6), st.integers(1, 4))
    def test_matches_walk_enumeration(self, seed, k):
        bundle = generate_partial_ktree(n=9, k=2, edge_keep_prob=0.7, seed=seed)
        g = bundle.graph
        d = k_hop_apsd(g, k)
        for u in range(g.n):
            for v in range(g.n):
                ref = walk_min_weight(g, u, v, k)
                assert d[u, v] == pytest.approx(ref, abs=1e-9) or (
                    math.isinf(d[u, v]) and math.isinf(ref)
                )

    def test_negative_weights_match_walk_enumeration(self):
        g = WeightedGraph(4, {(0, 1): 1.0, (1, 2): -0.5, (2, 3): 2.0, (0, 2): 0.25})
        for k in (1, 2, 3, 5):
            d = k_hop_apsd(g, k)
            for u in range(4):
                for v in range(4):
                    ref = walk_min_weight(g, u, v, k)
                    if math.isinf(ref):
                        assert math.isinf(d[u, v])
                    else:
                        assert d[u, v] == pytest.approx(ref, abs=1e-9)

    @settings(max_examples=12, deadline=None)
    @given(st.integers(0, 10**6))
    def test_monotone_in_hop_budget(self, seed):
        bundle = generate_partial_ktree(n=14, k=2, edge_keep_prob=0.8, seed=seed)
        g = bundle.graph
        exact = exact_apsd(g).values
        prev = k_hop_apsd(g, 1).values
        for k in range(2, g.n):
            cur = k_hop_apsd(g, k).values
            assert np.all(cur <= prev + 1e-12)
            assert np.all(cur >= exact - 1e-9)
            prev = cur

    def test_kernel_matches_numpy_fallback(self):
        rng = np.random.default_rng(5)
        for trial in range(4):
            bundle = generate_partial_ktree(n=25, k=2, edge_keep_prob=0.7, seed=trial)
            eu, ev, ew = bundle.graph.edge_arrays()
            noisy = ew + rng.laplace(0, 3.0, ew.size)
            for hops in (1, 3, 9):
                fast = hop_limited_matrix(25, eu, ev, noisy, hops)
                dist = np.full((25, 25), np.inf)
                np.fill_diagonal(dist, 0.0)
                heads = np.concatenate([ev, eu]).astype(np.int64)
                tails = np.concatenate([eu, ev]).astype(np.int64)
                weights = np.concatenate([noisy, noisy])
                order = np.argsort(heads, kind="stable")
                indptr = np.zeros(26, dtype=np.int64)
                np.add.at(indptr, heads[order] + 1, 1)
                slow = _relax_rounds_py(
                    np.cumsum(indptr), tails[order], weights[order], dist, hops
                )
                assert np.array_equal(fast, slow)


class TestL1WeightDistance:
    def test_worked_example(self):
        w1 = {(0, 1): 1.0, (1, 2): 2.0}
        w2 = {(0, 1): 1.5, (1, 2): 2.4}
        assert l1_weight_distance(w1, w2) == pytest.approx(0.9)

    def test_identity(self):
        w = {(0, 1): 1.0, (1, 2): 2.0}
        assert l1_weight_distance(w, w) == 0.0

    def test_rejects_mismatched_edges(self):
        with pytest.raises(ValueError):
            l1_weight_distance({(0, 1): 1.0}, {(0, 2): 1.0})

    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 10**6))
    def test_matches_reference_loop(self, seed):
        rng = np.random.default_rng(seed)
        m = int(rng.integers(1, 30))
        edges = [(i, i + 1 + int(rng.integers(0, 3))) for i in range(m)]
        w1 = {e: float(rng.uniform(0, 10)) for e in edges}
        w2 = {e: float(rng.uniform(0, 10)) for e in edges}
        ref = sum(abs(w1[e] - w2[e]) for e in edges)
        assert l1_weight_distance(w1, w2) == pytest.approx(ref, abs=1e-12)


class TestComponentsAfterRemoval:
    def test_path_split(self):
        g = path_graph(7)
        comps = components_after_removal(g, {3, 4})
        assert comps == ((0, 1, 2), (5, 6))

    def test_empty_removal_connected(self):
        g = path_graph(5)
        assert components_after_removal(g, set()) == ((0, 1, 2, 3, 4),)

    def test_remove_everything(self):
        g = path_graph(3)
        assert components_after_removal(g, {0, 1, 2}) == ()

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            components_after_removal(path_graph(3), {5})

    @settings(max_examples=20, deadline=None)
    @given(st.integers(0, 10**6))
    def test_matches_union_find(self, seed):
        bundle = generate_partial_ktree(n=30, k=2, edge_keep_prob=0.6, seed=seed)
        g = bundle.graph
        rng = np.random.default_rng(seed)
        removed = set(rng.choice(30, size=rng.integers(0, 12), replace=False).tolist())
        assert components_after_removal(g, removed) == union_find_components(g, removed)
