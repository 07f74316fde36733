import itertools
import math

import numpy as np
import pytest

from corrsets.data import EncodedDataset
from corrsets.estimators import SubsetScore, score_subset
from corrsets.search import (
    SearchContext,
    SearchNode,
    TopKStore,
    bound_mon,
    bound_ref,
    branch_and_bound,
    exhaustive_topk,
    expand,
    greedy,
    order_attributes,
)
from helpers import random_dataset


def dataset_with_entropies(levels):
    """One column per entropy level: level k gets 2^k distinct uniform values."""
    n = 16
    cols = [np.arange(n) % (2**k) for k in levels]
    return EncodedDataset.from_codes([f"A{i}" for i in range(len(levels))], cols, n)


class TestOrderAttributes:
    def test_sorts_by_entropy_descending(self):
        ds = dataset_with_entropies([1, 3, 2])  # entropies 1, 3, 2 bits
        assert order_attributes(ds) == [1, 2, 0]

    def test_ties_keep_original_order(self):
        ds = dataset_with_entropies([2, 2, 2])
        assert order_attributes(ds) == [0, 1, 2]

    def test_children_are_low_entropy_extensions(self):
        rng = np.random.default_rng(17)
        ds = random_dataset(rng, d=6, n=50)
        ctx = SearchContext(ds)
        entropies = [a.entropy for a in ctx.attrs]
        assert entropies == sorted(entropies, reverse=True)


class TestExpand:
    def test_root_yields_singletons_with_potential_one(self):
        ds = dataset_with_entropies([1, 2, 3])
        ctx = SearchContext(ds)
        root = SearchNode(members=(), score=score_zero(), potential=1.0)
        children = expand(root, ctx)
        assert [c.members for c in children] == [(0,), (1,), (2,)]
        assert all(c.potential == 1.0 for c in children)
        assert all(c.score.corrected_score == 0.0 for c in children)

    def test_frontier_node_has_no_children(self):
        ds = dataset_with_entropies([1, 2, 3])
        ctx = SearchContext(ds)
        node = expand(SearchNode((), score_zero(), 1.0), ctx)[-1]
        assert node.members == (2,)
        assert expand(node, ctx) == []

    def test_incremental_equals_scratch(self):
        rng = np.random.default_rng(8)
        ds = random_dataset(rng, d=7, n=80)
        ctx = SearchContext(ds)
        frontier = [SearchNode((), score_zero(), 1.0)]
        checked = 0
        while frontier:
            node = frontier.pop()
            for child in expand(node, ctx):
                if child.depth >= 2:
                    scratch = score_subset(ds, child.score.members)
                    assert child.score == scratch  # bit-identical
                    checked += 1
                if child.depth < 4:
                    frontier.append(child)
        assert checked > 50


def score_zero():
    return SubsetScore((), 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0)


def all_nodes(ds):
    """Every subset as a search node, by exhaustive expansion."""
    ctx = SearchContext(ds)
    out = {}
    frontier = [SearchNode((), score_zero(), 1.0)]
    while frontier:
        node = frontier.pop()
        for child in expand(node, ctx):
            out[child.members] = child
            frontier.append(child)
    return ctx, out


class TestBounds:
    def test_bound_mon_arithmetic(self):
        node = SearchNode(
            (0, 1), SubsetScore((0, 1), 2.0, 1.0, 1.5, 0.5, 1.0, 0.3, 0.5, 0.2)
        )
        assert bound_mon(node) == pytest.approx(0.7)

    def test_bound_ref_leaf_equals_score(self):
        rng = np.random.default_rng(14)
        ds = random_dataset(rng, d=5, n=60)
        ctx, nodes = all_nodes(ds)
        for members, node in nodes.items():
            if node.last_index == ds.d - 1 and node.depth >= 2:
                assert bound_ref(node, ctx) == node.score.corrected_score

    def test_bound_ref_below_bound_mon(self):
        rng = np.random.default_rng(15)
        ds = random_dataset(rng, d=6, n=60)
        ctx, nodes = all_nodes(ds)
        for node in nodes.values():
            if node.depth >= 2:
                assert bound_ref(node, ctx) <= bound_mon(node) + 1e-12

    def test_degenerate_denominator_gives_zero(self):
        ds = EncodedDataset.from_codes(
            ["x", "c1", "c2"],
            [np.array([0, 1, 0, 1]), np.zeros(4, int), np.zeros(4, int)],
            4,
        )
        ctx, nodes = all_nodes(ds)
        node = nodes[(0, 1)]  # ranks: x then a constant; suffix constant too
        assert node.score.normalizer == 0.0
        assert bound_ref(node, ctx) == 0.0

    def test_admissibility_small_sweep(self):
        rng = np.random.default_rng(16)
        for _ in range(3):
            ds = random_dataset(rng, d=7, n=60)
            ctx, nodes = all_nodes(ds)
            for members, node in nodes.items():
                if node.depth < 2:
                    continue
                mon = bound_mon(node)
                ref = bound_ref(node, ctx)
                suffix = range(node.last_index + 1, ds.d)
                for r in range(1, len(list(suffix)) + 1):
                    for extra in itertools.combinations(suffix, r):
                        ext = nodes[members + extra].score.corrected_score
                        assert mon >= ext - 1e-12
                        assert ref >= ext - 1e-12

    def test_correction_monotone_along_edges(self):
        rng = np.random.default_rng(18)
        ds = random_dataset(rng, d=7, n=50)
        _, nodes = all_nodes(ds)
        for members, node in nodes.items():
            if node.depth < 2:
                continue
            for j in range(node.last_index + 1, ds.d):
                child = nodes[members + (j,)]
                assert child.score.correction >= node.score.correction - 1e-12


class TestTopKStore:
    def make_score(self, members, value):
        return SubsetScore(members, 0, 0, 0, 0, 1, 0, value, value)

    def test_threshold_until_full(self):
        store = TopKStore(2)
        assert store.threshold() == -math.inf
        store.offer((0, 1), self.make_score((0, 1), 0.5))
        assert store.threshold() == -math.inf
        store.offer((0, 2), self.make_score((0, 2), 0.3))
        assert store.threshold() == 0.3
        store.offer((1, 2), self.make_score((1, 2), 0.4))
        assert store.threshold() == 0.4
        assert [m for m, _, _ in store.results] == [(0, 1), (1, 2)]

    def test_singletons_rejected(self):
        store = TopKStore(1)
        store.offer((0,), self.make_score((0,), 0.9))
        assert len(store) == 0

    def test_tie_break_lexicographic(self):
        store = TopKStore(2)
        store.offer((1, 2), self.make_score((1, 2), 0.5))
        store.offer((0, 3), self.make_score((0, 3), 0.5))
        store.offer((0, 1), self.make_score((0, 1), 0.5))
        assert [m for m, _, _ in store.results] == [(0, 1), (0, 3)]

    def test_k_validation(self):
        with pytest.raises(ValueError):
            TopKStore(0)


class TestBranchAndBound:
    def test_validations(self):
        rng = np.random.default_rng(0)
        ds = random_dataset(rng, d=3, n=20, dependent=False)
        with pytest.raises(ValueError):
            branch_and_bound(ds, k=0)
        with pytest.raises(ValueError):
            branch_and_bound(ds, alpha=0.0)
        with pytest.raises(ValueError):
            branch_and_bound(ds, alpha=1.5)
        single = EncodedDataset.from_codes(["x"], [np.array([0, 1])], 2)
        with pytest.raises(ValueError):
            branch_and_bound(single)

    def test_visits_every_subset_without_pruning(self):
        # a store that can never fill keeps the threshold at -inf
        rng = np.random.default_rng(19)
        ds = random_dataset(rng, d=8, n=40)
        store, stats = branch_and_bound(ds, k=10_000)
        assert stats.nodes_explored == 2**8
        assert stats.nodes_pruned == 0
        assert stats.prune_percent == 0.0

    def test_matches_exhaustive_topk(self):
        rng = np.random.default_rng(20)
        for _ in range(5):
            d = int(rng.integers(4, 9))
            ds = random_dataset(rng, d=d, n=int(rng.integers(20, 120)))
            store, _ = branch_and_bound(ds, k=5)
            oracle = exhaustive_topk(ds, k=5)
            assert [v for _, v, _ in store.results] == [
                v for _, v, _ in oracle.results
            ]

    def test_alpha_guarantee(self):
        rng = np.random.default_rng(23)
        for alpha in (0.5, 0.8):
            for _ in range(3):
                ds = random_dataset(rng, d=8, n=60)
                store, _ = branch_and_bound(ds, k=1, alpha=alpha)
                optimum = exhaustive_topk(ds, k=1).results[0][1]
                assert store.results[0][1] >= alpha * optimum - 1e-12

    def test_deterministic(self):
        rng = np.random.default_rng(24)
        ds = random_dataset(rng, d=9, n=80)
        s1, st1 = branch_and_bound(ds, k=4)
        s2, st2 = branch_and_bound(ds, k=4)
        assert [(m, v) for m, v, _ in s1.results] == [(m, v) for m, v, _ in s2.results]
        assert st1.nodes_explored == st2.nodes_explored
        assert st1.nodes_pruned == st2.nodes_pruned

    def test_prune_percent_formula(self):
        rng = np.random.default_rng(25)
        ds = random_dataset(rng, d=7, n=60)
        _, stats = branch_and_bound(ds, k=1)
        assert stats.prune_percent == pytest.approx(
            100 - 100 * stats.nodes_explored / 2**7, abs=1e-9
        )

    def test_budget_flags_incomplete(self):
        rng = np.random.default_rng(26)
        ds = random_dataset(rng, d=10, n=100)
        _, stats = branch_and_bound(ds, k=1, budget=0.0)
        assert not stats.completed

    def test_results_map_to_original_indices(self, ttt):
        store, _ = branch_and_bound(ttt, k=1)
        members, value, score = store.results[0]
        assert score.members == tuple(
            sorted(score.members, key=lambda i: (-ttt.attributes[i].entropy, i))
        )
        assert value == score.corrected_score


class TestGreedy:
    def test_validations(self):
        rng = np.random.default_rng(0)
        ds = random_dataset(rng, d=3, n=20, dependent=False)
        with pytest.raises(ValueError):
            greedy(ds, k=0)

    def test_pair_optimum_found_exactly(self):
        # optimum is a pair: greedy scores all pairs, so it cannot miss it
        rng = np.random.default_rng(27)
        for _ in range(5):
            ds = random_dataset(rng, d=6, n=50)
            beststore, _ = branch_and_bound(ds, k=1)
            if beststore.results[0][2].depth != 2:
                continue
            gstore, _ = greedy(ds, k=1)
            assert gstore.results[0][1] == beststore.results[0][1]

    def test_never_beats_bnb(self):
        rng = np.random.default_rng(28)
        for _ in range(5):
            ds = random_dataset(rng, d=7, n=60)
            b, _ = branch_and_bound(ds, k=1)
            g, _ = greedy(ds, k=1)
            assert g.results[0][1] <= b.results[0][1] + 1e-12

    def test_deterministic(self):
        rng = np.random.default_rng(29)
        ds = random_dataset(rng, d=8, n=70)
        g1, st1 = greedy(ds, k=3)
        g2, st2 = greedy(ds, k=3)
        assert [(m, v) for m, v, _ in g1.results] == [(m, v) for m, v, _ in g2.results]
        assert st1.nodes_explored == st2.nodes_explored
