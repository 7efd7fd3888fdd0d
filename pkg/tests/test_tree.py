import numpy as np
import pytest

import src.compute.tree as tree_module
from src.compute.histogram import build_histograms
from src.compute.losses import grad_hess
from src.compute.quantizer import fit_bins, transform
from src.compute.sketch import Sketch, no_sketch, top_outputs, truncated_svd
from src.compute.split import split_score
from src.compute.tree import (
    Tree,
    check_tree_structure,
    fit_leaf_values,
    grow_tree,
    grow_tree_with_leaves,
    predict_tree,
    route_binned,
)
from src.schema.models import SketchStrategy, TreeParams


def _problem(dataset):
    mapper = fit_bins(dataset.features, max_bins=32)
    binned = transform(dataset.features, mapper)
    raw = np.zeros_like(dataset.targets)
    derivatives = grad_hess(dataset.targets, raw, dataset.task)
    return mapper, binned, derivatives.grad, derivatives.hess


def _assert_same_tree(a: Tree, b: Tree):
    np.testing.assert_array_equal(a.feature, b.feature)
    np.testing.assert_array_equal(a.threshold, b.threshold)
    np.testing.assert_array_equal(a.left, b.left)
    np.testing.assert_array_equal(a.right, b.right)
    np.testing.assert_array_equal(a.values, b.values)


class TestLeafValues:
    def test_objective_is_stationary(self, rng):
        G = rng.standard_normal((40, 3))
        H = rng.uniform(0.05, 0.5, size=(40, 3))
        leaves = [np.arange(0, 15), np.arange(15, 40)]
        values = fit_leaf_values(leaves, G, H, 1.0)
        for j, rows in enumerate(leaves):
            # d/dv [sum g v + 1/2 (sum h + lambda) v^2] = 0
            slope = G[rows].sum(axis=0) + (H[rows].sum(axis=0) + 1.0) * values[j]
            np.testing.assert_allclose(slope, 0.0, atol=1e-12)

    def test_constant_gradient(self):
        G = np.full((4, 2), -1.0)
        H = np.ones((4, 2))
        values = fit_leaf_values([np.arange(4)], G, H, 1.0)
        np.testing.assert_allclose(values, [[0.8, 0.8]])


class TestGrowth:
    def test_zero_gradient_gives_single_zero_leaf(self, tiny_multiclass):
        _, binned, G, H = _problem(tiny_multiclass)
        zeros = np.zeros_like(G)
        grown = grow_tree_with_leaves(binned, zeros, H, no_sketch(zeros), TreeParams(max_depth=4))
        assert grown.tree.n_internal == 0 and grown.tree.n_leaves == 1
        assert not grown.tree.values.any()
        assert not grown.leaf_of_row.any()

    def test_depth_one_picks_the_exhaustive_best_split(self, tiny_regression):
        _, binned, G, H = _problem(tiny_regression)
        params = TreeParams(max_depth=1)
        tree = grow_tree(binned, G, H, no_sketch(G), params)
        rows = np.arange(binned.n_rows)
        best = -np.inf
        for j in range(binned.n_features):
            for t in range(int(binned.n_bins.max()) + 1):
                goes_left = binned.codes[:, j] <= t
                if goes_left.all() or not goes_left.any():
                    continue
                gain = 0.5 * (
                    split_score(G[goes_left].sum(axis=0), int(goes_left.sum()), 1.0)
                    + split_score(G[~goes_left].sum(axis=0), int((~goes_left).sum()), 1.0)
                    - split_score(G[rows].sum(axis=0), len(rows), 1.0)
                )
                best = max(best, gain)
        goes_left = binned.codes[:, tree.feature[0]] <= tree.threshold[0]
        chosen = 0.5 * (
            split_score(G[goes_left].sum(axis=0), int(goes_left.sum()), 1.0)
            + split_score(G[~goes_left].sum(axis=0), int((~goes_left).sum()), 1.0)
            - split_score(G.sum(axis=0), len(rows), 1.0)
        )
        assert tree.n_internal == 1
        assert chosen == pytest.approx(best, rel=1e-9)

    def test_full_width_top_outputs_matches_unsketched(self, tiny_multiclass):
        _, binned, G, H = _problem(tiny_multiclass)
        params = TreeParams(max_depth=4)
        plain = grow_tree(binned, G, H, no_sketch(G), params)
        sketched = grow_tree(binned, G, H, top_outputs(G, G.shape[1]), params)
        _assert_same_tree(plain, sketched)

    def test_routing_matches_training_assignment(self, tiny_multilabel):
        mapper, binned, G, H = _problem(tiny_multilabel)
        grown = grow_tree_with_leaves(binned, G, H, no_sketch(G), TreeParams(max_depth=4))
        np.testing.assert_array_equal(route_binned(grown.tree, binned.codes), grown.leaf_of_row)
        np.testing.assert_array_equal(
            predict_tree(grown.tree, tiny_multilabel.features, mapper),
            grown.tree.values[grown.leaf_of_row],
        )

    @pytest.mark.parametrize("min_samples_leaf", [1, 5])
    def test_leaves_partition_rows(self, tiny_regression, min_samples_leaf):
        _, binned, G, H = _problem(tiny_regression)
        params = TreeParams(max_depth=5, min_samples_leaf=min_samples_leaf)
        grown = grow_tree_with_leaves(binned, G, H, truncated_svd(G, 2), params)
        counts = np.bincount(grown.leaf_of_row, minlength=grown.tree.n_leaves)
        assert counts.sum() == binned.n_rows
        assert (counts >= min_samples_leaf).all()
        assert grown.tree.depth <= 5
        assert grown.tree.n_leaves == grown.tree.n_internal + 1
        check_tree_structure(grown.tree, binned.n_features)

    def test_thread_count_does_not_change_tree(self, tiny_multiclass):
        _, binned, G, H = _problem(tiny_multiclass)
        params = TreeParams(max_depth=5)
        one = grow_tree(binned, G, H, no_sketch(G), params, n_threads=1)
        many = grow_tree(binned, G, H, no_sketch(G), params, n_threads=4)
        _assert_same_tree(one, many)

    def test_hessian_scoring_grows_a_valid_tree(self, tiny_multiclass):
        _, binned, G, H = _problem(tiny_multiclass)
        grown = grow_tree_with_leaves(binned, G, H, no_sketch(G), TreeParams(max_depth=3, use_hessian=True))
        check_tree_structure(grown.tree, binned.n_features)
        np.testing.assert_array_equal(route_binned(grown.tree, binned.codes), grown.leaf_of_row)

    def test_leaf_values_ignore_the_sketch(self, tiny_multiclass):
        _, binned, G, H = _problem(tiny_multiclass)
        params = TreeParams(max_depth=4)
        plain = grow_tree_with_leaves(binned, G, H, no_sketch(G), params)
        # doubling every column scales all scores by 4 exactly, so the structure is unchanged
        doubled = Sketch(matrix=2.0 * G, strategy=SketchStrategy.RANDOM_PROJECTION)
        scaled = grow_tree_with_leaves(binned, G, H, doubled, params)
        _assert_same_tree(plain.tree, scaled.tree)
        np.testing.assert_array_equal(plain.leaf_of_row, scaled.leaf_of_row)
        projected = grow_tree_with_leaves(binned, G, H, truncated_svd(G, 1), params)
        refit = fit_leaf_values(
            [np.flatnonzero(projected.leaf_of_row == j) for j in range(projected.tree.n_leaves)], G, H, 1.0
        )
        np.testing.assert_array_equal(projected.tree.values, refit)

    @pytest.mark.parametrize(
        ("params", "expected_builds"),
        [
            (TreeParams(max_depth=1), 1),
            (TreeParams(max_depth=4, min_samples_leaf=30), 1),
        ],
    )
    def test_unsplittable_children_get_no_histogram(self, tiny_regression, monkeypatch, params, expected_builds):
        _, binned, G, H = _problem(tiny_regression)
        calls = []

        def counting_build(*args, **kwargs):
            calls.append(args[2].shape[0])
            return build_histograms(*args, **kwargs)

        monkeypatch.setattr(tree_module, "build_histograms", counting_build)
        tree = grow_tree(binned, G, H, no_sketch(G), params)
        assert tree.n_internal == 1
        assert calls == [binned.n_rows] * expected_builds


def _stump(**overrides):
    arrays = dict(
        feature=np.array([0], dtype=np.int32),
        threshold=np.array([3], dtype=np.int32),
        left=np.array([~0], dtype=np.int32),
        right=np.array([~1], dtype=np.int32),
        values=np.zeros((2, 2)),
    )
    arrays.update(overrides)
    return Tree(**arrays)


class TestTreeStructure:
    def test_stump_is_valid(self):
        tree = _stump()
        check_tree_structure(tree, 1)
        assert tree.depth == 1 and tree.root == 0

    def test_single_leaf(self):
        tree = Tree(
            feature=np.empty(0, np.int32),
            threshold=np.empty(0, np.int32),
            left=np.empty(0, np.int32),
            right=np.empty(0, np.int32),
            values=np.ones((1, 3)),
        )
        check_tree_structure(tree, 2)
        assert tree.root == ~0 and tree.depth == 0
        np.testing.assert_array_equal(route_binned(tree, np.zeros((4, 2), np.uint8)), 0)

    @pytest.mark.parametrize(
        "overrides",
        [
            {"right": np.array([~2], dtype=np.int32)},
            {"right": np.array([~0], dtype=np.int32)},
            {"values": np.zeros((3, 2))},
            {"feature": np.array([4], dtype=np.int32)},
            {"threshold": np.array([300], dtype=np.int32)},
            {"values": np.array([[0.0, np.inf], [0.0, 0.0]])},
        ],
    )
    def test_malformed_trees_are_rejected(self, overrides):
        with pytest.raises(ValueError):
            check_tree_structure(_stump(**overrides), 1)
