"""Depth-wise growth of one multivariate tree per boosting step."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy import sparse

from src.compute.histogram import Histogram, build_histograms, sibling_subtract
from src.compute.parallel import ordered_map
from src.compute.quantizer import BinMapper, BinnedMatrix, transform
from src.compute.sketch import Sketch
from src.compute.split import SplitDecision, find_best_split
from src.compute.timing import PhaseTimer, null_timer
from src.errors import ShapeMismatchError
from src.schema.models import TreeParams

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Tree:
    """Internal nodes as parallel arrays; leaves as rows of `values` (J x d).

    Child references >= 0 index internal nodes, negative references ~j
    point at leaf j. Rows with code <= threshold (including NaN, code 0) go
    left. A tree without internal nodes is the single leaf 0.
    """

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    values: np.ndarray

    @property
    def n_internal(self) -> int:
        return self.feature.shape[0]

    @property
    def n_leaves(self) -> int:
        return self.values.shape[0]

    @property
    def n_outputs(self) -> int:
        return self.values.shape[1]

    @property
    def root(self) -> int:
        return 0 if self.n_internal else ~0

    @property
    def depth(self) -> int:
        depth, frontier = 0, [self.root]
        while any(ref >= 0 for ref in frontier):
            frontier = [c for ref in frontier if ref >= 0 for c in (int(self.left[ref]), int(self.right[ref]))]
            depth += 1
        return depth


def check_tree_structure(tree: Tree, n_features: int) -> None:
    """Raise ValueError unless the arrays form one rooted binary tree."""
    n_int, n_leaf = tree.n_internal, tree.n_leaves
    if not (tree.threshold.shape[0] == tree.left.shape[0] == tree.right.shape[0] == n_int):
        raise ValueError("internal node arrays differ in length")
    if n_leaf != n_int + 1:
        raise ValueError(f"{n_int} internal nodes need {n_int + 1} leaves, found {n_leaf}")
    if n_int and ((tree.feature < 0).any() or (tree.feature >= n_features).any()):
        raise ValueError("split feature index out of range")
    if n_int and ((tree.threshold < 0).any() or (tree.threshold > 255).any()):
        raise ValueError("split threshold code out of range")
    if not np.isfinite(tree.values).all():
        raise ValueError("leaf values must be finite")
    seen_nodes, seen_leaves = {0} if n_int else set(), set() if n_int else {0}
    for node in range(n_int):
        for child in (int(tree.left[node]), int(tree.right[node])):
            if child >= 0:
                if child >= n_int or child in seen_nodes or child <= node:
                    raise ValueError(f"node {node} has a dangling or repeated child {child}")
                seen_nodes.add(child)
            else:
                leaf = ~child
                if leaf >= n_leaf or leaf in seen_leaves:
                    raise ValueError(f"node {node} has a dangling or repeated leaf {leaf}")
                seen_leaves.add(leaf)
    if len(seen_nodes) != n_int or len(seen_leaves) != n_leaf:
        raise ValueError("tree has unreachable nodes or leaves")


# -----------------------------------------------------------------------------
# Leaf values
# -----------------------------------------------------------------------------


def fit_leaf_values(
    leaf_rows: Sequence[np.ndarray],
    G: np.ndarray,
    H: np.ndarray,
    lambda_l2: float,
) -> np.ndarray:
    """v_j = -sum_R g_j / (sum_R h_j + lambda) per leaf and output, from the full G and H."""
    if G.shape != H.shape:
        raise ShapeMismatchError(f"G {G.shape} and H {H.shape} must match")
    n_leaves = len(leaf_rows)
    rows = np.concatenate([np.asarray(r, dtype=np.int64) for r in leaf_rows]) if n_leaves else np.empty(0, np.int64)
    leaf_ids = np.repeat(np.arange(n_leaves), [len(r) for r in leaf_rows])
    indicator = sparse.csr_matrix(
        (np.ones(rows.shape[0]), (leaf_ids, rows)),
        shape=(n_leaves, G.shape[0]),
    )
    grad_sum = np.asarray(indicator @ G)
    hess_sum = np.asarray(indicator @ H)
    return -grad_sum / (hess_sum + lambda_l2)


# -----------------------------------------------------------------------------
# Growth
# -----------------------------------------------------------------------------


@dataclass
class _Node:
    rows: np.ndarray
    hist: Optional[Histogram]  # None when the node can never split
    parent: Optional[int]  # internal node index, None for the root
    side: str = "left"


@dataclass(frozen=True)
class GrownTree:
    """A fitted tree plus the leaf each training row landed in."""

    tree: Tree
    leaf_of_row: np.ndarray


def grow_tree_with_leaves(
    binned: BinnedMatrix,
    G: np.ndarray,
    H: np.ndarray,
    sketch: Sketch,
    params: TreeParams,
    n_threads: int = 1,
    timer: Optional[PhaseTimer] = None,
) -> GrownTree:
    """Grow level by level to max_depth using sketch scores, then fit leaves from (G, H).

    At each level every node gets its best split or becomes a leaf. The
    smaller child's histogram is built directly; the larger one is the
    parent minus the smaller.
    """
    timer = timer or null_timer()
    n = binned.n_rows
    if G.shape[0] != n or H.shape != G.shape or sketch.matrix.shape[0] != n:
        raise ShapeMismatchError("binned matrix, G, H and sketch must share the row count")
    Gk = sketch.search_matrix()
    hess = H if params.use_hessian else None

    feature: list[int] = []
    threshold: list[int] = []
    left: list[int] = []
    right: list[int] = []
    leaf_rows: list[np.ndarray] = []

    def link(node: _Node, ref: int) -> None:
        if node.parent is None:
            return
        (left if node.side == "left" else right)[node.parent] = ref

    root_rows = np.arange(n, dtype=np.int64)
    with timer.phase("histogram"):
        level = [_Node(rows=root_rows, hist=build_histograms(binned, Gk, root_rows, hess), parent=None)]

    min_rows = 2 * params.min_samples_leaf
    for depth in range(params.max_depth + 1):
        with timer.phase("split"):
            if depth == params.max_depth:
                decisions: list[Optional[SplitDecision]] = [None] * len(level)
            else:
                decisions = ordered_map(
                    lambda node: find_best_split(node.hist, node.hist.totals(), params)
                    if node.rows.shape[0] >= min_rows
                    else None,
                    level,
                    n_threads,
                )

        splits = []
        for node, decision in zip(level, decisions):
            if decision is None:
                leaf_rows.append(node.rows)
                link(node, ~(len(leaf_rows) - 1))
                continue
            index = len(feature)
            feature.append(decision.feature)
            threshold.append(decision.threshold)
            left.append(0)
            right.append(0)
            link(node, index)
            goes_left = binned.codes[node.rows, decision.feature] <= decision.threshold
            splits.append((node, index, node.rows[goes_left], node.rows[~goes_left]))
        logger.debug("depth %d: %d nodes, %d split", depth, len(level), len(splits))
        if not splits:
            break

        with timer.phase("histogram"):
            # children at max_depth, or too small to split, never read their histogram
            grows = depth + 1 < params.max_depth
            needs_hist = [grows and max(s[2].shape[0], s[3].shape[0]) >= min_rows for s in splits]
            smaller = iter(
                ordered_map(
                    lambda s: build_histograms(binned, Gk, s[2] if s[2].shape[0] <= s[3].shape[0] else s[3], hess),
                    [s for s, need in zip(splits, needs_hist) if need],
                    n_threads,
                )
            )
            level = []
            for (node, index, lrows, rrows), need in zip(splits, needs_hist):
                lhist = rhist = None
                if need:
                    small = next(smaller)
                    large = sibling_subtract(node.hist, small)
                    lhist, rhist = (small, large) if lrows.shape[0] <= rrows.shape[0] else (large, small)
                level.append(_Node(rows=lrows, hist=lhist, parent=index, side="left"))
                level.append(_Node(rows=rrows, hist=rhist, parent=index, side="right"))

    with timer.phase("leaf_fit"):
        values = fit_leaf_values(leaf_rows, G, H, params.lambda_l2)
        leaf_of_row = np.empty(n, dtype=np.int64)
        for j, rows in enumerate(leaf_rows):
            leaf_of_row[rows] = j

    tree = Tree(
        feature=np.asarray(feature, dtype=np.int32),
        threshold=np.asarray(threshold, dtype=np.int32),
        left=np.asarray(left, dtype=np.int32),
        right=np.asarray(right, dtype=np.int32),
        values=values,
    )
    return GrownTree(tree=tree, leaf_of_row=leaf_of_row)


def grow_tree(
    binned: BinnedMatrix,
    G: np.ndarray,
    H: np.ndarray,
    sketch: Sketch,
    params: TreeParams,
    n_threads: int = 1,
) -> Tree:
    return grow_tree_with_leaves(binned, G, H, sketch, params, n_threads).tree


# -----------------------------------------------------------------------------
# Prediction
# -----------------------------------------------------------------------------


def route_binned(tree: Tree, codes: np.ndarray) -> np.ndarray:
    """Leaf index reached by each row of a binned matrix."""
    ref = np.full(codes.shape[0], tree.root, dtype=np.int64)
    active = np.flatnonzero(ref >= 0)
    while active.shape[0]:
        node = ref[active]
        goes_left = codes[active, tree.feature[node]] <= tree.threshold[node]
        ref[active] = np.where(goes_left, tree.left[node], tree.right[node])
        active = active[ref[active] >= 0]
    return ~ref


def predict_tree(tree: Tree, features: np.ndarray, mapper: BinMapper) -> np.ndarray:
    """n x d contributions of one tree for raw features."""
    codes = transform(features, mapper).codes
    return tree.values[route_binned(tree, codes)]
