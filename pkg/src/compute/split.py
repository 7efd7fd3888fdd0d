"""Split scoring and best-split search over histograms."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from src.compute.histogram import Histogram
from src.schema.models import TreeParams


@dataclass(frozen=True)
class SplitDecision:
    """Rows with bin code <= threshold go left (the NaN bin 0 always does)."""

    feature: int
    threshold: int
    gain: float
    left_count: int
    right_count: int


def split_score(
    grad_sum: np.ndarray,
    count: int,
    lambda_l2: float,
    hess_sum: Optional[np.ndarray] = None,
) -> float:
    """S(R) = sum_j (sum_i g_ij)^2 / (|R| + lambda), or / (sum_i h_ij + lambda) with Hessians."""
    if count == 0:
        return 0.0
    grad_sum = np.asarray(grad_sum, dtype=np.float64)
    if hess_sum is not None:
        return float((grad_sum * grad_sum / (hess_sum + lambda_l2)).sum())
    return float((grad_sum * grad_sum).sum()) / (count + lambda_l2)


def find_best_split(
    hists: Histogram,
    node_totals: tuple[int, np.ndarray, Optional[np.ndarray]],
    params: TreeParams,
) -> Optional[SplitDecision]:
    """Scan every (feature, bin boundary) left to right and keep the largest gain.

    gain = 1/2 (S(left) + S(right) - S(parent)). Candidates need
    min_samples_leaf rows on both sides and gain > min_gain. Ties go to the
    lower feature index, then the lower bin code.
    """
    total_count, total_grad, total_hess = node_totals
    lam = params.lambda_l2
    use_hessian = params.use_hessian and hists.hess is not None

    left_grad = np.cumsum(hists.grad, axis=1)
    left_count = np.cumsum(hists.count, axis=1)
    right_grad = total_grad - left_grad
    right_count = total_count - left_count

    if use_hessian:
        left_hess = np.cumsum(hists.hess, axis=1)
        right_hess = total_hess - left_hess
        score_left = (left_grad * left_grad / (left_hess + lam)).sum(axis=-1)
        score_right = (right_grad * right_grad / (right_hess + lam)).sum(axis=-1)
        parent = split_score(total_grad, total_count, lam, total_hess)
    else:
        score_left = (left_grad * left_grad).sum(axis=-1) / (left_count + lam)
        score_right = (right_grad * right_grad).sum(axis=-1) / (right_count + lam)
        parent = split_score(total_grad, total_count, lam)

    gain = 0.5 * (score_left + score_right - parent)
    allowed = (left_count >= params.min_samples_leaf) & (right_count >= params.min_samples_leaf)
    gain = np.where(allowed, gain, -np.inf)

    best = int(np.argmax(gain))
    feature, threshold = divmod(best, gain.shape[1])
    best_gain = float(gain[feature, threshold])
    if not best_gain > params.min_gain:
        return None
    return SplitDecision(
        feature=feature,
        threshold=threshold,
        gain=best_gain,
        left_count=int(left_count[feature, threshold]),
        right_count=int(right_count[feature, threshold]),
    )
