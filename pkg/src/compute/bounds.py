"""Approximation error of a sketch and the error bounds it must respect.

For a leaf indicator v_R the Hessian-free score is
S(R) = ||G^T v_R||^2 / (|R| + lambda). Replacing G by a sketch Gk changes
every score by at most ||G G^T - Gk Gk^T||_2; the strategies add their own
right-hand sides (tail norms for Top Outputs, sigma_{k+1}^2 for the
truncated SVD, high-probability bounds for the random sketches).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from src.compute.sketch import Sketch, column_sq_norms
from src.errors import ShapeMismatchError, SketchError
from src.schema.models import BoundReport, SketchStrategy

logger = logging.getLogger(__name__)

POWER_MAX_ITER = 1000
POWER_TOL = 1e-12
BOUND_TOL = 1e-9


@dataclass(frozen=True)
class SpectralEstimate:
    """Power-iteration estimate of ||G G^T - Gk Gk^T||_2."""

    value: float
    iterations: int
    converged: bool


def _check_rows(G: np.ndarray, Gk: np.ndarray) -> None:
    if G.ndim != 2 or Gk.ndim != 2 or G.shape[0] != Gk.shape[0]:
        raise ShapeMismatchError(f"G {G.shape} and Gk {Gk.shape} must have the same row count")


def operator_error_estimate(
    G: np.ndarray,
    Gk: np.ndarray,
    max_iter: int = POWER_MAX_ITER,
    tol: float = POWER_TOL,
    seed: int = 0,
) -> SpectralEstimate:
    """Power iteration on A = G G^T - Gk Gk^T, applied as matrix-vector products.

    A is symmetric, so ||A x|| for the iterate x converges to the largest
    absolute eigenvalue even when +lambda and -lambda are both dominant.
    Stops once the estimate changes by less than `tol` relative.
    """
    _check_rows(G, Gk)
    n = G.shape[0]
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(n)
    x /= np.linalg.norm(x)

    def apply(v: np.ndarray) -> np.ndarray:
        return G @ (G.T @ v) - Gk @ (Gk.T @ v)

    estimate = 0.0
    for it in range(1, max_iter + 1):
        y = apply(x)
        norm = float(np.linalg.norm(y))
        if norm == 0.0:
            return SpectralEstimate(value=0.0, iterations=it, converged=True)
        if abs(norm - estimate) <= tol * norm:
            return SpectralEstimate(value=norm, iterations=it, converged=True)
        estimate = norm
        x = y / norm
    logger.warning("Power iteration stopped after %d iterations without converging", max_iter)
    return SpectralEstimate(value=estimate, iterations=max_iter, converged=False)


def operator_error(G: np.ndarray, Gk: np.ndarray) -> float:
    """||G G^T - Gk Gk^T||_2 (see operator_error_estimate for the convergence flag)."""
    return operator_error_estimate(G, Gk).value


def leaf_score(G: np.ndarray, leaf: np.ndarray, lambda_l2: float) -> float:
    """S_G(R) for a 0/1 leaf indicator."""
    s = G.T @ leaf
    return float(s @ s) / (float(leaf.sum()) + lambda_l2)


def random_leaves(n: int, n_leaves: int, seed: int) -> np.ndarray:
    """n_leaves x n matrix of random nonempty 0/1 leaf indicators."""
    rng = np.random.default_rng(seed)
    leaves = (rng.random((n_leaves, n)) < 0.5).astype(np.float64)
    empty = np.flatnonzero(leaves.sum(axis=1) == 0)
    leaves[empty, rng.integers(0, n, size=empty.shape[0])] = 1.0
    return leaves


def empirical_sup_error(
    G: np.ndarray,
    Gk: np.ndarray,
    n_leaves: int,
    seed: int,
    lambda_l2: float = 1.0,
) -> float:
    """max over random nonempty leaves R of |S_G(R) - S_Gk(R)|.

    The exact supremum over all 2^n leaves is an integer program; this is
    a lower estimate.
    """
    _check_rows(G, Gk)
    if n_leaves < 1:
        raise ValueError("n_leaves must be >= 1")
    leaves = random_leaves(G.shape[0], n_leaves, seed)
    full = np.square(leaves @ G).sum(axis=1)
    sketched = np.square(leaves @ Gk).sum(axis=1)
    return float(np.max(np.abs(full - sketched) / (leaves.sum(axis=1) + lambda_l2)))


def spectral_norm_sq(G: np.ndarray) -> float:
    return float(np.linalg.norm(G, ord=2)) ** 2


def stable_rank(G: np.ndarray) -> float:
    """||G||_F^2 / ||G||_2^2."""
    top = spectral_norm_sq(G)
    if top == 0.0:
        raise SketchError("stable rank of an all-zero matrix is undefined")
    return float(np.sum(G * G)) / top


def top_outputs_tail(G: np.ndarray, k: int) -> float:
    """Sum of squared norms of the columns Top Outputs drops."""
    norms = np.sort(column_sq_norms(G))[::-1]
    return float(norms[k:].sum())


def svd_tail(G: np.ndarray, k: int) -> float:
    """sigma_{k+1}(G)^2 (0 when k >= rank dimension)."""
    s = np.linalg.svd(G, compute_uv=False)
    return float(s[k] ** 2) if k < s.shape[0] else 0.0


def strategy_bound(G: np.ndarray, strategy: SketchStrategy, k: int, delta: float = 0.1) -> float:
    """Right-hand side of the strategy's error bound.

    Top Outputs and truncated SVD are deterministic. Random Sampling uses
    2 sqrt(sr ln(4 sr / delta)) ||G||^2 / sqrt(k); Random Projection uses
    sqrt(sr + ln(1/delta)) ||G||^2 / sqrt(k) with its unknown absolute
    constant set to 1, so it is a monitor rather than a guarantee.
    """
    if strategy == SketchStrategy.NONE:
        return 0.0
    if strategy == SketchStrategy.TOP_OUTPUTS:
        return top_outputs_tail(G, k)
    if strategy == SketchStrategy.TRUNCATED_SVD:
        return svd_tail(G, k)
    top = spectral_norm_sq(G)
    if top == 0.0:
        return 0.0
    sr = float(np.sum(G * G)) / top
    if strategy == SketchStrategy.RANDOM_SAMPLING:
        return 2.0 * math.sqrt(sr * math.log(4.0 * sr / delta)) * top / math.sqrt(k)
    return math.sqrt(sr + math.log(1.0 / delta)) * top / math.sqrt(k)


def bound_report(
    G: np.ndarray,
    sketch: Sketch,
    n_leaves: int,
    seed: int,
    lambda_l2: float = 1.0,
    delta: float = 0.1,
    trial: int = 0,
) -> BoundReport:
    """Measure one sketch against the scoring-error bounds."""
    estimate = operator_error_estimate(G, sketch.matrix)
    sup_error = empirical_sup_error(G, sketch.matrix, n_leaves, seed, lambda_l2)
    rhs = strategy_bound(G, sketch.strategy, sketch.k, delta)
    scale = max(1.0, spectral_norm_sq(G))
    deterministic = sketch.strategy in (SketchStrategy.TOP_OUTPUTS, SketchStrategy.TRUNCATED_SVD)
    return BoundReport(
        strategy=sketch.strategy,
        k=sketch.k,
        trial=trial,
        empirical_sup_error=sup_error,
        operator_bound=estimate.value,
        strategy_bound=rhs,
        stable_rank=stable_rank(G) if np.any(G) else 1.0,
        converged=estimate.converged,
        score_bound_holds=sup_error <= estimate.value + BOUND_TOL * scale,
        strategy_bound_holds=(estimate.value <= rhs + BOUND_TOL * scale) if deterministic else None,
    )
