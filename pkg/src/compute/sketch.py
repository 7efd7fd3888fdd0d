"""Gradient sketches: reduce the n x d gradient matrix to n x k before split search."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from src.errors import SketchError, SvdConvergenceError
from src.schema.models import SketchStrategy

logger = logging.getLogger(__name__)

_SEED_MASK = 0xFFFF_FFFF_FFFF_FFFF


@dataclass(frozen=True)
class Sketch:
    """Reduced gradient matrix Gk plus how it was drawn."""

    matrix: np.ndarray
    strategy: SketchStrategy
    indices: Optional[np.ndarray] = None  # source columns (top_outputs, random_sampling)
    seed: Optional[int] = None

    @property
    def k(self) -> int:
        return self.matrix.shape[1]

    def search_matrix(self) -> np.ndarray:
        """Columns in ascending source-column order.

        Split scores are sums over columns; a fixed column order makes them
        bitwise reproducible, e.g. top_outputs with k = d scores exactly like
        the unsketched matrix.
        """
        if self.indices is None:
            return self.matrix
        order = np.argsort(self.indices, kind="stable")
        return np.ascontiguousarray(self.matrix[:, order])


def _check_k(k: int, upper: int, what: str = "d") -> None:
    if not 1 <= k <= upper:
        raise SketchError(f"sketch dimension k={k} out of range [1, {what}={upper}]")


def column_sq_norms(G: np.ndarray) -> np.ndarray:
    return np.einsum("ij,ij->j", G, G)


def no_sketch(G: np.ndarray) -> Sketch:
    return Sketch(matrix=G, strategy=SketchStrategy.NONE)


def top_outputs(G: np.ndarray, k: int) -> Sketch:
    """k columns with the largest Euclidean norm, unscaled, by descending norm.

    Equal norms keep the lower column index first.
    """
    _check_k(k, G.shape[1])
    norms = column_sq_norms(G)
    order = np.lexsort((np.arange(norms.shape[0]), -norms))[:k]
    return Sketch(matrix=G[:, order], strategy=SketchStrategy.TOP_OUTPUTS, indices=order)


def sampling_probabilities(G: np.ndarray) -> np.ndarray:
    """p_i proportional to squared column norm; uniform for an all-zero G."""
    norms = column_sq_norms(G)
    total = norms.sum()
    if total <= 0.0:
        return np.full(norms.shape[0], 1.0 / norms.shape[0])
    return norms / total


def random_sampling(G: np.ndarray, k: int, seed: int) -> Sketch:
    """k i.i.d. column draws with p_i ~ ||g_i||^2, each rescaled by 1/sqrt(k p_i)."""
    _check_k(k, G.shape[1])
    p = sampling_probabilities(G)
    rng = np.random.default_rng(seed)
    idx = rng.choice(G.shape[1], size=k, replace=True, p=p)
    matrix = G[:, idx] / np.sqrt(k * p[idx])
    return Sketch(matrix=matrix, strategy=SketchStrategy.RANDOM_SAMPLING, indices=idx, seed=seed)


def projection_matrix(d: int, k: int, seed: int) -> np.ndarray:
    """d x k matrix of i.i.d. N(0, 1/k) entries."""
    rng = np.random.default_rng(seed)
    return rng.standard_normal((d, k)) / np.sqrt(k)


def random_projection(G: np.ndarray, k: int, seed: int) -> Sketch:
    """Gk = G @ Pi with Gaussian Pi."""
    _check_k(k, G.shape[1])
    matrix = G @ projection_matrix(G.shape[1], k, seed)
    return Sketch(matrix=matrix, strategy=SketchStrategy.RANDOM_PROJECTION, seed=seed)


def truncated_svd(G: np.ndarray, k: int) -> Sketch:
    """Gk = U_k Sigma_k, the best rank-k approximation's left factor."""
    _check_k(k, min(G.shape), "min(n, d)")
    try:
        U, s, _ = np.linalg.svd(G, full_matrices=False)
    except np.linalg.LinAlgError as e:
        raise SvdConvergenceError(f"SVD did not converge: {e}") from e
    return Sketch(matrix=U[:, :k] * s[:k], strategy=SketchStrategy.TRUNCATED_SVD)


def make_sketch(G: np.ndarray, strategy: SketchStrategy, k: int, seed: int) -> Sketch:
    """Dispatch on strategy."""
    if strategy == SketchStrategy.NONE:
        return no_sketch(G)
    if strategy == SketchStrategy.TOP_OUTPUTS:
        return top_outputs(G, k)
    if strategy == SketchStrategy.RANDOM_SAMPLING:
        return random_sampling(G, k, seed)
    if strategy == SketchStrategy.RANDOM_PROJECTION:
        return random_projection(G, k, seed)
    if strategy == SketchStrategy.TRUNCATED_SVD:
        return truncated_svd(G, k)
    raise SketchError(f"unknown sketch strategy {strategy!r}")


def iteration_seed(seed: int, iteration: int) -> int:
    """Stable per-iteration seed derived from (global seed, iteration).

    Negative seeds enter as their 64-bit two's complement, so distinct
    64-bit seeds give distinct streams.
    """
    sequence = np.random.SeedSequence(entropy=int(seed) & _SEED_MASK, spawn_key=(int(iteration),))
    return int(sequence.generate_state(1, dtype=np.uint64)[0] >> np.uint64(1))
