"""Per-node gradient histograms over binned features."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import sparse

from src.compute.quantizer import BinnedMatrix
from src.errors import HistogramConsistencyError, ShapeMismatchError


@dataclass(frozen=True)
class Histogram:
    """Sums per (feature, bin): grad is m x B x k, count is m x B, hess (optional) m x B x d."""

    grad: np.ndarray
    count: np.ndarray
    hess: Optional[np.ndarray] = None

    @property
    def n_features(self) -> int:
        return self.count.shape[0]

    @property
    def n_slots(self) -> int:
        return self.count.shape[1]

    def totals(self) -> tuple[int, np.ndarray, Optional[np.ndarray]]:
        """Node totals (count, grad sum, hess sum) read off the first feature."""
        hess = None if self.hess is None else self.hess[0].sum(axis=0)
        return int(self.count[0].sum()), self.grad[0].sum(axis=0), hess


def n_slots(binned: BinnedMatrix) -> int:
    """Bins per feature in histogram storage: NaN bin + the widest feature's real bins."""
    return int(binned.n_bins.max(initial=1)) + 1


def build_histograms(
    binned: BinnedMatrix,
    Gk: np.ndarray,
    node_rows: np.ndarray,
    hess: Optional[np.ndarray] = None,
) -> Histogram:
    """Accumulate Gk rows (and optionally Hessian rows) into per-feature bins.

    Rows are scattered through a sparse row-by-(feature, bin) indicator so
    the whole node costs one sparse-dense product, O(|rows| * m * k).
    """
    if Gk.shape[0] != binned.n_rows:
        raise ShapeMismatchError(f"Gk has {Gk.shape[0]} rows, binned matrix has {binned.n_rows}")
    m = binned.n_features
    slots = n_slots(binned)
    node_rows = np.asarray(node_rows, dtype=np.int64)
    r = node_rows.shape[0]

    flat = binned.codes[node_rows].astype(np.int64) + np.arange(m, dtype=np.int64) * slots
    flat = flat.ravel()
    count = np.bincount(flat, minlength=m * slots).reshape(m, slots)
    indicator = sparse.csr_matrix(
        (np.ones(r * m), flat, np.arange(0, r * m + 1, m)),
        shape=(r, m * slots),
    )
    scatter = indicator.T
    grad = np.asarray(scatter @ Gk[node_rows]).reshape(m, slots, Gk.shape[1])
    hess_hist = None
    if hess is not None:
        hess_hist = np.asarray(scatter @ hess[node_rows]).reshape(m, slots, hess.shape[1])
    return Histogram(grad=grad, count=count, hess=hess_hist)


def sibling_subtract(parent: Histogram, child: Histogram) -> Histogram:
    """Histogram of the other child: parent minus child."""
    if parent.grad.shape != child.grad.shape:
        raise ShapeMismatchError(f"histogram shapes differ: {parent.grad.shape} vs {child.grad.shape}")
    count = parent.count - child.count
    if (count < 0).any():
        raise HistogramConsistencyError("sibling histogram has negative counts")
    hess = None
    if parent.hess is not None and child.hess is not None:
        hess = parent.hess - child.hess
    return Histogram(grad=parent.grad - child.grad, count=count, hess=hess)
