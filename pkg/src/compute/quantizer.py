"""Feature quantization: at most 255 real bins per feature plus the NaN bin 0."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from src.compute.parallel import ordered_map
from src.errors import ShapeMismatchError

logger = logging.getLogger(__name__)

MAX_REAL_BINS = 255
NAN_BIN = 0


@dataclass(frozen=True)
class BinMapper:
    """Per-feature sorted bin upper edges. Feature j has len(thresholds[j]) + 1 real bins."""

    thresholds: list[np.ndarray]
    max_bins: int = MAX_REAL_BINS

    @property
    def n_features(self) -> int:
        return len(self.thresholds)

    @property
    def n_bins(self) -> np.ndarray:
        """Real (non-NaN) bin count per feature."""
        return np.array([t.shape[0] + 1 for t in self.thresholds], dtype=np.int64)


@dataclass(frozen=True)
class BinnedMatrix:
    """n x m uint8 bin codes; code 0 marks a NaN source value."""

    codes: np.ndarray
    n_bins: np.ndarray

    @property
    def n_rows(self) -> int:
        return self.codes.shape[0]

    @property
    def n_features(self) -> int:
        return self.codes.shape[1]


def _feature_thresholds(column: np.ndarray, max_bins: int) -> np.ndarray:
    # infinities take no part in the edges and clamp into the end bins
    values = column[np.isfinite(column)]
    if values.size == 0:
        return np.empty(0, dtype=np.float64)
    distinct = np.unique(values)
    if distinct.size <= max_bins:
        # one bin per distinct value
        lo, hi = distinct[:-1], distinct[1:]
        with np.errstate(over="ignore"):
            mid = lo + (hi - lo) / 2.0
        mid = np.where(np.isfinite(mid), mid, lo / 2.0 + hi / 2.0)
        # adjacent doubles: the edge must stay strictly below the upper value
        return np.where(mid < hi, mid, lo)
    quantiles = np.arange(1, max_bins, dtype=np.float64) / max_bins
    with np.errstate(over="ignore", invalid="ignore"):
        edges = np.unique(np.quantile(values, quantiles))
    return edges[np.isfinite(edges) & (edges < distinct[-1])]


def fit_bins(features: np.ndarray, max_bins: int = MAX_REAL_BINS, n_threads: int = 1) -> BinMapper:
    """Quantile bin edges per feature over the finite values.

    A feature with at most `max_bins` distinct values gets the midpoints
    between consecutive distinct values; otherwise edges sit at the q/B
    empirical quantiles (linear interpolation), deduplicated. Constant
    features and features with no finite value end up with a single real
    bin. Edges are always finite, so +-inf land in the last and first bin.
    """
    if not 1 <= max_bins <= MAX_REAL_BINS:
        raise ValueError(f"max_bins must be in [1, {MAX_REAL_BINS}], got {max_bins}")
    features = np.asarray(features, dtype=np.float64)
    columns = [features[:, j] for j in range(features.shape[1])]
    thresholds = ordered_map(lambda col: _feature_thresholds(col, max_bins), columns, n_threads)
    mapper = BinMapper(thresholds=thresholds, max_bins=max_bins)
    logger.debug("Fitted bins for %d features (max %d bins)", mapper.n_features, int(mapper.n_bins.max(initial=1)))
    return mapper


def transform(features: np.ndarray, mapper: BinMapper) -> BinnedMatrix:
    """Code = 1 + number of thresholds strictly below the value; NaN -> 0."""
    features = np.asarray(features, dtype=np.float64)
    if features.ndim != 2 or features.shape[1] != mapper.n_features:
        raise ShapeMismatchError(
            f"expected {mapper.n_features} feature columns, got shape {features.shape}"
        )
    codes = np.empty(features.shape, dtype=np.uint8)
    for j, edges in enumerate(mapper.thresholds):
        column = features[:, j]
        col_codes = np.searchsorted(edges, column, side="left") + 1
        col_codes[np.isnan(column)] = NAN_BIN
        codes[:, j] = col_codes
    return BinnedMatrix(codes=codes, n_bins=mapper.n_bins)
