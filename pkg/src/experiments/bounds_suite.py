"""Randomized verification of the sketch scoring-error bounds."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from src.compute.bounds import BOUND_TOL, bound_report, spectral_norm_sq
from src.compute.sketch import iteration_seed, make_sketch
from src.schema.models import BoundReport, SketchStrategy

logger = logging.getLogger(__name__)

SUITE_STRATEGIES = (
    SketchStrategy.TOP_OUTPUTS,
    SketchStrategy.RANDOM_SAMPLING,
    SketchStrategy.RANDOM_PROJECTION,
    SketchStrategy.TRUNCATED_SVD,
)
SVD_EQUALITY_TOL = 1e-8


@dataclass
class SuiteResult:
    reports: list[BoundReport] = field(default_factory=list)
    failures: list[str] = field(default_factory=list)
    probabilistic_misses: int = 0

    @property
    def passed(self) -> bool:
        return not self.failures


def random_gradient(n: int, d: int, rng: np.random.Generator) -> np.ndarray:
    """Gradient-like test matrix: low-rank signal, uneven column scales and noise."""
    rank = max(1, min(n, d) // 4)
    signal = rng.standard_normal((n, rank)) @ rng.standard_normal((rank, d))
    scales = rng.uniform(0.1, 2.0, size=d)
    return (signal + 0.3 * rng.standard_normal((n, d))) * scales


def _check_trial(reports: dict[SketchStrategy, BoundReport], scale: float, trial: int) -> list[str]:
    failures = []
    for strategy, report in reports.items():
        if not report.score_bound_holds:
            failures.append(
                f"trial {trial} {strategy.value}: sup error {report.empirical_sup_error:.6g} "
                f"> operator error {report.operator_bound:.6g}"
            )
    top = reports[SketchStrategy.TOP_OUTPUTS]
    if not top.strategy_bound_holds:
        failures.append(
            f"trial {trial} top_outputs: operator error {top.operator_bound:.6g} > tail sum {top.strategy_bound:.6g}"
        )
    svd = reports[SketchStrategy.TRUNCATED_SVD]
    if abs(svd.operator_bound - svd.strategy_bound) > SVD_EQUALITY_TOL * scale:
        failures.append(
            f"trial {trial} truncated_svd: operator error {svd.operator_bound:.12g} "
            f"!= sigma_(k+1)^2 {svd.strategy_bound:.12g}"
        )
    for strategy, report in reports.items():
        if report.operator_bound + BOUND_TOL * scale < svd.operator_bound:
            failures.append(
                f"trial {trial} {strategy.value}: operator error {report.operator_bound:.6g} "
                f"below the truncated SVD optimum {svd.operator_bound:.6g}"
            )
    return failures


def run_bound_suite(
    n: int,
    d: int,
    k: int,
    trials: int,
    seed: int = 0,
    n_leaves: int = 256,
    delta: float = 0.1,
    lambda_l2: float = 1.0,
) -> SuiteResult:
    """Draw `trials` gradient matrices and check every strategy's sketch against its bounds.

    Deterministic checks (scoring error below operator error, Top Outputs
    tail bound, truncated SVD equality and optimality) decide pass/fail.
    The random strategies' high-probability bounds are only counted.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if not 1 <= k <= min(n, d):
        raise ValueError(f"k={k} must lie in [1, min(n, d)={min(n, d)}]")
    rng = np.random.default_rng(seed)
    result = SuiteResult()
    for trial in range(trials):
        G = random_gradient(n, d, rng)
        scale = max(1.0, spectral_norm_sq(G))
        trial_seed = iteration_seed(seed, trial)
        reports = {}
        for strategy in SUITE_STRATEGIES:
            sketch = make_sketch(G, strategy, k, trial_seed)
            reports[strategy] = bound_report(
                G, sketch, n_leaves, trial_seed, lambda_l2=lambda_l2, delta=delta, trial=trial
            )
        for strategy in (SketchStrategy.RANDOM_SAMPLING, SketchStrategy.RANDOM_PROJECTION):
            report = reports[strategy]
            if report.operator_bound > report.strategy_bound:
                result.probabilistic_misses += 1
        result.failures.extend(_check_trial(reports, scale, trial))
        result.reports.extend(reports.values())
    logger.info(
        "Bound suite: %d trials, %d deterministic failures, %d probabilistic bound misses",
        trials,
        len(result.failures),
        result.probabilistic_misses,
    )
    for failure in result.failures:
        logger.error(failure)
    return result
