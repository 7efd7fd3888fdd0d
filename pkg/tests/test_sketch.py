import numpy as np
import pytest

from src.compute.sketch import (
    iteration_seed,
    make_sketch,
    projection_matrix,
    random_projection,
    random_sampling,
    sampling_probabilities,
    top_outputs,
    truncated_svd,
)
from src.errors import SketchError
from src.schema.models import SketchStrategy

MC_DRAWS = 20000


def test_top_outputs_picks_largest_columns():
    G = np.array([[1.0, 5.0, 0.0, 3.0], [1.0, 5.0, 0.0, 3.0]])
    sketch = top_outputs(G, 2)
    np.testing.assert_array_equal(sketch.indices, [1, 3])
    np.testing.assert_array_equal(sketch.matrix, G[:, [1, 3]])


def test_top_outputs_ties_prefer_lower_index():
    G = np.ones((3, 4))
    np.testing.assert_array_equal(top_outputs(G, 2).indices, [0, 1])


def test_top_outputs_full_width_search_matrix_is_g():
    G = np.random.default_rng(0).standard_normal((10, 5))
    np.testing.assert_array_equal(top_outputs(G, 5).search_matrix(), G)


def test_sampling_probabilities():
    G = np.array([[1.0, 0.0, 2.0]])
    np.testing.assert_allclose(sampling_probabilities(G), [0.2, 0.0, 0.8])
    np.testing.assert_allclose(sampling_probabilities(np.zeros((2, 4))), 0.25)


def test_random_sampling_never_draws_zero_columns(rng):
    G = rng.standard_normal((6, 5))
    G[:, 2] = 0.0
    for seed in range(50):
        sketch = random_sampling(G, 5, seed=seed)
        assert 2 not in set(sketch.indices.tolist())
        assert np.isfinite(sketch.matrix).all()


def test_random_sampling_scaling():
    G = np.array([[3.0, 4.0]])
    sketch = random_sampling(G, 1, seed=0)
    j = sketch.indices[0]
    p = np.array([9.0, 16.0]) / 25.0
    np.testing.assert_allclose(sketch.matrix[0, 0], G[0, j] / np.sqrt(p[j]))


def test_projection_matrix_moments():
    pi = projection_matrix(400, 50, seed=3)
    assert pi.shape == (400, 50)
    assert abs(pi.mean()) < 0.01
    assert pi.var() == pytest.approx(1 / 50, rel=0.05)


def test_seeded_sketches_are_reproducible(rng):
    G = rng.standard_normal((20, 8))
    for strategy in (SketchStrategy.RANDOM_SAMPLING, SketchStrategy.RANDOM_PROJECTION):
        a = make_sketch(G, strategy, 3, seed=11)
        b = make_sketch(G, strategy, 3, seed=11)
        np.testing.assert_array_equal(a.matrix, b.matrix)


def test_truncated_svd_is_best_rank_k(rng):
    G = rng.standard_normal((15, 6))
    sketch = truncated_svd(G, 6)
    np.testing.assert_allclose(sketch.matrix @ sketch.matrix.T, G @ G.T, atol=1e-10)


@pytest.mark.parametrize("k", [0, 7])
def test_k_out_of_range(k, rng):
    G = rng.standard_normal((5, 6))
    with pytest.raises(SketchError):
        make_sketch(G, SketchStrategy.RANDOM_PROJECTION, k, seed=0)


def test_iteration_seed_is_stable_and_distinct():
    assert iteration_seed(1, 0) == iteration_seed(1, 0)
    assert len({iteration_seed(1, t) for t in range(100)}) == 100
    assert iteration_seed(1, 5) != iteration_seed(2, 5)


@pytest.mark.parametrize("strategy", [random_sampling, random_projection])
def test_sketched_score_is_unbiased(strategy, rng):
    """E ||Gk^T v||^2 = ||G^T v||^2 for the rescaled random sketches."""
    G = rng.standard_normal((12, 8)) * rng.uniform(0.2, 2.0, size=8)
    v = (rng.random(12) < 0.5).astype(float)
    exact = float(np.sum((G.T @ v) ** 2))
    draws = np.array([np.sum((strategy(G, 3, seed=s).matrix.T @ v) ** 2) for s in range(MC_DRAWS)])
    stderr = draws.std(ddof=1) / np.sqrt(MC_DRAWS)
    assert abs(draws.mean() - exact) <= 5 * stderr


def test_projection_is_isotropic_on_average():
    d, k = 4, 2
    outer = np.zeros((MC_DRAWS, d, d))
    for s in range(MC_DRAWS):
        pi = projection_matrix(d, k, seed=s)
        outer[s] = pi @ pi.T
    mean = outer.mean(axis=0)
    stderr = outer.std(axis=0, ddof=1) / np.sqrt(MC_DRAWS)
    assert (np.abs(mean - np.eye(d)) <= 5 * stderr).all()


def test_zero_gradient_sketches_are_zero():
    G = np.zeros((5, 4))
    assert not random_projection(G, 2, seed=0).matrix.any()
    sampled = random_sampling(G, 2, seed=0)
    assert not sampled.matrix.any()
    assert np.isfinite(sampled.matrix).all()


def test_negative_seeds_have_their_own_stream():
    assert iteration_seed(-1, 0) != iteration_seed(1, 0)
    assert iteration_seed(-7, 3) != iteration_seed(7, 3)
    assert iteration_seed(-7, 3) == iteration_seed(-7, 3)


def test_top_outputs_follows_column_permutation(rng):
    G = rng.standard_normal((30, 8)) * rng.uniform(0.1, 3.0, size=8)
    perm = rng.permutation(8)
    original = top_outputs(G, 3)
    permuted = top_outputs(G[:, perm], 3)
    np.testing.assert_array_equal(perm[permuted.indices], original.indices)
    np.testing.assert_array_equal(permuted.matrix, original.matrix)
