import numpy as np
import pytest

from src.compute.losses import grad_hess, loss_value, output_transform, per_sample_loss
from src.errors import InvalidTargetError, ShapeMismatchError
from src.schema.models import TaskKind

STEP = 1e-5
HESS_STEP = 1e-4


def _targets(task, rng, n, d):
    if task == TaskKind.MULTICLASS:
        t = np.zeros((n, d))
        t[np.arange(n), rng.integers(0, d, size=n)] = 1.0
        return t
    if task == TaskKind.MULTILABEL:
        return (rng.random((n, d)) < 0.5).astype(float)
    return rng.standard_normal((n, d))


def _finite_differences(task, targets, raw):
    grad = np.empty_like(raw)
    hess = np.empty_like(raw)
    base = per_sample_loss(targets, raw, task)
    for j in range(raw.shape[1]):
        bump = np.zeros_like(raw)
        bump[:, j] = STEP
        up = per_sample_loss(targets, raw + bump, task)
        down = per_sample_loss(targets, raw - bump, task)
        grad[:, j] = (up - down) / (2 * STEP)
        up = per_sample_loss(targets, raw + bump * (HESS_STEP / STEP), task)
        down = per_sample_loss(targets, raw - bump * (HESS_STEP / STEP), task)
        hess[:, j] = (up - 2 * base + down) / HESS_STEP**2
    return grad, hess


@pytest.mark.parametrize("task", list(TaskKind))
def test_derivatives_match_finite_differences(task, rng):
    for _ in range(5):
        targets = _targets(task, rng, 12, 4)
        raw = rng.normal(scale=2.0, size=(12, 4))
        derivatives = grad_hess(targets, raw, task)
        grad, hess = _finite_differences(task, targets, raw)
        np.testing.assert_allclose(derivatives.grad, grad, atol=1e-6)
        np.testing.assert_allclose(derivatives.hess, hess, atol=1e-5)


def test_softmax_at_zero():
    targets = np.array([[0.0, 1.0, 0.0, 0.0]])
    d = grad_hess(targets, np.zeros((1, 4)), TaskKind.MULTICLASS)
    np.testing.assert_allclose(d.grad, [[0.25, -0.75, 0.25, 0.25]])
    np.testing.assert_allclose(d.hess, [[0.1875] * 4])


def test_mse_derivatives():
    d = grad_hess(np.array([[1.0, -2.0]]), np.array([[0.5, 0.0]]), TaskKind.MULTITASK_REGRESSION)
    np.testing.assert_array_equal(d.grad, [[-0.5, 2.0]])
    np.testing.assert_array_equal(d.hess, [[1.0, 1.0]])


def test_hessian_is_clamped_for_saturated_scores():
    d = grad_hess(np.array([[1.0, 0.0]]), np.array([[800.0, -800.0]]), TaskKind.MULTICLASS)
    assert (d.hess > 0).all()
    assert np.isfinite(d.grad).all()


def test_loss_values_at_zero():
    targets = np.eye(4)
    assert loss_value(targets, np.zeros((4, 4)), TaskKind.MULTICLASS) == pytest.approx(np.log(4))
    assert loss_value(targets, np.zeros((4, 4)), TaskKind.MULTILABEL) == pytest.approx(np.log(2))
    assert loss_value(targets, targets, TaskKind.MULTITASK_REGRESSION) == 0.0


def test_output_transform():
    raw = np.array([[0.0, 0.0, 0.0, 0.0], [1.0, 2.0, 3.0, 4.0]])
    probs = output_transform(raw, TaskKind.MULTICLASS)
    np.testing.assert_allclose(probs.sum(axis=1), 1.0, atol=1e-12)
    np.testing.assert_allclose(probs[0], 0.25)
    np.testing.assert_allclose(output_transform(np.zeros((2, 3)), TaskKind.MULTILABEL), 0.5)
    np.testing.assert_array_equal(output_transform(raw, TaskKind.MULTITASK_REGRESSION), raw)


def test_invalid_targets():
    with pytest.raises(InvalidTargetError):
        grad_hess(np.array([[0.5, 0.5]]), np.zeros((1, 2)), TaskKind.MULTICLASS)
    with pytest.raises(InvalidTargetError):
        grad_hess(np.array([[2.0]]), np.zeros((1, 1)), TaskKind.MULTILABEL)


def test_shape_mismatch():
    with pytest.raises(ShapeMismatchError):
        grad_hess(np.zeros((2, 2)), np.zeros((2, 3)), TaskKind.MULTITASK_REGRESSION)
