from typing import Tuple

import numpy as np

BCE_EPSILON = 1e-7


def bce_loss(pred, label, eps: float = BCE_EPSILON) -> Tuple[float, np.ndarray]:
    """Mean binary cross-entropy and its gradient w.r.t. pred (same shape as pred)"""
    pred = np.asarray(pred)
    label = np.asarray(label, dtype=np.float64).reshape(pred.shape)
    p = np.clip(pred.astype(np.float64), eps, 1 - eps)
    n = max(pred.size, 1)
    loss = -np.mean(label * np.log(p) + (1 - label) * np.log(1 - p))
    grad = (-(label / p) + (1 - label) / (1 - p)) / n
    # Clamped entries have no gradient w.r.t. pred
    grad = np.where((pred > eps) & (pred < 1 - eps), grad, 0.0)
    return float(loss), grad.astype(pred.dtype if np.issubdtype(pred.dtype, np.floating) else np.float64)


def mse_loss(pred: np.ndarray, target: np.ndarray, per_sample_sum: bool = False) -> Tuple[float, np.ndarray]:
    """
    Mean squared error over all elements and its gradient. With per_sample_sum the
    squared error is summed over features and averaged over rows, so wide outputs
    do not dilute the gradient.
    """
    diff = pred - target.astype(pred.dtype)
    denom = diff.shape[0] if per_sample_sum and diff.ndim > 1 else diff.size
    denom = max(denom, 1)
    return float(np.sum(np.square(diff, dtype=np.float64)) / denom), (2.0 / denom) * diff
