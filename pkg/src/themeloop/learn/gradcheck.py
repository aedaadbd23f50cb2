"""Finite-difference verification of the network's analytic gradients."""
from __future__ import annotations

import numpy as np

from .classifier import CnnModel
from .nn import softmax_cross_entropy


def _loss_only(model: CnnModel, x: np.ndarray, labels: np.ndarray) -> float:
    logits = model.forward(x)
    loss, _ = softmax_cross_entropy(logits, labels)
    return loss


def gradient_check(
    model: CnnModel,
    x: np.ndarray,
    labels: np.ndarray,
    *,
    entries_per_tensor: int = 5,
    step: float = 1e-5,
    seed: int = 0,
) -> float:
    """Compare analytic and central-difference gradients in float64.

    Returns the maximum relative error over sampled entries of every
    parameter tensor; relative error uses ``|a - n| / max(|a| + |n|, 1e-8)``.
    """
    m = model.astype(np.float64)
    x64 = np.asarray(x, dtype=np.float64)
    labels = np.asarray(labels)

    m.loss_and_grads(x64, labels)
    analytic = {
        name: getattr(layer, "d" + attr).copy()
        for name, layer, attr in m.param_tensors()
    }

    rng = np.random.default_rng(seed)
    worst = 0.0
    for name, layer, attr in m.param_tensors():
        tensor = getattr(layer, attr)
        flat = tensor.reshape(-1)
        k = min(entries_per_tensor, flat.size)
        picks = rng.choice(flat.size, size=k, replace=False)
        for idx in picks:
            original = flat[idx]
            flat[idx] = original + step
            loss_hi = _loss_only(m, x64, labels)
            flat[idx] = original - step
            loss_lo = _loss_only(m, x64, labels)
            flat[idx] = original
            numeric = (loss_hi - loss_lo) / (2.0 * step)
            a = float(analytic[name].reshape(-1)[idx])
            rel = abs(a - numeric) / max(abs(a) + abs(numeric), 1e-8)
            worst = max(worst, rel)
    return worst
