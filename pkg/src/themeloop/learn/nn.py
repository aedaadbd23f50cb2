"""Minimal neural-network layers in numpy.

Convolutions are computed as nine shifted matrix products (one per 3x3 tap),
which keeps peak memory low while still routing the heavy lifting through
BLAS. Every layer caches what its backward pass needs.
"""
from __future__ import annotations

import numpy as np


class Conv2D:
    """3x3 convolution, stride 1, zero padding 1, seeded uniform fan-in init."""

    def __init__(
        self,
        in_channels: int,
        out_channels: int,
        rng: np.random.Generator,
        kernel: int = 3,
        dtype=np.float32,
    ):
        self.in_channels = in_channels
        self.out_channels = out_channels
        self.kernel = kernel
        fan_in = in_channels * kernel * kernel
        limit = np.sqrt(6.0 / fan_in)  # He-uniform, suits the ReLU stack
        self.W = rng.uniform(-limit, limit, (out_channels, in_channels, kernel, kernel)).astype(dtype)
        self.b = np.zeros(out_channels, dtype=dtype)
        self.dW = np.zeros_like(self.W)
        self.db = np.zeros_like(self.b)
        self._x_padded: np.ndarray | None = None

    def forward(self, x: np.ndarray) -> np.ndarray:
        n, c, h, w = x.shape
        k = self.kernel
        pad = k // 2
        xp = np.zeros((n, c, h + 2 * pad, w + 2 * pad), dtype=x.dtype)
        xp[:, :, pad : pad + h, pad : pad + w] = x
        self._x_padded = xp
        out = np.empty((n, h, w, self.out_channels), dtype=x.dtype)
        out[:] = self.b.astype(x.dtype)
        for kh in range(k):
            for kw in range(k):
                patch = xp[:, :, kh : kh + h, kw : kw + w]  # (n, c, h, w)
                tap = self.W[:, :, kh, kw].astype(x.dtype)  # (o, c)
                out += np.tensordot(patch, tap, axes=([1], [1]))
        return out.transpose(0, 3, 1, 2)

    def backward(self, dout: np.ndarray) -> np.ndarray:
        xp = self._x_padded
        assert xp is not None, "forward must run before backward"
        n, o, h, w = dout.shape
        k = self.kernel
        self.db = dout.sum(axis=(0, 2, 3)).astype(self.b.dtype)
        dW = np.empty_like(self.W, dtype=np.float64 if xp.dtype == np.float64 else np.float32)
        dxp = np.zeros_like(xp)
        for kh in range(k):
            for kw in range(k):
                patch = xp[:, :, kh : kh + h, kw : kw + w]
                # dW tap: contract over batch and spatial dims
                dW[:, :, kh, kw] = np.tensordot(dout, patch, axes=([0, 2, 3], [0, 2, 3]))
                # input gradient: spread dout back through the tap
                tap = self.W[:, :, kh, kw].astype(dout.dtype)  # (o, c)
                dxp[:, :, kh : kh + h, kw : kw + w] += np.tensordot(
                    dout, tap, axes=([1], [0])
                ).transpose(0, 3, 1, 2)
        self.dW = dW.astype(self.W.dtype)
        pad = k // 2
        self._x_padded = None
        return dxp[:, :, pad : pad + h, pad : pad + w]


class MaxPool2x2:
    """2x2 max pooling, stride 2; ties route the gradient to the first max."""

    def __init__(self) -> None:
        self._idx: np.ndarray | None = None
        self._shape: tuple[int, ...] | None = None

    def forward(self, x: np.ndarray) -> np.ndarray:
        n, c, h, w = x.shape
        if h % 2 or w % 2:
            raise ValueError(f"pool input dims must be even, got {h}x{w}")
        xr = (
            x.reshape(n, c, h // 2, 2, w // 2, 2)
            .transpose(0, 1, 2, 4, 3, 5)
            .reshape(n, c, h // 2, w // 2, 4)
        )
        self._idx = xr.argmax(axis=-1)
        self._shape = (n, c, h, w)
        return np.take_along_axis(xr, self._idx[..., None], axis=-1)[..., 0]

    def backward(self, dout: np.ndarray) -> np.ndarray:
        assert self._idx is not None and self._shape is not None
        n, c, h, w = self._shape
        dxr = np.zeros((n, c, h // 2, w // 2, 4), dtype=dout.dtype)
        np.put_along_axis(dxr, self._idx[..., None], dout[..., None], axis=-1)
        dx = (
            dxr.reshape(n, c, h // 2, w // 2, 2, 2)
            .transpose(0, 1, 2, 4, 3, 5)
            .reshape(n, c, h, w)
        )
        self._idx = None
        return dx


class ReLU:
    def __init__(self) -> None:
        self._mask: np.ndarray | None = None

    def forward(self, x: np.ndarray) -> np.ndarray:
        self._mask = x > 0
        return x * self._mask

    def backward(self, dout: np.ndarray) -> np.ndarray:
        assert self._mask is not None
        out = dout * self._mask
        self._mask = None
        return out


class Dense:
    """Fully connected layer with seeded uniform fan-in init."""

    def __init__(self, in_features: int, out_features: int, rng: np.random.Generator, dtype=np.float32):
        limit = np.sqrt(6.0 / in_features)  # He-uniform, suits the ReLU stack
        self.W = rng.uniform(-limit, limit, (in_features, out_features)).astype(dtype)
        self.b = np.zeros(out_features, dtype=dtype)
        self.dW = np.zeros_like(self.W)
        self.db = np.zeros_like(self.b)
        self._x: np.ndarray | None = None

    def forward(self, x: np.ndarray) -> np.ndarray:
        self._x = x
        return x @ self.W.astype(x.dtype) + self.b.astype(x.dtype)

    def backward(self, dout: np.ndarray) -> np.ndarray:
        assert self._x is not None
        self.dW = (self._x.T @ dout).astype(self.W.dtype)
        self.db = dout.sum(axis=0).astype(self.b.dtype)
        dx = dout @ self.W.astype(dout.dtype).T
        self._x = None
        return dx


def softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=1, keepdims=True)


def softmax_cross_entropy(
    logits: np.ndarray, labels: np.ndarray
) -> tuple[float, np.ndarray]:
    """Mean cross-entropy loss and its gradient w.r.t. the logits."""
    n = logits.shape[0]
    probs = softmax(logits.astype(np.float64))
    eps = 1e-12
    loss = float(-np.mean(np.log(probs[np.arange(n), labels] + eps)))
    dlogits = probs
    dlogits[np.arange(n), labels] -= 1.0
    dlogits /= n
    return loss, dlogits.astype(logits.dtype)
