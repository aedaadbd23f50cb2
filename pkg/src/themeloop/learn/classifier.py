"""Crop-source classifier: a small CNN whose penultimate layer embeds crops.

The network is trained to name the source format of each crop; the 128-wide
rectified feature layer then serves as the embedding space in which formats
are compared and clustered.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from ..render.crops import Crop
from ..validation import check_is_fitted, check_labels
from .dataset import CropDataset
from .nn import Conv2D, Dense, MaxPool2x2, ReLU, softmax, softmax_cross_entropy

DEFAULT_CHANNELS = (16, 32, 64)
DEFAULT_FEATURE_DIM = 128
DEFAULT_INPUT_SIDE = 128


@dataclass
class TrainConfig:
    """Optimizer and schedule settings for classifier training."""

    learning_rate: float = 0.01
    momentum: float = 0.9
    batch_size: int = 32
    epochs: int = 10
    seed: int = 0

    def __post_init__(self) -> None:
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be > 0")
        if not (0.0 <= self.momentum < 1.0):
            raise ValueError("momentum must be in [0, 1)")
        if self.batch_size < 1 or self.epochs < 1:
            raise ValueError("batch_size and epochs must be >= 1")


@dataclass
class EpochStats:
    epoch: int
    mean_loss: float
    test_accuracy: float | None = None


def normalize_pixels(pixels: np.ndarray, dtype=np.float32) -> np.ndarray:
    """Map uint8 pages to float inputs: ink -> 1.0, background -> 0.0."""
    arr = np.asarray(pixels)
    if arr.ndim == 2:
        arr = arr[None, :, :]
    x = (255.0 - arr.astype(dtype)) / 255.0
    return x[:, None, :, :].astype(dtype)  # add channel axis


class CnnModel:
    """Conv/pool stack with a rectified feature layer and a softmax head.

    Three stages of (3x3 conv, relu, 2x2 max pool) expand channels over a
    shrinking grid; a dense layer produces the feature vector (post-ReLU)
    and a final dense layer scores the classes.
    """

    def __init__(
        self,
        n_classes: int,
        *,
        input_side: int = DEFAULT_INPUT_SIDE,
        channels: Sequence[int] = DEFAULT_CHANNELS,
        feature_dim: int = DEFAULT_FEATURE_DIM,
        seed: int = 0,
        dtype=np.float32,
    ):
        if n_classes < 2:
            raise ValueError(f"need at least 2 classes, got {n_classes}")
        side = int(input_side)
        if side < 2 ** len(channels):
            raise ValueError(f"input side {side} too small for {len(channels)} pools")
        if side % (2 ** len(channels)):
            raise ValueError(
                f"input side {side} must be divisible by {2 ** len(channels)}"
            )
        self.n_classes = int(n_classes)
        self.input_side = side
        self.channels = tuple(int(c) for c in channels)
        self.feature_dim = int(feature_dim)
        self.seed = int(seed)
        self.dtype = dtype

        rng = np.random.default_rng(seed)
        self.convs: list[Conv2D] = []
        self.pools: list[MaxPool2x2] = []
        self.relus: list[ReLU] = []
        in_ch = 1
        for out_ch in self.channels:
            self.convs.append(Conv2D(in_ch, out_ch, rng, dtype=dtype))
            self.relus.append(ReLU())
            self.pools.append(MaxPool2x2())
            in_ch = out_ch
            side //= 2
        self.flat_dim = in_ch * side * side
        self.feature_layer = Dense(self.flat_dim, self.feature_dim, rng, dtype=dtype)
        self.feature_relu = ReLU()
        self.head = Dense(self.feature_dim, self.n_classes, rng, dtype=dtype)

    # -- parameter plumbing -------------------------------------------------

    def param_tensors(self) -> list[tuple[str, object, str]]:
        """(name, layer, attribute) for every trainable tensor, fixed order."""
        out: list[tuple[str, object, str]] = []
        for i, conv in enumerate(self.convs):
            out.append((f"conv{i}.W", conv, "W"))
            out.append((f"conv{i}.b", conv, "b"))
        out.append(("feature.W", self.feature_layer, "W"))
        out.append(("feature.b", self.feature_layer, "b"))
        out.append(("head.W", self.head, "W"))
        out.append(("head.b", self.head, "b"))
        return out

    def astype(self, dtype) -> "CnnModel":
        """Return a copy of this model with all parameters cast to ``dtype``."""
        clone = CnnModel(
            self.n_classes,
            input_side=self.input_side,
            channels=self.channels,
            feature_dim=self.feature_dim,
            seed=self.seed,
            dtype=dtype,
        )
        for (_, src, attr), (_, dst, dattr) in zip(
            self.param_tensors(), clone.param_tensors()
        ):
            setattr(dst, dattr, getattr(src, attr).astype(dtype))
        return clone

    # -- forward / backward -------------------------------------------------

    def forward(self, x: np.ndarray, *, return_features: bool = False) -> np.ndarray:
        h = x.astype(self.dtype, copy=False)
        for conv, relu, pool in zip(self.convs, self.relus, self.pools):
            h = pool.forward(relu.forward(conv.forward(h)))
        h = h.reshape(h.shape[0], -1)
        features = self.feature_relu.forward(self.feature_layer.forward(h))
        if return_features:
            return features
        return self.head.forward(features)

    def loss_and_grads(self, x: np.ndarray, labels: np.ndarray) -> float:
        logits = self.forward(x)
        loss, dlogits = softmax_cross_entropy(logits, labels)
        d = self.head.backward(dlogits)
        d = self.feature_layer.backward(self.feature_relu.backward(d))
        d = d.reshape(
            (x.shape[0], self.channels[-1])
            + (self.input_side // 2 ** len(self.channels),) * 2
        )
        for conv, relu, pool in zip(
            reversed(self.convs), reversed(self.relus), reversed(self.pools)
        ):
            d = conv.backward(relu.backward(pool.backward(d)))
        return loss

    def predict_proba(self, pixels: np.ndarray, *, batch_size: int = 64) -> np.ndarray:
        out = []
        for chunk in _chunks(pixels, batch_size):
            out.append(softmax(self.forward(normalize_pixels(chunk, self.dtype)).astype(np.float64)))
        return np.concatenate(out) if out else np.empty((0, self.n_classes))

    def embed(self, pixels: np.ndarray, *, batch_size: int = 64) -> np.ndarray:
        out = []
        for chunk in _chunks(pixels, batch_size):
            out.append(
                self.forward(
                    normalize_pixels(chunk, self.dtype), return_features=True
                ).astype(np.float64)
            )
        return np.concatenate(out) if out else np.empty((0, self.feature_dim))


def _chunks(pixels: np.ndarray, size: int) -> Iterable[np.ndarray]:
    arr = np.asarray(pixels)
    if arr.ndim == 2:
        arr = arr[None]
    for start in range(0, arr.shape[0], size):
        yield arr[start : start + size]


@dataclass
class TrainResult:
    model: CnnModel
    history: list[EpochStats] = field(default_factory=list)
    test_accuracy: float = float("nan")


def _accuracy(model: CnnModel, pixels: np.ndarray, labels: np.ndarray) -> float:
    if pixels.shape[0] == 0:
        return float("nan")
    probs = model.predict_proba(pixels)
    return float(np.mean(probs.argmax(axis=1) == labels))


def _sgd_fit(
    model: CnnModel,
    pixels: np.ndarray,
    labels: np.ndarray,
    config: TrainConfig,
    eval_set: tuple[np.ndarray, np.ndarray] | None,
) -> list[EpochStats]:
    velocity = {
        name: np.zeros_like(getattr(layer, attr))
        for name, layer, attr in model.param_tensors()
    }
    rng = np.random.default_rng(config.seed + 1)
    history: list[EpochStats] = []
    n = pixels.shape[0]
    for epoch in range(config.epochs):
        order = rng.permutation(n)
        losses = []
        for start in range(0, n, config.batch_size):
            idx = order[start : start + config.batch_size]
            x = normalize_pixels(pixels[idx], model.dtype)
            losses.append(model.loss_and_grads(x, labels[idx]))
            for name, layer, attr in model.param_tensors():
                grad = getattr(layer, "d" + attr)
                v = velocity[name]
                v *= config.momentum
                v -= config.learning_rate * grad
                tensor = getattr(layer, attr)
                tensor += v.astype(tensor.dtype)
        test_acc = _accuracy(model, *eval_set) if eval_set is not None else None
        history.append(EpochStats(epoch, float(np.mean(losses)), test_acc))
    return history


def train(
    dataset: CropDataset,
    config: TrainConfig | None = None,
    *,
    channels: Sequence[int] = DEFAULT_CHANNELS,
    feature_dim: int = DEFAULT_FEATURE_DIM,
    log_path=None,
) -> TrainResult:
    """Train a classifier on the dataset's train split; score its test split."""
    config = config or TrainConfig()
    train_px, train_y = dataset.train_arrays()
    test_px, test_y = dataset.test_arrays()
    if train_px.shape[0] == 0:
        raise ValueError("dataset has no training rows")
    model = CnnModel(
        dataset.n_classes,
        input_side=dataset.side,
        channels=channels,
        feature_dim=feature_dim,
        seed=config.seed,
    )
    history = _sgd_fit(model, train_px, train_y, config, (test_px, test_y))
    result = TrainResult(
        model=model,
        history=history,
        test_accuracy=_accuracy(model, test_px, test_y),
    )
    if log_path is not None:
        write_training_log(history, log_path)
    return result


def write_training_log(history: Sequence[EpochStats], path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["epoch", "mean_loss", "test_accuracy"])
        for row in history:
            writer.writerow(
                [
                    row.epoch,
                    f"{row.mean_loss:.6f}",
                    "" if row.test_accuracy is None else f"{row.test_accuracy:.6f}",
                ]
            )


def _crop_pixels(crop: Crop | np.ndarray) -> np.ndarray:
    return np.asarray(crop.pixels if hasattr(crop, "pixels") else crop)


def embed_crop(model: CnnModel, crop: Crop | np.ndarray) -> np.ndarray:
    """Feature vector (post-ReLU penultimate layer) for one crop."""
    pixels = _crop_pixels(crop)
    return model.embed(pixels[None] if pixels.ndim == 2 else pixels)[0]


def embed_format(model: CnnModel, crops: Sequence[Crop | np.ndarray]) -> np.ndarray:
    """A format's embedding: the mean of its crop embeddings."""
    if not len(crops):
        raise ValueError("cannot embed a format with zero crops")
    stack = np.stack([_crop_pixels(c) for c in crops])
    return model.embed(stack).mean(axis=0)


class CropSourceClassifier(BaseEstimator, TransformerMixin):
    """Estimator wrapper: fit names crop sources, transform embeds crops.

    Parameters mirror :class:`TrainConfig`; `fit(X, y)` expects crops as an
    array of shape (n, side, side) with integer source labels.
    """

    def __init__(
        self,
        learning_rate: float = 0.01,
        momentum: float = 0.9,
        batch_size: int = 32,
        epochs: int = 10,
        seed: int = 0,
        channels: tuple[int, ...] = DEFAULT_CHANNELS,
        feature_dim: int = DEFAULT_FEATURE_DIM,
    ):
        self.learning_rate = learning_rate
        self.momentum = momentum
        self.batch_size = batch_size
        self.epochs = epochs
        self.seed = seed
        self.channels = channels
        self.feature_dim = feature_dim

    def _check_X(self, X) -> np.ndarray:
        arr = np.asarray(X)
        if arr.ndim != 3 or arr.shape[1] != arr.shape[2]:
            raise ValueError(
                f"X must be square crops of shape (n, side, side), got {arr.shape}"
            )
        return arr

    def fit(self, X, y) -> "CropSourceClassifier":
        arr = self._check_X(X)
        labels = check_labels(y, arr.shape[0])
        classes, dense = np.unique(labels, return_inverse=True)
        if classes.shape[0] < 2:
            raise ValueError("fit needs at least 2 distinct classes")
        config = TrainConfig(
            learning_rate=self.learning_rate,
            momentum=self.momentum,
            batch_size=self.batch_size,
            epochs=self.epochs,
            seed=self.seed,
        )
        self.model_ = CnnModel(
            classes.shape[0],
            input_side=arr.shape[1],
            channels=self.channels,
            feature_dim=self.feature_dim,
            seed=config.seed,
        )
        self.history_ = _sgd_fit(self.model_, arr, dense, config, None)
        self.classes_ = classes
        return self

    def transform(self, X) -> np.ndarray:
        check_is_fitted(self, ["model_"])
        return self.model_.embed(self._check_X(X))

    def predict_proba(self, X) -> np.ndarray:
        check_is_fitted(self, ["model_"])
        return self.model_.predict_proba(self._check_X(X))

    def predict(self, X) -> np.ndarray:
        return self.classes_[self.predict_proba(X).argmax(axis=1)]

    def score(self, X, y) -> float:
        labels = check_labels(y, np.asarray(X).shape[0])
        return float(np.mean(self.predict(X) == labels))


__all__ = [
    "CnnModel",
    "CropSourceClassifier",
    "DEFAULT_CHANNELS",
    "DEFAULT_FEATURE_DIM",
    "DEFAULT_INPUT_SIDE",
    "EpochStats",
    "TrainConfig",
    "TrainResult",
    "embed_crop",
    "embed_format",
    "normalize_pixels",
    "train",
    "write_training_log",
]
