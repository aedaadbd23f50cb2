"""Crop datasets: dense labels per source format plus a stratified split."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from ..render.crops import Crop


@dataclass
class CropDataset:
    """Crops as an array, with dense labels and a train/test partition."""

    pixels: np.ndarray  # uint8, shape (n, side, side)
    labels: np.ndarray  # int64, shape (n,)
    format_ids: tuple[str, ...]  # index -> source format id
    is_train: np.ndarray  # bool, shape (n,)

    def __post_init__(self) -> None:
        n = self.pixels.shape[0]
        if self.pixels.ndim != 3:
            raise ValueError("pixels must have shape (n, side, side)")
        if self.labels.shape != (n,) or self.is_train.shape != (n,):
            raise ValueError("labels and is_train must align with pixels")
        if n and (self.labels.min() < 0 or self.labels.max() >= len(self.format_ids)):
            raise ValueError("labels must index into format_ids")

    @property
    def n_classes(self) -> int:
        return len(self.format_ids)

    @property
    def side(self) -> int:
        return int(self.pixels.shape[1])

    def train_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        return self.pixels[self.is_train], self.labels[self.is_train]

    def test_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        return self.pixels[~self.is_train], self.labels[~self.is_train]


def build_dataset(
    crops_by_format: Mapping[str, Sequence[Crop]],
    *,
    test_fraction: float = 0.2,
    seed: int = 0,
) -> CropDataset:
    """Assemble a labeled dataset with a stratified train/test split.

    Every format keeps at least one crop on each side of the split, so each
    class is both learnable and measurable; formats therefore need two or
    more crops.
    """
    if not crops_by_format:
        raise ValueError("crops_by_format is empty")
    if not (0.0 < test_fraction < 1.0):
        raise ValueError(f"test_fraction must be in (0, 1), got {test_fraction}")
    format_ids = tuple(sorted(crops_by_format))
    rng = np.random.default_rng(seed)

    pixel_rows: list[np.ndarray] = []
    label_rows: list[int] = []
    train_rows: list[bool] = []
    for label, fid in enumerate(format_ids):
        crops = list(crops_by_format[fid])
        if len(crops) < 2:
            raise ValueError(
                f"format {fid!r} has {len(crops)} crops; need >= 2 to split"
            )
        order = rng.permutation(len(crops))
        n_test = min(len(crops) - 1, max(1, round(len(crops) * test_fraction)))
        test_set = set(order[:n_test].tolist())
        for i, crop in enumerate(crops):
            pixel_rows.append(np.asarray(crop.pixels))
            label_rows.append(label)
            train_rows.append(i not in test_set)

    return CropDataset(
        pixels=np.stack(pixel_rows).astype(np.uint8),
        labels=np.asarray(label_rows, dtype=np.int64),
        format_ids=format_ids,
        is_train=np.asarray(train_rows, dtype=bool),
    )
