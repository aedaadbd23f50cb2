"""Square crop sampling from rendered pages, plus a packed binary format."""
from __future__ import annotations

import struct
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .raster import RasterImage

CROP_SIDE = 128
MIN_INK_FRACTION = 0.05
MAX_SAMPLE_ATTEMPTS = 10_000

_MAGIC = b"TLCROPS1"


class CropSamplingError(ValueError):
    """Base error for crop sampling failures."""


class ImageTooSmallError(CropSamplingError):
    """The page is not strictly larger than the crop side."""


class InkStarvedImageError(CropSamplingError):
    """Rejection sampling could not find enough ink-bearing windows."""


@dataclass(frozen=True)
class Crop:
    """One square window cut from a rendered page."""

    pixels: np.ndarray  # uint8, shape (side, side)
    source_format_id: str
    x0: int
    y0: int

    def __post_init__(self) -> None:
        arr = np.asarray(self.pixels)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.dtype != np.uint8:
            raise ValueError("crop pixels must be a square uint8 array")
        object.__setattr__(self, "pixels", arr)

    @property
    def side(self) -> int:
        return int(self.pixels.shape[0])

    @property
    def ink_fraction(self) -> float:
        return float(np.mean(self.pixels < 128))


def ink_fraction(window: np.ndarray) -> float:
    return float(np.mean(window < 128))


def sample_crops(
    image: RasterImage,
    n: int,
    seed: int,
    *,
    source_format_id: str = "",
    side: int = CROP_SIDE,
    min_ink_fraction: float = MIN_INK_FRACTION,
) -> list[Crop]:
    """Sample ``n`` crops with at least ``min_ink_fraction`` ink coverage.

    Positions are drawn uniformly and rejected until coverage passes; the
    draw sequence is fully determined by ``seed``.
    """
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    h, w = image.pixels.shape
    if h <= side or w <= side:
        raise ImageTooSmallError(
            f"page is {w}x{h}px; crops need strictly more than {side}px each way"
        )
    if n == 0:
        return []

    rng = np.random.default_rng(seed)
    crops: list[Crop] = []
    attempts = 0
    while len(crops) < n:
        if attempts >= MAX_SAMPLE_ATTEMPTS:
            raise InkStarvedImageError(
                f"found only {len(crops)}/{n} crops with >= "
                f"{min_ink_fraction:.0%} ink after {attempts} attempts"
            )
        attempts += 1
        x0 = int(rng.integers(0, w - side + 1))
        y0 = int(rng.integers(0, h - side + 1))
        window = image.pixels[y0 : y0 + side, x0 : x0 + side]
        if ink_fraction(window) >= min_ink_fraction:
            crops.append(
                Crop(
                    pixels=window.copy(),
                    source_format_id=source_format_id,
                    x0=x0,
                    y0=y0,
                )
            )
    return crops


def pack_crops(crops: Sequence[Crop], path) -> None:
    """Write crops to a compact binary file.

    Layout: magic, u32 count, u32 side, raw pixel bytes for every crop in
    order, a format-id table, then per-crop id indices and (x0, y0) offsets.
    All integers are little-endian.
    """
    crops = list(crops)
    side = crops[0].side if crops else CROP_SIDE
    if any(c.side != side for c in crops):
        raise ValueError("all crops in one file must share a side length")
    ids = sorted({c.source_format_id for c in crops})
    id_index = {fid: i for i, fid in enumerate(ids)}
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<II", len(crops), side))
        for c in crops:
            fh.write(c.pixels.tobytes())
        fh.write(struct.pack("<I", len(ids)))
        for fid in ids:
            raw = fid.encode("utf-8")
            fh.write(struct.pack("<H", len(raw)))
            fh.write(raw)
        for c in crops:
            fh.write(struct.pack("<III", id_index[c.source_format_id], c.x0, c.y0))


def load_crops(path) -> list[Crop]:
    """Read a file produced by :func:`pack_crops`."""
    with open(path, "rb") as fh:
        data = fh.read()
    if data[: len(_MAGIC)] != _MAGIC:
        raise ValueError("not a packed crop file")
    pos = len(_MAGIC)
    count, side = struct.unpack_from("<II", data, pos)
    pos += 8
    pixel_bytes = side * side
    pixel_block = data[pos : pos + count * pixel_bytes]
    pos += count * pixel_bytes
    (n_ids,) = struct.unpack_from("<I", data, pos)
    pos += 4
    ids = []
    for _ in range(n_ids):
        (length,) = struct.unpack_from("<H", data, pos)
        pos += 2
        ids.append(data[pos : pos + length].decode("utf-8"))
        pos += length
    crops = []
    for i in range(count):
        idx, x0, y0 = struct.unpack_from("<III", data, pos)
        pos += 12
        pixels = np.frombuffer(
            pixel_block, dtype=np.uint8, count=pixel_bytes, offset=i * pixel_bytes
        ).reshape(side, side)
        crops.append(
            Crop(pixels=pixels.copy(), source_format_id=ids[idx], x0=x0, y0=y0)
        )
    return crops
