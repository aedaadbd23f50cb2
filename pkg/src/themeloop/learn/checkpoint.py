"""Binary checkpoints for trained models.

Layout (all integers little-endian u32 unless noted): magic, format version,
n_classes, input_side, feature_dim, number of conv stages then each stage's
channel count, then for every parameter tensor in the model's fixed order:
ndim, the dims, and the raw float32 values.
"""
from __future__ import annotations

import struct

import numpy as np

from .classifier import CnnModel

MAGIC = b"TLCNNCK1"
VERSION = 1


class CheckpointError(ValueError):
    """Raised when a checkpoint file is malformed or incompatible."""


def save_model(model: CnnModel, path) -> None:
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(
            struct.pack(
                "<IIII",
                VERSION,
                model.n_classes,
                model.input_side,
                model.feature_dim,
            )
        )
        fh.write(struct.pack("<I", len(model.channels)))
        for ch in model.channels:
            fh.write(struct.pack("<I", ch))
        for _, layer, attr in model.param_tensors():
            tensor = np.asarray(getattr(layer, attr), dtype="<f4")
            fh.write(struct.pack("<I", tensor.ndim))
            for dim in tensor.shape:
                fh.write(struct.pack("<I", dim))
            fh.write(tensor.tobytes())


def load_model(path) -> CnnModel:
    with open(path, "rb") as fh:
        data = fh.read()
    if data[: len(MAGIC)] != MAGIC:
        raise CheckpointError("not a model checkpoint (bad magic bytes)")
    pos = len(MAGIC)

    def read(fmt: str):
        nonlocal pos
        size = struct.calcsize(fmt)
        if pos + size > len(data):
            raise CheckpointError("checkpoint truncated in header")
        values = struct.unpack_from(fmt, data, pos)
        pos += size
        return values

    version, n_classes, input_side, feature_dim = read("<IIII")
    if version != VERSION:
        raise CheckpointError(f"unsupported checkpoint version {version}")
    (n_stages,) = read("<I")
    channels = tuple(read("<I")[0] for _ in range(n_stages))

    model = CnnModel(
        n_classes,
        input_side=input_side,
        channels=channels,
        feature_dim=feature_dim,
    )
    for name, layer, attr in model.param_tensors():
        (ndim,) = read("<I")
        shape = tuple(read("<I")[0] for _ in range(ndim))
        expected = getattr(layer, attr).shape
        if shape != expected:
            raise CheckpointError(
                f"tensor {name} has shape {shape}, expected {expected}"
            )
        count = int(np.prod(shape)) if shape else 1
        nbytes = count * 4
        if pos + nbytes > len(data):
            raise CheckpointError(f"checkpoint truncated in tensor {name}")
        tensor = np.frombuffer(data, dtype="<f4", count=count, offset=pos).reshape(shape)
        pos += nbytes
        setattr(layer, attr, tensor.astype(np.float32).copy())
    if pos != len(data):
        raise CheckpointError("trailing bytes after final tensor")
    return model
