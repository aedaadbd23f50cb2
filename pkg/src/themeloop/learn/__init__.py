"""Representation learning: CNN crop classifier and format embeddings."""
from .checkpoint import CheckpointError, load_model, save_model
from .classifier import (
    DEFAULT_CHANNELS,
    DEFAULT_FEATURE_DIM,
    DEFAULT_INPUT_SIDE,
    CnnModel,
    CropSourceClassifier,
    EpochStats,
    TrainConfig,
    TrainResult,
    embed_crop,
    embed_format,
    normalize_pixels,
    train,
    write_training_log,
)
from .dataset import CropDataset, build_dataset
from .gradcheck import gradient_check

__all__ = [
    "CheckpointError",
    "CnnModel",
    "CropDataset",
    "CropSourceClassifier",
    "DEFAULT_CHANNELS",
    "DEFAULT_FEATURE_DIM",
    "DEFAULT_INPUT_SIDE",
    "EpochStats",
    "TrainConfig",
    "TrainResult",
    "build_dataset",
    "embed_crop",
    "embed_format",
    "gradient_check",
    "load_model",
    "normalize_pixels",
    "save_model",
    "train",
    "write_training_log",
]
