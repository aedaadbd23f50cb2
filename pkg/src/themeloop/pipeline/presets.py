"""Pilot presets and first-iteration theme assignment."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..model import (
    FontMetricTable,
    Provenance,
    SELECTABLE_FONTS,
    TextSettings,
    Theme,
)
from ..simulate import derive_seed


@dataclass(frozen=True)
class PilotPreset:
    """One pilot-derived spacing combination (font chosen separately)."""

    character_spacing_em: float
    word_spacing_em: float
    line_height: float


PILOT_PRESETS: tuple[PilotPreset, ...] = (
    PilotPreset(0.0, 0.2, 1.9),
    PilotPreset(0.0, 0.2, 1.6),
    PilotPreset(0.0, 0.1, 1.6),
    PilotPreset(0.0, 0.1, 1.5),
    PilotPreset(0.0, 0.0, 1.6),
    PilotPreset(0.0, 0.0, 1.5),
)


def init_r0(
    participant_id: str,
    seed: int,
    table: FontMetricTable | None = None,
) -> Theme:
    """Assign a first-iteration starting theme: preset x study font, uniform.

    Deterministic per (participant_id, seed); the font size comes from
    x-height normalization.
    """
    rng = np.random.default_rng(derive_seed(seed, f"r0-init-{participant_id}"))
    preset = PILOT_PRESETS[int(rng.integers(len(PILOT_PRESETS)))]
    font = SELECTABLE_FONTS[int(rng.integers(len(SELECTABLE_FONTS)))]
    settings = TextSettings.normalized(
        font=font,
        character_spacing_em=preset.character_spacing_em,
        word_spacing_em=preset.word_spacing_em,
        line_height=preset.line_height,
        table=table,
    )
    return Theme(
        theme_id=f"pilot-{participant_id}",
        settings=settings,
        provenance=Provenance.PILOT_PRESET,
        iteration=0,
    )
