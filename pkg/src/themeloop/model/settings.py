"""Text settings bundle and the slider metadata that constrains it."""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Any, Mapping

from .fonts import Font, FontMetricTable, normalized_font_size, parse_font

CHARACTER_SPACING_RANGE = (-0.05, 0.50)
CHARACTER_SPACING_STEP = 0.01
WORD_SPACING_RANGE = (-0.05, 1.00)
WORD_SPACING_STEP = 0.05
LINE_HEIGHT_RANGE = (1.0, 5.0)
LINE_HEIGHT_STEP = 0.1

#: slider key -> (low, high, step); spacings are in em, line height is a ratio.
SLIDERS: Mapping[str, tuple[float, float, float]] = {
    "character_spacing_em": (*CHARACTER_SPACING_RANGE, CHARACTER_SPACING_STEP),
    "word_spacing_em": (*WORD_SPACING_RANGE, WORD_SPACING_STEP),
    "line_height": (*LINE_HEIGHT_RANGE, LINE_HEIGHT_STEP),
}

SETTING_KEYS = ("font", *SLIDERS)

_DECIMALS = 6  # canonical float precision for spacing values


class SettingsRangeError(ValueError):
    """Raised when a setting falls outside its slider range."""


def _canon(value: float) -> float:
    return round(float(value), _DECIMALS)


def clamp_to_slider(key: str, value: float) -> float:
    """Clamp ``value`` into the slider range for ``key``."""
    lo, hi, _ = SLIDERS[key]
    return _canon(min(hi, max(lo, float(value))))


def snap_to_slider(key: str, value: float) -> float:
    """Snap ``value`` onto the slider lattice for ``key`` (nearest step)."""
    lo, hi, step = SLIDERS[key]
    v = min(hi, max(lo, float(value)))
    return _canon(lo + round((v - lo) / step) * step)


def _check_range(key: str, value: float) -> float:
    lo, hi, _ = SLIDERS[key]
    v = float(value)
    if not math.isfinite(v):
        raise SettingsRangeError(f"{key} must be finite, got {value!r}")
    # Tolerate float representation error at the range edges only.
    if v < lo - 1e-9 or v > hi + 1e-9:
        raise SettingsRangeError(f"{key} must be in [{lo}, {hi}], got {value!r}")
    return _canon(min(hi, max(lo, v)))


@dataclass(frozen=True)
class TextSettings:
    """A complete text format: font plus the three spacing controls.

    ``font_size_px`` normally comes from x-height normalization; the direct
    constructor accepts any positive size so fixed-size formats (for example
    a plain control format) can be expressed too.
    """

    font: Font
    character_spacing_em: float
    word_spacing_em: float
    line_height: float
    font_size_px: float

    def __post_init__(self) -> None:
        if not isinstance(self.font, Font):
            object.__setattr__(self, "font", parse_font(str(self.font)))
        for key in SLIDERS:
            object.__setattr__(self, key, _check_range(key, getattr(self, key)))
        size = float(self.font_size_px)
        if not math.isfinite(size) or size <= 0 or size > 96:
            raise SettingsRangeError(
                f"font_size_px must be in (0, 96], got {self.font_size_px!r}"
            )
        object.__setattr__(self, "font_size_px", _canon(size))

    @classmethod
    def normalized(
        cls,
        font: Font | str,
        character_spacing_em: float,
        word_spacing_em: float,
        line_height: float,
        table: FontMetricTable | None = None,
    ) -> "TextSettings":
        """Build settings with the x-height-normalized size for ``font``."""
        font = font if isinstance(font, Font) else parse_font(str(font))
        return cls(
            font=font,
            character_spacing_em=character_spacing_em,
            word_spacing_em=word_spacing_em,
            line_height=line_height,
            font_size_px=normalized_font_size(font, table),
        )

    def with_value(
        self, key: str, value: Any, table: FontMetricTable | None = None
    ) -> "TextSettings":
        """Return a copy with one setting changed.

        Changing the font re-derives the normalized size; spacing changes
        keep everything else fixed.
        """
        if key == "font":
            font = value if isinstance(value, Font) else parse_font(str(value))
            return replace(
                self, font=font, font_size_px=normalized_font_size(font, table)
            )
        if key not in SLIDERS:
            raise KeyError(f"unknown setting key: {key!r}")
        return replace(self, **{key: value})

    def spacing_values(self) -> dict[str, float]:
        return {key: getattr(self, key) for key in SLIDERS}

    def is_normalized(self, table: FontMetricTable | None = None) -> bool:
        """True when the size matches x-height normalization within 0.05px."""
        return abs(self.font_size_px - normalized_font_size(self.font, table)) <= 0.05

    def as_dict(self) -> dict[str, Any]:
        return {
            "font": self.font.value,
            "character_spacing_em": self.character_spacing_em,
            "word_spacing_em": self.word_spacing_em,
            "line_height": self.line_height,
            "font_size_px": self.font_size_px,
        }

    @classmethod
    def from_dict(cls, payload: Mapping[str, Any]) -> "TextSettings":
        return cls(
            font=parse_font(str(payload["font"])),
            character_spacing_em=float(payload["character_spacing_em"]),
            word_spacing_em=float(payload["word_spacing_em"]),
            line_height=float(payload["line_height"]),
            font_size_px=float(payload["font_size_px"]),
        )
