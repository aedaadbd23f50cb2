"""Font identities, metric table, and x-height size normalization.

Every font is rendered at a size that gives it the same physical x-height as
the reference font at the reference size, so spacing comparisons across fonts
are not confounded by apparent-size differences.
"""
from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from importlib import resources
from typing import Mapping


class Font(str, enum.Enum):
    """Closed set of renderable font families."""

    MONTSERRAT = "Montserrat"
    OPEN_SANS = "Open Sans"
    ARIAL = "Arial"
    ROBOTO = "Roboto"
    MERRIWEATHER = "Merriweather"
    GEORGIA = "Georgia"
    SOURCE_SERIF_PRO = "Source Serif Pro"
    TIMES = "Times"
    POPPINS = "Poppins"

    def __str__(self) -> str:  # pragma: no cover - cosmetic
        return self.value


#: Fonts participants can select in a session (Poppins stays render-only).
SELECTABLE_FONTS: tuple[Font, ...] = (
    Font.MONTSERRAT,
    Font.OPEN_SANS,
    Font.ARIAL,
    Font.ROBOTO,
    Font.MERRIWEATHER,
    Font.GEORGIA,
    Font.SOURCE_SERIF_PRO,
    Font.TIMES,
)

REFERENCE_FONT = Font.TIMES
REFERENCE_SIZE_PX = 17.0

_RATIO_LO, _RATIO_HI = 0.30, 0.70


class UnknownFontError(KeyError):
    """Raised when a font name is outside the closed set."""


class MissingFontMetricError(KeyError):
    """Raised when a metric table has no entry for a requested font."""


def parse_font(name: str) -> Font:
    """Map a font-family string to a :class:`Font`, case-sensitively."""
    try:
        return Font(name)
    except ValueError:
        raise UnknownFontError(f"unknown font family: {name!r}") from None


@dataclass(frozen=True)
class FontMetrics:
    """Per-font measurements used by normalization and the renderer."""

    x_height_ratio: float  # x-height as a fraction of the em size
    serif: bool
    avg_advance_ratio: float  # mean glyph advance as a fraction of the em size
    source: str = "nominal"

    def __post_init__(self) -> None:
        for field in ("x_height_ratio", "avg_advance_ratio"):
            v = getattr(self, field)
            if not (_RATIO_LO < v < _RATIO_HI):
                raise ValueError(
                    f"{field} must lie in ({_RATIO_LO}, {_RATIO_HI}), got {v}"
                )


class FontMetricTable:
    """Immutable mapping from :class:`Font` to :class:`FontMetrics`."""

    def __init__(self, metrics: Mapping[Font, FontMetrics]):
        self._metrics = dict(metrics)

    def __getitem__(self, font: Font) -> FontMetrics:
        try:
            return self._metrics[font]
        except KeyError:
            raise MissingFontMetricError(
                f"no metrics recorded for font {font.value!r}"
            ) from None

    def __contains__(self, font: Font) -> bool:
        return font in self._metrics

    def fonts(self) -> tuple[Font, ...]:
        return tuple(self._metrics)

    @classmethod
    def from_json_dict(cls, payload: Mapping) -> "FontMetricTable":
        metrics = {}
        for name, row in payload["fonts"].items():
            metrics[parse_font(name)] = FontMetrics(
                x_height_ratio=float(row["x_height_ratio"]),
                serif=bool(row["serif"]),
                avg_advance_ratio=float(row["avg_advance_ratio"]),
                source=str(row.get("source", "nominal")),
            )
        return cls(metrics)


def _load_default_table() -> FontMetricTable:
    text = (
        resources.files("themeloop.model").joinpath("data/font_metrics.json").read_text()
    )
    return FontMetricTable.from_json_dict(json.loads(text))


DEFAULT_METRICS: FontMetricTable = _load_default_table()


def normalized_font_size(
    font: Font,
    table: FontMetricTable | None = None,
    *,
    reference_font: Font = REFERENCE_FONT,
    reference_size_px: float = REFERENCE_SIZE_PX,
) -> float:
    """Size in px at which ``font`` matches the reference font's x-height.

    The result is rounded to 0.1px; the reference font maps to exactly the
    reference size.
    """
    table = DEFAULT_METRICS if table is None else table
    if not isinstance(font, Font):
        font = parse_font(str(font))
    target = reference_size_px * table[reference_font].x_height_ratio
    return round(target / table[font].x_height_ratio, 1)
