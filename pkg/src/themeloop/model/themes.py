"""Named themes: a settings bundle with identity and provenance."""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Any, Iterable, Mapping

from .fonts import Font
from .settings import TextSettings


class Provenance(str, enum.Enum):
    """Where a theme came from."""

    PILOT_PRESET = "pilot_preset"
    CLUSTER_REPRESENTATIVE = "cluster_representative"
    DESIGNER = "designer"
    VALIDATION = "validation"
    CONTROL = "control"
    BUNDLED = "bundled"


@dataclass(frozen=True)
class Theme:
    """An identified, displayable text format."""

    theme_id: str
    settings: TextSettings
    provenance: Provenance
    iteration: int = 0

    def __post_init__(self) -> None:
        if not self.theme_id or not str(self.theme_id).strip():
            raise ValueError("theme_id must be a non-empty string")
        if self.iteration < 0:
            raise ValueError(f"iteration must be >= 0, got {self.iteration}")

    def as_dict(self) -> dict[str, Any]:
        return {
            "theme_id": self.theme_id,
            "settings": self.settings.as_dict(),
            "provenance": self.provenance.value,
            "iteration": self.iteration,
        }

    @classmethod
    def from_dict(cls, payload: Mapping[str, Any]) -> "Theme":
        return cls(
            theme_id=str(payload["theme_id"]),
            settings=TextSettings.from_dict(payload["settings"]),
            provenance=Provenance(payload["provenance"]),
            iteration=int(payload.get("iteration", 0)),
        )


class DuplicateThemeIdError(ValueError):
    """Raised when a theme collection repeats an id."""


def ensure_unique_ids(themes: Iterable[Theme]) -> None:
    seen: set[str] = set()
    for theme in themes:
        if theme.theme_id in seen:
            raise DuplicateThemeIdError(f"duplicate theme_id: {theme.theme_id!r}")
        seen.add(theme.theme_id)


# ---------------------------------------------------------------------------
# Bundled outcome themes: span compact-to-airy spacing so readers who prefer
# dense or loose text each have a starting point, plus the plain control
# format used as a comparison condition in reading trials.
# ---------------------------------------------------------------------------

COMPACT_THEME = Theme(
    theme_id="compact",
    settings=TextSettings.normalized(Font.GEORGIA, 0.0, 0.1, 1.4),
    provenance=Provenance.BUNDLED,
)

OPEN_THEME = Theme(
    theme_id="open",
    settings=TextSettings.normalized(Font.MERRIWEATHER, 0.02, 0.2, 2.2),
    provenance=Provenance.BUNDLED,
)

RELAXED_THEME = Theme(
    theme_id="relaxed",
    settings=TextSettings.normalized(Font.POPPINS, 0.04, 0.3, 4.5),
    provenance=Provenance.BUNDLED,
)

CONTROL_THEME = Theme(
    theme_id="control",
    settings=TextSettings.normalized(Font.ARIAL, 0.0, 0.0, 1.0),
    provenance=Provenance.CONTROL,
)

BUNDLED_THEMES: tuple[Theme, ...] = (COMPACT_THEME, OPEN_THEME, RELAXED_THEME)
