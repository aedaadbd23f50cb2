"""Session records: refinement event logs and theme ratings.

A refinement log is replayable: starting from the settings the participant
began with, applying the events in order must reproduce the final settings.
Every mutation during refinement is captured as one event.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Any, Iterable, Mapping, Sequence

from .fonts import FontMetricTable, parse_font
from .settings import SETTING_KEYS, SLIDERS, TextSettings

_VALUE_TOL = 1e-9


class LogCorruptionError(ValueError):
    """A refinement log does not replay cleanly."""

    def __init__(self, message: str, event_index: int | None = None):
        super().__init__(message)
        self.event_index = event_index


@dataclass(frozen=True)
class RefinementEvent:
    """One settings mutation: ``setting_key`` changed old -> new at ``t_ms``."""

    t_ms: int
    setting_key: str
    old_value: Any
    new_value: Any

    def __post_init__(self) -> None:
        if self.t_ms < 0:
            raise ValueError(f"t_ms must be >= 0, got {self.t_ms}")
        if self.setting_key not in SETTING_KEYS:
            raise ValueError(f"unknown setting_key: {self.setting_key!r}")

    def as_dict(self) -> dict[str, Any]:
        return {
            "t_ms": self.t_ms,
            "setting_key": self.setting_key,
            "old_value": self.old_value,
            "new_value": self.new_value,
        }

    @classmethod
    def from_dict(cls, payload: Mapping[str, Any]) -> "RefinementEvent":
        return cls(
            t_ms=int(payload["t_ms"]),
            setting_key=str(payload["setting_key"]),
            old_value=payload["old_value"],
            new_value=payload["new_value"],
        )


def _values_match(key: str, current: Any, recorded: Any) -> bool:
    if key == "font":
        return str(current) == str(recorded)
    try:
        return math.isclose(float(current), float(recorded), abs_tol=_VALUE_TOL)
    except (TypeError, ValueError):
        return False


def apply_events(
    start: TextSettings,
    events: Sequence[RefinementEvent],
    table: FontMetricTable | None = None,
) -> TextSettings:
    """Replay ``events`` on top of ``start`` and return the resulting settings.

    Raises :class:`LogCorruptionError` when an event's ``old_value`` does not
    match the running state, when a value is invalid, or when timestamps go
    backwards.
    """
    current = start
    prev_t = -1
    for i, event in enumerate(events):
        if event.t_ms < prev_t:
            raise LogCorruptionError(
                f"event {i}: t_ms {event.t_ms} precedes previous {prev_t}", i
            )
        prev_t = event.t_ms
        live = (
            current.font.value
            if event.setting_key == "font"
            else getattr(current, event.setting_key)
        )
        if not _values_match(event.setting_key, live, event.old_value):
            raise LogCorruptionError(
                f"event {i}: old_value {event.old_value!r} for "
                f"{event.setting_key} does not match state {live!r}",
                i,
            )
        try:
            if event.setting_key == "font":
                current = current.with_value("font", parse_font(str(event.new_value)), table)
            else:
                current = current.with_value(event.setting_key, float(event.new_value))
        except (ValueError, KeyError) as exc:
            raise LogCorruptionError(f"event {i}: {exc}", i) from exc
    return current


@dataclass(frozen=True)
class RefinementLog:
    """The complete refinement record of one session."""

    session_id: str
    participant_id: str
    start_theme_id: str
    start_settings: TextSettings
    events: tuple[RefinementEvent, ...]
    final_settings: TextSettings
    adjust_duration_ms: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "events", tuple(self.events))
        if self.adjust_duration_ms < 0:
            raise ValueError("adjust_duration_ms must be >= 0")
        if self.events and self.adjust_duration_ms < self.events[-1].t_ms:
            raise ValueError(
                "adjust_duration_ms must be >= the last event timestamp"
            )

    def replay(self, table: FontMetricTable | None = None) -> TextSettings:
        return apply_events(self.start_settings, self.events, table)

    def validate(self, table: FontMetricTable | None = None) -> None:
        """Check the log replays exactly onto ``final_settings``."""
        result = self.replay(table)
        if result != self.final_settings:
            raise LogCorruptionError(
                f"replayed settings {result.as_dict()} do not match recorded "
                f"final settings {self.final_settings.as_dict()}"
            )

    def as_dict(self) -> dict[str, Any]:
        return {
            "session_id": self.session_id,
            "participant_id": self.participant_id,
            "start_theme_id": self.start_theme_id,
            "start_settings": self.start_settings.as_dict(),
            "events": [e.as_dict() for e in self.events],
            "final_settings": self.final_settings.as_dict(),
            "adjust_duration_ms": self.adjust_duration_ms,
        }

    @classmethod
    def from_dict(cls, payload: Mapping[str, Any]) -> "RefinementLog":
        return cls(
            session_id=str(payload["session_id"]),
            participant_id=str(payload["participant_id"]),
            start_theme_id=str(payload["start_theme_id"]),
            start_settings=TextSettings.from_dict(payload["start_settings"]),
            events=tuple(
                RefinementEvent.from_dict(e) for e in payload.get("events", [])
            ),
            final_settings=TextSettings.from_dict(payload["final_settings"]),
            adjust_duration_ms=int(payload["adjust_duration_ms"]),
        )


class RatingValue(str, enum.Enum):
    GOOD = "good"
    UNSURE = "unsure"
    BAD = "bad"


class RatingPhase(str, enum.Enum):
    PRIMARY = "primary_review"
    SECONDARY = "secondary_review"


@dataclass(frozen=True)
class RatingRecord:
    """One theme rating given during a review phase."""

    session_id: str
    participant_id: str
    theme_id: str
    value: RatingValue
    phase: RatingPhase = RatingPhase.PRIMARY

    def as_dict(self) -> dict[str, Any]:
        return {
            "session_id": self.session_id,
            "participant_id": self.participant_id,
            "theme_id": self.theme_id,
            "value": self.value.value,
            "phase": self.phase.value,
        }

    @classmethod
    def from_dict(cls, payload: Mapping[str, Any]) -> "RatingRecord":
        return cls(
            session_id=str(payload["session_id"]),
            participant_id=str(payload["participant_id"]),
            theme_id=str(payload["theme_id"]),
            value=RatingValue(payload["value"]),
            phase=RatingPhase(payload.get("phase", "primary_review")),
        )


def good_fraction(ratings: Iterable[RatingRecord]) -> float:
    """Fraction of ratings that are GOOD (0.0 for an empty iterable)."""
    records = list(ratings)
    if not records:
        return 0.0
    good = sum(1 for r in records if r.value is RatingValue.GOOD)
    return good / len(records)
