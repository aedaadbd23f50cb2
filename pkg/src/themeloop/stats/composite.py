"""Composite scoring of reading measurements.

One measurement captures a participant reading one theme: per-screen words
per minute, a comprehension fraction, and a comfort rating. The composite
blends the three at fixed integer-percent weights after normalizing each to
[0, 1]; speed normalizes against cohort-wide bounds.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Iterable, Mapping, Sequence

WPM_MIN = 50.0
WPM_MAX = 650.0

COMFORT_MIN = 1
COMFORT_MAX = 5


class MeasurementError(ValueError):
    """Raised for unusable measurements or timings."""


@dataclass(frozen=True)
class CompositeWeights:
    """Blend weights stored as integer percents so they sum exactly to 100."""

    comprehension_pct: int = 42
    comfort_pct: int = 39
    speed_pct: int = 19

    def __post_init__(self) -> None:
        for name in ("comprehension_pct", "comfort_pct", "speed_pct"):
            v = getattr(self, name)
            if not isinstance(v, int) or v < 0:
                raise ValueError(f"{name} must be a non-negative integer, got {v!r}")
        if self.comprehension_pct + self.comfort_pct + self.speed_pct != 100:
            raise ValueError("weight percents must sum to exactly 100")

    @property
    def comprehension(self) -> float:
        return self.comprehension_pct / 100

    @property
    def comfort(self) -> float:
        return self.comfort_pct / 100

    @property
    def speed(self) -> float:
        return self.speed_pct / 100


DEFAULT_WEIGHTS = CompositeWeights()


@dataclass(frozen=True)
class ReadingMeasurement:
    """One participant's reading outcome under one theme."""

    participant_id: str
    theme_id: str
    comfort: int  # Likert 1..5
    comprehension: float  # fraction of questions answered correctly
    screen_wpm: tuple[float, ...]

    def __post_init__(self) -> None:
        if not (COMFORT_MIN <= int(self.comfort) <= COMFORT_MAX):
            raise MeasurementError(
                f"comfort must be an integer in [{COMFORT_MIN}, {COMFORT_MAX}], "
                f"got {self.comfort!r}"
            )
        object.__setattr__(self, "comfort", int(self.comfort))
        if not (0.0 <= float(self.comprehension) <= 1.0):
            raise MeasurementError(
                f"comprehension must be in [0, 1], got {self.comprehension!r}"
            )
        wpm = tuple(float(v) for v in self.screen_wpm)
        if not wpm:
            raise MeasurementError("screen_wpm must contain at least one screen")
        if any(not math.isfinite(v) or v <= 0 for v in wpm):
            raise MeasurementError("screen WPM values must be finite and positive")
        object.__setattr__(self, "screen_wpm", wpm)

    def as_dict(self) -> dict[str, Any]:
        return {
            "participant_id": self.participant_id,
            "theme_id": self.theme_id,
            "comfort": self.comfort,
            "comprehension": self.comprehension,
            "screen_wpm": list(self.screen_wpm),
        }

    @classmethod
    def from_dict(cls, payload: Mapping[str, Any]) -> "ReadingMeasurement":
        return cls(
            participant_id=str(payload["participant_id"]),
            theme_id=str(payload["theme_id"]),
            comfort=int(payload["comfort"]),
            comprehension=float(payload["comprehension"]),
            screen_wpm=tuple(payload["screen_wpm"]),
        )


def filter_wpm(values: Iterable[float]) -> list[float]:
    """Keep plausible reading speeds: WPM in [50, 650], inclusive."""
    return [float(v) for v in values if WPM_MIN <= float(v) <= WPM_MAX]


def measurement_speed(measurement: ReadingMeasurement) -> float:
    """Mean of the measurement's plausible screen WPMs."""
    kept = filter_wpm(measurement.screen_wpm)
    if not kept:
        raise MeasurementError(
            f"measurement {measurement.participant_id}/{measurement.theme_id} "
            "has no screens with plausible WPM"
        )
    return sum(kept) / len(kept)


@dataclass(frozen=True)
class CohortBounds:
    """Min/max of per-measurement mean filtered WPM across a cohort."""

    wpm_min: float
    wpm_max: float

    def __post_init__(self) -> None:
        if not (
            math.isfinite(self.wpm_min)
            and math.isfinite(self.wpm_max)
            and self.wpm_min <= self.wpm_max
        ):
            raise ValueError(
                f"invalid bounds [{self.wpm_min}, {self.wpm_max}]"
            )

    @property
    def degenerate(self) -> bool:
        return self.wpm_min == self.wpm_max

    @classmethod
    def from_measurements(
        cls, measurements: Sequence[ReadingMeasurement]
    ) -> "CohortBounds":
        speeds = [measurement_speed(m) for m in measurements]
        if not speeds:
            raise MeasurementError("cannot derive bounds from zero measurements")
        return cls(wpm_min=min(speeds), wpm_max=max(speeds))


def composite_score(
    measurement: ReadingMeasurement,
    bounds: CohortBounds,
    weights: CompositeWeights = DEFAULT_WEIGHTS,
) -> float:
    """Weighted blend of comprehension, comfort, and speed, each in [0, 1].

    Comfort maps 1..5 onto 0..1; speed normalizes linearly between the
    cohort bounds (clamped), scoring 0.5 when the bounds are degenerate.
    """
    comfort_norm = (measurement.comfort - COMFORT_MIN) / (COMFORT_MAX - COMFORT_MIN)
    speed = measurement_speed(measurement)
    if bounds.degenerate:
        speed_norm = 0.5
    else:
        speed_norm = (speed - bounds.wpm_min) / (bounds.wpm_max - bounds.wpm_min)
        speed_norm = min(1.0, max(0.0, speed_norm))
    return (
        weights.comprehension * measurement.comprehension
        + weights.comfort * comfort_norm
        + weights.speed * speed_norm
    )


# ---------------------------------------------------------------------------
# trial scoring: timings -> WPM, answers -> comprehension
# ---------------------------------------------------------------------------


def score_trial(
    screen_timings_ms: Sequence[tuple[float, float]],
    screen_word_counts: Sequence[int],
    answers: Sequence[Any],
    answer_key: Sequence[Any],
) -> tuple[list[float], float]:
    """Derive per-screen WPM and the comprehension fraction for one trial.

    ``screen_timings_ms`` holds (shown_at, keypress_at) pairs per screen.
    """
    if len(screen_timings_ms) != len(screen_word_counts):
        raise MeasurementError(
            f"{len(screen_timings_ms)} timings for {len(screen_word_counts)} screens"
        )
    if len(answers) != len(answer_key):
        raise MeasurementError(
            f"{len(answers)} answers for {len(answer_key)} questions"
        )
    if not answer_key:
        raise MeasurementError("a trial needs at least one question")

    wpm: list[float] = []
    prev_press = -math.inf
    for i, ((shown, pressed), words) in enumerate(
        zip(screen_timings_ms, screen_word_counts)
    ):
        if words <= 0:
            raise MeasurementError(f"screen {i} has no words")
        if pressed <= shown:
            raise MeasurementError(
                f"screen {i}: keypress at {pressed}ms does not follow "
                f"display at {shown}ms"
            )
        if shown < prev_press:
            raise MeasurementError(
                f"screen {i}: shown at {shown}ms before the previous keypress"
            )
        prev_press = pressed
        minutes = (pressed - shown) / 60000.0
        wpm.append(words / minutes)

    correct = sum(1 for a, k in zip(answers, answer_key) if a == k)
    return wpm, correct / len(answer_key)


# ---------------------------------------------------------------------------
# cross-study consistency
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ConsistencyReport:
    """Agreement of against-control direction across two studies."""

    n_pairs: int
    speed_agreement: float
    comprehension_agreement: float
    comfort_agreement: float


def _sign(x: float) -> int:
    return (x > 0) - (x < 0)


def consistency(
    study_a: Sequence[ReadingMeasurement],
    study_b: Sequence[ReadingMeasurement],
    *,
    control_theme_id: str,
) -> ConsistencyReport:
    """How often a participant's theme-vs-control direction repeats.

    For every participant measured on the same non-control theme in both
    studies (with a control measurement in each), each metric agrees when
    the sign of (theme - control) matches across studies.
    """

    def index(study):
        by_participant: dict[str, dict[str, ReadingMeasurement]] = {}
        for m in study:
            by_participant.setdefault(m.participant_id, {})[m.theme_id] = m
        return by_participant

    a_idx, b_idx = index(study_a), index(study_b)
    n_pairs = 0
    agree = {"speed": 0, "comprehension": 0, "comfort": 0}
    for pid, a_themes in a_idx.items():
        b_themes = b_idx.get(pid)
        if not b_themes:
            continue
        if control_theme_id not in a_themes or control_theme_id not in b_themes:
            continue
        a_ctrl, b_ctrl = a_themes[control_theme_id], b_themes[control_theme_id]
        for theme_id in sorted(set(a_themes) & set(b_themes) - {control_theme_id}):
            a_m, b_m = a_themes[theme_id], b_themes[theme_id]
            n_pairs += 1
            pairs = {
                "speed": (
                    measurement_speed(a_m) - measurement_speed(a_ctrl),
                    measurement_speed(b_m) - measurement_speed(b_ctrl),
                ),
                "comprehension": (
                    a_m.comprehension - a_ctrl.comprehension,
                    b_m.comprehension - b_ctrl.comprehension,
                ),
                "comfort": (
                    a_m.comfort - a_ctrl.comfort,
                    b_m.comfort - b_ctrl.comfort,
                ),
            }
            for metric, (da, db) in pairs.items():
                if _sign(da) == _sign(db):
                    agree[metric] += 1
    if n_pairs == 0:
        raise MeasurementError("no comparable participant/theme pairs found")
    return ConsistencyReport(
        n_pairs=n_pairs,
        speed_agreement=agree["speed"] / n_pairs,
        comprehension_agreement=agree["comprehension"] / n_pairs,
        comfort_agreement=agree["comfort"] / n_pairs,
    )
