"""Simulated stage-1 sessions: rate themes, pick a favorite, refine it.

The behavioral model is deliberately simple and fully seeded:

* distance to a format is the worst tolerance-normalized spacing deviation
  plus a font penalty of ``1 - affinity(font)``;
* ratings threshold that distance at ``good_r`` / ``bad_r``;
* the favorite is the minimum-distance theme;
* refinement greedily moves the worst-deviating slider toward the ideal,
  one drag at a time, never overshooting the snapped ideal, and may switch
  the font once toward the participant's best font with probability
  ``1 - stickiness``;
* event timestamps advance on an exponential inter-arrival clock.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Mapping, Sequence

import numpy as np

from ..model import (
    Font,
    Participant,
    RatingPhase,
    RatingRecord,
    RatingValue,
    RefinementEvent,
    RefinementLog,
    SLIDERS,
    TextSettings,
    Theme,
    snap_to_slider,
)
from .population import PreferenceProfile

SECONDARY_FLIP_PROB = 0.05
MAX_REFINEMENT_EVENTS = 200

_SPACING_KEYS = tuple(SLIDERS)


def spacing_deviations(
    profile: PreferenceProfile, settings: TextSettings
) -> dict[str, float]:
    """Tolerance-normalized absolute deviation from the ideal, per slider."""
    out: dict[str, float] = {}
    for key in _SPACING_KEYS:
        gap = abs(getattr(settings, key) - getattr(profile.ideal, key))
        out[key] = gap / profile.tolerance.for_key(key)
    return out


def theme_distance(profile: PreferenceProfile, settings: TextSettings) -> float:
    """Worst spacing deviation plus the font penalty ``1 - affinity``."""
    devs = spacing_deviations(profile, settings)
    return max(devs.values()) + (1.0 - profile.affinity(settings.font))


def rate_theme(profile: PreferenceProfile, theme: Theme) -> RatingValue:
    d = theme_distance(profile, theme.settings)
    if d <= profile.good_r:
        return RatingValue.GOOD
    if d >= profile.bad_r:
        return RatingValue.BAD
    return RatingValue.UNSURE


def _flip_rating(value: RatingValue, rng: np.random.Generator) -> RatingValue:
    """Second-look label noise: drift one notch toward the adjacent label."""
    if rng.random() >= SECONDARY_FLIP_PROB:
        return value
    if value is RatingValue.GOOD:
        return RatingValue.UNSURE
    if value is RatingValue.BAD:
        return RatingValue.UNSURE
    return RatingValue.GOOD if rng.random() < 0.5 else RatingValue.BAD


class _Clock:
    """Monotone millisecond clock with exponential inter-arrival times."""

    def __init__(self, rng: np.random.Generator, events_per_second: float):
        self._rng = rng
        self._scale_ms = 1000.0 / events_per_second
        self.t_ms = 0

    def tick(self) -> int:
        self.t_ms += max(1, int(round(self._rng.exponential(self._scale_ms))))
        return self.t_ms


@dataclass(frozen=True)
class SimulatedSession:
    """Everything one synthetic participant produced, JSONL-serializable."""

    session_id: str
    participant: Participant
    iteration: int
    assigned_theme_ids: tuple[str, ...]
    primary_ratings: tuple[RatingRecord, ...]
    secondary_ratings: tuple[RatingRecord, ...]
    favorite_theme_id: str
    log: RefinementLog
    exploration_visited: bool = True

    @property
    def ratings(self) -> tuple[RatingRecord, ...]:
        return self.primary_ratings + self.secondary_ratings

    def as_dict(self) -> dict[str, Any]:
        return {
            "session_id": self.session_id,
            "participant": self.participant.as_dict(),
            "iteration": self.iteration,
            "assigned_theme_ids": list(self.assigned_theme_ids),
            "phase": "done",
            "exploration_visited": self.exploration_visited,
            "ratings": [r.as_dict() for r in self.ratings],
            "favorite_theme_id": self.favorite_theme_id,
            "log": self.log.as_dict(),
        }

    @classmethod
    def from_dict(cls, payload: Mapping[str, Any]) -> "SimulatedSession":
        primary = []
        secondary = []
        for raw in payload.get("ratings", []):
            record = RatingRecord.from_dict(raw)
            if record.phase is RatingPhase.PRIMARY:
                primary.append(record)
            else:
                secondary.append(record)
        return cls(
            session_id=str(payload["session_id"]),
            participant=Participant.from_dict(payload["participant"]),
            iteration=int(payload["iteration"]),
            assigned_theme_ids=tuple(payload["assigned_theme_ids"]),
            primary_ratings=tuple(primary),
            secondary_ratings=tuple(secondary),
            favorite_theme_id=str(payload["favorite_theme_id"]),
            log=RefinementLog.from_dict(payload["log"]),
            exploration_visited=bool(payload.get("exploration_visited", True)),
        )


def _font_move(
    profile: PreferenceProfile,
    current: TextSettings,
    rng: np.random.Generator,
    font_locked: bool,
) -> tuple[Font | None, bool]:
    """Decide whether to switch fonts; the first refusal locks the font."""
    if font_locked:
        return None, True
    best = profile.best_font
    if current.font is best or profile.affinity(current.font) >= profile.affinity(best):
        return None, False
    if rng.random() < 1.0 - profile.stickiness:
        return best, False
    return None, True


def _spacing_move(
    profile: PreferenceProfile,
    current: TextSettings,
    rng: np.random.Generator,
) -> tuple[str, float] | None:
    """Pick the worst improvable slider and one jittered drag toward the ideal."""
    devs = spacing_deviations(profile, current)
    movable: list[tuple[float, str, float, int]] = []
    for key in _SPACING_KEYS:
        step = SLIDERS[key][2]
        target = snap_to_slider(key, getattr(profile.ideal, key))
        gap = target - getattr(current, key)
        steps_avail = int(round(abs(gap) / step))
        if steps_avail >= 1:
            movable.append((devs[key], key, gap, steps_avail))
    if not movable:
        return None
    dev, key, gap, steps_avail = max(movable, key=lambda m: m[0])
    step = SLIDERS[key][2]
    n = int(round(steps_avail + rng.normal(0.0, profile.step_noise)))
    n = max(1, min(steps_avail, n))
    direction = 1.0 if gap > 0 else -1.0
    new_value = snap_to_slider(key, getattr(current, key) + direction * n * step)
    return key, new_value


def _refine(
    profile: PreferenceProfile,
    start: TextSettings,
    rng: np.random.Generator,
) -> tuple[list[RefinementEvent], TextSettings, int]:
    clock = _Clock(rng, profile.events_per_second)
    current = start
    events: list[RefinementEvent] = []
    font_locked = False
    while len(events) < MAX_REFINEMENT_EVENTS:
        if theme_distance(profile, current) <= profile.good_r:
            break
        switch_to, font_locked = _font_move(profile, current, rng, font_locked)
        if switch_to is not None:
            events.append(
                RefinementEvent(
                    t_ms=clock.tick(),
                    setting_key="font",
                    old_value=current.font.value,
                    new_value=switch_to.value,
                )
            )
            current = current.with_value("font", switch_to)
            continue
        move = _spacing_move(profile, current, rng)
        if move is None:
            break
        key, new_value = move
        events.append(
            RefinementEvent(
                t_ms=clock.tick(),
                setting_key=key,
                old_value=getattr(current, key),
                new_value=new_value,
            )
        )
        current = current.with_value(key, new_value)
    # trailing dwell before the participant confirms they are done
    duration = clock.t_ms + max(1, int(round(rng.exponential(200.0))))
    return events, current, duration


def simulate_session(
    profile: PreferenceProfile,
    shown_themes: Sequence[Theme],
    seed: int,
    *,
    participant: Participant | None = None,
    iteration: int = 0,
    session_id: str | None = None,
    include_review: bool = True,
) -> SimulatedSession:
    """Run one synthetic session over ``shown_themes``.

    With ``include_review`` False (the first iteration's single-theme flow)
    the review phases are skipped and refinement starts on the only theme.
    """
    themes = list(shown_themes)
    if not themes:
        raise ValueError("shown_themes must be non-empty")
    rng = np.random.default_rng(seed)
    if participant is None:
        participant = Participant(f"anon-{seed % 10**8}", 30, False, 0.0)
    sid = session_id or f"sess-{participant.participant_id}"

    primary: list[RatingRecord] = []
    secondary: list[RatingRecord] = []
    if include_review:
        for theme in themes:
            primary.append(
                RatingRecord(
                    session_id=sid,
                    participant_id=participant.participant_id,
                    theme_id=theme.theme_id,
                    value=rate_theme(profile, theme),
                    phase=RatingPhase.PRIMARY,
                )
            )
        for record in primary:
            secondary.append(
                RatingRecord(
                    session_id=sid,
                    participant_id=participant.participant_id,
                    theme_id=record.theme_id,
                    value=_flip_rating(record.value, rng),
                    phase=RatingPhase.SECONDARY,
                )
            )

    distances = [theme_distance(profile, t.settings) for t in themes]
    favorite = themes[int(np.argmin(distances))]

    events, final, duration = _refine(profile, favorite.settings, rng)
    log = RefinementLog(
        session_id=sid,
        participant_id=participant.participant_id,
        start_theme_id=favorite.theme_id,
        start_settings=favorite.settings,
        events=tuple(events),
        final_settings=final,
        adjust_duration_ms=duration,
    )
    log.validate()
    return SimulatedSession(
        session_id=sid,
        participant=participant,
        iteration=iteration,
        assigned_theme_ids=tuple(t.theme_id for t in themes),
        primary_ratings=tuple(primary),
        secondary_ratings=tuple(secondary),
        favorite_theme_id=favorite.theme_id,
        log=log,
        exploration_visited=include_review,
    )
