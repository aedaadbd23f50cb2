"""Reading trials: timed screens, comprehension questions, comfort ratings.

A trial walks one participant through four conditions — the three bundled
themes plus the plain control — in a seeded random order, pairing each with
a distinct grade-8 passage shown as four full-screen pages.  The server
stamps the time a screen is first served and the time its keypress arrives;
those two clocks are the only timings used for scoring.  Client-reported
times are recorded alongside for audit and never scored.

Finished conditions are appended durably to ``trials.jsonl``; the progress
of an in-flight condition lives in memory only, so a crash costs at most
the condition being read when the process died.
"""
from __future__ import annotations

import json
import threading
from dataclasses import dataclass, field
from importlib import resources
from typing import Any, Callable, Mapping

import numpy as np

from ..model import BUNDLED_THEMES, CONTROL_THEME, Theme, theme_to_css
from ..render.passages import PassageText, passages_for_grade
from ..stats import ReadingMeasurement, score_trial
from ..simulate import derive_seed
from .sessions import ServiceError, _wall_ms
from .store import DataStore

TRIAL_GRADE = 8
N_CONDITIONS = 4
SCREENS_PER_PASSAGE = 4
QUESTIONS_PER_PASSAGE = 4

# one condition moves through these states, then the trial advances
_READING, _QUESTIONS, _COMFORT = "reading", "questions", "comfort"
_COMPLETE = "complete"


def load_question_bank() -> dict[str, list[dict[str, Any]]]:
    """Question sets per passage: prompt, four options, answer index."""
    text = (
        resources.files("themeloop.service")
        .joinpath("data/questions.json")
        .read_text(encoding="utf-8")
    )
    bank = json.loads(text)
    for passage_id, questions in bank.items():
        if len(questions) != QUESTIONS_PER_PASSAGE:
            raise ValueError(
                f"passage {passage_id!r} has {len(questions)} questions, "
                f"expected {QUESTIONS_PER_PASSAGE}"
            )
        for q in questions:
            if not (0 <= int(q["answer"]) < len(q["options"])):
                raise ValueError(f"bad answer index in {passage_id!r}")
    return bank


@dataclass
class _Condition:
    theme: Theme
    passage: PassageText
    serve_ms: list[float | None] = field(
        default_factory=lambda: [None] * SCREENS_PER_PASSAGE
    )
    press_ms: list[float | None] = field(
        default_factory=lambda: [None] * SCREENS_PER_PASSAGE
    )
    client_press_ms: list[float | None] = field(
        default_factory=lambda: [None] * SCREENS_PER_PASSAGE
    )
    answers: list[int] | None = None
    comfort: int | None = None


@dataclass
class LiveTrial:
    trial_id: str
    participant_id: str
    iteration: int
    conditions: list[_Condition]
    condition_index: int = 0
    screen_index: int = 0
    state: str = _READING
    measurements: list[dict[str, Any]] = field(default_factory=list)

    @property
    def current(self) -> _Condition:
        return self.conditions[self.condition_index]

    def public_state(self) -> dict[str, Any]:
        return {
            "trial_id": self.trial_id,
            "participant_id": self.participant_id,
            "iteration": self.iteration,
            "state": self.state,
            "condition_index": self.condition_index,
            "n_conditions": N_CONDITIONS,
            "screen_index": self.screen_index,
            "measurements": list(self.measurements),
        }


class TrialManager:
    """Owns reading trials and their durable measurements."""

    def __init__(
        self,
        store: DataStore,
        *,
        master_seed: int = 0,
        clock: Callable[[], float] | None = None,
        open_iteration: Callable[[], int | None] = lambda: None,
    ):
        self.store = store
        self.master_seed = master_seed
        self.clock = clock or _wall_ms
        self._open_iteration = open_iteration
        self._questions = load_question_bank()
        self._lock = threading.RLock()
        self._trials: dict[str, LiveTrial] = {}
        self._participants: set[str] = set()

    def _resolve_iteration(self, requested: int | None) -> int:
        if requested is not None:
            return int(requested)
        opened = self._open_iteration()
        if opened is not None:
            return opened
        iterations = self.store.list_iterations()
        return iterations[-1] if iterations else 0

    def create_trial(
        self, participant_id: str, iteration: int | None = None
    ) -> dict[str, Any]:
        participant_id = str(participant_id).strip()
        if not participant_id:
            raise ServiceError(422, "invalid_participant", "participant_id is required")
        with self._lock:
            if participant_id in self._participants:
                raise ServiceError(
                    409,
                    "duplicate_participant",
                    f"participant {participant_id!r} already ran a trial",
                )
            n = self._resolve_iteration(iteration)
            rng = np.random.default_rng(
                derive_seed(self.master_seed, f"trial-{participant_id}")
            )
            themes = list(BUNDLED_THEMES) + [CONTROL_THEME]
            theme_order = [themes[i] for i in rng.permutation(len(themes))]
            passages = passages_for_grade(TRIAL_GRADE)
            missing = [
                p.passage_id for p in passages if p.passage_id not in self._questions
            ]
            if missing:
                raise ServiceError(
                    500, "missing_questions", f"no questions for passages {missing}"
                )
            passage_order = [
                passages[i] for i in rng.permutation(len(passages))[:N_CONDITIONS]
            ]
            trial = LiveTrial(
                trial_id=f"trial-{participant_id}",
                participant_id=participant_id,
                iteration=n,
                conditions=[
                    _Condition(theme=t, passage=p)
                    for t, p in zip(theme_order, passage_order)
                ],
            )
            self._trials[trial.trial_id] = trial
            self._participants.add(participant_id)
        return {
            "trial_id": trial.trial_id,
            "iteration": n,
            "n_conditions": N_CONDITIONS,
            "screens_per_condition": SCREENS_PER_PASSAGE,
        }

    def _get(self, trial_id: str) -> LiveTrial:
        trial = self._trials.get(trial_id)
        if trial is None:
            raise ServiceError(404, "unknown_trial", f"no trial {trial_id!r}")
        return trial

    def get_trial(self, trial_id: str) -> dict[str, Any]:
        with self._lock:
            return self._get(trial_id).public_state()

    def serve_screen(self, trial_id: str) -> dict[str, Any]:
        with self._lock:
            trial = self._get(trial_id)
            if trial.state != _READING:
                raise ServiceError(
                    422,
                    "not_reading",
                    f"trial is in state {trial.state!r}, no screen to serve",
                    {"state": trial.state},
                )
            condition = trial.current
            s = trial.screen_index
            if condition.serve_ms[s] is None:
                # re-serving the same screen keeps the first timestamp so a
                # refresh cannot restart the reading clock
                condition.serve_ms[s] = self.clock()
            return {
                "trial_id": trial_id,
                "condition_index": trial.condition_index,
                "n_conditions": N_CONDITIONS,
                "screen_index": s,
                "n_screens": SCREENS_PER_PASSAGE,
                "passage_id": condition.passage.passage_id,
                "text": condition.passage.screens()[s],
                "theme": condition.theme.as_dict(),
                "css": theme_to_css(condition.theme),
            }

    def record_keypress(
        self, trial_id: str, client_t_ms: float | None = None
    ) -> dict[str, Any]:
        with self._lock:
            trial = self._get(trial_id)
            if trial.state != _READING:
                raise ServiceError(
                    422,
                    "not_reading",
                    f"keypress rejected: trial is in state {trial.state!r}",
                    {"state": trial.state},
                )
            condition = trial.current
            s = trial.screen_index
            if condition.serve_ms[s] is None:
                raise ServiceError(
                    422,
                    "screen_not_served",
                    f"screen {s} of condition {trial.condition_index} was never "
                    "served; fetch it before sending a keypress",
                )
            now = self.clock()
            if now <= condition.serve_ms[s]:
                now = condition.serve_ms[s] + 1.0
            condition.press_ms[s] = now
            condition.client_press_ms[s] = (
                float(client_t_ms) if client_t_ms is not None else None
            )
            if s + 1 < SCREENS_PER_PASSAGE:
                trial.screen_index = s + 1
                return {"next": "screen", "screen_index": trial.screen_index}
            trial.state = _QUESTIONS
            return {
                "next": "questions",
                "questions": self._question_prompts(condition),
            }

    def _question_prompts(self, condition: _Condition) -> list[dict[str, Any]]:
        return [
            {"prompt": q["prompt"], "options": list(q["options"])}
            for q in self._questions[condition.passage.passage_id]
        ]

    def record_answers(self, trial_id: str, answers: list[int]) -> dict[str, Any]:
        with self._lock:
            trial = self._get(trial_id)
            if trial.state != _QUESTIONS:
                raise ServiceError(
                    422,
                    "not_questions",
                    f"answers rejected: trial is in state {trial.state!r}",
                    {"state": trial.state},
                )
            condition = trial.current
            questions = self._questions[condition.passage.passage_id]
            if len(answers) != len(questions):
                raise ServiceError(
                    422,
                    "wrong_answer_count",
                    f"expected {len(questions)} answers, got {len(answers)}",
                )
            cleaned = []
            for i, a in enumerate(answers):
                try:
                    index = int(a)
                except (TypeError, ValueError):
                    raise ServiceError(
                        422, "invalid_answer", f"answer {i} is not an option index"
                    ) from None
                if not (0 <= index < len(questions[i]["options"])):
                    raise ServiceError(
                        422,
                        "invalid_answer",
                        f"answer {i} must be in [0, {len(questions[i]['options'])})",
                    )
                cleaned.append(index)
            condition.answers = cleaned
            trial.state = _COMFORT
            return {"next": "comfort"}

    def record_comfort(self, trial_id: str, comfort: int) -> dict[str, Any]:
        with self._lock:
            trial = self._get(trial_id)
            if trial.state != _COMFORT:
                raise ServiceError(
                    422,
                    "not_comfort",
                    f"comfort rejected: trial is in state {trial.state!r}",
                    {"state": trial.state},
                )
            try:
                rating = int(comfort)
            except (TypeError, ValueError):
                raise ServiceError(
                    422, "invalid_comfort", "comfort must be an integer 1..5"
                ) from None
            if not (1 <= rating <= 5):
                raise ServiceError(
                    422, "invalid_comfort", f"comfort must be in [1, 5], got {rating}"
                )
            condition = trial.current
            condition.comfort = rating
            measurement = self._score_condition(trial, condition)
            record = measurement.as_dict()
            record.update(
                {
                    "trial_id": trial.trial_id,
                    "iteration": trial.iteration,
                    "condition_index": trial.condition_index,
                    "passage_id": condition.passage.passage_id,
                    "server_timings_ms": [
                        [shown, pressed]
                        for shown, pressed in zip(
                            condition.serve_ms, condition.press_ms
                        )
                    ],
                    "client_press_ms": list(condition.client_press_ms),
                }
            )
            self.store.append_trial(trial.iteration, record)
            trial.measurements.append(record)
            if trial.condition_index + 1 < N_CONDITIONS:
                trial.condition_index += 1
                trial.screen_index = 0
                trial.state = _READING
                return {"measurement": record, "next": "screen"}
            trial.state = _COMPLETE
            return {
                "measurement": record,
                "next": "complete",
                "measurements": list(trial.measurements),
            }

    def _score_condition(
        self, trial: LiveTrial, condition: _Condition
    ) -> ReadingMeasurement:
        timings = [
            (shown, pressed)
            for shown, pressed in zip(condition.serve_ms, condition.press_ms)
        ]
        wpm, comprehension = score_trial(
            timings,
            condition.passage.screen_word_counts(),
            condition.answers,
            [q["answer"] for q in self._questions[condition.passage.passage_id]],
        )
        return ReadingMeasurement(
            participant_id=trial.participant_id,
            theme_id=condition.theme.theme_id,
            comfort=condition.comfort,
            comprehension=comprehension,
            screen_wpm=tuple(wpm),
        )
