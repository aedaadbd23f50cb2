"""Reading passages split into the screens shown during sessions and trials."""
from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from typing import Mapping

GRADE_WORD_RANGES = {8: (150, 250), 12: (250, 350)}
GRADE_SCREEN_COUNTS = {8: 4, 12: 6}


@dataclass(frozen=True)
class PassageText:
    """A passage with the word-index bounds that partition it into screens."""

    passage_id: str
    grade_level: int
    body: str
    screen_bounds: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.grade_level not in GRADE_WORD_RANGES:
            raise ValueError(f"unsupported grade level: {self.grade_level}")
        words = self.body.split()
        lo, hi = GRADE_WORD_RANGES[self.grade_level]
        if not (lo <= len(words) <= hi):
            raise ValueError(
                f"passage {self.passage_id!r} has {len(words)} words, "
                f"outside [{lo}, {hi}] for grade {self.grade_level}"
            )
        bounds = tuple(int(b) for b in self.screen_bounds)
        expected_screens = GRADE_SCREEN_COUNTS[self.grade_level]
        if len(bounds) != expected_screens + 1:
            raise ValueError(
                f"passage {self.passage_id!r} needs {expected_screens} screens, "
                f"got {len(bounds) - 1}"
            )
        if bounds[0] != 0 or bounds[-1] != len(words):
            raise ValueError("screen bounds must start at 0 and end at the word count")
        if any(b2 <= b1 for b1, b2 in zip(bounds, bounds[1:])):
            raise ValueError("screen bounds must be strictly increasing")
        object.__setattr__(self, "screen_bounds", bounds)

    @property
    def n_screens(self) -> int:
        return len(self.screen_bounds) - 1

    @property
    def word_count(self) -> int:
        return len(self.body.split())

    def screens(self) -> list[str]:
        """The screen texts, in order; their words concatenate to the body."""
        words = self.body.split()
        return [
            " ".join(words[a:b])
            for a, b in zip(self.screen_bounds, self.screen_bounds[1:])
        ]

    def screen_word_counts(self) -> list[int]:
        return [b - a for a, b in zip(self.screen_bounds, self.screen_bounds[1:])]

    def as_dict(self) -> dict:
        return {
            "passage_id": self.passage_id,
            "grade_level": self.grade_level,
            "body": self.body,
            "screen_bounds": list(self.screen_bounds),
        }

    @classmethod
    def from_dict(cls, payload: Mapping) -> "PassageText":
        return cls(
            passage_id=str(payload["passage_id"]),
            grade_level=int(payload["grade_level"]),
            body=str(payload["body"]),
            screen_bounds=tuple(payload["screen_bounds"]),
        )


def even_screen_bounds(word_count: int, n_screens: int) -> tuple[int, ...]:
    """Bounds that split ``word_count`` words into near-equal screens."""
    if n_screens < 1 or word_count < n_screens:
        raise ValueError("need at least one word per screen")
    return tuple(round(i * word_count / n_screens) for i in range(n_screens + 1))


def _load_builtin() -> dict[str, PassageText]:
    text = (
        resources.files("themeloop.render").joinpath("data/passages.json").read_text()
    )
    payload = json.loads(text)
    passages = [PassageText.from_dict(p) for p in payload["passages"]]
    return {p.passage_id: p for p in passages}


BUILTIN_PASSAGES: dict[str, PassageText] = _load_builtin()


def get_passage(passage_id: str) -> PassageText:
    try:
        return BUILTIN_PASSAGES[passage_id]
    except KeyError:
        raise KeyError(
            f"unknown passage {passage_id!r}; available: "
            f"{sorted(BUILTIN_PASSAGES)}"
        ) from None


def passages_for_grade(grade_level: int) -> list[PassageText]:
    return [
        p for p in BUILTIN_PASSAGES.values() if p.grade_level == grade_level
    ]


#: Default passage used when rendering formats for representation learning.
DEFAULT_RENDER_PASSAGE_ID = "tide-pools"


def default_render_text() -> str:
    return get_passage(DEFAULT_RENDER_PASSAGE_ID).body
