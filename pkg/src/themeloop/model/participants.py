"""Participants and the demographic buckets used in breakdowns."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Mapping

AGE_BUCKETS: tuple[tuple[int, int], ...] = (
    (18, 25),
    (26, 35),
    (36, 45),
    (46, 55),
    (56, 87),
)

MIN_AGE = AGE_BUCKETS[0][0]
MAX_AGE = AGE_BUCKETS[-1][1]

#: Screening-score cutoff above which a participant is grouped as dyslexic.
DYSLEXIA_SCORE_THRESHOLD = 0.5


def age_bucket(age_years: int) -> str:
    """Return the label of the age bucket containing ``age_years``."""
    age = int(age_years)
    for lo, hi in AGE_BUCKETS:
        if lo <= age <= hi:
            return f"{lo}-{hi}"
    raise ValueError(f"age {age} outside supported range [{MIN_AGE}, {MAX_AGE}]")


@dataclass(frozen=True)
class Participant:
    """A study participant; each person appears in at most one iteration."""

    participant_id: str
    age_years: int
    dyslexia: bool
    dyslexia_score: float = 0.0

    def __post_init__(self) -> None:
        if not self.participant_id or not str(self.participant_id).strip():
            raise ValueError("participant_id must be a non-empty string")
        age_bucket(self.age_years)  # range check
        if not (0.0 <= self.dyslexia_score <= 1.0):
            raise ValueError(
                f"dyslexia_score must be in [0, 1], got {self.dyslexia_score}"
            )

    @property
    def bucket(self) -> str:
        return age_bucket(self.age_years)

    @classmethod
    def from_score(
        cls, participant_id: str, age_years: int, dyslexia_score: float
    ) -> "Participant":
        """Derive the dyslexia group from the screening score."""
        return cls(
            participant_id=participant_id,
            age_years=age_years,
            dyslexia=float(dyslexia_score) > DYSLEXIA_SCORE_THRESHOLD,
            dyslexia_score=float(dyslexia_score),
        )

    def as_dict(self) -> dict[str, Any]:
        return {
            "participant_id": self.participant_id,
            "age_years": self.age_years,
            "dyslexia": self.dyslexia,
            "dyslexia_score": self.dyslexia_score,
        }

    @classmethod
    def from_dict(cls, payload: Mapping[str, Any]) -> "Participant":
        return cls(
            participant_id=str(payload["participant_id"]),
            age_years=int(payload["age_years"]),
            dyslexia=bool(payload["dyslexia"]),
            dyslexia_score=float(payload.get("dyslexia_score", 0.0)),
        )
