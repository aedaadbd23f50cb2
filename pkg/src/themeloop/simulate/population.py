"""Synthetic participant populations with latent format preferences.

A population is a weighted mixture of components.  Each component carries a
demographic template plus Gaussian means/spreads for the three spacing
ideals; sampling a participant draws demographics, spacing ideals (clamped
and snapped to the slider lattice), and per-font affinities.

Every behavioral constant lives in :class:`PopulationComponent` so that a
population is fully declarative and round-trips through JSON.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, field, replace
from typing import Any, Mapping, Sequence

import numpy as np

from ..model import (
    Font,
    MAX_AGE,
    MIN_AGE,
    Participant,
    SELECTABLE_FONTS,
    SLIDERS,
    TextSettings,
    clamp_to_slider,
    snap_to_slider,
)

_SPACING_KEYS = tuple(SLIDERS)  # character_spacing_em, word_spacing_em, line_height


def derive_seed(master_seed: int, token: str) -> int:
    """Stable per-entity seed: hash of the master seed and an id token."""
    digest = hashlib.blake2b(
        f"{master_seed}:{token}".encode("utf-8"), digest_size=8
    ).digest()
    return int.from_bytes(digest, "little") % (2**63)


@dataclass(frozen=True)
class SpacingTolerance:
    """Per-setting radius used to normalize deviations from the ideal."""

    character_spacing_em: float = 0.03
    word_spacing_em: float = 0.15
    line_height: float = 0.5

    def __post_init__(self) -> None:
        for key in _SPACING_KEYS:
            if getattr(self, key) <= 0:
                raise ValueError(f"tolerance for {key} must be positive")

    def for_key(self, key: str) -> float:
        if key not in _SPACING_KEYS:
            raise KeyError(f"no tolerance for setting {key!r}")
        return float(getattr(self, key))

    def as_dict(self) -> dict[str, float]:
        return {key: float(getattr(self, key)) for key in _SPACING_KEYS}

    @classmethod
    def from_dict(cls, payload: Mapping[str, Any]) -> "SpacingTolerance":
        return cls(**{key: float(payload[key]) for key in _SPACING_KEYS})


DEFAULT_TOLERANCE = SpacingTolerance()


@dataclass(frozen=True)
class PreferenceProfile:
    """One participant's latent preference and interaction style."""

    ideal: TextSettings
    tolerance: SpacingTolerance = DEFAULT_TOLERANCE
    good_r: float = 0.15
    bad_r: float = 1.0
    font_affinity: Mapping[Font, float] = field(default_factory=dict)
    stickiness: float = 0.8
    step_noise: float = 0.5
    events_per_second: float = 0.8

    def __post_init__(self) -> None:
        if not (0.0 < self.good_r < self.bad_r):
            raise ValueError(
                f"need 0 < good_r < bad_r, got {self.good_r}, {self.bad_r}"
            )
        if not (0.0 <= self.stickiness <= 1.0):
            raise ValueError(f"stickiness must be in [0, 1], got {self.stickiness}")
        if self.step_noise < 0:
            raise ValueError("step_noise must be >= 0")
        if self.events_per_second <= 0:
            raise ValueError("events_per_second must be positive")
        affinity = {Font(f): float(v) for f, v in dict(self.font_affinity).items()}
        for font, value in affinity.items():
            if not (0.0 <= value <= 1.0):
                raise ValueError(f"affinity for {font.value} must be in [0, 1]")
        object.__setattr__(self, "font_affinity", affinity)

    def affinity(self, font: Font) -> float:
        return float(self.font_affinity.get(Font(font), 0.0))

    @property
    def best_font(self) -> Font:
        """Highest-affinity selectable font; ties break in selectable order."""
        return max(SELECTABLE_FONTS, key=lambda f: (self.affinity(f), -SELECTABLE_FONTS.index(f)))


def _default_font_base() -> dict[Font, float]:
    return {
        Font.ARIAL: 0.80,
        Font.OPEN_SANS: 0.75,
        Font.ROBOTO: 0.72,
        Font.GEORGIA: 0.68,
        Font.MONTSERRAT: 0.62,
        Font.MERRIWEATHER: 0.62,
        Font.POPPINS: 0.60,
        Font.SOURCE_SERIF_PRO: 0.58,
        Font.TIMES: 0.50,
    }


@dataclass(frozen=True)
class PopulationComponent:
    """One mixture component: demographics template plus preference law."""

    name: str
    weight: float
    dyslexia: bool
    mean_character_spacing_em: float
    sd_character_spacing_em: float
    mean_word_spacing_em: float
    sd_word_spacing_em: float
    mean_line_height: float
    sd_line_height: float
    dyslexia_score_range: tuple[float, float] = (0.05, 0.45)
    age_range: tuple[int, int] = (MIN_AGE, MAX_AGE)
    font_affinity_base: Mapping[Font, float] = field(default_factory=_default_font_base)
    affinity_jitter: float = 0.2
    tolerance: SpacingTolerance = DEFAULT_TOLERANCE
    good_r: float = 0.15
    bad_r: float = 1.0
    stickiness: float = 0.8
    step_noise: float = 0.5
    events_per_second: float = 0.8

    def __post_init__(self) -> None:
        if self.weight <= 0:
            raise ValueError(f"component weight must be positive, got {self.weight}")
        for attr in ("sd_character_spacing_em", "sd_word_spacing_em", "sd_line_height"):
            if getattr(self, attr) < 0:
                raise ValueError(f"{attr} must be >= 0")
        lo, hi = self.dyslexia_score_range
        if not (0.0 <= lo <= hi <= 1.0):
            raise ValueError("dyslexia_score_range must be within [0, 1]")
        a_lo, a_hi = self.age_range
        if not (MIN_AGE <= a_lo <= a_hi <= MAX_AGE):
            raise ValueError(f"age_range must lie within [{MIN_AGE}, {MAX_AGE}]")
        if self.affinity_jitter < 0:
            raise ValueError("affinity_jitter must be >= 0")
        base = {Font(f): float(v) for f, v in dict(self.font_affinity_base).items()}
        object.__setattr__(self, "font_affinity_base", base)
        object.__setattr__(
            self, "dyslexia_score_range", (float(lo), float(hi))
        )
        object.__setattr__(self, "age_range", (int(a_lo), int(a_hi)))

    def mean_for(self, key: str) -> float:
        return float(getattr(self, f"mean_{key}"))

    def sd_for(self, key: str) -> float:
        return float(getattr(self, f"sd_{key}"))

    def as_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "weight": self.weight,
            "dyslexia": self.dyslexia,
            "mean_character_spacing_em": self.mean_character_spacing_em,
            "sd_character_spacing_em": self.sd_character_spacing_em,
            "mean_word_spacing_em": self.mean_word_spacing_em,
            "sd_word_spacing_em": self.sd_word_spacing_em,
            "mean_line_height": self.mean_line_height,
            "sd_line_height": self.sd_line_height,
            "dyslexia_score_range": list(self.dyslexia_score_range),
            "age_range": list(self.age_range),
            "font_affinity_base": {
                f.value: v for f, v in self.font_affinity_base.items()
            },
            "affinity_jitter": self.affinity_jitter,
            "tolerance": self.tolerance.as_dict(),
            "good_r": self.good_r,
            "bad_r": self.bad_r,
            "stickiness": self.stickiness,
            "step_noise": self.step_noise,
            "events_per_second": self.events_per_second,
        }

    @classmethod
    def from_dict(cls, payload: Mapping[str, Any]) -> "PopulationComponent":
        data = dict(payload)
        data["dyslexia_score_range"] = tuple(data["dyslexia_score_range"])
        data["age_range"] = tuple(data["age_range"])
        data["font_affinity_base"] = {
            Font(f): float(v) for f, v in data["font_affinity_base"].items()
        }
        data["tolerance"] = SpacingTolerance.from_dict(data["tolerance"])
        return cls(**data)


@dataclass(frozen=True)
class PopulationSpec:
    """A declarative mixture of participant components."""

    components: tuple[PopulationComponent, ...]
    name: str = "population"

    def __post_init__(self) -> None:
        components = tuple(self.components)
        if not components:
            raise ValueError("a population needs at least one component")
        total = sum(c.weight for c in components)
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"component weights must sum to 1, got {total}")
        object.__setattr__(self, "components", components)

    def as_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "components": [c.as_dict() for c in self.components],
        }

    @classmethod
    def from_dict(cls, payload: Mapping[str, Any]) -> "PopulationSpec":
        return cls(
            name=str(payload.get("name", "population")),
            components=tuple(
                PopulationComponent.from_dict(c) for c in payload["components"]
            ),
        )


def default_population_spec() -> PopulationSpec:
    """Two-component population mirroring the study cohorts' spacing laws."""
    return PopulationSpec(
        name="default",
        components=(
            PopulationComponent(
                name="non_dyslexic",
                weight=0.5,
                dyslexia=False,
                mean_character_spacing_em=0.02,
                sd_character_spacing_em=0.05,
                mean_word_spacing_em=0.18,
                sd_word_spacing_em=0.18,
                mean_line_height=1.93,
                sd_line_height=0.52,
                dyslexia_score_range=(0.05, 0.45),
            ),
            PopulationComponent(
                name="dyslexic",
                weight=0.5,
                dyslexia=True,
                mean_character_spacing_em=0.03,
                sd_character_spacing_em=0.07,
                mean_word_spacing_em=0.28,
                sd_word_spacing_em=0.35,
                mean_line_height=2.25,
                sd_line_height=0.73,
                dyslexia_score_range=(0.55, 0.95),
            ),
        ),
    )


@dataclass(frozen=True)
class PlantedMode:
    """Ground-truth preference mode used by convergence experiments."""

    font: Font
    character_spacing_em: float
    word_spacing_em: float
    line_height: float

    def spacing(self, key: str) -> float:
        return float(getattr(self, key))


DEFAULT_PLANTED_MODES = (
    PlantedMode(Font.GEORGIA, 0.00, 0.05, 1.3),
    PlantedMode(Font.ARIAL, 0.10, 0.40, 2.5),
    PlantedMode(Font.OPEN_SANS, 0.25, 0.80, 4.2),
)


def planted_modes_spec(
    modes: Sequence[PlantedMode] = DEFAULT_PLANTED_MODES,
    *,
    spread_steps: float = 0.1,
    good_r: float = 0.35,
    bad_r: float = 1.0,
    stickiness: float = 0.05,
    step_noise: float = 0.3,
) -> PopulationSpec:
    """Population whose preferences concentrate around planted modes.

    Spreads are expressed in slider steps and default to a tenth of a
    step: within-mode disagreement sits below what the sliders can
    express, so ideals snap onto the modes and the interesting variation
    is the satisficing noise in where each refinement stops.  With
    ``good_r`` at 0.35, one slider step of residual error (0.333 of the
    char/word tolerance) stays acceptable, which means a representative
    within a step of the mode satisfies that mode's whole cluster; the
    mode's own font gets affinity 1.0 so satisfied participants stop
    refining.
    """
    if not modes:
        raise ValueError("need at least one planted mode")
    components = []
    weight = 1.0 / len(modes)
    for i, mode in enumerate(modes):
        affinity = {font: 0.25 for font in Font}
        affinity[mode.font] = 1.0
        components.append(
            PopulationComponent(
                name=f"mode_{i}",
                weight=weight,
                dyslexia=(i % 2 == 1),
                mean_character_spacing_em=mode.character_spacing_em,
                sd_character_spacing_em=spread_steps * SLIDERS["character_spacing_em"][2],
                mean_word_spacing_em=mode.word_spacing_em,
                sd_word_spacing_em=spread_steps * SLIDERS["word_spacing_em"][2],
                mean_line_height=mode.line_height,
                sd_line_height=spread_steps * SLIDERS["line_height"][2],
                dyslexia_score_range=(0.6, 0.9) if i % 2 == 1 else (0.1, 0.4),
                font_affinity_base=affinity,
                affinity_jitter=0.0,
                good_r=good_r,
                bad_r=bad_r,
                stickiness=stickiness,
                step_noise=step_noise,
            )
        )
    # round-off in the final weight keeps the sum at exactly 1
    total_but_last = sum(c.weight for c in components[:-1])
    components[-1] = replace(components[-1], weight=1.0 - total_but_last)
    return PopulationSpec(name="planted_modes", components=tuple(components))


def _component_profile(
    component: PopulationComponent, rng: np.random.Generator
) -> PreferenceProfile:
    spacing: dict[str, float] = {}
    for key in _SPACING_KEYS:
        raw = rng.normal(component.mean_for(key), component.sd_for(key))
        spacing[key] = snap_to_slider(key, clamp_to_slider(key, float(raw)))
    affinity: dict[Font, float] = {}
    for font in Font:
        base = component.font_affinity_base.get(font, 0.5)
        jitter = rng.uniform(-component.affinity_jitter, component.affinity_jitter)
        affinity[font] = float(min(1.0, max(0.0, base + jitter)))
    best = max(SELECTABLE_FONTS, key=lambda f: (affinity[f], -SELECTABLE_FONTS.index(f)))
    ideal = TextSettings.normalized(
        font=best,
        character_spacing_em=spacing["character_spacing_em"],
        word_spacing_em=spacing["word_spacing_em"],
        line_height=spacing["line_height"],
    )
    return PreferenceProfile(
        ideal=ideal,
        tolerance=component.tolerance,
        good_r=component.good_r,
        bad_r=component.bad_r,
        font_affinity=affinity,
        stickiness=component.stickiness,
        step_noise=component.step_noise,
        events_per_second=component.events_per_second,
    )


def sample_population(
    spec: PopulationSpec,
    n: int,
    seed: int,
    *,
    id_prefix: str = "p",
) -> list[tuple[Participant, PreferenceProfile]]:
    """Draw ``n`` participants with preference profiles, deterministically."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    rng = np.random.default_rng(seed)
    weights = np.asarray([c.weight for c in spec.components], dtype=np.float64)
    weights = weights / weights.sum()
    out: list[tuple[Participant, PreferenceProfile]] = []
    for i in range(n):
        component = spec.components[int(rng.choice(len(spec.components), p=weights))]
        age = int(rng.integers(component.age_range[0], component.age_range[1] + 1))
        score = float(rng.uniform(*component.dyslexia_score_range))
        participant = Participant.from_score(f"{id_prefix}{i:04d}", age, score)
        out.append((participant, _component_profile(component, rng)))
    return out
