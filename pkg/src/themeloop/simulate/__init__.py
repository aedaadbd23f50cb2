"""Synthetic crowd: latent format preferences and simulated sessions."""
from .population import (
    DEFAULT_TOLERANCE,
    PlantedMode,
    PopulationComponent,
    PopulationSpec,
    PreferenceProfile,
    SpacingTolerance,
    default_population_spec,
    derive_seed,
    planted_modes_spec,
    sample_population,
)
from .session import (
    MAX_REFINEMENT_EVENTS,
    SECONDARY_FLIP_PROB,
    SimulatedSession,
    rate_theme,
    simulate_session,
    spacing_deviations,
    theme_distance,
)

__all__ = [
    "DEFAULT_TOLERANCE",
    "MAX_REFINEMENT_EVENTS",
    "PlantedMode",
    "PopulationComponent",
    "PopulationSpec",
    "PreferenceProfile",
    "SECONDARY_FLIP_PROB",
    "SimulatedSession",
    "SpacingTolerance",
    "default_population_spec",
    "derive_seed",
    "planted_modes_spec",
    "rate_theme",
    "sample_population",
    "simulate_session",
    "spacing_deviations",
    "theme_distance",
]
