"""Iteration loop: presets, stage-2 clustering, themes, convergence."""
from .convergence import ConvergenceReport, IterationMetrics, iteration_metrics
from .orchestrator import (
    MODEL_POLICIES,
    IterationState,
    PipelineConfig,
    PipelineError,
    PipelineResult,
    assemble_iteration_themes,
    load_validation_themes,
    run_pipeline,
    run_stage2,
)
from .presets import PILOT_PRESETS, PilotPreset, init_r0

__all__ = [
    "ConvergenceReport",
    "IterationMetrics",
    "IterationState",
    "MODEL_POLICIES",
    "PILOT_PRESETS",
    "PilotPreset",
    "PipelineConfig",
    "PipelineError",
    "PipelineResult",
    "assemble_iteration_themes",
    "init_r0",
    "iteration_metrics",
    "load_validation_themes",
    "run_pipeline",
    "run_stage2",
]
