"""Per-iteration convergence metrics for a pipeline run."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Mapping, Sequence

from ..cluster import ClusteringReport
from ..model import SLIDERS
from ..simulate import SimulatedSession

_SPACING_KEYS = tuple(SLIDERS)


@dataclass(frozen=True)
class IterationMetrics:
    """Aggregates over one iteration's closed sessions."""

    iteration: int
    n_sessions: int
    cluster_count: int
    silhouette: float
    mean_abs_delta: dict[str, float] = field(default_factory=dict)
    mean_delta_steps: float = 0.0
    mean_adjust_duration_ms: float = 0.0
    font_keep_rate: float = 1.0

    def as_dict(self) -> dict[str, Any]:
        return {
            "iteration": self.iteration,
            "n_sessions": self.n_sessions,
            "cluster_count": self.cluster_count,
            "silhouette": self.silhouette,
            "mean_abs_delta": dict(self.mean_abs_delta),
            "mean_delta_steps": self.mean_delta_steps,
            "mean_adjust_duration_ms": self.mean_adjust_duration_ms,
            "font_keep_rate": self.font_keep_rate,
        }

    @classmethod
    def from_dict(cls, payload: Mapping[str, Any]) -> "IterationMetrics":
        return cls(
            iteration=int(payload["iteration"]),
            n_sessions=int(payload["n_sessions"]),
            cluster_count=int(payload["cluster_count"]),
            silhouette=float(payload["silhouette"]),
            mean_abs_delta={
                k: float(v) for k, v in payload["mean_abs_delta"].items()
            },
            mean_delta_steps=float(payload["mean_delta_steps"]),
            mean_adjust_duration_ms=float(payload["mean_adjust_duration_ms"]),
            font_keep_rate=float(payload["font_keep_rate"]),
        )


def iteration_metrics(
    sessions: Sequence[SimulatedSession], clustering: ClusteringReport
) -> IterationMetrics:
    """Order-insensitive aggregates: deltas, durations, font keep-rate."""
    if not sessions:
        raise ValueError("iteration has no sessions")
    n = len(sessions)
    totals = {key: 0.0 for key in _SPACING_KEYS}
    steps_total = 0.0
    duration_total = 0.0
    kept = 0
    for session in sessions:
        log = session.log
        per_session_steps = 0.0
        for key in _SPACING_KEYS:
            delta = abs(
                getattr(log.final_settings, key) - getattr(log.start_settings, key)
            )
            totals[key] += delta
            per_session_steps += delta / SLIDERS[key][2]
        steps_total += per_session_steps / len(_SPACING_KEYS)
        duration_total += log.adjust_duration_ms
        kept += log.final_settings.font is log.start_settings.font
    return IterationMetrics(
        iteration=clustering.iteration,
        n_sessions=n,
        cluster_count=clustering.chosen_k,
        silhouette=clustering.silhouette,
        mean_abs_delta={key: totals[key] / n for key in _SPACING_KEYS},
        mean_delta_steps=steps_total / n,
        mean_adjust_duration_ms=duration_total / n,
        font_keep_rate=kept / n,
    )


@dataclass(frozen=True)
class ConvergenceReport:
    """Iteration-aligned trajectory of the refinement loop."""

    iterations: tuple[IterationMetrics, ...]

    def __post_init__(self) -> None:
        metrics = tuple(self.iterations)
        if not metrics:
            raise ValueError("a convergence report needs >= 1 iteration")
        indices = [m.iteration for m in metrics]
        if indices != list(range(indices[0], indices[0] + len(indices))):
            raise ValueError(f"iteration indices must be contiguous, got {indices}")
        object.__setattr__(self, "iterations", metrics)

    @property
    def cluster_counts(self) -> list[int]:
        return [m.cluster_count for m in self.iterations]

    @property
    def silhouettes(self) -> list[float]:
        return [m.silhouette for m in self.iterations]

    @property
    def mean_delta_steps(self) -> list[float]:
        return [m.mean_delta_steps for m in self.iterations]

    def as_dict(self) -> dict[str, Any]:
        return {"iterations": [m.as_dict() for m in self.iterations]}

    @classmethod
    def from_dict(cls, payload: Mapping[str, Any]) -> "ConvergenceReport":
        return cls(
            iterations=tuple(
                IterationMetrics.from_dict(m) for m in payload["iterations"]
            )
        )
