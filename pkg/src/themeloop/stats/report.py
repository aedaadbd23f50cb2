"""Markdown summaries of measurement runs."""
from __future__ import annotations

from typing import Mapping, Sequence

from ..model.participants import Participant
from .composite import (
    CohortBounds,
    CompositeWeights,
    DEFAULT_WEIGHTS,
    ReadingMeasurement,
    composite_score,
    measurement_speed,
)


def _mean(values: Sequence[float]) -> float:
    return sum(values) / len(values)


def summarize_by_theme(
    measurements: Sequence[ReadingMeasurement],
    bounds: CohortBounds | None = None,
    weights: CompositeWeights = DEFAULT_WEIGHTS,
) -> dict[str, dict[str, float]]:
    """Per-theme means of composite, comfort, comprehension, and speed."""
    if not measurements:
        raise ValueError("no measurements to summarize")
    bounds = bounds or CohortBounds.from_measurements(measurements)
    grouped: dict[str, list[ReadingMeasurement]] = {}
    for m in measurements:
        grouped.setdefault(m.theme_id, []).append(m)
    return {
        theme_id: {
            "n": float(len(group)),
            "composite": _mean([composite_score(m, bounds, weights) for m in group]),
            "comfort": _mean([float(m.comfort) for m in group]),
            "comprehension": _mean([m.comprehension for m in group]),
            "speed_wpm": _mean([measurement_speed(m) for m in group]),
        }
        for theme_id, group in sorted(grouped.items())
    }


def markdown_table(rows: Sequence[Sequence[str]], header: Sequence[str]) -> str:
    """Render a GitHub-style markdown table."""
    lines = [
        "| " + " | ".join(header) + " |",
        "|" + "|".join(" --- " for _ in header) + "|",
    ]
    for row in rows:
        lines.append("| " + " | ".join(str(cell) for cell in row) + " |")
    return "\n".join(lines) + "\n"


def performance_table(
    measurements: Sequence[ReadingMeasurement],
    participants: Mapping[str, Participant] | None = None,
    bounds: CohortBounds | None = None,
    weights: CompositeWeights = DEFAULT_WEIGHTS,
) -> str:
    """Markdown table of per-theme performance, optionally split by group."""
    header = ["theme", "n", "composite", "comfort", "comprehension", "speed (wpm)"]

    def rows_for(ms: Sequence[ReadingMeasurement], label: str | None):
        summary = summarize_by_theme(ms, bounds, weights)
        prefix = f"{label}: " if label else ""
        return [
            [
                f"{prefix}{theme}",
                f"{int(s['n'])}",
                f"{s['composite']:.3f}",
                f"{s['comfort']:.2f}",
                f"{s['comprehension']:.2f}",
                f"{s['speed_wpm']:.0f}",
            ]
            for theme, s in summary.items()
        ]

    if participants is None:
        return markdown_table(rows_for(measurements, None), header)

    groups: dict[str, list[ReadingMeasurement]] = {}
    for m in measurements:
        participant = participants.get(m.participant_id)
        label = (
            "dyslexic"
            if participant and participant.dyslexia
            else "non_dyslexic"
        )
        groups.setdefault(label, []).append(m)
    all_rows = []
    for label in sorted(groups):
        all_rows.extend(rows_for(groups[label], label))
    return markdown_table(all_rows, header)
