"""Representative selection and per-cluster demographic breakdowns."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Mapping, Sequence

import numpy as np

from ..model.participants import Participant, age_bucket
from ..model.settings import TextSettings
from ..model.themes import Provenance, Theme
from ..validation import check_array
from .kmeans import KMeansResult


@dataclass(frozen=True)
class FeatureMatrix:
    """Embedding rows keyed by format id (one row per refined format)."""

    ids: tuple[str, ...]
    X: np.ndarray  # (n, d) float64

    def __post_init__(self) -> None:
        X = check_array(self.X, name="X")
        ids = tuple(str(i) for i in self.ids)
        if len(ids) != X.shape[0]:
            raise ValueError(
                f"{len(ids)} ids do not match {X.shape[0]} feature rows"
            )
        if len(set(ids)) != len(ids):
            raise ValueError("format ids must be unique")
        object.__setattr__(self, "ids", ids)
        object.__setattr__(self, "X", X)

    @property
    def n(self) -> int:
        return len(self.ids)


def representative_ids(
    result: KMeansResult, features: FeatureMatrix
) -> dict[int, str]:
    """Per cluster, the member format id closest to the centroid.

    Distance ties break toward the lexicographically smallest format id so
    selection is deterministic.  Empty clusters (repaired away upstream)
    are absent from the result.
    """
    if result.labels.shape[0] != features.n:
        raise ValueError("clustering labels do not align with feature rows")
    chosen: dict[int, str] = {}
    for cluster in range(result.k):
        member_rows = np.flatnonzero(result.labels == cluster)
        if member_rows.size == 0:
            continue
        centroid = result.centroids[cluster]
        dists = np.sqrt(
            np.sum((features.X[member_rows] - centroid) ** 2, axis=1)
        )
        chosen[cluster] = min(
            zip(dists.tolist(), (features.ids[r] for r in member_rows)),
            key=lambda pair: (pair[0], pair[1]),
        )[1]
    return chosen


def select_representatives(
    result: KMeansResult,
    features: FeatureMatrix,
    settings_by_id: Mapping[str, TextSettings],
    *,
    iteration: int,
    id_prefix: str = "rep",
) -> list[Theme]:
    """One theme per cluster: the member format closest to the centroid."""
    missing = [fid for fid in features.ids if fid not in settings_by_id]
    if missing:
        raise ValueError(f"no settings recorded for formats: {missing[:3]}")
    themes: list[Theme] = []
    for cluster, best in representative_ids(result, features).items():
        themes.append(
            Theme(
                theme_id=f"{id_prefix}-r{iteration}-c{cluster}",
                settings=settings_by_id[best],
                provenance=Provenance.CLUSTER_REPRESENTATIVE,
                iteration=iteration,
            )
        )
    return themes


def _share_map(values: Sequence[str]) -> dict[str, float]:
    total = len(values)
    if total == 0:
        return {}
    counts: dict[str, int] = {}
    for v in values:
        counts[v] = counts.get(v, 0) + 1
    return {k: counts[k] / total for k in sorted(counts)}


def cluster_demographics(
    labels: np.ndarray,
    participants: Sequence[Participant],
) -> dict[int, dict[str, Any]]:
    """Per-cluster share of the population, dyslexia split, and age buckets."""
    labels = np.asarray(labels)
    if labels.shape[0] != len(participants):
        raise ValueError("labels do not align with participants")
    total = len(participants)
    out: dict[int, dict[str, Any]] = {}
    for cluster in sorted(set(int(l) for l in labels)):
        rows = np.flatnonzero(labels == cluster)
        group = [participants[i] for i in rows]
        out[cluster] = {
            "size": len(group),
            "population_share": len(group) / total if total else 0.0,
            "dyslexia_share": _share_map(
                ["dyslexic" if p.dyslexia else "non_dyslexic" for p in group]
            ),
            "age_bucket_share": _share_map([age_bucket(p.age_years) for p in group]),
        }
    return out


@dataclass
class ClusteringReport:
    """Everything one clustering pass decides and measures."""

    iteration: int
    chosen_k: int
    silhouette: float
    knee_k: int | None
    used_fallback: bool
    inertia_by_k: dict[int, float]
    silhouette_by_k: dict[int, float]
    representative_format_ids: list[str]
    demographics: dict[int, dict[str, Any]] = field(default_factory=dict)
    degenerate: bool = False
    notes: str = ""

    def __post_init__(self) -> None:
        if not self.degenerate:
            if not (-1.0 <= self.silhouette <= 1.0):
                raise ValueError(
                    f"silhouette must be in [-1, 1], got {self.silhouette}"
                )
            if self.chosen_k < 1:
                raise ValueError("chosen_k must be >= 1")

    def as_dict(self) -> dict[str, Any]:
        return {
            "iteration": self.iteration,
            "chosen_k": self.chosen_k,
            "silhouette": self.silhouette,
            "knee_k": self.knee_k,
            "used_fallback": self.used_fallback,
            "inertia_by_k": {str(k): v for k, v in sorted(self.inertia_by_k.items())},
            "silhouette_by_k": {
                str(k): v for k, v in sorted(self.silhouette_by_k.items())
            },
            "representative_format_ids": list(self.representative_format_ids),
            "demographics": {
                str(c): v for c, v in sorted(self.demographics.items())
            },
            "degenerate": self.degenerate,
            "notes": self.notes,
        }

    @classmethod
    def from_dict(cls, payload: Mapping[str, Any]) -> "ClusteringReport":
        return cls(
            iteration=int(payload["iteration"]),
            chosen_k=int(payload["chosen_k"]),
            silhouette=float(payload["silhouette"]),
            knee_k=None if payload.get("knee_k") is None else int(payload["knee_k"]),
            used_fallback=bool(payload["used_fallback"]),
            inertia_by_k={int(k): float(v) for k, v in payload["inertia_by_k"].items()},
            silhouette_by_k={
                int(k): float(v) for k, v in payload["silhouette_by_k"].items()
            },
            representative_format_ids=[
                str(x) for x in payload["representative_format_ids"]
            ],
            demographics={
                int(c): dict(v) for c, v in payload.get("demographics", {}).items()
            },
            degenerate=bool(payload.get("degenerate", False)),
            notes=str(payload.get("notes", "")),
        )
