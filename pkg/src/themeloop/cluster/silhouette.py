"""Silhouette scoring with Euclidean distances.

Per point: a is the mean distance to its own cluster's other members, b is
the smallest mean distance to any other cluster, and the silhouette is
(b - a) / max(a, b). Singleton clusters contribute 0 for their point, as
does a point where both a and b are 0.
"""
from __future__ import annotations

import numpy as np

from ..validation import check_array, check_labels

MAX_POINTS = 4000


class SingleClusterError(ValueError):
    """Silhouette is undefined when fewer than two clusters are present."""


def _distance_matrix(X: np.ndarray) -> np.ndarray:
    sq = np.sum(X * X, axis=1)
    d2 = sq[:, None] - 2.0 * (X @ X.T) + sq[None, :]
    np.fill_diagonal(d2, 0.0)
    return np.sqrt(np.maximum(d2, 0.0))


def silhouette_samples(X, labels) -> np.ndarray:
    """Per-point silhouette values."""
    X = check_array(X, name="X")
    labels = check_labels(labels, X.shape[0], name="labels")
    n = X.shape[0]
    if n > MAX_POINTS:
        raise ValueError(
            f"silhouette is quadratic in points; {n} exceeds the {MAX_POINTS} cap"
        )
    unique = np.unique(labels)
    if unique.shape[0] < 2:
        raise SingleClusterError(
            "silhouette needs at least two clusters with members"
        )

    D = _distance_matrix(X)
    members = {int(c): np.flatnonzero(labels == c) for c in unique}
    scores = np.zeros(n, dtype=np.float64)
    for i in range(n):
        own = members[int(labels[i])]
        if own.shape[0] <= 1:
            scores[i] = 0.0  # singleton cluster
            continue
        a = float(D[i, own].sum() / (own.shape[0] - 1))
        b = min(
            float(D[i, idx].mean())
            for c, idx in members.items()
            if c != int(labels[i])
        )
        denom = max(a, b)
        scores[i] = 0.0 if denom == 0.0 else (b - a) / denom
    return scores


def silhouette_score(X, labels) -> float:
    """Mean per-point silhouette; always in [-1, 1]."""
    return float(np.mean(silhouette_samples(X, labels)))
