"""Elbow detection on the inertia curve and cluster-count selection.

The knee finder normalizes the curve to the unit square, flips a decreasing
curve into an increasing one, and looks at the difference between the curve
and the diagonal. A local maximum of that difference is declared a knee when
the difference later falls more than ``sensitivity`` mean x-steps below the
peak before any higher peak appears. Selection then selects the best
silhouette within one cluster of the knee; without a usable knee it falls
back to the best silhouette overall and says so.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

DEFAULT_SENSITIVITY = 2.0
DEFAULT_K_MAX = 20


def knee_point(
    values: Sequence[float], *, sensitivity: float = DEFAULT_SENSITIVITY
) -> int | None:
    """Index (1-based position) of the knee of a decreasing curve, or None.

    ``values[i]`` is the curve at x = i + 1. Returns the x of the knee.
    """
    y = np.asarray(values, dtype=np.float64)
    if y.ndim != 1:
        raise ValueError("values must be one-dimensional")
    if not np.isfinite(y).all():
        raise ValueError("values must be finite")
    n = y.shape[0]
    if n < 3:
        return None
    y_span = y.max() - y.min()
    if y_span <= 0:
        return None  # flat curve has no knee

    x_norm = np.linspace(0.0, 1.0, n)
    y_norm = (y - y.min()) / y_span
    flipped = 1.0 - y_norm  # decreasing curve -> increasing
    diff = flipped - x_norm

    # strict rise into the point, no higher value immediately after
    local_max = [
        i
        for i in range(1, n - 1)
        if diff[i] > diff[i - 1] and diff[i] >= diff[i + 1]
    ]
    if not local_max:
        return None

    mean_dx = 1.0 / (n - 1)
    for pos, i in enumerate(local_max):
        threshold = diff[i] - sensitivity * mean_dx
        end = local_max[pos + 1] if pos + 1 < len(local_max) else n
        for j in range(i + 1, end):
            if diff[j] > diff[i]:
                break  # a higher rise supersedes this candidate
            if diff[j] < threshold:
                return i + 1  # x positions are 1-based
    return None


@dataclass(frozen=True)
class KneeSelection:
    """Outcome of cluster-count selection."""

    chosen_k: int
    knee_k: int | None
    used_fallback: bool
    candidate_window: tuple[int, ...]
    silhouette: float


def choose_k(
    inertia_by_k: Mapping[int, float],
    silhouette_by_k: Mapping[int, float],
    *,
    k_max: int = DEFAULT_K_MAX,
    sensitivity: float = DEFAULT_SENSITIVITY,
) -> KneeSelection:
    """Pick the cluster count from an inertia curve and silhouette scores.

    The knee of the inertia curve proposes a count; the silhouette picks
    the best of {knee-1, knee, knee+1} (clipped to [2, k_max]). When no
    knee exists the choice falls back to the global silhouette maximum and
    the result is flagged.
    """
    if not inertia_by_k:
        raise ValueError("inertia_by_k is empty")
    if not silhouette_by_k:
        raise ValueError("silhouette_by_k is empty")
    ks = sorted(inertia_by_k)
    if ks != list(range(ks[0], ks[0] + len(ks))):
        raise ValueError("inertia_by_k must cover a contiguous range of k")
    for k in silhouette_by_k:
        if k < 2:
            raise ValueError(f"silhouette is undefined at k={k}")

    def best_by_silhouette(candidates: Sequence[int]) -> int:
        # highest silhouette wins; ties prefer the smaller k
        return min(candidates, key=lambda k: (-silhouette_by_k[k], k))

    curve = [inertia_by_k[k] for k in ks]
    knee_x = knee_point(curve, sensitivity=sensitivity)
    knee_k = None if knee_x is None else ks[0] + (knee_x - 1)

    eligible = [k for k in silhouette_by_k if 2 <= k <= k_max]
    if not eligible:
        raise ValueError("no silhouette candidates within [2, k_max]")

    if knee_k is not None:
        window = tuple(
            k for k in (knee_k - 1, knee_k, knee_k + 1) if k in silhouette_by_k and 2 <= k <= k_max
        )
        if window:
            chosen = best_by_silhouette(window)
            return KneeSelection(
                chosen_k=chosen,
                knee_k=knee_k,
                used_fallback=False,
                candidate_window=window,
                silhouette=silhouette_by_k[chosen],
            )

    chosen = best_by_silhouette(eligible)
    return KneeSelection(
        chosen_k=chosen,
        knee_k=knee_k,
        used_fallback=True,
        candidate_window=tuple(sorted(eligible)),
        silhouette=silhouette_by_k[chosen],
    )
