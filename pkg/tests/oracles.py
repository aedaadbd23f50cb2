"""Independent, deliberately naive reference implementations used by tests.

These are written in plain loops, straight from the definitions, so they
share no code (and no vectorization tricks) with the package internals.
"""
from __future__ import annotations

import math

import numpy as np


def lloyd_oracle(X, init, max_iter=300, tol=1e-6):
    """Brute-force Lloyd's algorithm with explicit starting centroids.

    Tie-breaking and stopping mirror the documented contract: nearest
    centroid with the lowest index wins, iteration stops when no centroid
    moves more than ``tol``, and the final labels re-assign against the
    final centroids.
    """
    X = [list(map(float, row)) for row in np.asarray(X)]
    centroids = [list(map(float, row)) for row in np.asarray(init)]
    k = len(centroids)
    d = len(X[0])

    def dist2(p, q):
        return sum((a - b) ** 2 for a, b in zip(p, q))

    def assign():
        labels = []
        for p in X:
            best, best_d = 0, dist2(p, centroids[0])
            for j in range(1, k):
                dj = dist2(p, centroids[j])
                if dj < best_d:
                    best, best_d = j, dj
            labels.append(best)
        return labels

    labels = []
    for _ in range(max_iter):
        labels = assign()
        new_centroids = []
        for j in range(k):
            members = [p for p, l in zip(X, labels) if l == j]
            if members:
                new_centroids.append(
                    [sum(col) / len(members) for col in zip(*members)]
                )
            else:
                new_centroids.append(list(centroids[j]))
        shift = max(
            math.sqrt(dist2(a, b)) for a, b in zip(new_centroids, centroids)
        )
        centroids = new_centroids
        if shift < tol:
            break
    labels = assign()
    inertia = sum(dist2(p, centroids[l]) for p, l in zip(X, labels))
    return labels, centroids, inertia


def silhouette_oracle(X, labels):
    """O(n^2) textbook silhouette: mean of per-point (b - a) / max(a, b)."""
    X = [list(map(float, row)) for row in np.asarray(X)]
    labels = [int(l) for l in labels]
    n = len(X)
    clusters = sorted(set(labels))

    def dist(p, q):
        return math.sqrt(sum((a - b) ** 2 for a, b in zip(p, q)))

    scores = []
    for i in range(n):
        own = [j for j in range(n) if labels[j] == labels[i] and j != i]
        if not own:
            scores.append(0.0)
            continue
        a = sum(dist(X[i], X[j]) for j in own) / len(own)
        b = math.inf
        for c in clusters:
            if c == labels[i]:
                continue
            members = [j for j in range(n) if labels[j] == c]
            b = min(b, sum(dist(X[i], X[j]) for j in members) / len(members))
        m = max(a, b)
        scores.append(0.0 if m == 0 else (b - a) / m)
    return sum(scores) / n


def welch_t_oracle_values():
    """Frozen two-sided Welch t-test results computed once with scipy.

    Each row: (sample_a, sample_b, t, df, p).
    """
    return [
        (
            [1.0, 2.0, 3.0, 4.0, 5.0],
            [2.0, 3.0, 4.0, 5.0, 6.0],
            -1.0,
            8.0,
            0.34659350708733416,
        ),
        (
            [12.1, 14.3, 11.8, 13.5, 15.2, 12.9, 14.8],
            [10.2, 11.5, 9.8, 10.9],
            4.666795421146587,
            8.96382656253463,
            0.0011866368266282177,
        ),
    ]
