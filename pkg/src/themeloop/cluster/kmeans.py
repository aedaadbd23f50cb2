"""Seeded k-means: k-means++ starts, Lloyd iterations, empty-cluster repair.

Semantics are pinned precisely so independent reimplementations agree bit
for bit: assignment breaks ties toward the lowest centroid index, empty
clusters steal the point farthest from its assigned centroid (lowest row
index on ties), and iteration stops when the largest centroid shift drops
below ``tol`` or after ``max_iter`` rounds. Labels always come from a final
assignment against the returned centroids. Without an explicit ``init``,
``n_init`` seeded restarts run and the lowest-inertia run wins (first
winner on exact ties), so results stay deterministic per seed.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator

from ..validation import check_array, check_is_fitted

DEFAULT_TOL = 1e-6
DEFAULT_MAX_ITER = 300


@dataclass
class KMeansResult:
    """Outcome of one k-means fit."""

    k: int
    centroids: np.ndarray  # (k, d)
    labels: np.ndarray  # (n,)
    inertia: float
    n_iter: int
    seed: int | None
    inertia_history: tuple[float, ...] = ()


def _pairwise_sq_dists(X: np.ndarray, C: np.ndarray) -> np.ndarray:
    # ||x - c||^2 expanded; clip tiny negatives from cancellation
    d2 = (
        np.sum(X * X, axis=1)[:, None]
        - 2.0 * (X @ C.T)
        + np.sum(C * C, axis=1)[None, :]
    )
    return np.maximum(d2, 0.0)


def _assign(X: np.ndarray, C: np.ndarray) -> np.ndarray:
    return _pairwise_sq_dists(X, C).argmin(axis=1)  # first minimum wins


def _inertia(X: np.ndarray, C: np.ndarray, labels: np.ndarray) -> float:
    diffs = X - C[labels]
    # fixed reduction order: sum rows in index order
    return float(np.sum(np.sum(diffs * diffs, axis=1)))


def kmeans_plus_plus(X: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    """Standard k-means++ seeding driven by ``rng``."""
    n = X.shape[0]
    centers = np.empty((k, X.shape[1]), dtype=X.dtype)
    centers[0] = X[int(rng.integers(n))]
    d2 = np.sum((X - centers[0]) ** 2, axis=1)
    for j in range(1, k):
        total = float(d2.sum())
        if total <= 0.0:
            idx = int(rng.integers(n))  # all points coincide with a center
        else:
            idx = int(rng.choice(n, p=d2 / total))
        centers[j] = X[idx]
        d2 = np.minimum(d2, np.sum((X - centers[j]) ** 2, axis=1))
    return centers


def _repair_empty_clusters(
    X: np.ndarray, centroids: np.ndarray, labels: np.ndarray
) -> np.ndarray:
    """Give each empty cluster the point farthest from its own centroid."""
    k = centroids.shape[0]
    labels = labels.copy()
    for j in range(k):
        if np.any(labels == j):
            continue
        dists = np.sum((X - centroids[labels]) ** 2, axis=1)
        # a cluster of one must keep its point
        counts = np.bincount(labels, minlength=k)
        dists[counts[labels] <= 1] = -1.0
        donor = int(dists.argmax())
        labels[donor] = j
    return labels


DEFAULT_N_INIT = 10


def _lloyd(
    X: np.ndarray,
    centroids: np.ndarray,
    k: int,
    max_iter: int,
    tol: float,
) -> tuple[np.ndarray, np.ndarray, float, int, tuple[float, ...]]:
    history: list[float] = []
    n_iter = 0
    for n_iter in range(1, max_iter + 1):
        labels = _assign(X, centroids)
        if np.bincount(labels, minlength=k).min() == 0:
            labels = _repair_empty_clusters(X, centroids, labels)
        history.append(_inertia(X, centroids, labels))
        new_centroids = centroids.copy()
        for j in range(k):
            members = labels == j
            if np.any(members):
                new_centroids[j] = X[members].mean(axis=0)
        shift = float(np.sqrt(np.sum((new_centroids - centroids) ** 2, axis=1)).max())
        centroids = new_centroids
        if shift < tol:
            break

    labels = _assign(X, centroids)
    return centroids, labels, _inertia(X, centroids, labels), n_iter, tuple(history)


def kmeans_fit(
    X: np.ndarray,
    k: int,
    *,
    seed: int | None = 0,
    init: np.ndarray | None = None,
    n_init: int = DEFAULT_N_INIT,
    max_iter: int = DEFAULT_MAX_ITER,
    tol: float = DEFAULT_TOL,
) -> KMeansResult:
    """Run Lloyd's algorithm and return centroids, labels, and inertia.

    ``init`` supplies explicit starting centroids and implies a single run;
    otherwise ``n_init`` k-means++ starts are drawn from ``seed`` and the
    run with the lowest inertia wins (first winner on exact ties).
    """
    X = check_array(X, name="X")
    n = X.shape[0]
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if k > n:
        raise ValueError(f"k={k} exceeds the {n} available points")
    if n_init < 1:
        raise ValueError(f"n_init must be >= 1, got {n_init}")

    if init is not None:
        centroids = check_array(init, name="init").astype(np.float64).copy()
        if centroids.shape != (k, X.shape[1]):
            raise ValueError(
                f"init must have shape ({k}, {X.shape[1]}), got {centroids.shape}"
            )
        starts = [centroids]
    else:
        rng = np.random.default_rng(seed)
        starts = [
            kmeans_plus_plus(X, k, rng).astype(np.float64).copy()
            for _ in range(n_init)
        ]

    best: tuple | None = None
    for start in starts:
        run = _lloyd(X, start, k, max_iter, tol)
        if best is None or run[2] < best[2]:
            best = run

    centroids, labels, inertia, n_iter, history = best
    return KMeansResult(
        k=k,
        centroids=centroids,
        labels=labels,
        inertia=inertia,
        n_iter=n_iter,
        seed=seed,
        inertia_history=history,
    )


class FormatKMeans(BaseEstimator):
    """Estimator-style wrapper over :func:`kmeans_fit`."""

    def __init__(
        self,
        n_clusters: int = 8,
        *,
        seed: int = 0,
        n_init: int = DEFAULT_N_INIT,
        max_iter: int = DEFAULT_MAX_ITER,
        tol: float = DEFAULT_TOL,
        init: str | np.ndarray = "k-means++",
    ):
        self.n_clusters = n_clusters
        self.seed = seed
        self.n_init = n_init
        self.max_iter = max_iter
        self.tol = tol
        self.init = init

    def fit(self, X, y=None) -> "FormatKMeans":
        explicit = None if isinstance(self.init, str) else np.asarray(self.init)
        if isinstance(self.init, str) and self.init != "k-means++":
            raise ValueError(f"unknown init strategy {self.init!r}")
        result = kmeans_fit(
            X,
            self.n_clusters,
            seed=self.seed,
            init=explicit,
            n_init=self.n_init,
            max_iter=self.max_iter,
            tol=self.tol,
        )
        self.cluster_centers_ = result.centroids
        self.labels_ = result.labels
        self.inertia_ = result.inertia
        self.n_iter_ = result.n_iter
        self.inertia_history_ = result.inertia_history
        return self

    def predict(self, X) -> np.ndarray:
        check_is_fitted(self, ["cluster_centers_"])
        return _assign(check_array(X, name="X"), self.cluster_centers_)

    def fit_predict(self, X, y=None) -> np.ndarray:
        return self.fit(X).labels_
