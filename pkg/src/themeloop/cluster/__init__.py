"""Clustering: seeded k-means, silhouettes, knee selection, representatives."""
from .kmeans import (
    DEFAULT_MAX_ITER,
    DEFAULT_TOL,
    FormatKMeans,
    KMeansResult,
    kmeans_fit,
    kmeans_plus_plus,
)
from .knee import (
    DEFAULT_K_MAX,
    DEFAULT_SENSITIVITY,
    KneeSelection,
    choose_k,
    knee_point,
)
from .representatives import (
    ClusteringReport,
    FeatureMatrix,
    cluster_demographics,
    representative_ids,
    select_representatives,
)
from .silhouette import SingleClusterError, silhouette_samples, silhouette_score

__all__ = [
    "ClusteringReport",
    "DEFAULT_K_MAX",
    "DEFAULT_MAX_ITER",
    "DEFAULT_SENSITIVITY",
    "DEFAULT_TOL",
    "FeatureMatrix",
    "FormatKMeans",
    "KMeansResult",
    "KneeSelection",
    "SingleClusterError",
    "choose_k",
    "cluster_demographics",
    "kmeans_fit",
    "kmeans_plus_plus",
    "knee_point",
    "representative_ids",
    "select_representatives",
    "silhouette_samples",
    "silhouette_score",
]
