"""Iteration loop: collect sessions, cluster refined formats, emit themes.

Each iteration R0..Rn runs stage 1 (sessions over the current theme set),
then stage 2 (render every refined format, embed crops with the CNN,
k-means over the embeddings, promote the representative nearest each
centroid to a theme).  Designer themes merge in between iterations, and a
convergence report tracks deltas, durations, keep-rates, and clustering
quality per iteration.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path
from typing import TYPE_CHECKING, Any, Mapping, Sequence

if TYPE_CHECKING:  # imported lazily at run time; the service imports us
    from ..service.store import DataStore

import numpy as np

from ..cluster import (
    ClusteringReport,
    FeatureMatrix,
    choose_k,
    cluster_demographics,
    kmeans_fit,
    representative_ids,
    select_representatives,
    silhouette_score,
)
from ..learn import (
    CnnModel,
    TrainConfig,
    build_dataset,
    embed_format,
    load_model,
    save_model,
    train,
)
from ..model import (
    Participant,
    Provenance,
    RefinementLog,
    TextSettings,
    Theme,
    ensure_unique_ids,
)
from ..render import CROP_SIDE, default_render_text, render, sample_crops
from ..simulate import (
    PopulationSpec,
    default_population_spec,
    derive_seed,
    sample_population,
    simulate_session,
)
from .convergence import ConvergenceReport, IterationMetrics, iteration_metrics
from .presets import init_r0

MODEL_POLICIES = ("reuse", "retrain")


class PipelineError(RuntimeError):
    """The pipeline cannot proceed with the inputs it was given."""


def load_validation_themes() -> tuple[Theme, ...]:
    """The eleven deliberately poor formats used as attention checks."""
    payload = json.loads(
        resources.files("themeloop.pipeline").joinpath(
            "data/validation_themes.json"
        ).read_text(encoding="utf-8")
    )
    themes = []
    for row in payload["themes"]:
        themes.append(
            Theme(
                theme_id=row["theme_id"],
                settings=TextSettings.normalized(
                    font=row["font"],
                    character_spacing_em=row["character_spacing_em"],
                    word_spacing_em=row["word_spacing_em"],
                    line_height=row["line_height"],
                ),
                provenance=Provenance.VALIDATION,
            )
        )
    ensure_unique_ids(themes)
    if len(themes) != 11:
        raise PipelineError(f"validation pool must have 11 themes, got {len(themes)}")
    return tuple(themes)


@dataclass(frozen=True)
class PipelineConfig:
    """Everything a simulated run needs, JSON-serializable."""

    master_seed: int = 0
    iterations: int = 4
    participants_per_iteration: int = 90
    population: PopulationSpec = field(default_factory=default_population_spec)
    model_policy: str = "reuse"
    k_max: int = 10
    train_crops_per_format: int = 10
    embed_crops_per_format: int = 8
    epochs: int = 2
    batch_size: int = 32
    learning_rate: float = 0.01
    momentum: float = 0.9
    channels: tuple[int, ...] = (16, 32, 64)
    feature_dim: int = 128

    def __post_init__(self) -> None:
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        if self.participants_per_iteration < 2:
            raise ValueError("participants_per_iteration must be >= 2")
        if self.model_policy not in MODEL_POLICIES:
            raise ValueError(
                f"model_policy must be one of {MODEL_POLICIES}, got {self.model_policy!r}"
            )
        if self.k_max < 2:
            raise ValueError("k_max must be >= 2")
        if self.train_crops_per_format < 2:
            raise ValueError("train_crops_per_format must be >= 2")
        if self.embed_crops_per_format < 1:
            raise ValueError("embed_crops_per_format must be >= 1")
        object.__setattr__(self, "channels", tuple(self.channels))

    def as_dict(self) -> dict[str, Any]:
        return {
            "master_seed": self.master_seed,
            "iterations": self.iterations,
            "participants_per_iteration": self.participants_per_iteration,
            "population": self.population.as_dict(),
            "model_policy": self.model_policy,
            "k_max": self.k_max,
            "train_crops_per_format": self.train_crops_per_format,
            "embed_crops_per_format": self.embed_crops_per_format,
            "epochs": self.epochs,
            "batch_size": self.batch_size,
            "learning_rate": self.learning_rate,
            "momentum": self.momentum,
            "channels": list(self.channels),
            "feature_dim": self.feature_dim,
        }

    @classmethod
    def from_dict(cls, payload: Mapping[str, Any]) -> "PipelineConfig":
        data = dict(payload)
        data["population"] = PopulationSpec.from_dict(data["population"])
        data["channels"] = tuple(data.get("channels", (16, 32, 64)))
        return cls(**data)


@dataclass(frozen=True)
class IterationState:
    """One completed iteration: what was shown, gathered, and produced."""

    index: int
    themes_shown: tuple[Theme, ...]
    sessions: tuple[Any, ...]
    clustering: ClusteringReport
    designer_themes: tuple[Theme, ...]
    next_themes: tuple[Theme, ...]


@dataclass(frozen=True)
class PipelineResult:
    states: tuple[IterationState, ...]
    convergence: ConvergenceReport
    store: DataStore


def assemble_iteration_themes(
    cluster_reps: Sequence[Theme],
    designer_themes: Sequence[Theme],
    validation_pool: Sequence[Theme],
    session_seed: int,
) -> list[Theme]:
    """Per-session theme list: reps + designers + one validation, shuffled."""
    reps = list(cluster_reps)
    if not reps:
        raise PipelineError("cannot assemble an iteration with no cluster representatives")
    pool = list(validation_pool)
    if not pool:
        raise PipelineError("validation pool is empty")
    base = reps + list(designer_themes)
    ensure_unique_ids(base)
    rng = np.random.default_rng(session_seed)
    validation = pool[int(rng.integers(len(pool)))]
    shown = base + [validation]
    order = rng.permutation(len(shown))
    return [shown[int(i)] for i in order]


def run_stage2(
    logs: Sequence[RefinementLog],
    *,
    iteration: int,
    config: PipelineConfig,
    model: CnnModel | None = None,
    participants_by_id: Mapping[str, Participant] | None = None,
) -> tuple[ClusteringReport, list[Theme], CnnModel | None]:
    """Cluster the refined formats and promote representatives to themes.

    Returns the clustering report, the new themes (served next iteration),
    and the crop-source model (trained here when the policy calls for it).
    """
    if len(logs) < 2:
        raise PipelineError(f"stage 2 needs >= 2 refinement logs, got {len(logs)}")
    ordered = sorted(logs, key=lambda log: log.session_id)
    ids = [log.session_id for log in ordered]
    if len(set(ids)) != len(ids):
        raise PipelineError("duplicate session ids in stage-2 input")
    settings_by_id = {log.session_id: log.final_settings for log in ordered}

    # unique formats, keyed by their spacing/font signature
    def signature(s: TextSettings) -> tuple:
        return (
            s.font.value,
            round(s.character_spacing_em, 6),
            round(s.word_spacing_em, 6),
            round(s.line_height, 6),
        )

    unique: dict[tuple, str] = {}
    for log in ordered:
        unique.setdefault(signature(log.final_settings), log.session_id)

    next_iteration = iteration + 1
    if len(unique) == 1:
        only = ordered[0]
        theme = Theme(
            theme_id=f"rep-r{next_iteration}-c0",
            settings=only.final_settings,
            provenance=Provenance.CLUSTER_REPRESENTATIVE,
            iteration=next_iteration,
        )
        report = ClusteringReport(
            iteration=iteration,
            chosen_k=1,
            silhouette=0.0,
            knee_k=None,
            used_fallback=True,
            inertia_by_k={},
            silhouette_by_k={},
            representative_format_ids=[only.session_id],
            degenerate=True,
            notes="all refined formats identical; clustering skipped",
        )
        return report, [theme], model

    # render each unique format once; training crops get per-format seeds
    # for diversity, while embedding crops share one seed so every format
    # is sampled at the same window positions — paired crops cancel the
    # placement noise that would otherwise dominate between-format
    # distances at small crop counts
    n_train = config.train_crops_per_format
    n_embed = config.embed_crops_per_format
    embed_seed = derive_seed(config.master_seed, f"embed-crops-r{iteration}")
    train_crops_by_format: dict[str, list] = {}
    embed_crops_by_format: dict[str, list] = {}
    for fid in sorted(unique.values()):
        seed = derive_seed(config.master_seed, f"crops-r{iteration}-{fid}")
        image = render(settings_by_id[fid], default_render_text())
        train_crops_by_format[fid] = sample_crops(
            image, n_train, seed=seed, source_format_id=fid
        )
        embed_crops_by_format[fid] = sample_crops(
            image, n_embed, seed=embed_seed, source_format_id=fid
        )

    if model is None or config.model_policy == "retrain":
        dataset = build_dataset(
            train_crops_by_format,
            test_fraction=0.2,
            seed=derive_seed(config.master_seed, f"dataset-r{iteration}"),
        )
        result = train(
            dataset,
            TrainConfig(
                learning_rate=config.learning_rate,
                momentum=config.momentum,
                batch_size=config.batch_size,
                epochs=config.epochs,
                seed=derive_seed(config.master_seed, f"train-r{iteration}") % (2**31),
            ),
            channels=config.channels,
            feature_dim=config.feature_dim,
        )
        model = result.model

    embedding_by_format = {
        fid: embed_format(model, crops)
        for fid, crops in embed_crops_by_format.items()
    }
    X = np.stack(
        [embedding_by_format[unique[signature(settings_by_id[i])]] for i in ids]
    )
    features = FeatureMatrix(ids=tuple(ids), X=X)

    k_cap = min(config.k_max, len(ids))
    inertia_by_k: dict[int, float] = {}
    silhouette_by_k: dict[int, float] = {}
    results_by_k = {}
    for k in range(1, k_cap + 1):
        result = kmeans_fit(
            X, k, seed=derive_seed(config.master_seed, f"kmeans-r{iteration}-k{k}")
        )
        results_by_k[k] = result
        inertia_by_k[k] = result.inertia
        if 2 <= k < len(ids):
            # one row per session's final format (crops already aggregated
            # into a single embedding), so popular formats weight the score
            silhouette_by_k[k] = silhouette_score(X, result.labels)
    notes = ""
    if silhouette_by_k:
        selection = choose_k(inertia_by_k, silhouette_by_k, k_max=k_cap)
        chosen_k, knee_k, used_fallback = (
            selection.chosen_k,
            selection.knee_k,
            selection.used_fallback,
        )
    else:
        # two distinct formats leave no k with a defined silhouette
        chosen_k, knee_k, used_fallback = 2, None, True
        notes = "two formats: k forced to 2"
    chosen = results_by_k[chosen_k]

    themes = select_representatives(
        chosen,
        features,
        settings_by_id,
        iteration=next_iteration,
        id_prefix="rep",
    )
    rep_ids = list(representative_ids(chosen, features).values())

    demographics: dict[int, dict[str, Any]] = {}
    if participants_by_id is not None:
        by_session = []
        for log in ordered:
            participant = participants_by_id.get(log.participant_id)
            if participant is None:
                raise PipelineError(
                    f"no participant record for {log.participant_id}"
                )
            by_session.append(participant)
        demographics = cluster_demographics(chosen.labels, by_session)

    report = ClusteringReport(
        iteration=iteration,
        chosen_k=chosen_k,
        silhouette=silhouette_by_k.get(chosen_k, 0.0),
        knee_k=knee_k,
        used_fallback=used_fallback,
        inertia_by_k=inertia_by_k,
        silhouette_by_k=silhouette_by_k,
        representative_format_ids=rep_ids,
        demographics=demographics,
        notes=notes,
    )
    return report, themes, model


def run_pipeline(
    config: PipelineConfig,
    store_root: Path | str,
    *,
    designers: Mapping[int, Sequence[Theme]] | None = None,
) -> PipelineResult:
    """Run the full simulated loop and persist every iteration's state."""
    from ..service.store import DataStore

    designers = {int(k): tuple(v) for k, v in (designers or {}).items()}
    store = DataStore(store_root)
    store.write_config(config.as_dict())
    validation_pool = load_validation_themes()

    model: CnnModel | None = None
    if config.model_policy == "reuse" and store.model_path.exists():
        model = load_model(store.model_path)

    reps: list[Theme] = []
    states: list[IterationState] = []
    metrics: list[IterationMetrics] = []
    seen_participants: set[str] = set()

    for n in range(config.iterations):
        population = sample_population(
            config.population,
            config.participants_per_iteration,
            seed=derive_seed(config.master_seed, f"population-r{n}"),
            id_prefix=f"r{n}-p",
        )
        designer_themes = tuple(
            replace(t, iteration=n) for t in designers.get(n, ())
        )
        sessions = []
        shown_union: dict[str, Theme] = {}
        for participant, profile in population:
            pid = participant.participant_id
            if pid in seen_participants:
                raise PipelineError(f"participant {pid} appears in two iterations")
            seen_participants.add(pid)
            session_seed = derive_seed(config.master_seed, f"session-{pid}")
            if n == 0:
                shown = [init_r0(pid, config.master_seed)]
                include_review = False
            else:
                shown = assemble_iteration_themes(
                    reps,
                    designer_themes,
                    validation_pool,
                    derive_seed(config.master_seed, f"assemble-{pid}"),
                )
                include_review = True
            session = simulate_session(
                profile,
                shown,
                session_seed,
                participant=participant,
                iteration=n,
                session_id=f"sess-{pid}",
                include_review=include_review,
            )
            for theme in shown:
                shown_union.setdefault(theme.theme_id, theme)
            store.append_session(n, session.as_dict())
            sessions.append(session)

        themes_shown = tuple(
            shown_union[tid] for tid in sorted(shown_union)
        )
        store.write_themes(n, [t.as_dict() for t in themes_shown])

        logs = [s.log for s in sessions]
        participants_by_id = {
            s.participant.participant_id: s.participant for s in sessions
        }
        report, new_reps, model = run_stage2(
            logs,
            iteration=n,
            config=config,
            model=model,
            participants_by_id=participants_by_id,
        )
        store.write_clustering(n, report.as_dict())

        iteration_report = iteration_metrics(sessions, report)
        store.write_report(n, iteration_report.as_dict())
        metrics.append(iteration_report)

        next_designers = designers.get(n + 1, ())
        states.append(
            IterationState(
                index=n,
                themes_shown=themes_shown,
                sessions=tuple(sessions),
                clustering=report,
                designer_themes=designer_themes,
                next_themes=tuple(new_reps) + tuple(next_designers),
            )
        )
        reps = new_reps

    if model is not None:
        save_model(model, store.model_path)

    convergence = ConvergenceReport(tuple(metrics))
    store.write_convergence(convergence.as_dict())
    return PipelineResult(
        states=tuple(states), convergence=convergence, store=store
    )
