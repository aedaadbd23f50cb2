"""Command line: run the loop, cluster, serve, export CSS, summarize."""
from __future__ import annotations

import csv
import json
from pathlib import Path

import click

from .cluster import ClusteringReport
from .model import Theme, export_css
from .pipeline import PipelineConfig, PipelineError, run_pipeline
from .pipeline.convergence import IterationMetrics, iteration_metrics
from .service import DataStore, ServiceError, SessionManager, create_app
from .simulate import PopulationSpec, SimulatedSession, default_population_spec
from .stats import (
    CohortBounds,
    ReadingMeasurement,
    composite_score,
    markdown_table,
    measurement_speed,
    performance_table,
)


@click.group()
def main() -> None:
    """Iterative generation and evaluation of reading themes."""


_data_option = click.option(
    "--data",
    "data_root",
    required=True,
    envvar="THEMELOOP_DATA",
    type=click.Path(path_type=Path),
    help="Store directory (or $THEMELOOP_DATA).",
)


@main.command()
@_data_option
@click.option("--iterations", default=4, show_default=True, type=int)
@click.option("--participants", default=90, show_default=True, type=int)
@click.option("--seed", default=0, show_default=True, type=int)
@click.option(
    "--population",
    "population_path",
    type=click.Path(exists=True, path_type=Path),
    help="Population spec JSON (default: the built-in two-group cohort).",
)
@click.option(
    "--model-policy",
    type=click.Choice(["reuse", "retrain"]),
    default="reuse",
    show_default=True,
)
@click.option("--k-max", default=10, show_default=True, type=int)
@click.option("--train-crops", default=10, show_default=True, type=int)
@click.option("--embed-crops", default=8, show_default=True, type=int)
@click.option("--epochs", default=2, show_default=True, type=int)
def simulate(
    data_root: Path,
    iterations: int,
    participants: int,
    seed: int,
    population_path: Path | None,
    model_policy: str,
    k_max: int,
    train_crops: int,
    embed_crops: int,
    epochs: int,
) -> None:
    """Run the full simulated loop headless and persist every iteration."""
    try:
        population = (
            PopulationSpec.from_dict(json.loads(population_path.read_text()))
            if population_path
            else default_population_spec()
        )
        config = PipelineConfig(
            master_seed=seed,
            iterations=iterations,
            participants_per_iteration=participants,
            population=population,
            model_policy=model_policy,
            k_max=k_max,
            train_crops_per_format=train_crops,
            embed_crops_per_format=embed_crops,
            epochs=epochs,
        )
        result = run_pipeline(config, data_root)
    except (PipelineError, ValueError, KeyError, json.JSONDecodeError) as exc:
        raise click.ClickException(str(exc)) from exc
    for m in result.convergence.iterations:
        click.echo(
            f"R{m.iteration}: sessions={m.n_sessions} clusters={m.cluster_count} "
            f"silhouette={m.silhouette:.3f} mean_abs_delta_steps={m.mean_delta_steps:.2f} "
            f"font_keep={m.font_keep_rate:.2f}"
        )
    click.echo(f"wrote {data_root}")


@main.command()
@_data_option
@click.option("--iteration", "n", required=True, type=int)
def cluster(data_root: Path, n: int) -> None:
    """Cluster iteration N's closed sessions and emit the next themes."""
    store = DataStore(data_root)
    if not store.config_path.exists():
        raise click.ClickException(f"{data_root} has no config.json")
    try:
        config = PipelineConfig.from_dict(store.read_config())
        manager = SessionManager(store, config)
        result = manager.run_cluster(n)
    except (ServiceError, ValueError, KeyError) as exc:
        message = exc.message if isinstance(exc, ServiceError) else str(exc)
        raise click.ClickException(message) from exc
    clustering = result["clustering"]
    click.echo(
        f"iteration {n}: k={clustering['chosen_k']} "
        f"silhouette={clustering['silhouette']:.3f}"
    )
    for theme in result["next_themes"]:
        click.echo(f"  {theme['theme_id']}")


@main.command()
@_data_option
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True, type=int)
@click.option(
    "--admin-token",
    envvar="THEMELOOP_ADMIN_TOKEN",
    default=None,
    help="Static token for the /iterations endpoints (or $THEMELOOP_ADMIN_TOKEN).",
)
def serve(data_root: Path, host: str, port: int, admin_token: str | None) -> None:
    """Serve the session/trial HTTP API over a store directory."""
    import uvicorn

    try:
        app = create_app(data_root, admin_token=admin_token)
    except ValueError as exc:
        raise click.ClickException(str(exc)) from exc
    uvicorn.run(app, host=host, port=port)


def _resolve_iteration(store: DataStore, spec: str) -> int:
    with_themes = [n for n in store.list_iterations() if store.themes_path(n).exists()]
    if spec == "last":
        if not with_themes:
            raise click.ClickException("store has no iterations with themes")
        return with_themes[-1]
    try:
        n = int(spec)
    except ValueError:
        raise click.ClickException(
            f"--iteration must be an integer or 'last', got {spec!r}"
        ) from None
    if n not in with_themes:
        raise click.ClickException(f"iteration {n} has no themes.json")
    return n


@main.command("export-css")
@_data_option
@click.option("--iteration", "iteration_spec", default="last", show_default=True)
@click.option(
    "--output",
    type=click.Path(path_type=Path),
    default=None,
    help="Write to a file instead of stdout.",
)
def export_css_command(
    data_root: Path, iteration_spec: str, output: Path | None
) -> None:
    """Write one CSS block per theme of an iteration."""
    store = DataStore(data_root)
    n = _resolve_iteration(store, iteration_spec)
    try:
        themes = [Theme.from_dict(t) for t in store.read_themes(n)]
        css = export_css(themes)
    except (ValueError, KeyError) as exc:
        raise click.ClickException(f"iteration {n}: {exc}") from exc
    if output is None:
        click.echo(css, nl=False)
    else:
        output.write_text(css, encoding="utf-8")
        click.echo(f"wrote {len(themes)} theme blocks to {output}")


@main.command()
@_data_option
@click.option(
    "--output",
    type=click.Path(path_type=Path),
    default=None,
    help="Write to a file instead of stdout.",
)
@click.option(
    "--by-group/--global",
    "by_group",
    default=False,
    show_default=True,
    help="Split the reading-performance table by dyslexia group.",
)
@click.option(
    "--csv",
    "csv_path",
    type=click.Path(path_type=Path),
    default=None,
    help="Also write per-trial results as CSV.",
)
def report(
    data_root: Path, output: Path | None, by_group: bool, csv_path: Path | None
) -> None:
    """Summarize a store: convergence trajectory and reading performance."""
    store = DataStore(data_root)
    sections = ["# Pipeline report", ""]

    metrics: list[IterationMetrics] = []
    participants: dict[str, object] = {}
    for n in store.list_iterations():
        records = (
            store.read_sessions(n) if store.sessions_path(n).exists() else []
        )
        sessions = [SimulatedSession.from_dict(r) for r in records]
        for s in sessions:
            participants[s.participant.participant_id] = s.participant
        if sessions and store.clustering_path(n).exists():
            clustering = ClusteringReport.from_dict(store.read_clustering(n))
            metrics.append(iteration_metrics(sessions, clustering))
    if metrics:
        sections += [
            "## Convergence",
            "",
            markdown_table(
                [
                    [
                        f"R{m.iteration}",
                        str(m.n_sessions),
                        str(m.cluster_count),
                        f"{m.silhouette:.3f}",
                        f"{m.mean_delta_steps:.2f}",
                        f"{m.mean_adjust_duration_ms:.0f}",
                        f"{m.font_keep_rate:.2f}",
                    ]
                    for m in metrics
                ],
                header=[
                    "iteration",
                    "sessions",
                    "clusters",
                    "silhouette",
                    "mean abs delta (slider steps)",
                    "refinement (ms)",
                    "font kept",
                ],
            ),
        ]

    measurements: list[ReadingMeasurement] = []
    for n in store.list_iterations():
        if store.trials_path(n).exists():
            measurements += [
                ReadingMeasurement.from_dict(r) for r in store.read_trials(n)
            ]
    if measurements:
        sections += [
            "## Reading performance",
            "",
            performance_table(
                measurements, participants=participants if by_group else None
            ),
        ]

    if not metrics and not measurements:
        raise click.ClickException(f"{data_root} has no reportable data")
    if csv_path is not None:
        if not measurements:
            raise click.ClickException(f"{data_root} has no trial results for --csv")
        _write_trials_csv(csv_path, measurements)
        click.echo(f"wrote {len(measurements)} trial rows to {csv_path}")
    text = "\n".join(sections)
    if output is None:
        click.echo(text, nl=False)
    else:
        output.write_text(text, encoding="utf-8")
        click.echo(f"wrote {output}")


def _write_trials_csv(path: Path, measurements: list[ReadingMeasurement]) -> None:
    bounds = CohortBounds.from_measurements(measurements)
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["participant", "theme", "comfort", "comprehension", "mean_wpm", "composite"]
        )
        for m in measurements:
            writer.writerow(
                [
                    m.participant_id,
                    m.theme_id,
                    m.comfort,
                    f"{m.comprehension:.4f}",
                    f"{measurement_speed(m):.2f}",
                    f"{composite_score(m, bounds):.4f}",
                ]
            )


if __name__ == "__main__":
    main()
