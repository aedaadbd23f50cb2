"""HTTP wiring: JSON endpoints over the session and trial managers.

Every error body has the shape ``{"code", "message", "detail"}``.  The
``/iterations`` family mutates global pipeline state and requires the
static admin token (``X-Admin-Token`` header); everything else is open.
The data root comes from the ``THEMELOOP_DATA`` environment variable when
not passed explicitly, the admin token from ``THEMELOOP_ADMIN_TOKEN``.
"""
from __future__ import annotations

import os
from typing import Any, Callable

from fastapi import FastAPI, Header, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel, ConfigDict

from ..pipeline import PipelineConfig
from .sessions import ServiceError, SessionManager
from .store import DataStore, StoreError
from .trials import TrialManager

DATA_ROOT_ENV = "THEMELOOP_DATA"
ADMIN_TOKEN_ENV = "THEMELOOP_ADMIN_TOKEN"


class ParticipantBody(BaseModel):
    model_config = ConfigDict(extra="forbid")

    participant_id: str
    age_years: int
    dyslexia_score: float = 0.0
    dyslexia: bool | None = None


class RatingBody(BaseModel):
    model_config = ConfigDict(extra="forbid")

    theme_id: str
    value: str


class FavoriteBody(BaseModel):
    model_config = ConfigDict(extra="forbid")

    theme_id: str


class PhaseBody(BaseModel):
    model_config = ConfigDict(extra="forbid")

    phase: str


class RefinementsBody(BaseModel):
    model_config = ConfigDict(extra="forbid")

    events: list[dict[str, Any]]


class FinalBody(BaseModel):
    model_config = ConfigDict(extra="forbid")

    final_settings: dict[str, Any]


class DesignerThemesBody(BaseModel):
    model_config = ConfigDict(extra="forbid")

    themes: list[dict[str, Any]]


class TrialBody(BaseModel):
    model_config = ConfigDict(extra="forbid")

    participant_id: str
    iteration: int | None = None


class KeypressBody(BaseModel):
    model_config = ConfigDict(extra="forbid")

    client_t_ms: float | None = None


class AnswersBody(BaseModel):
    model_config = ConfigDict(extra="forbid")

    answers: list[int]


class ComfortBody(BaseModel):
    model_config = ConfigDict(extra="forbid")

    comfort: int


def create_app(
    data_root: str | os.PathLike | None = None,
    *,
    config: PipelineConfig | None = None,
    admin_token: str | None = None,
    clock: Callable[[], float] | None = None,
) -> FastAPI:
    """Build the service over ``data_root`` (default: $THEMELOOP_DATA)."""
    root = data_root or os.environ.get(DATA_ROOT_ENV)
    if not root:
        raise ValueError(
            f"no data root: pass data_root or set ${DATA_ROOT_ENV}"
        )
    token = admin_token if admin_token is not None else os.environ.get(ADMIN_TOKEN_ENV)

    store = DataStore(root)
    if store.config_path.exists():
        stored = PipelineConfig.from_dict(store.read_config())
        if config is not None and config != stored:
            raise ValueError(
                "store already holds a different pipeline config; "
                "use a fresh data root or drop the config argument"
            )
        config = stored
    else:
        config = config or PipelineConfig()
        store.write_config(config.as_dict())

    sessions = SessionManager(store, config, clock=clock)
    trials = TrialManager(
        store,
        master_seed=config.master_seed,
        clock=clock,
        open_iteration=lambda: sessions.open_iteration_number,
    )

    app = FastAPI(title="themeloop", version="0.1.0")
    app.state.store = store
    app.state.sessions = sessions
    app.state.trials = trials

    # -- error shape --------------------------------------------------------

    @app.exception_handler(ServiceError)
    def handle_service_error(request: Request, exc: ServiceError) -> JSONResponse:
        return JSONResponse(status_code=exc.status_code, content=exc.payload())

    @app.exception_handler(RequestValidationError)
    def handle_validation_error(
        request: Request, exc: RequestValidationError
    ) -> JSONResponse:
        return JSONResponse(
            status_code=422,
            content={
                "code": "invalid_request",
                "message": "request body failed validation",
                "detail": exc.errors(),
            },
        )

    @app.exception_handler(StoreError)
    def handle_store_error(request: Request, exc: StoreError) -> JSONResponse:
        return JSONResponse(
            status_code=500,
            content={"code": "store_error", "message": str(exc), "detail": None},
        )

    def require_admin(provided: str | None) -> None:
        if token is None:
            raise ServiceError(
                401,
                "admin_locked",
                f"admin endpoints are disabled: set ${ADMIN_TOKEN_ENV}",
            )
        if provided != token:
            raise ServiceError(401, "unauthorized", "bad or missing admin token")

    # -- sessions -------------------------------------------------------------

    @app.post("/sessions")
    def create_session(body: ParticipantBody) -> dict[str, Any]:
        return sessions.create_session(body.model_dump())

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str) -> dict[str, Any]:
        return sessions.get_session(session_id)

    @app.post("/sessions/{session_id}/ratings")
    def post_rating(session_id: str, body: RatingBody) -> dict[str, Any]:
        return sessions.post_rating(session_id, body.theme_id, body.value)

    @app.post("/sessions/{session_id}/favorite")
    def post_favorite(session_id: str, body: FavoriteBody) -> dict[str, Any]:
        return sessions.post_favorite(session_id, body.theme_id)

    @app.post("/sessions/{session_id}/phase")
    def advance_phase(session_id: str, body: PhaseBody) -> dict[str, Any]:
        return sessions.advance_phase(session_id, body.phase)

    @app.post("/sessions/{session_id}/refinements")
    def post_refinements(session_id: str, body: RefinementsBody) -> dict[str, Any]:
        return sessions.post_refinements(session_id, body.events)

    @app.post("/sessions/{session_id}/final")
    def post_final(session_id: str, body: FinalBody) -> dict[str, Any]:
        return sessions.post_final(session_id, body.final_settings)

    # -- iterations (admin) ---------------------------------------------------

    @app.post("/iterations/{n}/designer-themes")
    def designer_themes(
        n: int,
        body: DesignerThemesBody,
        x_admin_token: str | None = Header(default=None),
    ) -> dict[str, Any]:
        require_admin(x_admin_token)
        return sessions.post_designer_themes(n, body.themes)

    @app.post("/iterations/{n}/cluster")
    def cluster(
        n: int, x_admin_token: str | None = Header(default=None)
    ) -> dict[str, Any]:
        require_admin(x_admin_token)
        return sessions.run_cluster(n)

    @app.post("/iterations/{n}/open")
    def open_iteration(
        n: int, x_admin_token: str | None = Header(default=None)
    ) -> dict[str, Any]:
        require_admin(x_admin_token)
        return sessions.open_iteration(n)

    @app.get("/iterations/current")
    def current_iteration() -> dict[str, Any]:
        return {"iteration": sessions.open_iteration_number}

    @app.get("/iterations/{n}/themes")
    def iteration_themes(n: int) -> list[dict[str, Any]]:
        return sessions.iteration_themes(n)

    # -- trials -----------------------------------------------------------------

    @app.post("/trials")
    def create_trial(body: TrialBody) -> dict[str, Any]:
        return trials.create_trial(body.participant_id, body.iteration)

    @app.get("/trials/{trial_id}")
    def get_trial(trial_id: str) -> dict[str, Any]:
        return trials.get_trial(trial_id)

    @app.get("/trials/{trial_id}/screen")
    def serve_screen(trial_id: str) -> dict[str, Any]:
        return trials.serve_screen(trial_id)

    @app.post("/trials/{trial_id}/keypress")
    def keypress(trial_id: str, body: KeypressBody | None = None) -> dict[str, Any]:
        client_t = body.client_t_ms if body is not None else None
        return trials.record_keypress(trial_id, client_t)

    @app.post("/trials/{trial_id}/answers")
    def answers(trial_id: str, body: AnswersBody) -> dict[str, Any]:
        return trials.record_answers(trial_id, body.answers)

    @app.post("/trials/{trial_id}/comfort")
    def comfort(trial_id: str, body: ComfortBody) -> dict[str, Any]:
        return trials.record_comfort(trial_id, body.comfort)

    return app
