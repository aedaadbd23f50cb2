"""Session lifecycle: creation, review ratings, refinement, and close-out.

A session walks forward through the phases

    primary_review -> exploration -> secondary_review -> refinement -> done

(iteration 0 starts directly in ``refinement``).  Every accepted mutation is
appended to the iteration's ``events.jsonl`` before in-memory state changes,
so a restarted process rebuilds exactly the sessions it had acknowledged.
Closing a session writes the complete record to ``sessions.jsonl`` in the
same schema the simulator emits, which is what stage 2 consumes.
"""
from __future__ import annotations

import threading
import time
from dataclasses import dataclass, field
from typing import Any, Callable, Mapping, Sequence

from ..model import (
    LogCorruptionError,
    Participant,
    Provenance,
    RatingPhase,
    RatingRecord,
    RatingValue,
    RefinementEvent,
    RefinementLog,
    SETTING_KEYS,
    TextSettings,
    Theme,
    apply_events,
    parse_font,
    theme_to_css,
)
from ..pipeline import (
    PipelineConfig,
    PipelineError,
    assemble_iteration_themes,
    init_r0,
    load_validation_themes,
    run_stage2,
)
from ..learn import load_model, save_model
from ..simulate import derive_seed
from .store import DataStore, append_jsonl, read_jsonl

PHASE_ORDER = (
    "primary_review",
    "exploration",
    "secondary_review",
    "refinement",
    "done",
)
REVIEW_PHASES = ("primary_review", "secondary_review")


class ServiceError(Exception):
    """A request the service refuses; carries the HTTP mapping."""

    def __init__(self, status_code: int, code: str, message: str, detail: Any = None):
        super().__init__(message)
        self.status_code = status_code
        self.code = code
        self.message = message
        self.detail = detail

    def payload(self) -> dict[str, Any]:
        return {"code": self.code, "message": self.message, "detail": self.detail}


def _wall_ms() -> float:
    return time.time() * 1000.0


@dataclass
class LiveSession:
    """Mutable in-process state of one session."""

    session_id: str
    participant: Participant
    iteration: int
    themes: dict[str, Theme]
    order: list[str]
    phase: str
    created_at_ms: float
    ratings: dict[str, dict[str, str]] = field(
        default_factory=lambda: {p: {} for p in REVIEW_PHASES}
    )
    favorites: dict[str, str] = field(default_factory=dict)
    exploration_visited: bool = False
    start_theme_id: str | None = None
    start_settings: TextSettings | None = None
    current_settings: TextSettings | None = None
    events: list[RefinementEvent] = field(default_factory=list)
    refinement_entered_at_ms: float | None = None

    def public_state(self) -> dict[str, Any]:
        return {
            "session_id": self.session_id,
            "participant_id": self.participant.participant_id,
            "iteration": self.iteration,
            "phase": self.phase,
            "created_at_ms": self.created_at_ms,
            "assigned_theme_ids": list(self.order),
            "ratings": {p: dict(v) for p, v in self.ratings.items()},
            "favorites": dict(self.favorites),
            "exploration_visited": self.exploration_visited,
            "n_refinement_events": len(self.events),
        }


def _theme_payload(theme: Theme) -> dict[str, Any]:
    payload = theme.as_dict()
    payload["css"] = theme_to_css(theme)
    return payload


class SessionManager:
    """Owns sessions, iteration sequencing, and stage-2 execution."""

    def __init__(
        self,
        store: DataStore,
        config: PipelineConfig,
        *,
        clock: Callable[[], float] | None = None,
    ):
        self.store = store
        self.config = config
        self.clock = clock or _wall_ms
        self._global = threading.RLock()
        self._io = threading.Lock()
        self._session_locks: dict[str, threading.Lock] = {}
        self._sessions: dict[str, LiveSession] = {}
        self._participants: set[str] = set()
        self._open_iteration: int | None = None
        self._validation_pool = load_validation_themes()
        self._recover()

    # -- recovery ---------------------------------------------------------

    def _recover(self) -> None:
        for record in read_jsonl(self.store.service_log_path):
            if record.get("kind") == "iteration_opened":
                n = int(record["iteration"])
                if self._open_iteration is None or n > self._open_iteration:
                    self._open_iteration = n
        for n in self.store.list_iterations():
            committed = {r["session_id"] for r in self.store.read_sessions(n)}
            for record in self.store.read_events(n):
                self._replay(record, committed_sessions=committed)

    def _replay(
        self,
        record: Mapping[str, Any],
        committed_sessions: set[str] = frozenset(),
    ) -> None:
        kind = record.get("kind")
        if kind == "session_created":
            live = LiveSession(
                session_id=str(record["session_id"]),
                participant=Participant.from_dict(record["participant"]),
                iteration=int(record["iteration"]),
                themes={
                    t["theme_id"]: Theme.from_dict(t) for t in record["themes"]
                },
                order=[t["theme_id"] for t in record["themes"]],
                phase=str(record["phase"]),
                created_at_ms=float(record["created_at_ms"]),
            )
            if live.phase == "refinement":
                self._enter_refinement(live, live.order[0], float(record["created_at_ms"]))
            self._sessions[live.session_id] = live
            self._session_locks[live.session_id] = threading.Lock()
            self._participants.add(live.participant.participant_id)
            return
        live = self._sessions.get(str(record.get("session_id")))
        if live is None:
            return  # the session_created record was the torn tail; orphan mutations
        if kind == "rating":
            live.ratings[str(record["phase"])][str(record["theme_id"])] = str(
                record["value"]
            )
        elif kind == "favorite":
            live.favorites[str(record["phase"])] = str(record["theme_id"])
        elif kind == "phase_advanced":
            live.phase = str(record["phase"])
            if live.phase in ("secondary_review", "refinement", "done"):
                live.exploration_visited = True
            if live.phase == "refinement":
                self._enter_refinement(
                    live,
                    live.favorites["secondary_review"],
                    float(record["at_ms"]),
                )
        elif kind == "refinement_events":
            events = [RefinementEvent.from_dict(e) for e in record["events"]]
            live.current_settings = apply_events(live.current_settings, events)
            live.events.extend(events)
        elif kind == "final":
            live.phase = "done"
            # The durable close-out is two appends (final event, then the
            # session snapshot); a crash between them is repaired here.
            if live.session_id not in committed_sessions:
                self.store.append_session(live.iteration, record["snapshot"])

    def _enter_refinement(
        self, live: LiveSession, theme_id: str, at_ms: float
    ) -> None:
        live.start_theme_id = theme_id
        live.start_settings = live.themes[theme_id].settings
        live.current_settings = live.start_settings
        live.refinement_entered_at_ms = at_ms

    # -- helpers ----------------------------------------------------------

    def _append_event(self, iteration: int, record: Mapping[str, Any]) -> None:
        with self._io:
            self.store.append_event(iteration, record)

    def _get(self, session_id: str) -> tuple[LiveSession, threading.Lock]:
        with self._global:
            live = self._sessions.get(session_id)
            if live is None:
                raise ServiceError(
                    404, "unknown_session", f"no session {session_id!r}"
                )
            return live, self._session_locks[session_id]

    @staticmethod
    def _require_phase(live: LiveSession, allowed: Sequence[str]) -> None:
        if live.phase not in allowed:
            raise ServiceError(
                422,
                "phase_violation",
                f"operation not allowed in phase {live.phase!r}",
                {"phase": live.phase, "allowed": list(allowed)},
            )

    def _require_theme(self, live: LiveSession, theme_id: str) -> Theme:
        theme = live.themes.get(theme_id)
        if theme is None:
            raise ServiceError(
                404,
                "unknown_theme",
                f"theme {theme_id!r} is not assigned to this session",
                {"assigned": list(live.order)},
            )
        return theme

    # -- session endpoints --------------------------------------------------

    def create_session(self, participant_payload: Mapping[str, Any]) -> dict[str, Any]:
        try:
            payload = dict(participant_payload)
            if "dyslexia" in payload and payload["dyslexia"] is not None:
                participant = Participant.from_dict(payload)
            else:
                participant = Participant.from_score(
                    str(payload["participant_id"]),
                    int(payload["age_years"]),
                    float(payload.get("dyslexia_score", 0.0)),
                )
        except (KeyError, TypeError, ValueError) as exc:
            raise ServiceError(
                422, "invalid_participant", f"bad participant record: {exc}"
            ) from exc
        with self._global:
            if self._open_iteration is None:
                raise ServiceError(
                    409, "no_open_iteration", "open an iteration before creating sessions"
                )
            n = self._open_iteration
            pid = participant.participant_id
            if pid in self._participants:
                raise ServiceError(
                    409,
                    "duplicate_participant",
                    f"participant {pid!r} already has a session",
                )
            session_id = f"sess-r{n}-{pid}"
            now = self.clock()
            if n == 0:
                shown = [init_r0(pid, self.config.master_seed)]
                phase = "refinement"
                self._merge_pool_themes(0, shown)
            else:
                pool = [Theme.from_dict(t) for t in self.store.read_themes(n)]
                reps = [
                    t
                    for t in pool
                    if t.provenance is Provenance.CLUSTER_REPRESENTATIVE
                ]
                designers = [
                    t for t in pool if t.provenance is Provenance.DESIGNER
                ]
                shown = list(
                    assemble_iteration_themes(
                        reps,
                        designers,
                        self._validation_pool,
                        derive_seed(self.config.master_seed, f"assign-r{n}-{pid}"),
                    )
                )
                phase = "primary_review"
            live = LiveSession(
                session_id=session_id,
                participant=participant,
                iteration=n,
                themes={t.theme_id: t for t in shown},
                order=[t.theme_id for t in shown],
                phase=phase,
                created_at_ms=now,
            )
            if phase == "refinement":
                self._enter_refinement(live, live.order[0], now)
            self._append_event(
                n,
                {
                    "kind": "session_created",
                    "session_id": session_id,
                    "participant": participant.as_dict(),
                    "iteration": n,
                    "themes": [t.as_dict() for t in shown],
                    "phase": phase,
                    "created_at_ms": now,
                },
            )
            self._sessions[session_id] = live
            self._session_locks[session_id] = threading.Lock()
            self._participants.add(pid)
        return {
            "session_id": session_id,
            "iteration": n,
            "phase": phase,
            "themes": [_theme_payload(t) for t in shown],
        }

    def get_session(self, session_id: str) -> dict[str, Any]:
        live, _ = self._get(session_id)
        return live.public_state()

    def post_rating(
        self, session_id: str, theme_id: str, value: str
    ) -> dict[str, Any]:
        live, lock = self._get(session_id)
        with lock:
            self._require_phase(live, REVIEW_PHASES)
            self._require_theme(live, theme_id)
            try:
                rating = RatingValue(value)
            except ValueError:
                raise ServiceError(
                    422,
                    "invalid_rating",
                    f"rating must be one of good/unsure/bad, got {value!r}",
                ) from None
            self._append_event(
                live.iteration,
                {
                    "kind": "rating",
                    "session_id": session_id,
                    "theme_id": theme_id,
                    "value": rating.value,
                    "phase": live.phase,
                },
            )
            live.ratings[live.phase][theme_id] = rating.value
            remaining = [t for t in live.order if t not in live.ratings[live.phase]]
        return {"phase": live.phase, "rated": theme_id, "remaining": remaining}

    def post_favorite(self, session_id: str, theme_id: str) -> dict[str, Any]:
        live, lock = self._get(session_id)
        with lock:
            self._require_phase(live, REVIEW_PHASES)
            self._require_theme(live, theme_id)
            missing = [t for t in live.order if t not in live.ratings[live.phase]]
            if missing:
                raise ServiceError(
                    422,
                    "incomplete_ratings",
                    "every assigned theme must be rated before picking a favorite",
                    {"missing": missing},
                )
            if live.phase in live.favorites:
                raise ServiceError(
                    422,
                    "favorite_exists",
                    f"a favorite was already recorded for {live.phase}",
                    {"favorite": live.favorites[live.phase]},
                )
            self._append_event(
                live.iteration,
                {
                    "kind": "favorite",
                    "session_id": session_id,
                    "theme_id": theme_id,
                    "phase": live.phase,
                },
            )
            live.favorites[live.phase] = theme_id
        return {"phase": live.phase, "favorite": theme_id}

    def advance_phase(self, session_id: str, target: str) -> dict[str, Any]:
        live, lock = self._get(session_id)
        with lock:
            if target not in PHASE_ORDER:
                raise ServiceError(
                    422, "unknown_phase", f"no such phase: {target!r}"
                )
            if target == "done":
                raise ServiceError(
                    422,
                    "phase_violation",
                    "done is reached by posting the final settings, not by advancing",
                )
            current_index = PHASE_ORDER.index(live.phase)
            if PHASE_ORDER.index(target) != current_index + 1:
                raise ServiceError(
                    422,
                    "phase_violation",
                    f"cannot advance from {live.phase!r} to {target!r}; "
                    "phases move forward one step at a time",
                    {"phase": live.phase},
                )
            if target == "exploration" and "primary_review" not in live.favorites:
                raise ServiceError(
                    422,
                    "favorite_required",
                    "pick a primary-review favorite before exploring",
                )
            if target == "refinement" and "secondary_review" not in live.favorites:
                raise ServiceError(
                    422,
                    "favorite_required",
                    "pick a secondary-review favorite before refining",
                )
            now = self.clock()
            self._append_event(
                live.iteration,
                {
                    "kind": "phase_advanced",
                    "session_id": session_id,
                    "phase": target,
                    "at_ms": now,
                },
            )
            live.phase = target
            if target in ("secondary_review", "refinement"):
                live.exploration_visited = True
            if target == "refinement":
                self._enter_refinement(
                    live, live.favorites["secondary_review"], now
                )
            payload = {"phase": live.phase}
            if target == "refinement":
                payload["start_theme_id"] = live.start_theme_id
                payload["start_settings"] = live.start_settings.as_dict()
        return payload

    def post_refinements(
        self, session_id: str, events_payload: Sequence[Mapping[str, Any]]
    ) -> dict[str, Any]:
        live, lock = self._get(session_id)
        with lock:
            self._require_phase(live, ("refinement",))
            try:
                events = [RefinementEvent.from_dict(e) for e in events_payload]
            except (KeyError, TypeError, ValueError) as exc:
                raise ServiceError(
                    422, "invalid_event", f"bad refinement event: {exc}"
                ) from exc
            if events and live.events and events[0].t_ms < live.events[-1].t_ms:
                raise ServiceError(
                    422,
                    "log_corruption",
                    f"event at t_ms={events[0].t_ms} precedes the last recorded "
                    f"event at t_ms={live.events[-1].t_ms}",
                )
            try:
                new_settings = apply_events(live.current_settings, events)
            except LogCorruptionError as exc:
                raise ServiceError(
                    422,
                    "log_corruption",
                    str(exc),
                    {"event_index": exc.event_index},
                ) from exc
            self._append_event(
                live.iteration,
                {
                    "kind": "refinement_events",
                    "session_id": session_id,
                    "events": [e.as_dict() for e in events],
                },
            )
            live.events.extend(events)
            live.current_settings = new_settings
        return {
            "accepted": len(events),
            "total_events": len(live.events),
            "current_settings": new_settings.as_dict(),
        }

    def post_final(
        self, session_id: str, final_payload: Mapping[str, Any]
    ) -> dict[str, Any]:
        live, lock = self._get(session_id)
        with lock:
            self._require_phase(live, ("refinement",))
            try:
                posted = TextSettings.from_dict(final_payload)
            except (KeyError, TypeError, ValueError) as exc:
                raise ServiceError(
                    422, "invalid_settings", f"bad final settings: {exc}"
                ) from exc
            reconstructed = live.current_settings
            divergent = self._first_divergent_key(reconstructed, posted)
            if divergent is not None:
                key, expected, got = divergent
                raise ServiceError(
                    422,
                    "reconstruction_mismatch",
                    f"replaying the event log gives {key}={expected!r}, "
                    f"but the client posted {key}={got!r}",
                    {"key": key, "replayed": expected, "posted": got},
                )
            last_t = live.events[-1].t_ms if live.events else 0
            elapsed = max(0.0, self.clock() - live.refinement_entered_at_ms)
            duration = max(int(round(elapsed)), last_t)
            log = RefinementLog(
                session_id=session_id,
                participant_id=live.participant.participant_id,
                start_theme_id=live.start_theme_id,
                start_settings=live.start_settings,
                events=tuple(live.events),
                final_settings=reconstructed,
                adjust_duration_ms=duration,
            )
            log.validate()
            snapshot = self._snapshot(live, log)
            self._append_event(
                live.iteration,
                {"kind": "final", "session_id": session_id, "snapshot": snapshot},
            )
            with self._io:
                self.store.append_session(live.iteration, snapshot)
            live.phase = "done"
        return snapshot

    @staticmethod
    def _first_divergent_key(
        reconstructed: TextSettings, posted: TextSettings
    ) -> tuple[str, Any, Any] | None:
        for key in SETTING_KEYS:
            if key == "font":
                a, b = reconstructed.font.value, posted.font.value
                if a != b:
                    return key, a, b
                continue
            a, b = getattr(reconstructed, key), getattr(posted, key)
            if abs(a - b) > 1e-9:
                return key, a, b
        return None

    def _snapshot(self, live: LiveSession, log: RefinementLog) -> dict[str, Any]:
        ratings: list[dict[str, Any]] = []
        for phase_name, phase in (
            ("primary_review", RatingPhase.PRIMARY),
            ("secondary_review", RatingPhase.SECONDARY),
        ):
            for theme_id in live.order:
                value = live.ratings[phase_name].get(theme_id)
                if value is None:
                    continue
                ratings.append(
                    RatingRecord(
                        session_id=live.session_id,
                        participant_id=live.participant.participant_id,
                        theme_id=theme_id,
                        value=RatingValue(value),
                        phase=phase,
                    ).as_dict()
                )
        favorite = live.favorites.get("secondary_review", live.start_theme_id)
        return {
            "session_id": live.session_id,
            "participant": live.participant.as_dict(),
            "iteration": live.iteration,
            "assigned_theme_ids": list(live.order),
            "phase": "done",
            "exploration_visited": live.exploration_visited,
            "ratings": ratings,
            "favorite_theme_id": favorite,
            "log": log.as_dict(),
        }

    # -- iteration endpoints -------------------------------------------------

    def post_designer_themes(
        self, iteration: int, themes_payload: Sequence[Mapping[str, Any]]
    ) -> dict[str, Any]:
        with self._global:
            if iteration < 1:
                raise ServiceError(
                    422,
                    "invalid_iteration",
                    "designer themes join the pool from iteration 1 onward",
                )
            if self._open_iteration is not None and iteration <= self._open_iteration:
                raise ServiceError(
                    409,
                    "iteration_open",
                    f"iteration {iteration} already opened; its theme pool is frozen",
                )
            existing = []
            if self.store.themes_path(iteration).exists():
                existing = [
                    Theme.from_dict(t) for t in self.store.read_themes(iteration)
                ]
            n_existing_designers = sum(
                1 for t in existing if t.provenance is Provenance.DESIGNER
            )
            new_themes = []
            for i, payload in enumerate(themes_payload):
                theme_id = str(
                    payload.get(
                        "theme_id", f"des-r{iteration}-{n_existing_designers + i}"
                    )
                )
                try:
                    raw = dict(payload["settings"])
                    if "font_size_px" in raw:
                        settings = TextSettings.from_dict(raw)
                    else:
                        # designers pick font and spacings; the size comes
                        # from x-height normalization
                        settings = TextSettings.normalized(
                            parse_font(str(raw["font"])),
                            float(raw["character_spacing_em"]),
                            float(raw["word_spacing_em"]),
                            float(raw["line_height"]),
                        )
                except (KeyError, TypeError, ValueError) as exc:
                    raise ServiceError(
                        422,
                        "invalid_settings",
                        f"designer theme {theme_id!r}: {exc}",
                    ) from exc
                new_themes.append(
                    Theme(theme_id, settings, Provenance.DESIGNER, iteration)
                )
            combined = existing + new_themes
            if len({t.theme_id for t in combined}) != len(combined):
                raise ServiceError(
                    422, "duplicate_theme", "theme ids must be unique within an iteration"
                )
            with self._io:
                self.store.write_themes(iteration, [t.as_dict() for t in combined])
        return {
            "iteration": iteration,
            "added": [t.theme_id for t in new_themes],
            "pool_size": len(combined),
        }

    def _merge_pool_themes(self, iteration: int, themes: Sequence[Theme]) -> None:
        """Add ``themes`` to the iteration's persisted pool (caller holds the lock)."""
        existing = []
        if self.store.themes_path(iteration).exists():
            existing = self.store.read_themes(iteration)
        known = {t["theme_id"] for t in existing}
        merged = existing + [
            t.as_dict() for t in themes if t.theme_id not in known
        ]
        with self._io:
            self.store.write_themes(iteration, merged)

    def run_cluster(self, iteration: int) -> dict[str, Any]:
        with self._global:
            if self.store.clustering_path(iteration).exists():
                raise ServiceError(
                    409,
                    "already_clustered",
                    f"iteration {iteration} was already clustered",
                )
            records = self.store.read_sessions(iteration)
            if len(records) < 2:
                raise ServiceError(
                    409,
                    "insufficient_sessions",
                    f"clustering needs >= 2 closed sessions, found {len(records)}",
                )
            logs = [RefinementLog.from_dict(r["log"]) for r in records]
            participants = {
                r["participant"]["participant_id"]: Participant.from_dict(
                    r["participant"]
                )
                for r in records
            }
            model = None
            if self.config.model_policy == "reuse" and self.store.model_path.exists():
                model = load_model(self.store.model_path)
            try:
                report, rep_themes, model = run_stage2(
                    logs,
                    iteration=iteration,
                    config=self.config,
                    model=model,
                    participants_by_id=participants,
                )
            except PipelineError as exc:
                raise ServiceError(422, "cluster_failed", str(exc)) from exc
            if model is not None:
                with self._io:
                    save_model(model, self.store.model_path)
            with self._io:
                self.store.write_clustering(iteration, report.as_dict())
            self._merge_pool_themes(iteration + 1, rep_themes)
        return {
            "iteration": iteration,
            "clustering": report.as_dict(),
            "next_themes": [t.as_dict() for t in rep_themes],
        }

    def open_iteration(self, iteration: int) -> dict[str, Any]:
        with self._global:
            if self._open_iteration is not None and iteration <= self._open_iteration:
                raise ServiceError(
                    409,
                    "iteration_open",
                    f"iteration {self._open_iteration} is already open",
                )
            expected = 0 if self._open_iteration is None else self._open_iteration + 1
            if iteration != expected:
                raise ServiceError(
                    409,
                    "iteration_out_of_order",
                    f"the next iteration to open is {expected}, not {iteration}",
                )
            if iteration > 0:
                pool = (
                    self.store.read_themes(iteration)
                    if self.store.themes_path(iteration).exists()
                    else []
                )
                if not any(
                    t["provenance"] == Provenance.CLUSTER_REPRESENTATIVE.value
                    for t in pool
                ):
                    raise ServiceError(
                        409,
                        "iteration_not_ready",
                        f"cluster iteration {iteration - 1} before opening {iteration}",
                    )
            with self._io:
                append_jsonl(
                    self.store.service_log_path,
                    {
                        "kind": "iteration_opened",
                        "iteration": iteration,
                        "at_ms": self.clock(),
                    },
                )
            self._open_iteration = iteration
        return {"iteration": iteration}

    @property
    def open_iteration_number(self) -> int | None:
        return self._open_iteration

    def iteration_themes(self, iteration: int) -> list[dict[str, Any]]:
        if not self.store.themes_path(iteration).exists():
            raise ServiceError(
                404, "unknown_iteration", f"no themes stored for iteration {iteration}"
            )
        return [
            _theme_payload(Theme.from_dict(t))
            for t in self.store.read_themes(iteration)
        ]
