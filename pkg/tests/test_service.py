"""Store durability, the session phase machine, iteration sequencing, trials."""
from __future__ import annotations

import tempfile
from pathlib import Path

import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from themeloop.model import (
    Font,
    Provenance,
    TextSettings,
    Theme,
)
from themeloop.pipeline import PipelineConfig
from themeloop.render.passages import get_passage
from themeloop.service import (
    DataStore,
    PHASE_ORDER,
    ServiceError,
    SessionManager,
    StoreError,
    TrialManager,
    append_jsonl,
    create_app,
    load_question_bank,
    read_jsonl,
)
from themeloop.simulate import planted_modes_spec
from themeloop.simulate.population import DEFAULT_PLANTED_MODES


class ManualClock:
    """A clock the test advances by hand."""

    def __init__(self, t0: float = 0.0):
        self.t = t0

    def advance(self, ms: float) -> None:
        self.t += ms

    def __call__(self) -> float:
        return self.t


def participant(pid: str, **overrides):
    payload = {"participant_id": pid, "age_years": 30, "dyslexia_score": 0.2}
    payload.update(overrides)
    return payload


def rep_theme(i: int, iteration: int = 1) -> Theme:
    return Theme(
        f"rep-r{iteration}-c{i}",
        TextSettings.normalized(Font.ARIAL, 0.01 * i, 0.1 * i, 1.5 + 0.2 * i),
        Provenance.CLUSTER_REPRESENTATIVE,
        iteration,
    )


def designer_theme(i: int, iteration: int = 1) -> Theme:
    return Theme(
        f"des-r{iteration}-{i}",
        TextSettings.normalized(Font.GEORGIA, 0.02, 0.2, 2.0 + 0.1 * i),
        Provenance.DESIGNER,
        iteration,
    )


def store_with_r1_pool(root: Path, n_reps: int = 3, n_designers: int = 0) -> DataStore:
    """A store whose iteration 1 is open with a hand-written theme pool."""
    store = DataStore(root)
    themes = [rep_theme(i) for i in range(n_reps)] + [
        designer_theme(i) for i in range(n_designers)
    ]
    store.write_themes(1, [t.as_dict() for t in themes])
    for n in (0, 1):
        append_jsonl(
            store.service_log_path,
            {"kind": "iteration_opened", "iteration": n, "at_ms": 0.0},
        )
    return store


def manager_for(root: Path, **store_kwargs) -> SessionManager:
    store = store_with_r1_pool(root, **store_kwargs)
    return SessionManager(store, PipelineConfig(), clock=ManualClock())


# ---------------------------------------------------------------------------
# store durability
# ---------------------------------------------------------------------------


def test_jsonl_round_trip(tmp_path):
    path = tmp_path / "records.jsonl"
    records = [{"a": 1}, {"b": [1, 2]}, {"c": {"d": "e"}}]
    for r in records:
        append_jsonl(path, r)
    assert read_jsonl(path) == records


def test_torn_tail_is_dropped_then_healed(tmp_path):
    path = tmp_path / "records.jsonl"
    append_jsonl(path, {"n": 1})
    append_jsonl(path, {"n": 2})
    raw = path.read_bytes()
    path.write_bytes(raw[:-4])  # cut into the last record
    assert read_jsonl(path) == [{"n": 1}]
    with pytest.raises(StoreError):
        read_jsonl(path, tolerate_torn_tail=False)
    append_jsonl(path, {"n": 3})  # healing truncates the torn fragment
    assert read_jsonl(path) == [{"n": 1}, {"n": 3}]


def test_unterminated_tail_is_uncommitted_even_if_parseable(tmp_path):
    # a tail that parses but lacks its newline never got its commit mark:
    # reads and the next append must agree that it does not exist
    path = tmp_path / "records.jsonl"
    append_jsonl(path, {"n": 1})
    path.write_bytes(path.read_bytes() + b'{"n":2}')
    assert read_jsonl(path) == [{"n": 1}]
    append_jsonl(path, {"n": 3})
    assert read_jsonl(path) == [{"n": 1}, {"n": 3}]


def test_mid_file_corruption_raises(tmp_path):
    path = tmp_path / "records.jsonl"
    append_jsonl(path, {"n": 1})
    append_jsonl(path, {"n": 2})
    text = path.read_text().replace('{"n":1}', '{"n":oops')
    path.write_text(text)
    with pytest.raises(StoreError):
        read_jsonl(path)


# ---------------------------------------------------------------------------
# phase machine: happy path and refusals
# ---------------------------------------------------------------------------


def test_r1_walks_every_phase(tmp_path):
    manager = manager_for(tmp_path)
    created = manager.create_session(participant("p1"))
    sid = created["session_id"]
    ids = [t["theme_id"] for t in created["themes"]]
    assert created["phase"] == "primary_review"
    assert len(ids) == 4  # 3 reps + 1 validation
    assert sum(1 for t in ids if t.startswith("val-")) == 1

    for tid in ids:
        manager.post_rating(sid, tid, "unsure")
    manager.post_favorite(sid, ids[0])
    manager.advance_phase(sid, "exploration")
    manager.advance_phase(sid, "secondary_review")
    for tid in ids:
        manager.post_rating(sid, tid, "good")
    manager.post_favorite(sid, ids[2])
    entered = manager.advance_phase(sid, "refinement")
    assert entered["start_theme_id"] == ids[2]

    snapshot = manager.post_final(sid, entered["start_settings"])
    assert snapshot["phase"] == "done"
    assert snapshot["favorite_theme_id"] == ids[2]
    assert snapshot["exploration_visited"] is True
    assert len(snapshot["ratings"]) == 2 * len(ids)
    on_disk = manager.store.read_sessions(1)
    assert on_disk[-1] == snapshot


def test_favorite_needs_all_ratings(tmp_path):
    manager = manager_for(tmp_path)
    created = manager.create_session(participant("p1"))
    sid = created["session_id"]
    ids = [t["theme_id"] for t in created["themes"]]
    manager.post_rating(sid, ids[0], "good")
    with pytest.raises(ServiceError) as err:
        manager.post_favorite(sid, ids[0])
    assert err.value.status_code == 422
    assert err.value.code == "incomplete_ratings"
    assert set(err.value.detail["missing"]) == set(ids[1:])


def test_second_favorite_in_phase_rejected(tmp_path):
    manager = manager_for(tmp_path)
    created = manager.create_session(participant("p1"))
    sid = created["session_id"]
    ids = [t["theme_id"] for t in created["themes"]]
    for tid in ids:
        manager.post_rating(sid, tid, "bad")
    manager.post_favorite(sid, ids[0])
    with pytest.raises(ServiceError) as err:
        manager.post_favorite(sid, ids[1])
    assert err.value.code == "favorite_exists"


def test_unknown_theme_is_404(tmp_path):
    manager = manager_for(tmp_path)
    sid = manager.create_session(participant("p1"))["session_id"]
    with pytest.raises(ServiceError) as err:
        manager.post_rating(sid, "nope", "good")
    assert err.value.status_code == 404
    assert err.value.code == "unknown_theme"


def test_phase_skipping_rejected(tmp_path):
    manager = manager_for(tmp_path)
    sid = manager.create_session(participant("p1"))["session_id"]
    for target in ("secondary_review", "refinement", "done"):
        with pytest.raises(ServiceError) as err:
            manager.advance_phase(sid, target)
        assert err.value.status_code == 422


def test_rating_outside_review_phase_rejected(tmp_path):
    manager = manager_for(tmp_path)
    created = manager.create_session(participant("p1"))
    sid = created["session_id"]
    ids = [t["theme_id"] for t in created["themes"]]
    for tid in ids:
        manager.post_rating(sid, tid, "good")
    manager.post_favorite(sid, ids[0])
    manager.advance_phase(sid, "exploration")
    with pytest.raises(ServiceError) as err:
        manager.post_rating(sid, ids[0], "bad")
    assert err.value.code == "phase_violation"


def test_duplicate_participant_is_409(tmp_path):
    manager = manager_for(tmp_path)
    manager.create_session(participant("p1"))
    with pytest.raises(ServiceError) as err:
        manager.create_session(participant("p1"))
    assert err.value.status_code == 409
    assert err.value.code == "duplicate_participant"


def test_stale_old_value_is_log_corruption(tmp_path):
    manager = manager_for(tmp_path)
    created = manager.create_session(participant("p1"))
    sid = created["session_id"]
    ids = [t["theme_id"] for t in created["themes"]]
    for phase, fav in (("primary_review", ids[0]), ("secondary_review", ids[1])):
        for tid in ids:
            manager.post_rating(sid, tid, "good")
        manager.post_favorite(sid, fav)
        manager.advance_phase(
            sid, "exploration" if phase == "primary_review" else "refinement"
        )
        if phase == "primary_review":
            manager.advance_phase(sid, "secondary_review")
    start = manager.get_session(sid)
    live_settings = manager._sessions[sid].current_settings
    with pytest.raises(ServiceError) as err:
        manager.post_refinements(
            sid,
            [
                {
                    "t_ms": 10,
                    "setting_key": "character_spacing_em",
                    "old_value": live_settings.character_spacing_em + 0.07,
                    "new_value": 0.1,
                }
            ],
        )
    assert err.value.status_code == 422
    assert err.value.code == "log_corruption"
    assert err.value.detail["event_index"] == 0


def test_final_reports_first_divergent_key(tmp_path):
    manager = manager_for(tmp_path)
    created = manager.create_session(participant("p1"))
    sid = created["session_id"]
    ids = [t["theme_id"] for t in created["themes"]]
    for tid in ids:
        manager.post_rating(sid, tid, "good")
    manager.post_favorite(sid, ids[0])
    manager.advance_phase(sid, "exploration")
    manager.advance_phase(sid, "secondary_review")
    for tid in ids:
        manager.post_rating(sid, tid, "good")
    manager.post_favorite(sid, ids[0])
    entered = manager.advance_phase(sid, "refinement")
    wrong = dict(entered["start_settings"])
    wrong["word_spacing_em"] = wrong["word_spacing_em"] + 0.15
    wrong["line_height"] = min(5.0, wrong["line_height"] + 1.0)
    with pytest.raises(ServiceError) as err:
        manager.post_final(sid, wrong)
    assert err.value.code == "reconstruction_mismatch"
    assert err.value.detail["key"] == "word_spacing_em"  # first in key order


def test_r0_starts_in_refinement_and_times_it(tmp_path):
    store = DataStore(tmp_path)
    clock = ManualClock()
    manager = SessionManager(store, PipelineConfig(), clock=clock)
    manager.open_iteration(0)
    created = manager.create_session(participant("p1"))
    sid = created["session_id"]
    assert created["phase"] == "refinement"
    assert len(created["themes"]) == 1
    with pytest.raises(ServiceError):
        manager.post_rating(sid, created["themes"][0]["theme_id"], "good")
    settings = created["themes"][0]["settings"]
    clock.advance(5000)
    manager.post_refinements(
        sid,
        [
            {
                "t_ms": 1000,
                "setting_key": "word_spacing_em",
                "old_value": settings["word_spacing_em"],
                "new_value": round(settings["word_spacing_em"] + 0.05, 4),
            }
        ],
    )
    clock.advance(2000)
    final = dict(settings)
    final["word_spacing_em"] = round(settings["word_spacing_em"] + 0.05, 4)
    snapshot = manager.post_final(sid, final)
    assert snapshot["log"]["adjust_duration_ms"] == 7000
    assert snapshot["ratings"] == []
    assert snapshot["favorite_theme_id"] == created["themes"][0]["theme_id"]


# ---------------------------------------------------------------------------
# phase machine: property test
# ---------------------------------------------------------------------------

_OPS = st.lists(
    st.one_of(
        st.tuples(
            st.just("rate"),
            st.integers(0, 3),
            st.sampled_from(["good", "unsure", "bad"]),
        ),
        st.tuples(st.just("favorite"), st.integers(0, 3)),
        st.tuples(st.just("advance"), st.sampled_from(PHASE_ORDER)),
        st.tuples(st.just("refine"), st.integers(0, 5)),
        st.tuples(st.just("final"), st.booleans()),
    ),
    max_size=40,
)


@settings(max_examples=50, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(ops=_OPS)
def test_no_sequence_breaks_the_phase_machine(ops):
    with tempfile.TemporaryDirectory() as root:
        manager = manager_for(Path(root))
        created = manager.create_session(participant("p1"))
        sid = created["session_id"]
        ids = [t["theme_id"] for t in created["themes"]]
        phase_index = PHASE_ORDER.index(created["phase"])
        for op in ops:
            live = manager._sessions[sid]
            try:
                if op[0] == "rate":
                    manager.post_rating(sid, ids[op[1] % len(ids)], op[2])
                elif op[0] == "favorite":
                    manager.post_favorite(sid, ids[op[1] % len(ids)])
                elif op[0] == "advance":
                    manager.advance_phase(sid, op[1])
                elif op[0] == "refine":
                    current = live.current_settings
                    old = (
                        current.character_spacing_em
                        if current is not None
                        else 0.0
                    )
                    manager.post_refinements(
                        sid,
                        [
                            {
                                "t_ms": len(live.events) + 1,
                                "setting_key": "character_spacing_em",
                                "old_value": old,
                                "new_value": round(
                                    min(0.5, max(-0.1, old + 0.01 * (op[1] - 2))), 4
                                ),
                            }
                        ],
                    )
                elif op[0] == "final":
                    current = live.current_settings
                    if current is None or op[1]:
                        payload = {
                            "font": "Arial",
                            "font_size_px": 16.0,
                            "character_spacing_em": 0.25,
                            "word_spacing_em": 0.0,
                            "line_height": 3.3,
                        }
                    else:
                        payload = current.as_dict()
                    manager.post_final(sid, payload)
            except ServiceError:
                pass  # a refusal must not move the session anywhere
            new_index = PHASE_ORDER.index(manager._sessions[sid].phase)
            assert new_index >= phase_index, "phase moved backwards"
            phase_index = new_index
        live = manager._sessions[sid]
        if live.phase == "done":
            snapshots = [
                r
                for r in manager.store.read_sessions(1)
                if r["session_id"] == sid
            ]
            assert len(snapshots) == 1
            snap = snapshots[0]
            rated = {(r["phase"], r["theme_id"]) for r in snap["ratings"]}
            expected = {
                (phase, tid)
                for phase in ("primary_review", "secondary_review")
                for tid in ids
            }
            assert rated == expected, "done session lacking full ratings"
            assert snap["log"]["final_settings"] is not None
            assert snap["favorite_theme_id"] in ids


# ---------------------------------------------------------------------------
# recovery and crash injection
# ---------------------------------------------------------------------------


def test_restart_recovers_in_flight_sessions(tmp_path):
    manager = manager_for(tmp_path)
    created = manager.create_session(participant("p1"))
    sid = created["session_id"]
    ids = [t["theme_id"] for t in created["themes"]]
    for tid in ids:
        manager.post_rating(sid, tid, "good")
    manager.post_favorite(sid, ids[1])
    manager.advance_phase(sid, "exploration")
    store = manager.store

    reborn = SessionManager(store, PipelineConfig(), clock=ManualClock())
    state = reborn.get_session(sid)
    assert state["phase"] == "exploration"
    assert state["favorites"] == {"primary_review": ids[1]}
    assert state["ratings"]["primary_review"] == {t: "good" for t in ids}
    with pytest.raises(ServiceError) as err:
        reborn.create_session(participant("p1"))
    assert err.value.code == "duplicate_participant"
    # and the reborn manager can finish the session
    reborn.advance_phase(sid, "secondary_review")
    for tid in ids:
        reborn.post_rating(sid, tid, "unsure")
    reborn.post_favorite(sid, ids[0])
    entered = reborn.advance_phase(sid, "refinement")
    snapshot = reborn.post_final(sid, entered["start_settings"])
    assert snapshot["phase"] == "done"


def finish_r0_session(manager, pid: str) -> str:
    created = manager.create_session(participant(pid))
    sid = created["session_id"]
    settings = created["themes"][0]["settings"]
    manager.post_final(sid, settings)
    return sid


def test_torn_snapshot_is_repaired_from_the_event_log(tmp_path):
    store = DataStore(tmp_path)
    manager = SessionManager(store, PipelineConfig(), clock=ManualClock())
    manager.open_iteration(0)
    finish_r0_session(manager, "p1")
    finish_r0_session(manager, "p2")
    sessions_path = store.sessions_path(0)
    intact = read_jsonl(sessions_path)
    assert len(intact) == 2

    # crash mid-append: the second snapshot is torn
    raw = sessions_path.read_bytes()
    sessions_path.write_bytes(raw[: len(raw) - 40])
    assert [r["session_id"] for r in read_jsonl(sessions_path)] == [
        intact[0]["session_id"]
    ]

    reborn = SessionManager(store, PipelineConfig(), clock=ManualClock())
    repaired = read_jsonl(sessions_path)
    assert [r["session_id"] for r in repaired] == [
        r["session_id"] for r in intact
    ]
    assert reborn.get_session(intact[1]["session_id"])["phase"] == "done"


def test_torn_event_log_loses_only_the_last_record(tmp_path):
    manager = manager_for(tmp_path)
    created = manager.create_session(participant("p1"))
    sid = created["session_id"]
    ids = [t["theme_id"] for t in created["themes"]]
    manager.post_rating(sid, ids[0], "good")
    manager.post_rating(sid, ids[1], "bad")
    events_path = manager.store.events_path(1)
    raw = events_path.read_bytes()
    events_path.write_bytes(raw[:-15])  # tear the second rating

    reborn = SessionManager(manager.store, PipelineConfig(), clock=ManualClock())
    state = reborn.get_session(sid)
    assert state["ratings"]["primary_review"] == {ids[0]: "good"}


# ---------------------------------------------------------------------------
# iteration sequencing
# ---------------------------------------------------------------------------


def test_iteration_sequencing_rules(tmp_path):
    store = DataStore(tmp_path)
    manager = SessionManager(store, PipelineConfig(), clock=ManualClock())
    with pytest.raises(ServiceError) as err:
        manager.open_iteration(1)
    assert err.value.code == "iteration_out_of_order"
    manager.open_iteration(0)
    with pytest.raises(ServiceError) as err:
        manager.open_iteration(0)
    assert err.value.status_code == 409
    with pytest.raises(ServiceError) as err:
        manager.open_iteration(1)  # no clustering yet -> no reps for the pool
    assert err.value.code == "iteration_not_ready"


def test_cluster_needs_two_closed_sessions(tmp_path):
    store = DataStore(tmp_path)
    manager = SessionManager(store, PipelineConfig(), clock=ManualClock())
    manager.open_iteration(0)
    finish_r0_session(manager, "p1")
    with pytest.raises(ServiceError) as err:
        manager.run_cluster(0)
    assert err.value.status_code == 409
    assert err.value.code == "insufficient_sessions"


def test_designer_pool_freezes_when_iteration_opens(tmp_path):
    manager = manager_for(tmp_path)  # iterations 0 and 1 already open
    with pytest.raises(ServiceError) as err:
        manager.post_designer_themes(
            1, [{"settings": {"font": "Georgia", "character_spacing_em": 0.0,
                              "word_spacing_em": 0.0, "line_height": 2.0}}]
        )
    assert err.value.status_code == 409
    payload = manager.post_designer_themes(
        2,
        [
            {
                "settings": {
                    "font": "Georgia",
                    "character_spacing_em": 0.02,
                    "word_spacing_em": 0.2,
                    "line_height": 2.0,
                }
            }
        ],
    )
    assert payload["added"] == ["des-r2-0"]


def test_designer_range_error_is_422(tmp_path):
    manager = manager_for(tmp_path)
    with pytest.raises(ServiceError) as err:
        manager.post_designer_themes(
            2, [{"settings": {"font": "Georgia", "character_spacing_em": 0.0,
                              "word_spacing_em": 0.0, "line_height": 9}}]
        )
    assert err.value.status_code == 422
    assert "line_height" in err.value.message


def test_thirteen_themes_with_nine_reps_three_designers(tmp_path):
    manager = manager_for(tmp_path, n_reps=9, n_designers=3)
    created = manager.create_session(participant("p1"))
    assert len(created["themes"]) == 13
    validation = [
        t for t in created["themes"] if t["provenance"] == "validation"
    ]
    assert len(validation) == 1


def test_cluster_end_to_end_over_r0_sessions(tmp_path):
    config = PipelineConfig(
        master_seed=5,
        iterations=2,
        participants_per_iteration=4,
        population=planted_modes_spec(DEFAULT_PLANTED_MODES[:2]),
        k_max=3,
        train_crops_per_format=6,
        embed_crops_per_format=4,
        epochs=1,
    )
    store = DataStore(tmp_path)
    clock = ManualClock()
    manager = SessionManager(store, config, clock=clock)
    manager.open_iteration(0)
    for i, word_delta in enumerate((0.0, 0.05, 0.45, 0.5)):
        created = manager.create_session(participant(f"p{i}"))
        sid = created["session_id"]
        settings = created["themes"][0]["settings"]
        target = round(min(1.0, settings["word_spacing_em"] + word_delta), 4)
        if target != settings["word_spacing_em"]:
            manager.post_refinements(
                sid,
                [
                    {
                        "t_ms": 50,
                        "setting_key": "word_spacing_em",
                        "old_value": settings["word_spacing_em"],
                        "new_value": target,
                    }
                ],
            )
        final = dict(settings)
        final["word_spacing_em"] = target
        manager.post_final(sid, final)
    result = manager.run_cluster(0)
    assert result["clustering"]["chosen_k"] >= 1
    assert store.clustering_path(0).exists()
    assert store.themes_path(1).exists()
    next_ids = [t["theme_id"] for t in result["next_themes"]]
    assert all(t.startswith("rep-r1-") for t in next_ids)
    manager.open_iteration(1)
    created = manager.create_session(participant("fresh"))
    assert created["phase"] == "primary_review"


# ---------------------------------------------------------------------------
# HTTP layer: error shape, auth, env var root
# ---------------------------------------------------------------------------


@pytest.fixture()
def client(tmp_path):
    from fastapi.testclient import TestClient

    app = create_app(tmp_path, admin_token="secret", clock=ManualClock())
    with TestClient(app) as c:
        yield c


def test_http_error_shape(client):
    r = client.post("/sessions", json={"participant_id": "p", "age_years": 30})
    assert r.status_code == 409
    assert set(r.json()) == {"code", "message", "detail"}
    r = client.post("/sessions", json={"bogus": True})
    assert r.status_code == 422
    assert r.json()["code"] == "invalid_request"
    r = client.get("/sessions/nope")
    assert r.status_code == 404
    assert r.json()["code"] == "unknown_session"


def test_http_admin_token_required(client):
    assert client.post("/iterations/0/open").status_code == 401
    assert (
        client.post(
            "/iterations/0/open", headers={"X-Admin-Token": "wrong"}
        ).status_code
        == 401
    )
    assert (
        client.post(
            "/iterations/0/open", headers={"X-Admin-Token": "secret"}
        ).status_code
        == 200
    )
    assert client.get("/iterations/current").json() == {"iteration": 0}


def test_data_root_env_var(tmp_path, monkeypatch):
    monkeypatch.delenv("THEMELOOP_DATA", raising=False)
    with pytest.raises(ValueError):
        create_app()
    monkeypatch.setenv("THEMELOOP_DATA", str(tmp_path))
    app = create_app()
    assert app.state.store.root == tmp_path


# ---------------------------------------------------------------------------
# trials
# ---------------------------------------------------------------------------


def make_trial_manager(tmp_path) -> tuple[TrialManager, ManualClock]:
    clock = ManualClock()
    store = DataStore(tmp_path)
    return TrialManager(store, master_seed=7, clock=clock), clock


def test_complete_trial_yields_four_measurements(tmp_path):
    manager, clock = make_trial_manager(tmp_path)
    bank = load_question_bank()
    created = manager.create_trial("t1")
    trial_id = created["trial_id"]
    assert created["n_conditions"] == 4

    seen_themes = []
    seen_passages = set()
    dwell = (12_000.0, 15_000.0, 20_000.0, 30_000.0)
    for _ in range(4):
        for s in range(4):
            screen = manager.serve_screen(trial_id)
            assert screen["screen_index"] == s
            clock.advance(dwell[s])
            step = manager.record_keypress(trial_id)
        assert step["next"] == "questions"
        assert len(step["questions"]) == 4
        passage_id = screen["passage_id"]
        seen_passages.add(passage_id)
        key = [q["answer"] for q in bank[passage_id]]
        answers = [key[0], key[1], (key[2] + 1) % 4, (key[3] + 1) % 4]
        assert manager.record_answers(trial_id, answers)["next"] == "comfort"
        done = manager.record_comfort(trial_id, 4)
        m = done["measurement"]
        seen_themes.append(m["theme_id"])
        words = get_passage(passage_id).screen_word_counts()
        expected_wpm = [w / (d / 60000.0) for w, d in zip(words, dwell)]
        assert m["screen_wpm"] == pytest.approx(expected_wpm)
        assert m["comprehension"] == 0.5
        assert m["comfort"] == 4

    assert done["next"] == "complete"
    assert sorted(seen_themes) == ["compact", "control", "open", "relaxed"]
    assert len(seen_passages) == 4
    data = manager.store.read_trials(manager._trials[trial_id].iteration)
    assert len(data) == 4


def test_keypress_before_screen_served_is_422(tmp_path):
    manager, _ = make_trial_manager(tmp_path)
    trial_id = manager.create_trial("t1")["trial_id"]
    with pytest.raises(ServiceError) as err:
        manager.record_keypress(trial_id)
    assert err.value.status_code == 422
    assert err.value.code == "screen_not_served"


def test_keypress_after_last_screen_is_422(tmp_path):
    manager, clock = make_trial_manager(tmp_path)
    trial_id = manager.create_trial("t1")["trial_id"]
    for _ in range(4):
        manager.serve_screen(trial_id)
        clock.advance(10_000)
        manager.record_keypress(trial_id)
    with pytest.raises(ServiceError) as err:
        manager.record_keypress(trial_id)  # questions pending, not reading
    assert err.value.status_code == 422


def test_reserving_a_screen_keeps_the_first_timestamp(tmp_path):
    manager, clock = make_trial_manager(tmp_path)
    trial_id = manager.create_trial("t1")["trial_id"]
    manager.serve_screen(trial_id)
    clock.advance(6_000)
    manager.serve_screen(trial_id)  # refresh must not restart the clock
    clock.advance(6_000)
    manager.record_keypress(trial_id)
    live = manager._trials[trial_id]
    shown, pressed = live.current.serve_ms[0], live.current.press_ms[0]
    assert pressed - shown == pytest.approx(12_000.0)


def test_trial_rejects_duplicate_participant_and_bad_inputs(tmp_path):
    manager, clock = make_trial_manager(tmp_path)
    trial_id = manager.create_trial("t1")["trial_id"]
    with pytest.raises(ServiceError) as err:
        manager.create_trial("t1")
    assert err.value.status_code == 409
    for _ in range(4):
        manager.serve_screen(trial_id)
        clock.advance(8_000)
        manager.record_keypress(trial_id)
    with pytest.raises(ServiceError):
        manager.record_answers(trial_id, [0, 1])  # wrong count
    with pytest.raises(ServiceError):
        manager.record_answers(trial_id, [0, 1, 2, 9])  # out of range
    manager.record_answers(trial_id, [0, 1, 2, 3])
    with pytest.raises(ServiceError):
        manager.record_comfort(trial_id, 0)
    with pytest.raises(ServiceError):
        manager.record_comfort(trial_id, 6)
