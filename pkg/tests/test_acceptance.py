"""Acceptance gate: one test per release criterion.

Run ``pytest tests/test_acceptance.py -v`` to get one pass/fail line per
criterion (add ``-s`` for the printed confirmations and timings). The
secondary web client's fidelity checks live in ``frontend/`` and run with
its own test suite.

The heavy criteria here (the five-seed end-to-end run and the eight-format
classifier) dominate the wall time; everything else finishes in seconds.
"""
from __future__ import annotations

import tempfile
import time
from pathlib import Path

import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from oracles import lloyd_oracle, silhouette_oracle
from themeloop.cluster import choose_k, kmeans_fit, knee_point, silhouette_score
from themeloop.learn import CnnModel, TrainConfig, build_dataset, gradient_check, train
from themeloop.model import (
    SLIDERS,
    Font,
    Provenance,
    TextSettings,
    Theme,
    export_css,
)
from themeloop.model.settings import normalized_font_size
from themeloop.model.themes import COMPACT_THEME, OPEN_THEME, RELAXED_THEME
from themeloop.pipeline import (
    PipelineConfig,
    assemble_iteration_themes,
    load_validation_themes,
    run_pipeline,
)
from themeloop.render import default_render_text, render, sample_crops
from themeloop.service import (
    PHASE_ORDER,
    DataStore,
    ServiceError,
    SessionManager,
    append_jsonl,
    read_jsonl,
)
from themeloop.simulate import (
    default_population_spec,
    derive_seed,
    planted_modes_spec,
    sample_population,
    simulate_session,
)
from themeloop.simulate.population import DEFAULT_PLANTED_MODES
from themeloop.stats import (
    DEFAULT_WEIGHTS,
    CohortBounds,
    ReadingMeasurement,
    chi2_sf,
    chi_square,
    cohens_d,
    composite_score,
    f_sf,
    filter_wpm,
    one_way_anova,
    regularized_incomplete_beta,
    regularized_lower_gamma,
    student_t,
    student_t_two_sided_p,
    welch_t,
)


def _confirm(name: str, started: float, bound_s: float | None = None) -> None:
    elapsed = time.perf_counter() - started
    if bound_s is not None:
        assert elapsed < bound_s, f"{name}: {elapsed:.2f}s exceeds {bound_s:.0f}s budget"
        print(f"[PASS] {name} ({elapsed:.2f}s < {bound_s:.0f}s)")
    else:
        print(f"[PASS] {name} ({elapsed:.2f}s)")


# ---------------------------------------------------------------------------
# criterion: CSS export of the three shipped themes, bit-exact
# ---------------------------------------------------------------------------

GOLDEN_CSS = (
    ".compact {\n"
    "  letter-spacing: 0em;\n"
    "  word-spacing: 0.1em;\n"
    "  line-height: 1.4;\n"
    "  font-family: Georgia;\n"
    "  font-size: 15.8px;\n"
    "}\n"
    "\n"
    ".open {\n"
    "  letter-spacing: 0.02em;\n"
    "  word-spacing: 0.2em;\n"
    "  line-height: 2.2;\n"
    "  font-family: Merriweather;\n"
    "  font-size: 15.8px;\n"
    "}\n"
    "\n"
    ".relaxed {\n"
    "  letter-spacing: 0.04em;\n"
    "  word-spacing: 0.3em;\n"
    "  line-height: 4.5;\n"
    "  font-family: Poppins;\n"
    "  font-size: 14.1px;\n"
    "}\n"
)


def test_css_export_matches_golden_exactly():
    t0 = time.perf_counter()
    assert export_css([COMPACT_THEME, OPEN_THEME, RELAXED_THEME]) == GOLDEN_CSS
    _confirm("CSS golden files", t0, 1.0)


# ---------------------------------------------------------------------------
# criterion: x-height normalization reproduces the published sizes
# ---------------------------------------------------------------------------


def test_font_normalization_reproduces_published_sizes():
    t0 = time.perf_counter()
    assert normalized_font_size(Font.TIMES) == 17.0  # exact by construction
    published = {Font.GEORGIA: 15.8, Font.MERRIWEATHER: 15.8, Font.POPPINS: 14.1}
    for font, size in published.items():
        assert abs(normalized_font_size(font) - size) <= 0.05, font
    _confirm("font normalization", t0, 1.0)


# ---------------------------------------------------------------------------
# criterion: composite worked example and exact weights
# ---------------------------------------------------------------------------


def test_composite_worked_example_and_weights():
    t0 = time.perf_counter()
    assert DEFAULT_WEIGHTS.comprehension + DEFAULT_WEIGHTS.comfort + DEFAULT_WEIGHTS.speed == 1.0
    # comprehension 0.75; comfort 3 -> 0.5; speed 350 in [50, 650] -> 0.5
    measurement = ReadingMeasurement(
        participant_id="worked",
        theme_id="open",
        comfort=3,
        comprehension=0.75,
        screen_wpm=(350.0, 350.0, 350.0, 350.0),
    )
    score = composite_score(measurement, CohortBounds(50.0, 650.0))
    assert abs(score - 0.605) < 1e-12
    _confirm("composite worked example", t0, 1.0)


# ---------------------------------------------------------------------------
# criterion: k-means and silhouette agree with brute-force oracles
# ---------------------------------------------------------------------------


def test_kmeans_and_silhouette_match_oracles():
    t0 = time.perf_counter()
    for i in range(20):
        rng = np.random.default_rng(1000 + i)
        k = int(rng.integers(2, 6))        # k <= 5
        d = int(rng.integers(2, 9))        # d <= 8
        n = int(rng.integers(6 * k, 201))  # n <= 200
        centers = rng.uniform(-8.0, 8.0, (k, d))
        X = centers[rng.integers(0, k, n)] + 0.5 * rng.normal(size=(n, d))
        init = X[rng.choice(n, size=k, replace=False)]

        mine = kmeans_fit(X, k, init=init)
        labels, _, _ = lloyd_oracle(X, init)
        assert mine.labels.tolist() == labels, f"instance {i}: labels diverge"
        if len(set(labels)) >= 2:
            assert (
                abs(silhouette_score(X, mine.labels) - silhouette_oracle(X, labels))
                < 1e-9
            ), f"instance {i}: silhouette diverges"
    _confirm("clustering oracle (20 instances)", t0, 10.0)


# ---------------------------------------------------------------------------
# criterion: knee selection on a planted elbow, fallback on a line
# ---------------------------------------------------------------------------


def test_knee_selection_planted_elbow_and_fallback():
    t0 = time.perf_counter()
    planted = [1000.0, 400.0, 120.0, 110.0, 105.0, 102.0, 100.0, 99.0, 98.0, 97.5]
    assert knee_point(planted, sensitivity=2.0) == 3

    linear = {k: 100.0 - 10.0 * k for k in range(1, 9)}
    silhouettes = {k: 0.2 for k in range(2, 9)}
    silhouettes[4] = 0.5
    selection = choose_k(linear, silhouettes, sensitivity=2.0)
    assert selection.used_fallback and selection.knee_k is None
    assert selection.chosen_k == 4
    _confirm("knee selection", t0, 1.0)


# ---------------------------------------------------------------------------
# criterion: CNN gradients, toy separability, spacing-extremes accuracy
# ---------------------------------------------------------------------------


def _crops_for_extremes(combos, n, side, seed0=100):
    formats = {}
    for i, (c, w, l) in enumerate(combos):
        fid = f"f{i}"
        image = render(TextSettings.normalized(Font.ARIAL, c, w, l), default_render_text())
        formats[fid] = sample_crops(
            image, n, seed=seed0 + i, source_format_id=fid, side=side
        )
    return formats


def test_cnn_gradients_toy_and_spacing_extremes():
    t0 = time.perf_counter()

    rng = np.random.default_rng(0)
    model = CnnModel(3, input_side=16, channels=(4, 6, 8), feature_dim=16, seed=1)
    x = rng.uniform(0, 1, (4, 1, 16, 16))
    y = np.array([0, 1, 2, 1])
    max_rel_err = gradient_check(model, x, y, entries_per_tensor=6, seed=2)
    assert max_rel_err < 1e-3, f"gradient check: {max_rel_err:.2e}"
    print(f"  gradient check max relative error {max_rel_err:.2e}")

    toy = _crops_for_extremes([(0.0, 0.0, 1.0), (0.25, 0.9, 4.5)], n=40, side=64, seed0=11)
    ds = build_dataset(toy, test_fraction=0.25, seed=0)
    result = train(
        ds,
        TrainConfig(epochs=10, batch_size=16, learning_rate=0.02, seed=0),
        channels=(4, 8, 16),
        feature_dim=32,
    )
    assert result.test_accuracy == 1.0, "two-format toy set not perfectly separated"
    print(f"  two-format toy accuracy {result.test_accuracy:.2f} in {len(result.history)} epochs")

    combos = [(c, w, l) for c in (0.0, 0.25) for w in (0.0, 0.9) for l in (1.0, 4.5)]
    formats = _crops_for_extremes(combos, n=300, side=96)
    ds8 = build_dataset(formats, test_fraction=0.25, seed=0)
    result8 = train(
        ds8,
        TrainConfig(epochs=15, batch_size=32, learning_rate=0.02, seed=0),
        channels=(8, 16, 32),
        feature_dim=64,
    )
    print(f"  eight-format spacing-extremes accuracy {result8.test_accuracy:.3f}")
    assert result8.test_accuracy >= 0.90
    _confirm("CNN (gradcheck, toy, 8-format)", t0, 300.0)


# ---------------------------------------------------------------------------
# criterion: end-to-end convergence onto three planted preference modes
# ---------------------------------------------------------------------------


def _one_step(key: str) -> float:
    return SLIDERS[key][2]


def _seed_passes(seed: int) -> tuple[bool, str]:
    config = PipelineConfig(
        master_seed=seed,
        iterations=4,
        participants_per_iteration=90,
        population=planted_modes_spec(DEFAULT_PLANTED_MODES),
    )
    with tempfile.TemporaryDirectory() as root:
        result = run_pipeline(config, root)
    metrics = result.convergence.iterations
    final = metrics[-1]
    checks = {
        "final k == 3": final.cluster_count == 3,
        "silhouette improves": final.silhouette > metrics[0].silhouette,
        "delta shrinks R0->R1": metrics[1].mean_delta_steps < metrics[0].mean_delta_steps,
    }

    reps = [
        t
        for t in result.states[-1].next_themes
        if t.provenance == Provenance.CLUSTER_REPRESENTATIVE
    ]
    near = 0
    for mode in DEFAULT_PLANTED_MODES:
        for theme in reps:
            s = theme.settings
            if (
                s.font == mode.font
                and abs(s.character_spacing_em - mode.character_spacing_em)
                <= _one_step("character_spacing_em") + 1e-9
                and abs(s.word_spacing_em - mode.word_spacing_em)
                <= _one_step("word_spacing_em") + 1e-9
                and abs(s.line_height - mode.line_height)
                <= _one_step("line_height") + 1e-9
            ):
                near += 1
                break
    checks["reps within one step of modes"] = near == len(DEFAULT_PLANTED_MODES)

    detail = ", ".join(f"{name}={'ok' if ok else 'FAIL'}" for name, ok in checks.items())
    return all(checks.values()), detail


def test_end_to_end_convergence_across_seeds():
    t0 = time.perf_counter()
    passed = 0
    for seed in range(5):
        ok, detail = _seed_passes(seed)
        passed += ok
        print(f"  seed {seed}: {'pass' if ok else 'fail'} ({detail})")
    assert passed >= 4, f"only {passed}/5 seeds converged"
    print(f"  {passed}/5 seeds converged")
    _confirm("end-to-end convergence", t0)


# ---------------------------------------------------------------------------
# criterion: validation themes are flagged and almost never favorites
# ---------------------------------------------------------------------------


def test_validation_themes_flagged_and_rarely_favorited():
    t0 = time.perf_counter()
    population = sample_population(
        default_population_spec(), 1000, seed=derive_seed(7, "acceptance-validation"),
        id_prefix="v",
    )
    validation_pool = load_validation_themes()
    validation_ids = {t.theme_id for t in validation_pool}
    reps = [COMPACT_THEME, OPEN_THEME, RELAXED_THEME]

    favorites = 0
    bad = 0
    total = 0
    for participant, profile in population:
        pid = participant.participant_id
        shown = assemble_iteration_themes(
            reps, [], validation_pool, derive_seed(7, f"assign-{pid}")
        )
        session = simulate_session(
            profile, shown, derive_seed(7, f"sess-{pid}"),
            participant=participant, include_review=True,
        )
        for record in session.primary_ratings + session.secondary_ratings:
            if record.theme_id in validation_ids:
                total += 1
                bad += record.value.value == "bad"
        favorites += session.favorite_theme_id in validation_ids

    bad_fraction = bad / total
    favorite_fraction = favorites / len(population)
    print(
        f"  validation ratings bad: {bad_fraction:.1%}, "
        f"favorites: {favorite_fraction:.1%} (n=1000)"
    )
    assert bad_fraction > 0.5, "validation themes not majority-bad"
    assert favorite_fraction < 0.05, "validation themes favored too often"
    _confirm("validation-theme sanity", t0, 30.0)


# ---------------------------------------------------------------------------
# criterion: statistics agree with frozen references; p-value CDFs monotone
# ---------------------------------------------------------------------------

A2 = [12.1, 14.3, 11.8, 13.5, 15.2, 12.9, 14.8]
B2 = [10.2, 11.5, 9.8, 10.9]
AP = [3.1, 4.2, 5.0, 3.8, 4.4, 5.1]
BP = [2.8, 4.5, 4.1, 3.0, 4.9, 4.2]


def test_statistics_match_frozen_references_and_monotone_cdfs():
    t0 = time.perf_counter()
    tol = 1e-8

    w = welch_t(A2, B2)
    assert abs(w.statistic - 4.666795421146587) < tol
    assert abs(w.df - 8.96382656253463) < tol
    assert abs(w.p_value - 0.0011866368266282177) < tol

    s = student_t(A2, B2)
    assert abs(s.statistic - 4.005264765284029) < tol
    assert abs(s.p_value - 0.0030858266367417525) < tol
    sp = student_t(AP, BP, paired=True)
    assert abs(sp.statistic - 1.3710563068012334) < tol
    assert abs(sp.p_value - 0.22869444725582075) < tol

    a = one_way_anova(
        [85, 86, 88, 75, 78, 94, 98],
        [91, 92, 93, 85, 87, 84, 82],
        [79, 78, 88, 94, 92, 85, 83],
    )
    assert abs(a.statistic - 0.2042007001166862) < tol
    assert abs(a.p_value - 0.8171614396136415) < tol
    assert a.df == (2, 18)
    assert abs(a.effect_size - 0.022185598377281828) < tol

    c = chi_square([[10, 20], [20, 10]])
    assert abs(c.statistic - 6.666666666666667) < tol
    assert abs(c.p_value - 0.009823274507519235) < tol
    assert c.df == 1
    assert abs(c.effect_size - 0.33333333333333337) < tol

    assert abs(cohens_d(A2, B2) - 2.5104325483888443) < tol
    assert abs(cohens_d(AP, BP, paired=True) - 0.5597313933813013) < tol

    # p-value machinery: distribution functions monotone on 1000-point grids
    beta_cdf = [regularized_incomplete_beta(2.5, 3.5, x) for x in np.linspace(0, 1, 1000)]
    assert all(b2 >= b1 for b1, b2 in zip(beta_cdf, beta_cdf[1:]))
    gamma_cdf = [regularized_lower_gamma(3.0, x) for x in np.linspace(0, 40, 1000)]
    assert all(g2 >= g1 for g1, g2 in zip(gamma_cdf, gamma_cdf[1:]))
    t_p = [student_t_two_sided_p(t, 7.0) for t in np.linspace(0, 60, 1000)]
    chi_p = [chi2_sf(x, 5.0) for x in np.linspace(0, 120, 1000)]
    f_p = [f_sf(f, 3.0, 12.0) for f in np.linspace(0, 90, 1000)]
    for tail in (t_p, chi_p, f_p):
        assert all(p2 <= p1 for p1, p2 in zip(tail, tail[1:]))
        assert all(0.0 <= p <= 1.0 for p in tail)
    _confirm("statistics oracle + monotone CDFs", t0)


# ---------------------------------------------------------------------------
# criterion: WPM filter boundary behaviour and idempotence
# ---------------------------------------------------------------------------


def test_wpm_filter_boundary_exact():
    t0 = time.perf_counter()
    vector = [49.999999, 50.0, 50.000001, 349.9, 650.0, 650.000001, 651.0, 0.0, -5.0]
    assert filter_wpm(vector) == [50.0, 50.000001, 349.9, 650.0]
    _confirm("WPM filter boundary", t0, 1.0)


@given(
    st.lists(
        st.floats(allow_nan=True, allow_infinity=True, width=64), max_size=60
    )
)
@settings(max_examples=300, deadline=None)
def test_wpm_filter_is_idempotent(values):
    once = filter_wpm(values)
    assert filter_wpm(once) == once


# ---------------------------------------------------------------------------
# criterion: no request sequence breaks the session flow; crashes stay readable
# ---------------------------------------------------------------------------


def _pool_manager(root: Path) -> SessionManager:
    store = DataStore(root)
    themes = [
        Theme(
            f"rep-r1-c{i}",
            TextSettings.normalized(Font.ARIAL, 0.01 * i, 0.1 * i, 1.5 + 0.2 * i),
            Provenance.CLUSTER_REPRESENTATIVE,
            1,
        )
        for i in range(3)
    ]
    store.write_themes(1, [t.as_dict() for t in themes])
    for n in (0, 1):
        append_jsonl(
            store.service_log_path,
            {"kind": "iteration_opened", "iteration": n, "at_ms": 0.0},
        )
    return SessionManager(store, PipelineConfig(), clock=lambda: 0.0)


_OPS = st.lists(
    st.one_of(
        st.tuples(st.just("rate"), st.integers(0, 5), st.sampled_from(["good", "unsure", "bad"])),
        st.tuples(st.just("favorite"), st.integers(0, 5)),
        st.tuples(st.just("advance"), st.sampled_from(PHASE_ORDER)),
        st.tuples(st.just("refine"), st.integers(0, 4)),
        st.tuples(st.just("final"), st.booleans()),
    ),
    max_size=30,
)


@given(ops=_OPS)
@settings(max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow])
def test_service_no_sequence_violates_the_flow(ops):
    with tempfile.TemporaryDirectory() as root:
        manager = _pool_manager(Path(root))
        created = manager.create_session(
            {"participant_id": "p1", "age_years": 30, "dyslexia_score": 0.1}
        )
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
                    old = current.character_spacing_em if current is not None else 0.0
                    manager.post_refinements(
                        sid,
                        [
                            {
                                "t_ms": len(live.events) + 1,
                                "setting_key": "character_spacing_em",
                                "old_value": old,
                                "new_value": round(
                                    min(0.5, max(-0.05, old + 0.01 * (op[1] - 2))), 4
                                ),
                            }
                        ],
                    )
                elif op[0] == "final":
                    current = live.current_settings
                    if current is None or op[1]:
                        payload = TextSettings.normalized(Font.ARIAL, 0.25, 0.0, 3.3).as_dict()
                    else:
                        payload = current.as_dict()
                    manager.post_final(sid, payload)
            except ServiceError:
                pass  # a refused request must leave the session untouched
            new_index = PHASE_ORDER.index(manager._sessions[sid].phase)
            assert new_index >= phase_index, "phase moved backwards"
            phase_index = new_index

        live = manager._sessions[sid]
        if live.phase == "done":
            snapshots = [
                r for r in manager.store.read_sessions(1) if r["session_id"] == sid
            ]
            assert len(snapshots) == 1, "done session not snapshotted exactly once"
            snap = snapshots[0]
            rated = {(r["phase"], r["theme_id"]) for r in snap["ratings"]}
            assert rated == {
                (phase, tid)
                for phase in ("primary_review", "secondary_review")
                for tid in ids
            }, "done session lacking a full rating matrix"
            assert snap["favorite_theme_id"] in ids
            assert snap["log"]["final_settings"] is not None


def _finish_r0_session(manager: SessionManager, pid: str) -> str:
    created = manager.create_session(
        {"participant_id": pid, "age_years": 28, "dyslexia_score": 0.0}
    )
    sid = created["session_id"]
    start = TextSettings.from_dict(created["themes"][0]["settings"])
    manager.post_final(sid, start.as_dict())
    return sid


def test_service_crash_injection_leaves_store_readable(tmp_path):
    t0 = time.perf_counter()
    store = DataStore(tmp_path)
    append_jsonl(
        store.service_log_path,
        {"kind": "iteration_opened", "iteration": 0, "at_ms": 0.0},
    )
    manager = SessionManager(store, PipelineConfig(), clock=lambda: 0.0)
    sids = [_finish_r0_session(manager, f"p{i}") for i in range(3)]

    # crash 1: torn tail on the sessions snapshot file
    snapshot_path = store.sessions_path(0)
    raw = snapshot_path.read_bytes()
    snapshot_path.write_bytes(raw[:-25])
    # crash 2: half-written append on the event log
    event_path = store.events_path(0)
    with event_path.open("ab") as fh:
        fh.write(b'{"kind": "rating", "session_id"')

    reborn = SessionManager(store, PipelineConfig(), clock=lambda: 0.0)
    recovered = store.read_sessions(0)
    assert [r["session_id"] for r in recovered] == sids, "snapshot not repaired"
    assert all(r["phase"] == "done" for r in recovered)
    assert len(read_jsonl(event_path)) >= 3  # torn fragment dropped, rest intact
    with pytest.raises(ServiceError):  # recovered state is live, not corrupted
        reborn.create_session(
            {"participant_id": "p0", "age_years": 28, "dyslexia_score": 0.0}
        )
    _confirm("service crash injection", t0)
