import math

import pytest

from topicsim.metrics import (
    PsychSnapshot,
    SnapshotRecorder,
    aggregate_end,
    group_breakdown,
    judge_attacker,
    judge_system,
    judge_user,
    timeline,
)
from topicsim.prompts import PromptSet
from topicsim.provider import MockBackend, MockRule, Provider

PROMPTS = PromptSet("en")


def snap(uid, time, emotion, sc=None):
    return PsychSnapshot(time=time, user_id=uid, emotion=emotion,
                         social_confidence=sc if sc is not None else emotion)


# --- recorder ---------------------------------------------------------------

def test_recorder_enforces_per_user_time_order():
    rec = SnapshotRecorder()
    rec.record(snap("u1", 1.0, 0.5))
    rec.record(snap("u2", 0.5, 0.5))
    rec.record(snap("u1", 2.0, 0.4))
    with pytest.raises(ValueError):
        rec.record(snap("u1", 1.5, 0.6))


# --- aggregate_end -----------------------------------------------------------

def test_aggregate_end_trivial_cases():
    snaps = [snap("u1", 1.0, 0.5), snap("u2", 1.0, 0.5)]
    stats = aggregate_end(snaps, ["u1", "u2"])
    assert stats.average["emotion"] == pytest.approx(0.5)
    assert stats.divergence["emotion"] == pytest.approx(0.0)

    snaps = [snap("u1", 1.0, 1.0), snap("u2", 1.0, 0.0)]
    stats = aggregate_end(snaps, ["u1", "u2"])
    assert stats.average["emotion"] == pytest.approx(0.5)
    assert stats.divergence["emotion"] == pytest.approx(0.5)  # population std


def test_aggregate_end_uses_only_final_snapshot():
    snaps = [snap("u1", 1.0, 0.9), snap("u1", 5.0, 0.1)]
    stats = aggregate_end(snaps, ["u1"])
    assert stats.average["emotion"] == pytest.approx(0.1)


def test_aggregate_end_defaults_users_without_snapshots():
    stats = aggregate_end([], ["u1", "u2"])
    assert stats.average["emotion"] == pytest.approx(0.5)
    assert stats.divergence["social_confidence"] == pytest.approx(0.0)
    assert stats.n_users == 2


def test_aggregate_end_permutation_invariant():
    snaps = [snap(f"u{i}", 1.0, i / 10) for i in range(10)]
    a = aggregate_end(snaps, [f"u{i}" for i in range(10)])
    b = aggregate_end(list(reversed(snaps)), [f"u{i}" for i in range(9, -1, -1)])
    assert a.average == b.average
    assert a.divergence == b.divergence


def test_aggregate_end_rejects_empty_roster():
    with pytest.raises(ValueError):
        aggregate_end([], [])


# --- timeline ----------------------------------------------------------------

def test_timeline_flat_user():
    series = timeline([snap("u1", 0.5, 0.5)], ["u1"], horizon=100.0, bin_width=10.0)
    assert len(series) == 10
    assert all(b.mean["emotion"] == pytest.approx(0.5) for b in series)
    assert all(b.std["emotion"] == pytest.approx(0.0) for b in series)


def test_timeline_bin_count_is_ceiling():
    series = timeline([], ["u1"], horizon=95.0, bin_width=10.0)
    assert len(series) == math.ceil(95.0 / 10.0)
    assert series[-1].bin_end == pytest.approx(95.0)


def test_timeline_relative_to_self_is_zero():
    snaps = [snap("u1", t, 0.4 + 0.01 * t) for t in (5.0, 25.0, 70.0)]
    base = timeline(snaps, ["u1"], horizon=100.0, bin_width=10.0)
    rel = timeline(snaps, ["u1"], horizon=100.0, bin_width=10.0, baseline=base)
    assert all(b.mean["emotion"] == pytest.approx(0.0) for b in rel)


def test_timeline_step_change_lands_in_right_bin():
    users = [f"u{i}" for i in range(4)]
    snaps = []
    for uid in users:
        snaps.append(snap(uid, 10.0, 0.7))
        snaps.append(snap(uid, 480.0, 0.5))
    series = timeline(snaps, users, horizon=960.0, bin_width=30.0)
    drop_bin = 480.0 // 30 - 1  # bin whose end is exactly 480
    assert series[int(drop_bin)].mean["emotion"] == pytest.approx(0.5)
    assert series[int(drop_bin) - 1].mean["emotion"] == pytest.approx(0.7)


def test_timeline_locf_counts_not_yet_arrived_users():
    # one user never reflects; one drops late
    snaps = [snap("u2", 900.0, 0.0)]
    series = timeline(snaps, ["u1", "u2"], horizon=960.0, bin_width=480.0)
    assert series[0].mean["emotion"] == pytest.approx(0.5)
    assert series[1].mean["emotion"] == pytest.approx(0.25)


def test_timeline_validation():
    with pytest.raises(ValueError):
        timeline([], ["u1"], horizon=10.0, bin_width=0.0)
    with pytest.raises(ValueError):
        timeline([], [], horizon=10.0, bin_width=1.0)
    base = timeline([], ["u1"], horizon=10.0, bin_width=1.0)
    with pytest.raises(ValueError):
        timeline([], ["u1"], horizon=10.0, bin_width=5.0, baseline=base)


# --- group breakdown -----------------------------------------------------------

def test_group_breakdown_single_group_equals_global():
    snaps = [snap("u1", 1.0, 0.3), snap("u2", 1.0, 0.7)]
    groups = {"u1": "Society", "u2": "Society"}
    out = group_breakdown(snaps, groups)
    assert set(out) == {"Society"}
    assert out["Society"].stats.average["emotion"] == pytest.approx(0.5)
    assert out["Society"].share == pytest.approx(1.0)


def test_group_breakdown_disjoint_groups():
    snaps = [snap("u1", 1.0, 0.2), snap("u2", 1.0, 0.8)]
    out = group_breakdown(snaps, {"u1": "Sports", "u2": "Culture"})
    assert out["Sports"].stats.average["emotion"] == pytest.approx(0.2)
    assert out["Culture"].stats.average["emotion"] == pytest.approx(0.8)
    assert out["Sports"].share == pytest.approx(0.5)
    assert "Technology" not in out  # empty groups reported as absent


def test_group_breakdown_rejects_unlabeled():
    with pytest.raises(ValueError):
        group_breakdown([], {"u1": ""})


# --- judges ---------------------------------------------------------------------

def judge_provider(score="62"):
    return Provider(MockBackend([MockRule(tag="judge", respond=score)]))


def test_judge_user_behavior():
    score = judge_user(
        "profile text", (0.5, 0.5), "observation", "Liked it",
        "behavior_consistency", judge_provider(), PROMPTS, judge="j1",
    )
    assert score.value == pytest.approx(0.62)
    assert score.metric == "behavior_consistency"
    assert score.judge == "j1"


def test_judge_user_psychology_prompt_carries_both_states():
    seen = {}

    def capture(request):
        seen["text"] = request.user_text
        return "70"

    provider = Provider(MockBackend([MockRule(tag="judge", respond=capture)]))
    score = judge_user(
        "profile", (0.5, 0.6), "obs", (0.3, 0.4),
        "psychology_consistency", provider, PROMPTS,
    )
    assert score.value == pytest.approx(0.70)
    assert "0.50/1.0" in seen["text"]
    assert "0.30/1.0" in seen["text"]


def test_judge_user_rejects_other_metrics():
    with pytest.raises(ValueError):
        judge_user("p", (0.5, 0.5), "o", "a", "rationality", judge_provider(), PROMPTS)


def test_judge_user_identical_transcript_scores_identically():
    a = judge_user("p", (0.5, 0.5), "o", "a", "behavior_consistency",
                   judge_provider(), PROMPTS, seed=3)
    b = judge_user("p", (0.5, 0.5), "o", "a", "behavior_consistency",
                   judge_provider(), PROMPTS, seed=3)
    assert a.value == b.value


def test_judge_user_parse_failure_returns_missing():
    assert judge_user("p", (0.5, 0.5), "o", "a", "behavior_consistency",
                      judge_provider("???"), PROMPTS) is None


def test_judge_attacker_concealment_mapping():
    def by_prompt(request):
        return "80" if "malice" in request.user_text else "90"

    provider = Provider(MockBackend([MockRule(tag="judge", respond=by_prompt)]))
    consistency, concealment = judge_attacker("a comment", "topic text", provider, PROMPTS)
    assert consistency.value == pytest.approx(0.90)
    assert concealment.value == pytest.approx(0.20)
    assert concealment.value + 0.80 == pytest.approx(1.0)


def test_judge_attacker_requires_comment():
    with pytest.raises(ValueError):
        judge_attacker("", "topic", judge_provider(), PROMPTS)


def test_judge_system_scores():
    score = judge_system("topic", ["only comment"], "diversity", judge_provider("100"), PROMPTS)
    assert score.value == 1.0
    score = judge_system("topic", ["c1", "c2"], "rationality", judge_provider("85"), PROMPTS)
    assert score.value == pytest.approx(0.85)
    with pytest.raises(ValueError):
        judge_system("topic", [], "diversity", judge_provider(), PROMPTS)
    with pytest.raises(ValueError):
        judge_system("topic", ["c"], "behavior_consistency", judge_provider(), PROMPTS)


def test_multi_judge_average_is_plain_mean():
    scores = []
    for name, reply in (("j1", "60"), ("j2", "70"), ("j3", "80")):
        scores.append(
            judge_user("p", (0.5, 0.5), "o", "a", "behavior_consistency",
                       judge_provider(reply), PROMPTS, judge=name)
        )
    values = [s.value for s in scores]
    assert sum(values) / len(values) == pytest.approx(0.70)
