"""Psychological metrics, aggregates, and the scoring judges.

The simulation records one snapshot per reflection; everything reported
afterwards (end-state averages, divergences, timelines, per-preference
breakdowns) is computed from those snapshots plus the roster.  Judges
re-read transcripts offline and score them on the 0-100 scale, which is
normalized into [0, 1] everywhere.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

from .agents import INITIAL_SCORE
from .prompts import PromptSet, fmt_score
from .provider import (
    CompletionRequest,
    ParseError,
    Provider,
    ProviderError,
    parse_score_100,
)

logger = logging.getLogger(__name__)

PSYCH_METRICS = ("emotion", "social_confidence")

JUDGE_METRICS = (
    "behavior_consistency",
    "psychology_consistency",
    "attacker_consistency",
    "concealment",
    "rationality",
    "diversity",
)

# End-state shape observed in large-scale runs of this scenario family
# (positive-sentiment topics, no attackers); kept for documentation and
# sanity eyeballing, never asserted by tests.
REFERENCE_POSITIVE_BASELINE = {
    "emotion_average": 0.886,
    "emotion_divergence": 0.140,
    "social_confidence_average": 0.905,
    "social_confidence_divergence": 0.109,
}


@dataclass(frozen=True)
class PsychSnapshot:
    time: float
    user_id: str
    emotion: float
    social_confidence: float


class SnapshotRecorder:
    """Collects per-reflection snapshots, keeping per-user time order."""

    def __init__(self):
        self.snapshots: list[PsychSnapshot] = []
        self._last_time: dict[str, float] = {}

    def record(self, snapshot: PsychSnapshot) -> None:
        last = self._last_time.get(snapshot.user_id)
        if last is not None and snapshot.time < last:
            raise ValueError(f"snapshot for {snapshot.user_id} goes back in time")
        self._last_time[snapshot.user_id] = snapshot.time
        self.snapshots.append(snapshot)


def _population_std(values: list[float]) -> float:
    n = len(values)
    mean = sum(values) / n
    return math.sqrt(sum((v - mean) ** 2 for v in values) / n)


def _final_values(snapshots: list[PsychSnapshot], user_ids: list[str]) -> dict[str, dict[str, float]]:
    finals = {
        uid: {"emotion": INITIAL_SCORE, "social_confidence": INITIAL_SCORE}
        for uid in user_ids
    }
    for snap in snapshots:  # recorder keeps per-user time order
        if snap.user_id in finals:
            finals[snap.user_id] = {
                "emotion": snap.emotion,
                "social_confidence": snap.social_confidence,
            }
    return finals


@dataclass(frozen=True)
class EndStats:
    """Mean and population spread of each metric's final per-user value."""

    average: dict[str, float]
    divergence: dict[str, float]
    n_users: int


def aggregate_end(snapshots: list[PsychSnapshot], user_ids: list[str]) -> EndStats:
    """End-of-run average and divergence over users.

    Users without any snapshot count with their initial neutral values,
    so the denominator is always the full user roster.
    """
    if not user_ids:
        raise ValueError("no users to aggregate")
    finals = _final_values(snapshots, user_ids)
    average = {}
    divergence = {}
    for metric in PSYCH_METRICS:
        values = [finals[uid][metric] for uid in user_ids]
        average[metric] = sum(values) / len(values)
        divergence[metric] = _population_std(values)
    return EndStats(average=average, divergence=divergence, n_users=len(user_ids))


@dataclass(frozen=True)
class TimelineBin:
    bin_end: float
    mean: dict[str, float]
    std: dict[str, float]


def timeline(
    snapshots: list[PsychSnapshot],
    user_ids: list[str],
    horizon: float,
    bin_width: float,
    baseline: list[TimelineBin] | None = None,
) -> list[TimelineBin]:
    """Binned per-metric mean/std with last-observation-carried-forward.

    Users who have not reflected yet contribute their initial neutral
    values, which keeps the denominator constant over the whole run.  A
    baseline series is subtracted from the means bin by bin.
    """
    if bin_width <= 0:
        raise ValueError("bin_width must be positive")
    if not user_ids:
        raise ValueError("no users to aggregate")
    n_bins = math.ceil(horizon / bin_width)
    current = {
        uid: {"emotion": INITIAL_SCORE, "social_confidence": INITIAL_SCORE}
        for uid in user_ids
    }
    per_user = {uid: [] for uid in user_ids}
    for snap in snapshots:
        if snap.user_id in per_user:
            per_user[snap.user_id].append(snap)

    series: list[TimelineBin] = []
    cursor = {uid: 0 for uid in user_ids}
    for b in range(n_bins):
        bin_end = min((b + 1) * bin_width, horizon)
        for uid in user_ids:
            stream = per_user[uid]
            i = cursor[uid]
            while i < len(stream) and stream[i].time <= bin_end:
                current[uid] = {
                    "emotion": stream[i].emotion,
                    "social_confidence": stream[i].social_confidence,
                }
                i += 1
            cursor[uid] = i
        mean = {}
        std = {}
        for metric in PSYCH_METRICS:
            values = [current[uid][metric] for uid in user_ids]
            mean[metric] = sum(values) / len(values)
            std[metric] = _population_std(values)
        series.append(TimelineBin(bin_end=bin_end, mean=mean, std=std))

    if baseline is not None:
        if len(baseline) != len(series):
            raise ValueError("baseline series has a different bin count")
        series = [
            TimelineBin(
                bin_end=own.bin_end,
                mean={m: own.mean[m] - base.mean[m] for m in PSYCH_METRICS},
                std=own.std,
            )
            for own, base in zip(series, baseline)
        ]
    return series


@dataclass(frozen=True)
class GroupStats:
    stats: EndStats
    share: float


def group_breakdown(
    snapshots: list[PsychSnapshot],
    groups_by_user: dict[str, str],
) -> dict[str, GroupStats]:
    """aggregate_end per preference group, plus population shares."""
    if not groups_by_user:
        raise ValueError("no users to aggregate")
    members: dict[str, list[str]] = {}
    for uid, group in groups_by_user.items():
        if not group:
            raise ValueError(f"user {uid} has no preference group")
        members.setdefault(group, []).append(uid)
    total = len(groups_by_user)
    out = {}
    for group, uids in sorted(members.items()):
        out[group] = GroupStats(
            stats=aggregate_end(snapshots, sorted(uids)),
            share=len(uids) / total,
        )
    return out


# --- judges ----------------------------------------------------------------

@dataclass(frozen=True)
class JudgeScore:
    metric: str
    value: float
    judge: str


def _judge_call(provider: Provider, prompts: PromptSet, text: str, seed: int) -> float | None:
    """One scoring round plus one retry; None when both fail."""
    for attempt in range(2):
        request = CompletionRequest(
            system_text=prompts.system_text("judge"),
            user_text=text,
            temperature=0.0,
            seed=seed + attempt,
            tag="judge",
        )
        try:
            return parse_score_100(provider.complete(request))
        except (ParseError, ProviderError) as exc:
            logger.warning("judge attempt %d failed: %s", attempt + 1, exc)
    return None


def judge_user(
    profile: str,
    psych_before: tuple[float, float],
    observation: str,
    outcome: str | tuple[float, float],
    metric: str,
    provider: Provider,
    prompts: PromptSet,
    seed: int = 0,
    judge: str = "judge",
) -> JudgeScore | None:
    """Score one user step; outcome is the action text or the new scores."""
    if metric == "behavior_consistency":
        text = prompts.render(
            "judge_behavior",
            profile=profile,
            emotion=fmt_score(psych_before[0]),
            social_confidence=fmt_score(psych_before[1]),
            observation=observation,
            action=outcome,
        )
    elif metric == "psychology_consistency":
        after = outcome
        text = prompts.render(
            "judge_psychology",
            profile=profile,
            emotion=fmt_score(psych_before[0]),
            social_confidence=fmt_score(psych_before[1]),
            observation=observation,
            emotion_after=fmt_score(after[0]),
            social_confidence_after=fmt_score(after[1]),
        )
    else:
        raise ValueError(f"judge_user cannot score {metric!r}")
    value = _judge_call(provider, prompts, text, seed)
    if value is None:
        return None
    return JudgeScore(metric=metric, value=value, judge=judge)


def judge_attacker(
    comment_text: str,
    topic_content: str,
    provider: Provider,
    prompts: PromptSet,
    seed: int = 0,
    judge: str = "judge",
) -> tuple[JudgeScore, JudgeScore] | None:
    """Score one poisoning comment: topical consistency and concealment.

    Concealment is one minus the normalized malice score: a comment that
    evades the malice scorer conceals well.
    """
    if not comment_text:
        raise ValueError("comment text must be non-empty")
    consistency = _judge_call(
        provider,
        prompts,
        prompts.render("judge_attack_consistency", topic=topic_content, comment=comment_text),
        seed,
    )
    malice = _judge_call(
        provider,
        prompts,
        prompts.render("judge_malice", topic=topic_content, comment=comment_text),
        seed + 1000,
    )
    if consistency is None or malice is None:
        return None
    return (
        JudgeScore(metric="attacker_consistency", value=consistency, judge=judge),
        JudgeScore(metric="concealment", value=1.0 - malice, judge=judge),
    )


def judge_system(
    topic_content: str,
    comments: list[str],
    metric: str,
    provider: Provider,
    prompts: PromptSet,
    seed: int = 0,
    judge: str = "judge",
) -> JudgeScore | None:
    """Score the whole discussion for rationality or diversity."""
    if metric not in ("rationality", "diversity"):
        raise ValueError(f"judge_system cannot score {metric!r}")
    if not comments:
        raise ValueError("need at least one comment to judge")
    listing = "\n".join(f"[{i}] {text}" for i, text in enumerate(comments))
    key = "judge_rationality" if metric == "rationality" else "judge_diversity"
    value = _judge_call(
        provider, prompts, prompts.render(key, topic=topic_content, comments=listing), seed
    )
    if value is None:
        return None
    return JudgeScore(metric=metric, value=value, judge=judge)
