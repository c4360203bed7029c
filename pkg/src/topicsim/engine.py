"""Run orchestration: roster assembly, the event loop, output files.

A run simulates every topic in the topic file independently: each topic
gets its own roster, access schedule, event log, and metrics rows.  All
randomness is drawn from named substreams of the master seed (roster,
sampling, scheduling, per-actor request seeds), so adding draws to one
stream never perturbs the others and identical configs replay
byte-identically.
"""

from __future__ import annotations

import csv
import json
import logging
import time as _time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import agents as agents_mod
from .agents import LongTermMemory, UserAgent, distill_profile
from .attackers import AttackerAgent, build_roster, generate_poison, load_prototypes
from .censorship import censor
from .config import ConfigError, RunConfig, load_profiles, load_topics
from .environment import (
    ActionKind,
    AgentAction,
    NavigationError,
    PageState,
    Session,
    TrendingTopic,
    apply_action,
    page_window,
    render,
)
from .eventlog import EventLogWriter
from .events import EventQueue
from .lifecycle import AccessSampler
from .metrics import (
    PsychSnapshot,
    SnapshotRecorder,
    aggregate_end,
    group_breakdown,
    timeline,
)
from .prompts import PromptSet
from .provider import Provider, ProviderError, RequestSeeder, stable_u64

logger = logging.getLogger(__name__)


def substream(seed: int, *labels) -> np.random.Generator:
    """Named random substream derived from the master seed."""
    return np.random.default_rng(stable_u64(seed, *labels))


def build_users(
    profiles, n: int, provider: Provider, prompts: PromptSet, seed: int, topic_id: str
) -> list[UserAgent]:
    """First n corpus records as fresh agents; distill when only posts exist.

    A record whose profile must be distilled and whose provider calls
    are exhausted is excluded from the roster.
    """
    if len(profiles) < n:
        raise ConfigError(f"profile corpus has {len(profiles)} records, need {n}")
    users = []
    for record in profiles[:n]:
        if record.profile_text:
            long_term = LongTermMemory(
                profile_text=record.profile_text,
                source_post_count=len(record.posts),
            )
        else:
            try:
                long_term = distill_profile(
                    record.posts, provider, prompts,
                    seed=stable_u64(seed, topic_id, record.id, "distill"),
                )
            except ProviderError as exc:
                logger.warning("excluding %s from roster: %s", record.id, exc)
                continue
        users.append(
            UserAgent(id=record.id, long_term=long_term,
                      preference_group=record.preference_group)
        )
    return users


class TopicSimulation:
    """One topic's full lifecycle over one roster."""

    def __init__(self, topic: TrendingTopic, roster, config: RunConfig,
                 provider: Provider, prompts: PromptSet, writer: EventLogWriter):
        self.topic = topic
        self.roster = roster
        self.config = config
        self.provider = provider
        self.prompts = prompts
        self.writer = writer
        self.recorder = SnapshotRecorder()
        self.by_id = {member.id: member for member in roster}
        self.seeders = {
            member.id: RequestSeeder(stable_u64(config.seed, topic.id, member.id))
            for member in roster
        }
        self.sampler = AccessSampler(topic.params)
        self.queue = EventQueue(topic.params.horizon)
        self.scheduling_rng = substream(config.seed, "scheduling", topic.id)

    # -- helpers --------------------------------------------------------

    def _censor_fn(self, event_time: float, actor_id: str, seeder: RequestSeeder):
        if not self.config.censorship.enabled:
            return None

        def run_censor(comment):
            verdict = censor(
                comment,
                self.topic,
                self.config.censorship.threshold,
                self.provider,
                self.prompts,
                seed=seeder.next("censor"),
                judged_at=comment.created_at,
                on_violation=lambda where, detail: self.writer.append(
                    event_time, actor_id, "error", {"where": where, "detail": detail}
                ),
            )
            self.writer.append(
                event_time,
                actor_id,
                "censor",
                {
                    "comment_id": verdict.comment_id,
                    "malice": verdict.malice,
                    "flagged": verdict.flagged,
                    "judged_at": verdict.judged_at,
                },
            )
            return verdict

        return run_censor

    def _log_action(self, event_time, actor_id, step, before, session, action, outcome):
        payload = {
            "step": step,
            "clock_before": before,
            "clock_after": session.clock,
            "action": outcome.applied.value,
            "terminal": outcome.terminal,
        }
        if action.text is not None and outcome.applied == action.kind:
            payload["text"] = action.text
        if action.index is not None and outcome.applied == action.kind:
            payload["index"] = action.index
        self.writer.append(event_time, actor_id, "action", payload)
        if outcome.violation:
            self.writer.append(
                event_time, actor_id, "error",
                {"step": step, "where": "apply_action", "detail": outcome.violation},
            )
        if outcome.mutation is not None:
            mutation = dict(outcome.mutation)
            mutation["step"] = step
            mutation["clock"] = session.clock
            self.writer.append(event_time, actor_id, "mutation", mutation)

    # -- sessions --------------------------------------------------------

    def run_user_session(self, agent: UserAgent, event_time: float) -> float:
        cfg = self.config
        horizon = self.topic.params.horizon
        seeder = self.seeders[agent.id]
        session = Session(
            actor_id=agent.id, start_time=event_time, clock=event_time,
            page=PageState.browsing(), max_actions=cfg.max_actions,
        )
        self.writer.append(event_time, agent.id, "access", {"kind": "user"})
        step = 0
        while True:
            if session.clock > horizon:
                break
            try:
                observation = render(self.topic, session.page, session.clock, cfg.page_size)
                window = page_window(self.topic, session.page, session.clock, cfg.page_size)
            except NavigationError as exc:
                self.writer.append(
                    event_time, agent.id, "error",
                    {"step": step, "where": "render", "detail": str(exc)},
                )
                session.page = PageState.main(session.main_offset)
                continue
            session.window = [c.id for c in window]
            self.writer.append(
                event_time, agent.id, "observe",
                {
                    "step": step,
                    "clock": session.clock,
                    "page": session.page.kind.value,
                    "offset": session.page.offset,
                    "comment_id": session.page.comment_id,
                    "text": observation,
                    "comment_ids": list(session.window),
                    "comment_created_at": [c.created_at for c in window],
                },
            )

            violations: list[tuple[str, str]] = []

            def notify(where, detail):
                violations.append((where, detail))
                self.writer.append(
                    event_time, agent.id, "error",
                    {"step": step, "where": where, "detail": detail},
                )

            impression = agents_mod.perceive(
                agent, observation, self.provider, self.prompts, seeder, on_violation=notify
            )
            self.writer.append(
                event_time, agent.id, "impression",
                {
                    "step": step,
                    "clock": session.clock,
                    "text": impression,
                    "degraded": any(where == "perceive" for where, _ in violations),
                },
            )

            action = agents_mod.decide(
                agent, session.page, [c.text for c in window],
                self.provider, self.prompts, seeder, on_violation=notify,
            )
            before = session.clock
            outcome = self.topic_apply(session, action, event_time, agent.id, seeder)
            self._log_action(event_time, agent.id, step, before, session, action, outcome)

            short_term = agents_mod.reflect(
                agent, impression, action, self.provider, self.prompts, seeder,
                on_violation=notify,
            )
            snapshot_time = min(session.clock, horizon)
            self.recorder.record(
                PsychSnapshot(
                    time=snapshot_time,
                    user_id=agent.id,
                    emotion=short_term.emotion,
                    social_confidence=short_term.social_confidence,
                )
            )
            self.writer.append(
                event_time, agent.id, "reflect",
                {
                    "step": step,
                    "clock": session.clock,
                    "emotion": short_term.emotion,
                    "social_confidence": short_term.social_confidence,
                    "summary": short_term.summary,
                    "opinion": short_term.opinion,
                },
            )
            step += 1
            if outcome.terminal:
                break
        return min(session.clock, horizon)

    def topic_apply(self, session, action, event_time, actor_id, seeder,
                    is_poison: bool = False):
        return apply_action(
            session,
            action,
            self.topic,
            durations=self.config.durations,
            k=self.config.page_size,
            censor_fn=self._censor_fn(event_time, actor_id, seeder),
            is_poison=is_poison,
        )

    def run_attacker_session(self, attacker: AttackerAgent, event_time: float) -> float:
        cfg = self.config
        horizon = self.topic.params.horizon
        seeder = self.seeders[attacker.id]
        session = Session(
            actor_id=attacker.id, start_time=event_time, clock=event_time,
            page=PageState.main(0), max_actions=1,
        )
        self.writer.append(event_time, attacker.id, "access", {"kind": "attacker"})
        observation = render(self.topic, session.page, session.clock, cfg.page_size)
        window = page_window(self.topic, session.page, session.clock, cfg.page_size)
        session.window = [c.id for c in window]
        self.writer.append(
            event_time, attacker.id, "observe",
            {
                "step": 0,
                "clock": session.clock,
                "page": session.page.kind.value,
                "offset": 0,
                "comment_id": None,
                "text": observation,
                "comment_ids": list(session.window),
                "comment_created_at": [c.created_at for c in window],
            },
        )
        try:
            text = generate_poison(
                attacker.prototype, observation, self.provider, self.prompts,
                seed=seeder.next("attack"),
            )
        except ProviderError as exc:
            self.writer.append(
                event_time, attacker.id, "error",
                {"step": 0, "where": "attack", "detail": f"session aborted: {exc}"},
            )
            return min(session.clock, horizon)
        action = AgentAction(kind=ActionKind.COMMENT, text=text)
        before = session.clock
        outcome = self.topic_apply(
            session, action, event_time, attacker.id, seeder, is_poison=True
        )
        self._log_action(event_time, attacker.id, 0, before, session, action, outcome)
        return min(session.clock, horizon)

    # -- the loop ---------------------------------------------------------

    def run(self) -> None:
        first_times = self.sampler.sample_first(
            len(self.roster), substream(self.config.seed, "sampling", self.topic.id)
        )
        for member, t in zip(self.roster, first_times):
            self.queue.push(float(t), member.id)
        while self.queue:
            event = self.queue.pop()
            member = self.by_id[event.actor_id]
            if isinstance(member, AttackerAgent):
                t_end = self.run_attacker_session(member, event.time)
            else:
                t_end = self.run_user_session(member, event.time)
            next_time = self.sampler.sample_next(
                t_end, self.config.revisit_coeff, self.scheduling_rng
            )
            if next_time is not None:
                self.queue.push(next_time, member.id)


@dataclass
class RunResult:
    out_dir: Path
    degree_label: str
    topic_ids: list[str]
    log_paths: dict[str, Path]
    stats_rows: list[dict]
    elapsed_seconds: float


def simulate(config: RunConfig, out_dir: str | Path,
             provider: Provider | None = None) -> RunResult:
    """Run every topic in the file and write logs plus metrics CSVs.

    ``provider`` overrides the configured backend, which is how test
    harnesses drive a run with a custom scripted mock.
    """
    started = _time.monotonic()
    out = Path(out_dir)
    logs_dir = out / "logs"
    logs_dir.mkdir(parents=True, exist_ok=True)

    profiles = load_profiles(config.profiles_path)
    topics = load_topics(config.topics_path, config.lifecycle)
    prototypes = load_prototypes(config.prototypes_dir)
    if provider is None:
        provider = Provider.from_config(config.provider)
    prompts = PromptSet(config.prompt_language)

    stats_rows: list[dict] = []
    timeline_rows: list[dict] = []
    group_rows: list[dict] = []
    log_paths: dict[str, Path] = {}

    for topic in topics:
        users = build_users(
            profiles, config.n_participants, provider, prompts, config.seed, topic.id
        )
        roster = build_roster(
            users,
            config.attack_degree,
            config.kinds_mix,
            substream(config.seed, "roster", topic.id),
            prototypes,
        )
        log_path = logs_dir / f"{topic.id}.events.jsonl"
        log_paths[topic.id] = log_path
        with EventLogWriter(log_path) as writer:
            sim = TopicSimulation(topic, roster, config, provider, prompts, writer)
            sim.run()

        _write_context(
            logs_dir / f"{topic.id}.context.json", topic, roster, config.degree_label
        )

        user_ids = [m.id for m in roster if isinstance(m, UserAgent)]
        end = aggregate_end(sim.recorder.snapshots, user_ids)
        for metric in end.average:
            stats_rows.append(
                {
                    "topic_id": topic.id,
                    "sentiment": topic.sentiment,
                    "degree": config.degree_label,
                    "metric": metric,
                    "average": end.average[metric],
                    "divergence": end.divergence[metric],
                    "n_users": end.n_users,
                }
            )
        series = timeline(
            sim.recorder.snapshots, user_ids, topic.params.horizon,
            config.timeline_bin_minutes,
        )
        for index, tbin in enumerate(series):
            for metric in tbin.mean:
                timeline_rows.append(
                    {
                        "topic_id": topic.id,
                        "sentiment": topic.sentiment,
                        "degree": config.degree_label,
                        "metric": metric,
                        "bin_index": index,
                        "bin_end": tbin.bin_end,
                        "mean": tbin.mean[metric],
                        "std": tbin.std[metric],
                    }
                )
        groups = group_breakdown(
            sim.recorder.snapshots,
            {m.id: m.preference_group for m in roster if isinstance(m, UserAgent)},
        )
        for group, gstats in groups.items():
            for metric in gstats.stats.average:
                group_rows.append(
                    {
                        "topic_id": topic.id,
                        "sentiment": topic.sentiment,
                        "degree": config.degree_label,
                        "group": group,
                        "share": gstats.share,
                        "metric": metric,
                        "average": gstats.stats.average[metric],
                        "divergence": gstats.stats.divergence[metric],
                        "n_users": gstats.stats.n_users,
                    }
                )
        logger.info("topic %s finished: %d comments", topic.id, len(topic.comments))

    _write_csv(out / "stats.csv", stats_rows,
               ["topic_id", "sentiment", "degree", "metric", "average", "divergence", "n_users"])
    _write_csv(out / "timeline.csv", timeline_rows,
               ["topic_id", "sentiment", "degree", "metric", "bin_index", "bin_end", "mean", "std"])
    _write_csv(out / "groups.csv", group_rows,
               ["topic_id", "sentiment", "degree", "group", "share", "metric",
                "average", "divergence", "n_users"])

    elapsed = _time.monotonic() - started
    manifest = {
        "degree_label": config.degree_label,
        "topics": [t.id for t in topics],
        "elapsed_seconds": elapsed,
        "config": config.to_dict(),
    }
    (out / "run.json").write_text(
        json.dumps(manifest, ensure_ascii=False, indent=2) + "\n", encoding="utf-8"
    )
    return RunResult(
        out_dir=out,
        degree_label=config.degree_label,
        topic_ids=[t.id for t in topics],
        log_paths=log_paths,
        stats_rows=stats_rows,
        elapsed_seconds=elapsed,
    )


def _write_context(path: Path, topic: TrendingTopic, roster, degree_label: str) -> None:
    actors = {}
    for member in roster:
        if isinstance(member, AttackerAgent):
            actors[member.id] = {
                "kind": "attacker",
                "prototype_kind": member.prototype.kind,
            }
        else:
            actors[member.id] = {
                "kind": "user",
                "profile_text": member.long_term.profile_text,
                "preference_group": member.preference_group,
            }
    payload = {
        "topic": {
            "id": topic.id,
            "title": topic.title,
            "summary": topic.summary,
            "full_content": topic.full_content,
            "sentiment": topic.sentiment,
        },
        "degree_label": degree_label,
        "actors": actors,
    }
    path.write_text(json.dumps(payload, ensure_ascii=False, indent=2) + "\n",
                    encoding="utf-8")


def _write_csv(path: Path, rows: list[dict], fieldnames: list[str]) -> None:
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=fieldnames)
        writer.writeheader()
        for row in rows:
            writer.writerow(row)
