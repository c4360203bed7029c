"""Offline judge pass: reconstruct transcripts from a log and score them.

The event log plus its sibling context file fully determine what the
judges see, so evaluation can run long after the simulation, against
any judge set, without touching simulation state.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .agents import INITIAL_SCORE, describe_action
from .config import ConfigError
from .environment import ActionKind, AgentAction
from .eventlog import read_event_log
from .metrics import judge_attacker, judge_system, judge_user
from .prompts import PromptSet
from .provider import Provider, ProviderConfig, stable_u64


@dataclass
class JudgeSpec:
    name: str
    provider: ProviderConfig


@dataclass
class EvalConfig:
    count: int = 20
    seed: int = 0
    prompt_language: str = "en"
    judges: list[JudgeSpec] = field(default_factory=lambda: [
        JudgeSpec(name="mock-judge", provider=ProviderConfig(backend="mock"))
    ])

    @classmethod
    def from_dict(cls, data: dict) -> "EvalConfig":
        data = dict(data)
        judges_raw = data.pop("judges", None)
        judges = None
        if judges_raw is not None:
            judges = [
                JudgeSpec(name=j["name"], provider=ProviderConfig(**j.get("provider", {})))
                for j in judges_raw
            ]
        try:
            cfg = cls(**data) if judges is None else cls(judges=judges, **data)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc
        if cfg.count < 0:
            raise ConfigError("count must be >= 0")
        return cfg

    @classmethod
    def from_file(cls, path: str | Path) -> "EvalConfig":
        path = Path(path)
        if not path.exists():
            raise ConfigError(f"judge config not found: {path}")
        with path.open(encoding="utf-8") as fh:
            try:
                data = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"{path}: {exc}") from exc
        return cls.from_dict(data)


@dataclass
class UserStep:
    actor_id: str
    step: int
    observation: str
    action_text: str
    psych_before: tuple[float, float]
    psych_after: tuple[float, float]

    @property
    def unit_id(self) -> str:
        return f"{self.actor_id}:step{self.step}"


@dataclass
class Transcripts:
    topic_id: str
    topic_content: str
    profiles: dict[str, str]
    user_steps: list[UserStep]
    poison_comments: list[tuple[str, str]]  # (comment_id, text)
    visible_comments: list[str]


def _rebuild_action_text(payload: dict, language: str) -> str:
    kind = ActionKind(payload["action"])
    text = payload.get("text")
    if kind in (ActionKind.COMMENT, ActionKind.REPLY):
        action = AgentAction(kind=kind, text=text or "")
    else:
        action = AgentAction(kind=kind)
    return describe_action(action, language)


def collect_transcripts(log_path: str | Path, context_path: str | Path,
                        language: str = "en") -> Transcripts:
    context = json.loads(Path(context_path).read_text(encoding="utf-8"))
    topic = context["topic"]
    profiles = {
        actor_id: info.get("profile_text", "")
        for actor_id, info in context["actors"].items()
        if info["kind"] == "user"
    }

    psych: dict[str, tuple[float, float]] = {}
    pending: dict[tuple[str, int], dict] = {}
    user_steps: list[UserStep] = []
    poison: list[tuple[str, str]] = []
    visible: list[str] = []

    for record in read_event_log(log_path):
        actor = record.actor_id
        payload = record.payload
        if record.kind == "observe" and actor in profiles:
            pending[(actor, payload["step"])] = {"observation": payload["text"]}
        elif record.kind == "action" and actor in profiles:
            entry = pending.get((actor, payload["step"]))
            if entry is not None:
                entry["action_text"] = _rebuild_action_text(payload, language)
        elif record.kind == "reflect":
            entry = pending.pop((actor, payload["step"]), None)
            before = psych.get(actor, (INITIAL_SCORE, INITIAL_SCORE))
            after = (payload["emotion"], payload["social_confidence"])
            psych[actor] = after
            if entry is not None and "action_text" in entry:
                user_steps.append(
                    UserStep(
                        actor_id=actor,
                        step=payload["step"],
                        observation=entry["observation"],
                        action_text=entry["action_text"],
                        psych_before=before,
                        psych_after=after,
                    )
                )
        elif record.kind == "mutation" and payload["op"] in ("comment", "reply"):
            if payload["is_poison"]:
                poison.append((payload.get("comment_id") or payload.get("reply_id"),
                               payload["text"]))
            if not payload["flagged"]:
                visible.append(payload["text"])

    return Transcripts(
        topic_id=topic["id"],
        topic_content=f"{topic['title']}\n{topic['full_content']}",
        profiles=profiles,
        user_steps=user_steps,
        poison_comments=poison,
        visible_comments=visible,
    )


def evaluate_log(log_path: str | Path, eval_config: EvalConfig,
                 context_path: str | Path | None = None) -> list[dict]:
    """Score sampled transcripts with every configured judge.

    Returns long-format rows: metric, unit_id, judge, value (value None
    for judge failures, which are excluded from averages downstream).
    """
    log_path = Path(log_path)
    if context_path is None:
        context_path = log_path.with_name(
            log_path.name.replace(".events.jsonl", ".context.json")
        )
    if not Path(context_path).exists():
        raise ConfigError(f"context file not found next to log: {context_path}")
    prompts = PromptSet(eval_config.prompt_language)
    transcripts = collect_transcripts(log_path, context_path, eval_config.prompt_language)

    rng = np.random.default_rng(
        stable_u64(eval_config.seed, "evaluate", transcripts.topic_id)
    )
    steps = transcripts.user_steps
    if len(steps) > eval_config.count:
        picked = sorted(rng.choice(len(steps), size=eval_config.count, replace=False))
        steps = [steps[i] for i in picked]
    poison = transcripts.poison_comments
    if len(poison) > eval_config.count:
        picked = sorted(rng.choice(len(poison), size=eval_config.count, replace=False))
        poison = [poison[i] for i in picked]

    rows: list[dict] = []
    for spec in eval_config.judges:
        provider = Provider.from_config(spec.provider)
        for s in steps:
            seed = stable_u64(eval_config.seed, spec.name, s.unit_id)
            behavior = judge_user(
                transcripts.profiles[s.actor_id], s.psych_before, s.observation,
                s.action_text, "behavior_consistency", provider, prompts,
                seed=seed, judge=spec.name,
            )
            psychology = judge_user(
                transcripts.profiles[s.actor_id], s.psych_before, s.observation,
                s.psych_after, "psychology_consistency", provider, prompts,
                seed=seed + 1, judge=spec.name,
            )
            for metric, score in (
                ("behavior_consistency", behavior),
                ("psychology_consistency", psychology),
            ):
                rows.append(
                    {
                        "metric": metric,
                        "unit_id": s.unit_id,
                        "judge": spec.name,
                        "value": score.value if score else None,
                    }
                )
        for comment_id, text in poison:
            seed = stable_u64(eval_config.seed, spec.name, comment_id)
            pair = judge_attacker(text, transcripts.topic_content, provider, prompts,
                                  seed=seed, judge=spec.name)
            if pair is None:
                rows.append({"metric": "attacker_consistency", "unit_id": comment_id,
                             "judge": spec.name, "value": None})
                rows.append({"metric": "concealment", "unit_id": comment_id,
                             "judge": spec.name, "value": None})
            else:
                for score in pair:
                    rows.append({"metric": score.metric, "unit_id": comment_id,
                                 "judge": spec.name, "value": score.value})
        if transcripts.visible_comments:
            for metric in ("rationality", "diversity"):
                seed = stable_u64(eval_config.seed, spec.name, metric)
                score = judge_system(
                    transcripts.topic_content, transcripts.visible_comments, metric,
                    provider, prompts, seed=seed, judge=spec.name,
                )
                rows.append(
                    {
                        "metric": metric,
                        "unit_id": transcripts.topic_id,
                        "judge": spec.name,
                        "value": score.value if score else None,
                    }
                )
    return rows


def write_judges_csv(rows: list[dict], judges: list[str], path: str | Path) -> None:
    """Wide CSV: one row per (metric, unit), one column per judge, mean."""
    cells: dict[tuple[str, str], dict[str, float]] = {}
    order: list[tuple[str, str]] = []
    for row in rows:
        key = (row["metric"], row["unit_id"])
        if key not in cells:
            cells[key] = {}
            order.append(key)
        if row["value"] is not None:
            cells[key][row["judge"]] = row["value"]
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["metric", "unit_id", *judges, "average"])
        for metric, unit in order:
            values = cells[(metric, unit)]
            scored = [values[j] for j in judges if j in values]
            average = sum(scored) / len(scored) if scored else ""
            writer.writerow(
                [metric, unit]
                + [values.get(j, "") for j in judges]
                + [average]
            )
