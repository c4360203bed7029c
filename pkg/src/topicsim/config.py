"""Run configuration: file loading, validation, bundled defaults."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .agents import PREFERENCE_GROUPS
from .attackers import ATTACKER_KINDS, normalize_degree
from .censorship import DEFAULT_THRESHOLD
from .environment import (
    ActionDurations,
    DEFAULT_MAX_ACTIONS,
    DEFAULT_PAGE_SIZE,
    TrendingTopic,
)
from .lifecycle import LifecycleParams
from .prompts import LANGUAGES
from .provider import ProviderConfig


class ConfigError(Exception):
    pass


UNIFORM_MIX = {kind: 1.0 / len(ATTACKER_KINDS) for kind in ATTACKER_KINDS}

# Desk-scale preset used in CI and quick local runs; the plain defaults
# mirror the full-scale setup (1,000 participants, 16-hour lifecycle).
PRESETS = {
    "paper": {},
    "desk": {"n_participants": 50},
}


@dataclass
class CensorshipConfig:
    enabled: bool = False
    threshold: float = DEFAULT_THRESHOLD


@dataclass
class ProfileRecord:
    id: str
    profile_text: str
    preference_group: str
    posts: list[str] = field(default_factory=list)


@dataclass
class RunConfig:
    seed: int = 0
    topics_path: str | None = None
    profiles_path: str | None = None
    prototypes_dir: str | None = None
    n_participants: int = 1000
    attack_degree: str = "SE"
    kinds_mix: dict = field(default_factory=lambda: dict(UNIFORM_MIX))
    censorship: CensorshipConfig = field(default_factory=CensorshipConfig)
    lifecycle: LifecycleParams = field(default_factory=LifecycleParams)
    page_size: int = DEFAULT_PAGE_SIZE
    max_actions: int = DEFAULT_MAX_ACTIONS
    durations: ActionDurations = field(default_factory=ActionDurations)
    revisit_coeff: float = 0.3
    provider: ProviderConfig = field(default_factory=ProviderConfig)
    prompt_language: str = "en"
    timeline_bin_minutes: float = 30.0

    def __post_init__(self):
        self.attack_degree = normalize_degree(self.attack_degree)
        if self.n_participants < 1:
            raise ConfigError("n_participants must be >= 1")
        if not 0.0 <= self.revisit_coeff <= 1.0:
            raise ConfigError("revisit_coeff must lie in [0, 1]")
        if self.prompt_language not in LANGUAGES:
            raise ConfigError(f"prompt_language must be one of {LANGUAGES}")
        if self.page_size < 1 or self.max_actions < 1:
            raise ConfigError("page_size and max_actions must be >= 1")
        try:
            self.provider.validate()
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    @property
    def degree_label(self) -> str:
        suffix = "-CS" if self.censorship.enabled else ""
        return self.attack_degree + suffix

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "topics_path": self.topics_path,
            "profiles_path": self.profiles_path,
            "prototypes_dir": self.prototypes_dir,
            "n_participants": self.n_participants,
            "attack_degree": self.attack_degree,
            "kinds_mix": self.kinds_mix,
            "censorship": {
                "enabled": self.censorship.enabled,
                "threshold": self.censorship.threshold,
            },
            "lifecycle": {
                "breaking_degree": self.lifecycle.breaking_degree,
                "peak_onset": self.lifecycle.peak_onset,
                "plateau_rate": self.lifecycle.plateau_rate,
                "horizon": self.lifecycle.horizon,
            },
            "page_size": self.page_size,
            "max_actions": self.max_actions,
            "durations": {k: getattr(self.durations, k) for k in (
                "view_details", "like", "comment", "reply", "repost",
                "view_more", "view_comment", "back", "leave",
            )},
            "revisit_coeff": self.revisit_coeff,
            "provider": {
                "backend": self.provider.backend,
                "endpoint": self.provider.endpoint,
                "model": self.provider.model,
                "credential_env": self.provider.credential_env,
                "timeout": self.provider.timeout,
                "max_retries": self.provider.max_retries,
                "backoff_base": self.provider.backoff_base,
                "mock_script": self.provider.mock_script,
                "cache_path": self.provider.cache_path,
                "fallback": self.provider.fallback,
            },
            "prompt_language": self.prompt_language,
            "timeline_bin_minutes": self.timeline_bin_minutes,
        }

    @classmethod
    def from_dict(cls, data: dict, preset: str | None = None) -> "RunConfig":
        data = dict(data)
        if preset is not None:
            if preset not in PRESETS:
                raise ConfigError(f"unknown preset {preset!r}; have {sorted(PRESETS)}")
            merged = dict(PRESETS[preset])
            merged.update(data)
            data = merged
        kwargs: dict = {}
        plain = (
            "seed", "topics_path", "profiles_path", "prototypes_dir",
            "n_participants", "attack_degree", "kinds_mix", "page_size",
            "max_actions", "revisit_coeff", "prompt_language",
            "timeline_bin_minutes",
        )
        for key in plain:
            if key in data:
                kwargs[key] = data.pop(key)
        if "censorship" in data:
            kwargs["censorship"] = CensorshipConfig(**data.pop("censorship"))
        if "lifecycle" in data:
            kwargs["lifecycle"] = LifecycleParams(**data.pop("lifecycle"))
        if "durations" in data:
            kwargs["durations"] = ActionDurations(**data.pop("durations"))
        if "provider" in data:
            kwargs["provider"] = ProviderConfig(**data.pop("provider"))
        if data:
            raise ConfigError(f"unknown config keys: {sorted(data)}")
        try:
            return cls(**kwargs)
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc

    @classmethod
    def from_file(cls, path: str | Path, preset: str | None = None) -> "RunConfig":
        path = Path(path)
        if not path.exists():
            raise ConfigError(f"config file not found: {path}")
        with path.open(encoding="utf-8") as fh:
            try:
                data = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"{path}: {exc}") from exc
        return cls.from_dict(data, preset=preset)


def default_data_path(name: str) -> Path:
    return Path(str(resources.files("topicsim.data").joinpath(name)))


def load_topics(path: str | Path | None, defaults: LifecycleParams) -> list[TrendingTopic]:
    """Read the topic file; per-topic params override the config defaults."""
    path = Path(path) if path is not None else default_data_path("topics.json")
    if not path.exists():
        raise ConfigError(f"topics file not found: {path}")
    with path.open(encoding="utf-8") as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: {exc}") from exc
    topics = []
    for entry in raw:
        try:
            params = defaults.replace(**entry.get("params", {}))
            topics.append(
                TrendingTopic(
                    id=entry["id"],
                    title=entry["title"],
                    summary=entry["summary"],
                    full_content=entry["full_content"],
                    sentiment=entry.get("sentiment", "neutral"),
                    params=params,
                )
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"bad topic entry {entry.get('id', '?')!r}: {exc}") from exc
    if not topics:
        raise ConfigError(f"{path}: no topics defined")
    return topics


def load_profiles(path: str | Path | None) -> list[ProfileRecord]:
    path = Path(path) if path is not None else default_data_path("profiles.jsonl")
    if not path.exists():
        raise ConfigError(f"profiles file not found: {path}")
    records = []
    with path.open(encoding="utf-8") as fh:
        for line_number, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                record = ProfileRecord(
                    id=obj["id"],
                    profile_text=obj.get("profile_text", ""),
                    preference_group=obj["preference_group"],
                    posts=list(obj.get("posts", [])),
                )
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise ConfigError(f"{path}:{line_number}: {exc}") from exc
            if record.preference_group not in PREFERENCE_GROUPS:
                raise ConfigError(
                    f"{path}:{line_number}: unknown preference group "
                    f"{record.preference_group!r}"
                )
            if not record.profile_text and not record.posts:
                raise ConfigError(
                    f"{path}:{line_number}: record needs profile_text or posts"
                )
            records.append(record)
    if not records:
        raise ConfigError(f"{path}: no profiles defined")
    return records
