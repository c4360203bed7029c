import json

import pytest

from topicsim.config import (
    ConfigError,
    RunConfig,
    load_profiles,
    load_topics,
)
from topicsim.lifecycle import LifecycleParams


def test_defaults_mirror_full_scale_setup():
    cfg = RunConfig()
    assert cfg.n_participants == 1000
    assert cfg.lifecycle.horizon == 960.0
    assert cfg.attack_degree == "SE"
    assert cfg.page_size == 5
    assert cfg.max_actions == 6
    assert cfg.revisit_coeff == 0.3
    assert cfg.provider.backend == "mock"


def test_bundled_topics_load_with_overrides():
    topics = load_topics(None, LifecycleParams())
    assert len(topics) == 10
    sentiments = {t.sentiment for t in topics}
    assert sentiments == {"positive", "negative", "neutral"}
    marathon = next(t for t in topics if t.id == "t01-marathon")
    assert marathon.params.breaking_degree == 1.2
    assert marathon.params.horizon == 960.0  # default preserved


def test_bundled_profiles_load():
    profiles = load_profiles(None)
    assert len(profiles) == 1000
    groups = {p.preference_group for p in profiles}
    assert "Entertainment" in groups and "Society" in groups
    counts = {}
    for p in profiles:
        counts[p.preference_group] = counts.get(p.preference_group, 0) + 1
    # entertainment and society dominate the corpus
    ranked = sorted(counts, key=counts.get, reverse=True)
    assert set(ranked[:2]) == {"Entertainment", "Society"}


def test_degree_label_with_censorship():
    cfg = RunConfig.from_dict(
        {"attack_degree": "pa50", "censorship": {"enabled": True, "threshold": 0.5}}
    )
    assert cfg.attack_degree == "PA-50"
    assert cfg.degree_label == "PA-50-CS"
    assert RunConfig().degree_label == "SE"


def test_from_file_and_unknown_keys(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"seed": 9, "n_participants": 5}), encoding="utf-8")
    cfg = RunConfig.from_file(path)
    assert cfg.seed == 9 and cfg.n_participants == 5

    path.write_text(json.dumps({"mystery": 1}), encoding="utf-8")
    with pytest.raises(ConfigError):
        RunConfig.from_file(path)
    with pytest.raises(ConfigError):
        RunConfig.from_file(tmp_path / "missing.json")


def test_presets():
    desk = RunConfig.from_dict({}, preset="desk")
    assert desk.n_participants == 50
    # explicit keys win over the preset
    custom = RunConfig.from_dict({"n_participants": 7}, preset="desk")
    assert custom.n_participants == 7
    with pytest.raises(ConfigError):
        RunConfig.from_dict({}, preset="galaxy")


def test_validation_errors():
    with pytest.raises(ConfigError):
        RunConfig.from_dict({"n_participants": 0})
    with pytest.raises(ConfigError):
        RunConfig.from_dict({"revisit_coeff": 1.5})
    with pytest.raises(ConfigError):
        RunConfig.from_dict({"prompt_language": "de"})
    with pytest.raises(ConfigError):
        RunConfig.from_dict({"attack_degree": "PA-99"})
    with pytest.raises(ConfigError):
        RunConfig.from_dict({"provider": {"backend": "replay"}})  # needs cache_path


def test_config_round_trips_through_dict():
    cfg = RunConfig.from_dict(
        {
            "seed": 4,
            "attack_degree": "PA-10",
            "censorship": {"enabled": True, "threshold": 0.7},
            "lifecycle": {"peak_onset": 60.0, "plateau_rate": 0.05, "horizon": 240.0},
            "durations": {"comment": 3.0},
        }
    )
    again = RunConfig.from_dict(cfg.to_dict())
    assert again == cfg


def test_load_topics_validation(tmp_path):
    bad = tmp_path / "topics.json"
    bad.write_text(json.dumps([{"id": "x", "title": "t"}]), encoding="utf-8")
    with pytest.raises(ConfigError):
        load_topics(bad, LifecycleParams())
    bad.write_text("[]", encoding="utf-8")
    with pytest.raises(ConfigError):
        load_topics(bad, LifecycleParams())
    with pytest.raises(ConfigError):
        load_topics(tmp_path / "nope.json", LifecycleParams())


def test_load_profiles_validation(tmp_path):
    path = tmp_path / "profiles.jsonl"
    path.write_text(
        json.dumps({"id": "u1", "preference_group": "Astronomy", "profile_text": "x"}) + "\n",
        encoding="utf-8",
    )
    with pytest.raises(ConfigError):
        load_profiles(path)
    path.write_text(
        json.dumps({"id": "u1", "preference_group": "Sports"}) + "\n", encoding="utf-8"
    )
    with pytest.raises(ConfigError):
        load_profiles(path)  # needs profile_text or posts
    path.write_text(
        json.dumps({"id": "u1", "preference_group": "Sports", "posts": ["a post"]}) + "\n",
        encoding="utf-8",
    )
    records = load_profiles(path)
    assert records[0].posts == ["a post"]
