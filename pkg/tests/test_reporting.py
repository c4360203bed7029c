import json

import pandas as pd
import pytest

from topicsim.config import ConfigError, RunConfig
from topicsim.engine import simulate
from topicsim.reporting import build_report, build_summary, degree_sort_key, load_run

from conftest import tiny_config_dict


@pytest.fixture(scope="module")
def two_runs(tmp_path_factory):
    base = tmp_path_factory.mktemp("runs")
    topics_path = base / "topics.json"
    from conftest import TINY_TOPICS

    topics_path.write_text(json.dumps(TINY_TOPICS), encoding="utf-8")

    se = simulate(
        RunConfig.from_dict(tiny_config_dict(topics_path, n_participants=10, seed=21)),
        base / "se",
    )
    pa = simulate(
        RunConfig.from_dict(
            tiny_config_dict(topics_path, n_participants=10, seed=21, attack_degree="PA-50")
        ),
        base / "pa50",
    )
    return base, se, pa


def test_degree_ordering():
    labels = ["PA-50-CS", "PA-50", "SE", "PA-10"]
    assert sorted(labels, key=degree_sort_key) == ["SE", "PA-10", "PA-50", "PA-50-CS"]


def test_summary_table_orders_se_first(two_runs):
    base, se, pa = two_runs
    summary = build_summary([load_run(base / "se"), load_run(base / "pa50")])
    assert set(summary["degree"]) == {"SE", "PA-50"}
    positive = summary[(summary["group"] == "positive") & (summary["metric"] == "emotion")]
    assert list(positive["degree"]) == ["SE", "PA-50"]
    all_rows = summary[summary["group"] == "All"]
    assert (all_rows["topics"] == 3).all()
    assert ((summary["average_mean"] >= 0) & (summary["average_mean"] <= 1)).all()


def test_build_report_writes_tables_and_figures(two_runs, tmp_path):
    base, se, pa = two_runs
    out = tmp_path / "report"
    paths = build_report([base / "se", base / "pa50"], out)
    assert paths["summary"].exists()
    assert paths["timeline"].exists()
    assert paths["groups"].exists()
    assert len(paths["figures"]) == 5
    for figure in paths["figures"]:
        assert figure.suffix == ".png"
        assert figure.stat().st_size > 1000

    timeline = pd.read_csv(paths["timeline"])
    assert set(timeline["baseline"]) == {"SE"}
    se_rows = timeline[timeline["degree"] == "SE"]
    assert se_rows["mean"].abs().max() == pytest.approx(0.0)  # relative to itself


def test_report_single_run_absolute_timeline(two_runs, tmp_path):
    base, se, pa = two_runs
    out = tmp_path / "solo"
    build_report([base / "pa50"], out)
    timeline = pd.read_csv(out / "timeline_relative.csv")
    assert set(timeline["baseline"]) == {"none"}
    assert timeline["mean"].between(0, 1).all()


def test_report_rejects_mismatched_topics(two_runs, tmp_path):
    base, se, pa = two_runs
    other_topics = tmp_path / "topics.json"
    other_topics.write_text(
        json.dumps(
            [
                {
                    "id": "different",
                    "sentiment": "neutral",
                    "title": "Another Story",
                    "summary": "s",
                    "full_content": "f",
                }
            ]
        ),
        encoding="utf-8",
    )
    odd = simulate(
        RunConfig.from_dict(tiny_config_dict(other_topics, n_participants=6, seed=1)),
        tmp_path / "odd",
    )
    with pytest.raises(ConfigError):
        build_report([base / "se", tmp_path / "odd"], tmp_path / "rep")


def test_report_rejects_duplicate_degrees(two_runs, tmp_path):
    base, se, pa = two_runs
    with pytest.raises(ConfigError):
        build_report([base / "se", base / "se"], tmp_path / "rep")


def test_load_run_requires_manifest(tmp_path):
    with pytest.raises(ConfigError):
        load_run(tmp_path)
