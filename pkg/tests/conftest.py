import json

import pytest

TINY_TOPICS = [
    {
        "id": "tiny-pos",
        "sentiment": "positive",
        "title": "Sunshine Charity Drive Sets Record",
        "summary": "A neighborhood charity drive beat every previous total.",
        "full_content": "Volunteers collected a record amount for the children's ward, "
                        "with twice as many donors as last year.",
    },
    {
        "id": "tiny-neg",
        "sentiment": "negative",
        "title": "Gloomy Plant Closure Confirmed",
        "summary": "The old assembly plant will shut for good next month.",
        "full_content": "Management confirmed the closure affecting 800 workers; the "
                        "retraining plan remains unfunded.",
    },
    {
        "id": "tiny-neu",
        "sentiment": "neutral",
        "title": "Library Hours Shift Next Quarter",
        "summary": "The central library moves to later opening hours.",
        "full_content": "Starting next quarter the central library opens at eleven and "
                        "closes at nine, matching ridership patterns.",
    },
]

# short lifecycle so desk-scale engine tests stay fast
TINY_LIFECYCLE = {"peak_onset": 60.0, "plateau_rate": 0.05, "horizon": 240.0}


@pytest.fixture
def tiny_topics_path(tmp_path):
    path = tmp_path / "topics.json"
    path.write_text(json.dumps(TINY_TOPICS), encoding="utf-8")
    return path


def pytest_terminal_summary(terminalreporter):
    """One pass/fail line per acceptance criterion at the end of a run."""
    lines = []
    for status in ("passed", "failed"):
        for report in terminalreporter.stats.get(status, []):
            if "test_acceptance" in report.nodeid:
                name = report.nodeid.split("::")[-1]
                lines.append((name, "PASS" if status == "passed" else "FAIL"))
    if lines:
        terminalreporter.write_sep("-", "acceptance criteria")
        for name, status in sorted(lines):
            terminalreporter.write_line(f"{status}  {name}")


def tiny_config_dict(topics_path, **overrides):
    base = {
        "seed": 3,
        "topics_path": str(topics_path),
        "n_participants": 8,
        "lifecycle": dict(TINY_LIFECYCLE),
    }
    base.update(overrides)
    return base
