"""Cross-run comparison tables and figures.

Takes any number of finished run directories (one per attack degree),
checks they cover the same topics, and writes the comparison artifacts:
a group-by-degree summary table, relative-to-baseline timelines, and
PNG figures rendered next to the delimited output.
"""

from __future__ import annotations

import json
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import pandas as pd

from .config import ConfigError

SENTIMENT_GROUPS = ("positive", "negative", "neutral")

_BASE_ORDER = {"SE": 0, "PA-10": 1, "PA-30": 2, "PA-50": 3}


def degree_sort_key(label: str):
    base = label[:-3] if label.endswith("-CS") else label
    return (_BASE_ORDER.get(base, 99), label.endswith("-CS"))


def load_run(run_dir: str | Path) -> dict:
    run_dir = Path(run_dir)
    manifest_path = run_dir / "run.json"
    if not manifest_path.exists():
        raise ConfigError(f"not a run directory (missing run.json): {run_dir}")
    manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    return {
        "dir": run_dir,
        "degree": manifest["degree_label"],
        "topics": list(manifest["topics"]),
        "stats": pd.read_csv(run_dir / "stats.csv"),
        "timeline": pd.read_csv(run_dir / "timeline.csv"),
        "groups": pd.read_csv(run_dir / "groups.csv"),
    }


def _check_runs(runs: list[dict]) -> None:
    if not runs:
        raise ConfigError("report needs at least one run directory")
    topics = set(runs[0]["topics"])
    for run in runs[1:]:
        if set(run["topics"]) != topics:
            raise ConfigError(
                f"topic sets differ between runs: {sorted(topics)} vs "
                f"{sorted(run['topics'])} ({run['dir']})"
            )
    labels = [run["degree"] for run in runs]
    if len(set(labels)) != len(labels):
        raise ConfigError(f"duplicate degree labels across runs: {labels}")


def build_summary(runs: list[dict]) -> pd.DataFrame:
    """Group x degree x metric table, averaged across topics.

    'average_mean +/- average_std' mirrors how per-topic values spread
    across the topics of one sentiment group; stds use the population
    convention, matching the divergence definition.
    """
    stats = pd.concat([run["stats"] for run in runs], ignore_index=True)
    rows = []
    for group in (*SENTIMENT_GROUPS, "All"):
        subset = stats if group == "All" else stats[stats["sentiment"] == group]
        if subset.empty:
            continue
        for (degree, metric), block in subset.groupby(["degree", "metric"]):
            rows.append(
                {
                    "group": group,
                    "degree": degree,
                    "metric": metric,
                    "average_mean": block["average"].mean(),
                    "average_std": block["average"].std(ddof=0),
                    "divergence_mean": block["divergence"].mean(),
                    "divergence_std": block["divergence"].std(ddof=0),
                    "topics": len(block),
                }
            )
    frame = pd.DataFrame(rows)
    frame["__order"] = frame["degree"].map(degree_sort_key)
    group_order = {g: i for i, g in enumerate((*SENTIMENT_GROUPS, "All"))}
    frame["__gorder"] = frame["group"].map(group_order)
    frame = frame.sort_values(["__gorder", "__order", "metric"]).drop(
        columns=["__order", "__gorder"]
    )
    return frame.reset_index(drop=True)


def build_relative_timeline(runs: list[dict]) -> tuple[pd.DataFrame, bool]:
    """Per-degree timelines, relative to the SE run when one is present.

    Returns (frame, relative): the frame has one row per degree, metric
    and bin with the across-topic mean and std of the (possibly
    baseline-subtracted) bin means.
    """
    baseline = next((run for run in runs if run["degree"] == "SE"), None)
    relative = baseline is not None
    frames = []
    for run in runs:
        timeline = run["timeline"].copy()
        if relative:
            base = baseline["timeline"][
                ["topic_id", "metric", "bin_index", "mean"]
            ].rename(columns={"mean": "se_mean"})
            timeline = timeline.merge(base, on=["topic_id", "metric", "bin_index"])
            timeline["value"] = timeline["mean"] - timeline["se_mean"]
        else:
            timeline["value"] = timeline["mean"]
        grouped = (
            timeline.groupby(["degree", "metric", "bin_index", "bin_end"])["value"]
            .agg(mean="mean", std=lambda v: v.std(ddof=0))
            .reset_index()
        )
        frames.append(grouped)
    out = pd.concat(frames, ignore_index=True)
    out["baseline"] = "SE" if relative else "none"
    out["__order"] = out["degree"].map(degree_sort_key)
    out = out.sort_values(["__order", "metric", "bin_index"]).drop(columns="__order")
    return out.reset_index(drop=True), relative


def build_group_table(runs: list[dict]) -> pd.DataFrame:
    """Preference-group end averages per degree, averaged across topics."""
    groups = pd.concat([run["groups"] for run in runs], ignore_index=True)
    table = (
        groups.groupby(["degree", "group", "metric"])
        .agg(average=("average", "mean"), share=("share", "mean"))
        .reset_index()
    )
    table["__order"] = table["degree"].map(degree_sort_key)
    table = table.sort_values(["__order", "group", "metric"]).drop(columns="__order")
    return table.reset_index(drop=True)


_METRIC_TITLES = {"emotion": "Emotion", "social_confidence": "Social confidence"}


def _plot_timelines(frame: pd.DataFrame, relative: bool, figures_dir: Path) -> list[Path]:
    paths = []
    for metric, title in _METRIC_TITLES.items():
        fig, ax = plt.subplots(figsize=(7, 4.2))
        block = frame[frame["metric"] == metric]
        degrees = sorted(block["degree"].unique(), key=degree_sort_key)
        for degree in degrees:
            if relative and degree == "SE":
                continue  # identically zero by construction
            series = block[block["degree"] == degree]
            ax.plot(series["bin_end"], series["mean"], label=degree)
            ax.fill_between(
                series["bin_end"],
                series["mean"] - series["std"],
                series["mean"] + series["std"],
                alpha=0.2,
            )
        ax.set_xlabel("minutes since topic creation")
        ax.set_ylabel(f"{title}{' (relative to SE)' if relative else ''}")
        if relative:
            ax.axhline(0.0, color="gray", linewidth=0.8, linestyle="--")
        ax.legend()
        fig.tight_layout()
        path = figures_dir / f"timeline_{metric}.png"
        fig.savefig(path, dpi=150)
        plt.close(fig)
        paths.append(path)
    return paths


def _plot_group_bars(table: pd.DataFrame, figures_dir: Path) -> list[Path]:
    paths = []
    for metric, title in _METRIC_TITLES.items():
        block = table[table["metric"] == metric]
        groups = sorted(block["group"].unique())
        degrees = sorted(block["degree"].unique(), key=degree_sort_key)
        fig, ax = plt.subplots(figsize=(8, 4.2))
        width = 0.8 / max(1, len(degrees))
        for i, degree in enumerate(degrees):
            values = []
            for group in groups:
                row = block[(block["group"] == group) & (block["degree"] == degree)]
                values.append(row["average"].iloc[0] if not row.empty else 0.0)
            positions = [g + i * width for g in range(len(groups))]
            ax.bar(positions, values, width=width, label=degree)
        ax.set_xticks([g + 0.4 - width / 2 for g in range(len(groups))])
        ax.set_xticklabels(groups, rotation=20)
        ax.set_ylabel(f"end-state {title.lower()}")
        ax.legend()
        fig.tight_layout()
        path = figures_dir / f"groups_{metric}.png"
        fig.savefig(path, dpi=150)
        plt.close(fig)
        paths.append(path)
    return paths


def _plot_group_shares(table: pd.DataFrame, figures_dir: Path) -> Path:
    shares = (
        table[table["metric"] == "emotion"]
        .groupby("group")["share"]
        .mean()
        .sort_values(ascending=False)
    )
    fig, ax = plt.subplots(figsize=(5, 5))
    ax.pie(shares.values, labels=list(shares.index), autopct="%1.0f%%")
    ax.set_title("participants per preference group")
    fig.tight_layout()
    path = figures_dir / "group_shares.png"
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def build_report(run_dirs: list[str | Path], out_dir: str | Path) -> dict:
    """Write summary.csv, timeline_relative.csv, groups_summary.csv and
    the PNG figures; returns the written paths."""
    runs = [load_run(d) for d in run_dirs]
    _check_runs(runs)
    out = Path(out_dir)
    figures_dir = out / "figures"
    figures_dir.mkdir(parents=True, exist_ok=True)

    summary = build_summary(runs)
    summary.to_csv(out / "summary.csv", index=False)
    timeline_frame, relative = build_relative_timeline(runs)
    timeline_frame.to_csv(out / "timeline_relative.csv", index=False)
    group_table = build_group_table(runs)
    group_table.to_csv(out / "groups_summary.csv", index=False)

    figure_paths = _plot_timelines(timeline_frame, relative, figures_dir)
    figure_paths += _plot_group_bars(group_table, figures_dir)
    figure_paths.append(_plot_group_shares(group_table, figures_dir))

    return {
        "summary": out / "summary.csv",
        "timeline": out / "timeline_relative.csv",
        "groups": out / "groups_summary.csv",
        "figures": figure_paths,
    }
