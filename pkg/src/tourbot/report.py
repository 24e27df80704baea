"""Render simulation batches into a delimited summary plus figures.

Reads the per-run JSONL logs a simulation batch wrote, emits a
``summary.tsv`` next to ``metrics.json``, and renders PNG charts of
turn counts, response sources, and sentiment trajectories.
"""

from __future__ import annotations

import json
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .simulator import DialogueLog, compute_metrics

SUMMARY_COLUMNS = ["run", "persona_id", "seed", "turns", "completed", "llm_turns", "plan_spots"]


def load_logs(directory) -> list[tuple[str, DialogueLog]]:
    logs = []
    for path in sorted(Path(directory).glob("*.jsonl")):
        logs.append((path.stem, DialogueLog.from_jsonl(path.read_text(encoding="utf-8"))))
    return logs


def write_summary_tsv(logs: list[tuple[str, DialogueLog]], out_path) -> None:
    lines = ["\t".join(SUMMARY_COLUMNS)]
    for run_name, log in logs:
        llm_turns = sum(1 for t in log.turns if t.get("response_source") == "Llm")
        spots = ""
        if log.plan:
            spots = ";".join(s["name"] for s in log.plan.get("spots", []))
        lines.append(
            "\t".join(
                [
                    run_name,
                    log.persona_id,
                    str(log.seed),
                    str(len(log.turns)),
                    "1" if log.completed else "0",
                    str(llm_turns),
                    spots,
                ]
            )
        )
    Path(out_path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def render_figures(logs: list[tuple[str, DialogueLog]], out_dir) -> list[Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []

    metrics = compute_metrics([log for _, log in logs])
    fig, ax = plt.subplots(figsize=(6, 4))
    phases = list(metrics.per_phase_turns)
    ax.bar(range(len(phases)), [metrics.per_phase_turns[p] for p in phases], color="#4878a8")
    ax.set_xticks(range(len(phases)))
    ax.set_xticklabels(phases, rotation=20, ha="right")
    ax.set_ylabel("user turns")
    ax.set_title("Turns spent per dialogue phase")
    fig.tight_layout()
    path = out_dir / "phase_turns.png"
    fig.savefig(path, dpi=120)
    plt.close(fig)
    written.append(path)

    fig, ax = plt.subplots(figsize=(5, 4))
    rule = sum(
        1 for _, log in logs for t in log.turns if t.get("response_source") == "Rule"
    )
    llm = sum(1 for _, log in logs for t in log.turns if t.get("response_source") == "Llm")
    ax.bar([0, 1], [rule, llm], color=["#4878a8", "#d1605e"])
    ax.set_xticks([0, 1])
    ax.set_xticklabels(["Rule", "Llm"])
    ax.set_ylabel("system turns")
    ax.set_title("Response source split")
    fig.tight_layout()
    path = out_dir / "response_sources.png"
    fig.savefig(path, dpi=120)
    plt.close(fig)
    written.append(path)

    fig, ax = plt.subplots(figsize=(6, 4))
    for run_name, log in logs:
        values = [
            t["nlu"]["sentiment"]["value"]
            for t in log.turns
            if isinstance(t.get("nlu"), dict)
        ]
        if values:
            ax.plot(range(1, len(values) + 1), values, marker="o", alpha=0.6, label=run_name)
    ax.set_xlabel("turn")
    ax.set_ylabel("sentiment")
    ax.set_ylim(-0.05, 1.05)
    ax.set_title("Per-turn sentiment trajectories")
    if len(logs) <= 8:
        ax.legend(fontsize=7)
    fig.tight_layout()
    path = out_dir / "sentiment_trajectories.png"
    fig.savefig(path, dpi=120)
    plt.close(fig)
    written.append(path)
    return written


def write_report(log_dir, out_dir) -> dict:
    """Full report: summary.tsv, metrics.json, and figures/ under out_dir."""
    logs = load_logs(log_dir)
    if not logs:
        raise FileNotFoundError(f"no .jsonl logs under {log_dir}")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_summary_tsv(logs, out_dir / "summary.tsv")
    metrics = compute_metrics([log for _, log in logs])
    (out_dir / "metrics.json").write_text(
        json.dumps(metrics.to_dict(), indent=2) + "\n", encoding="utf-8"
    )
    figures = render_figures(logs, out_dir / "figures")
    return {"runs": metrics.runs, "figures": [str(p) for p in figures]}
