from __future__ import annotations

from tourbot import data_path
from tourbot.report import SUMMARY_COLUMNS, load_logs, write_report
from tourbot.simulator import InProcessTarget, load_personas, run_simulation


def _write_batch(engine, out_dir, runs=2):
    personas = load_personas(data_path("personas"))[:3]
    out_dir.mkdir(parents=True, exist_ok=True)
    for persona in personas:
        for run in range(runs):
            log = run_simulation(persona, InProcessTarget(engine), seed=run)
            (out_dir / f"{persona.id}_{run:03d}.jsonl").write_text(
                log.to_jsonl(), encoding="utf-8"
            )
    return 3 * runs


def test_report_writes_summary_and_figures(make_engine, tmp_path):
    engine, _ = make_engine()
    expected_runs = _write_batch(engine, tmp_path / "logs")
    result = write_report(tmp_path / "logs", tmp_path / "report")

    assert result["runs"] == expected_runs
    summary = (tmp_path / "report" / "summary.tsv").read_text(encoding="utf-8").splitlines()
    assert summary[0].split("\t") == SUMMARY_COLUMNS
    assert len(summary) == expected_runs + 1
    for line in summary[1:]:
        cells = line.split("\t")
        assert cells[4] in ("0", "1")
        assert int(cells[3]) > 0

    figures = sorted(p.name for p in (tmp_path / "report" / "figures").glob("*.png"))
    assert figures == ["phase_turns.png", "response_sources.png", "sentiment_trajectories.png"]
    for name in figures:
        assert (tmp_path / "report" / "figures" / name).stat().st_size > 1000

    assert (tmp_path / "report" / "metrics.json").exists()


def test_load_logs_round_trip(make_engine, tmp_path):
    engine, _ = make_engine()
    count = _write_batch(engine, tmp_path / "logs", runs=1)
    logs = load_logs(tmp_path / "logs")
    assert len(logs) == count
    names = [name for name, _ in logs]
    assert names == sorted(names)
