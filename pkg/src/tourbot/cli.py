"""Command-line entry points: scenario validation, recognizer training
and evaluation, the HTTP service, simulation batches, and reports."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import data_path
from .nlu.data import load_sentiment_dataset, load_yesno_dataset
from .nlu.embedding import HashingEmbedder
from .nlu.ffn import FfnModel, TrainingConfig, ffn_forward, ffn_train, load_model, save_model
from .nlu.sentiment import encode_sentiment_batch
from .nlu.yesno import encode_yesno_batch
from .scenario import load_scenario
from .validation import validate


def _cmd_validate_scenario(args) -> int:
    scenario = load_scenario(args.path)
    report = validate(scenario)
    for finding in report.findings:
        print(finding.as_line())
    return 0 if report.ok else 2


def _encode_task(task: str, data_file, dim: int):
    embedder = HashingEmbedder(dim)
    if task == "yesno":
        examples = load_yesno_dataset(data_file)
        inputs, targets = encode_yesno_batch(examples, embedder)
        head, out = "softmax", 3
    else:
        examples = load_sentiment_dataset(data_file)
        inputs, targets = encode_sentiment_batch(examples, embedder)
        head, out = "sigmoid", 1
    return inputs, targets, head, out


def _cmd_train(args) -> int:
    inputs, targets, head, out = _encode_task(args.task, args.data, args.dim)
    model = FfnModel.initialize(args.dim, args.hidden, out, head, seed=args.seed)
    config = TrainingConfig(
        lr=args.lr, epochs=args.epochs, seed=args.seed, batch_size=args.batch_size
    )
    trained, losses = ffn_train(model, inputs, targets, config)
    save_model(trained, args.out)
    print(f"trained {args.task} model on {inputs.shape[0]} examples")
    print(f"first epoch loss {losses[0]:.4f}, final epoch loss {losses[-1]:.4f}")
    print(f"saved to {args.out}")
    return 0


def _cmd_eval(args) -> int:
    model = load_model(args.model)
    inputs, targets, head, _ = _encode_task(args.task, args.data, model.input_dim)
    if model.activation != head:
        print(f"model head {model.activation!r} does not fit task {args.task}", file=sys.stderr)
        return 2
    outputs = ffn_forward(model, inputs)
    if args.task == "yesno":
        predicted = outputs.argmax(axis=1)
        accuracy = float((predicted == targets).mean())
        print(f"accuracy {accuracy:.4f} on {inputs.shape[0]} examples")
    else:
        mae = float(np.abs(outputs[:, 0] - targets).mean())
        print(f"mae {mae:.4f} on {inputs.shape[0]} examples")
    return 0


def _cmd_serve(args) -> int:
    from .service import ServiceConfig, run_service

    config = ServiceConfig.load(args.config) if args.config else ServiceConfig.load()
    run_service(config)
    return 0


def _cmd_simulate(args) -> int:
    from .llm import MockChatBackend
    from .prompts import PromptLibrary
    from .responses import ResponsePolicy
    from .service import ServiceConfig, build_engine
    from .simulator import HttpTarget, InProcessTarget, compute_metrics, load_personas, run_simulation

    personas = load_personas(args.personas)
    if args.endpoint:
        target = HttpTarget(args.endpoint)
    else:
        config = ServiceConfig.load(args.config) if args.config else ServiceConfig()
        engine = build_engine(config)
        target = InProcessTarget(engine)

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    logs = []
    for persona in personas:
        for run in range(args.runs):
            seed = args.seed + run
            log = run_simulation(persona, target, seed=seed, turn_cap=args.turn_cap)
            logs.append(log)
            path = out_dir / f"{persona.id}_{run:03d}.jsonl"
            path.write_text(log.to_jsonl(), encoding="utf-8")
    metrics = compute_metrics(logs)
    (out_dir / "metrics.json").write_text(
        json.dumps(metrics.to_dict(), indent=2) + "\n", encoding="utf-8"
    )
    print(f"{metrics.runs} runs, completion {metrics.completion_rate:.2f}, "
          f"mean turns {metrics.mean_turns:.1f}, llm fallback {metrics.llm_fallback_rate:.2f}")
    return 0


def _cmd_report(args) -> int:
    from .report import write_report

    result = write_report(args.logs, args.out)
    print(f"summarized {result['runs']} runs; figures: {', '.join(result['figures'])}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tourbot")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate-scenario", help="check a scenario file; exit 2 on findings")
    p.add_argument("path")
    p.set_defaults(func=_cmd_validate_scenario)

    p = sub.add_parser("train-nlu", help="train a recognizer head")
    p.add_argument("--task", choices=["yesno", "sentiment"], required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--dim", type=int, default=256)
    p.add_argument("--hidden", type=int, default=64)
    p.add_argument("--lr", type=float, default=0.5)
    p.add_argument("--epochs", type=int, default=300)
    p.add_argument("--batch-size", type=int, default=16)
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("eval-nlu", help="accuracy (yesno) or MAE (sentiment) on a dataset")
    p.add_argument("--task", choices=["yesno", "sentiment"], required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--model", required=True)
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--config", default=None)
    p.set_defaults(func=_cmd_serve)

    p = sub.add_parser("simulate", help="run persona simulations")
    p.add_argument("--personas", default=str(data_path("personas")))
    p.add_argument("--runs", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--turn-cap", type=int, default=40)
    p.add_argument("--endpoint", default=None, help="drive a running service instead")
    p.add_argument("--in-process", action="store_true", help="drive the engine directly (default)")
    p.add_argument("--config", default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("report", help="summary.tsv + figures from simulation logs")
    p.add_argument("--logs", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_report)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
