"""Persona-driven automated user for batch testing and metrics.

A persona answers from its scripted lines when they exist for the
current phase; otherwise a seeded sampler driven by its style knobs (or
an LLM backend prompted with the persona) produces the utterance.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from pathlib import Path

import httpx

from .dialogue import Engine
from .llm import ChatExchange, ChatTransportError, GenerationParams, chat


class SimulationError(Exception):
    pass


@dataclass
class Persona:
    id: str
    age: int
    gender: str = ""
    traits: str = ""
    affirm_rate: float = 0.7
    question_rate: float = 0.2
    scripted_answers: dict[str, list[str]] = field(default_factory=dict)

    def __post_init__(self):
        for name, rate in (("affirm_rate", self.affirm_rate), ("question_rate", self.question_rate)):
            if not 0.0 <= rate <= 1.0:
                raise SimulationError(f"{self.id}: {name} must lie in [0,1], got {rate}")

    @classmethod
    def from_file(cls, path) -> Persona:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
        return cls(**raw)


def load_personas(directory) -> list[Persona]:
    personas = [Persona.from_file(p) for p in sorted(Path(directory).glob("*.json"))]
    if not personas:
        raise SimulationError(f"no persona files in {directory}")
    return personas


_AFFIRM_POOL = [
    "Yes, definitely!",
    "Sure, sounds good.",
    "Yeah, I'd love that.",
    "Absolutely, count me in.",
    "Of course, that works for me.",
]
_NEGATE_POOL = [
    "No, not really.",
    "Nope, not my thing.",
    "No thanks, I'll pass.",
    "Not interested, sorry.",
    "Rather not, I'm tired.",
]
_QUESTION_POOL = [
    "How much does it cost to get in?",
    "Is it far from the station?",
    "What time does it open?",
    "How crowded does it get?",
    "Can you tell me a bit more about it?",
]


@dataclass
class ScriptedResponder:
    """Plays the persona's scripted lines per phase, repeating the last one."""

    persona: Persona
    _cursor: dict[str, int] = field(default_factory=dict)

    def has_line(self, phase: str) -> bool:
        return bool(self.persona.scripted_answers.get(phase))

    def utter(self, phase: str, system_utterance: str) -> str:
        lines = self.persona.scripted_answers[phase]
        index = self._cursor.get(phase, 0)
        self._cursor[phase] = index + 1
        return lines[min(index, len(lines) - 1)]


@dataclass
class SampledResponder:
    """Seeded sampler honoring the persona's style knobs."""

    persona: Persona
    rng: random.Random

    def utter(self, phase: str, system_utterance: str) -> str:
        if self.rng.random() < self.persona.question_rate:
            return self.rng.choice(_QUESTION_POOL)
        if self.rng.random() < self.persona.affirm_rate:
            return self.rng.choice(_AFFIRM_POOL)
        return self.rng.choice(_NEGATE_POOL)


@dataclass
class LlmResponder:
    """Prompts a chat backend to play the persona; sampler is the net."""

    persona: Persona
    backend: object
    fallback: SampledResponder

    def utter(self, phase: str, system_utterance: str) -> str:
        exchange = ChatExchange(
            messages=[
                (
                    "system",
                    f"You are role-playing a tourist: age {self.persona.age}, "
                    f"gender {self.persona.gender}, {self.persona.traits}. "
                    "Answer the guide in one short casual sentence, in character.",
                ),
                ("user", f"The guide said: \"{system_utterance}\". Your reply:"),
            ],
            params=GenerationParams(temperature=0.9, max_tokens=60),
            prompt_id=f"persona_{self.persona.id}",
        )
        try:
            return chat(exchange, self.backend)
        except ChatTransportError:
            return self.fallback.utter(phase, system_utterance)


@dataclass
class DialogueLog:
    persona_id: str
    seed: int
    completed: bool
    turns: list[dict]
    plan: dict | None

    def to_jsonl(self) -> str:
        header = {
            "persona_id": self.persona_id,
            "seed": self.seed,
            "completed": self.completed,
            "plan": self.plan,
        }
        lines = [json.dumps(header, ensure_ascii=False)]
        lines += [json.dumps(t, ensure_ascii=False) for t in self.turns]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_jsonl(cls, text: str) -> DialogueLog:
        lines = [json.loads(line) for line in text.splitlines() if line.strip()]
        if not lines:
            raise SimulationError("empty dialogue log")
        header, turns = lines[0], lines[1:]
        return cls(
            persona_id=header["persona_id"],
            seed=header["seed"],
            completed=header["completed"],
            turns=turns,
            plan=header.get("plan"),
        )


class InProcessTarget:
    """Drives an Engine directly."""

    def __init__(self, engine: Engine):
        self.engine = engine

    def start(self, persona: Persona) -> tuple[object, str, str]:
        frame, opening = self.engine.create_session({"age": persona.age})
        return frame, opening, frame.phase.value

    def step(self, handle, text: str) -> dict:
        result = self.engine.advance(handle, text)
        record = result.record.to_json_dict()
        record["phase"] = handle.phase.value
        record["ended"] = result.ended
        return record


class HttpTarget:
    """Drives a running service over its public API."""

    def __init__(self, base_url: str, timeout: float = 30.0):
        self.base_url = base_url.rstrip("/")
        self.client = httpx.Client(timeout=timeout)

    def start(self, persona: Persona) -> tuple[object, str, str]:
        response = self.client.post(f"{self.base_url}/sessions", json={"age": persona.age})
        if response.status_code != 201:
            raise SimulationError(f"session create failed: {response.status_code}")
        body = response.json()
        return body["session_id"], body["system_utterance"], body["phase"]

    def step(self, handle, text: str) -> dict:
        response = self.client.post(
            f"{self.base_url}/sessions/{handle}/utterance", json={"text": text}
        )
        if response.status_code != 200:
            raise SimulationError(f"utterance post failed: {response.status_code}")
        body = response.json()
        return {
            "user_utterance": text,
            "system_utterance": body["system_utterance"],
            "response_source": body["response_source"],
            "phase": body["phase"],
            "ended": body["ended"],
            "plan": body.get("plan"),
        }


def run_simulation(
    persona: Persona,
    target,
    seed: int = 0,
    turn_cap: int = 40,
    llm_backend=None,
) -> DialogueLog:
    """One full dialogue; deterministic for a fixed persona, target, and seed."""
    scripted = ScriptedResponder(persona)
    sampled = SampledResponder(persona, random.Random(seed))
    llm = LlmResponder(persona, llm_backend, sampled) if llm_backend is not None else None

    handle, system_utterance, phase = target.start(persona)
    turns: list[dict] = []
    plan = None
    completed = False
    for _ in range(turn_cap):
        if scripted.has_line(phase):
            text = scripted.utter(phase, system_utterance)
        elif llm is not None:
            text = llm.utter(phase, system_utterance)
        else:
            text = sampled.utter(phase, system_utterance)
        record = target.step(handle, text)
        turns.append(record)
        system_utterance = record["system_utterance"]
        phase = record["phase"]
        if record.get("plan"):
            plan = record["plan"]
        if record["ended"]:
            completed = True
            break
    return DialogueLog(
        persona_id=persona.id, seed=seed, completed=completed, turns=turns, plan=plan
    )


@dataclass
class SimMetrics:
    runs: int
    completion_rate: float
    mean_turns: float
    llm_fallback_rate: float
    per_phase_turns: dict[str, int]

    def to_dict(self) -> dict:
        return {
            "runs": self.runs,
            "completion_rate": self.completion_rate,
            "mean_turns": self.mean_turns,
            "llm_fallback_rate": self.llm_fallback_rate,
            "per_phase_turns": self.per_phase_turns,
        }


def compute_metrics(logs: list[DialogueLog]) -> SimMetrics:
    if not logs:
        raise SimulationError("compute_metrics needs at least one log")
    total_turns = 0
    llm_turns = 0
    per_phase: dict[str, int] = {}
    completed = 0
    for log in logs:
        completed += 1 if log.completed else 0
        total_turns += len(log.turns)
        for turn in log.turns:
            if turn.get("response_source") == "Llm":
                llm_turns += 1
            phase = turn.get("phase", "unknown")
            per_phase[phase] = per_phase.get(phase, 0) + 1
    return SimMetrics(
        runs=len(logs),
        completion_rate=completed / len(logs),
        mean_turns=total_turns / len(logs),
        llm_fallback_rate=llm_turns / total_turns if total_turns else 0.0,
        per_phase_turns=dict(sorted(per_phase.items())),
    )
