"""Per-session scenario execution.

Each user turn runs a fixed pipeline: pattern matching, yes/no
classification, sentiment estimation, transition resolution, target-state
actions, response selection.  The session frame accumulates everything the
plan builder needs across the four phases.
"""

from __future__ import annotations

import re
import uuid
from dataclasses import dataclass, field

from .nlu.sentiment import SentimentEstimator, SentimentScore
from .nlu.yesno import YesNoResult, classify_yes_no
from .planner import Plan, build_plan, determine_theme, render_recommendation_reason
from .prompts import render_template
from .responses import ResponsePolicy, extract_desired_spot, scan_catalog_names
from .scenario import Condition, ConditionKind, Scenario, State, Transition
from .spots import SpotCatalog, Theme, select_introduction_spots
from .validation import validate


class DialogueError(Exception):
    pass


class InvalidScenarioError(DialogueError):
    def __init__(self, findings):
        self.findings = findings
        super().__init__(
            "scenario failed validation: " + "; ".join(f.as_line() for f in findings)
        )


class TerminalStateError(DialogueError):
    pass


class MissingMetadataError(DialogueError):
    pass


class ActionDataError(DialogueError):
    """An action referenced frame data that is not available yet."""


@dataclass
class TurnRecord:
    turn_index: int
    user_utterance: str
    nlu: dict
    matched_pattern_set: str | None
    fired_transition: tuple[str, int, str]
    system_utterance: str
    response_source: str
    plan: dict | None = None

    def to_json_dict(self) -> dict:
        frm, priority, to = self.fired_transition
        return {
            "turn_index": self.turn_index,
            "user_utterance": self.user_utterance,
            "nlu": self.nlu,
            "matched_pattern_set": self.matched_pattern_set,
            "fired_transition": {"from": frm, "priority": priority, "to": to},
            "system_utterance": self.system_utterance,
            "response_source": self.response_source,
            "plan": self.plan,
        }


@dataclass
class SessionFrame:
    session_id: str
    current_state: str
    phase: object
    user_age: int
    user_name: str | None = None
    visited_spots: set[str] = field(default_factory=set)
    desired_spot: str | None = None
    theme: Theme | None = None
    introduced_spots: list[str] = field(default_factory=list)
    interest_answers: dict[str, YesNoResult] = field(default_factory=dict)
    interest_sentiments: dict[str, SentimentScore] = field(default_factory=dict)
    theme_probes: dict[Theme, tuple[YesNoResult, SentimentScore]] = field(default_factory=dict)
    sentiment_history: list[SentimentScore] = field(default_factory=list)
    turn_count: int = 0
    transcript: list[TurnRecord] = field(default_factory=list)
    plan: Plan | None = None
    spot_in_focus: str | None = None
    last_system_utterance: str = ""
    _catalog: SpotCatalog | None = field(default=None, repr=False, compare=False)

    def render_context(self) -> dict[str, object]:
        ctx: dict[str, object] = {"user_age": self.user_age}
        if self.user_name:
            ctx["user_name"] = self.user_name
        if self.theme is not None:
            ctx["theme_name"] = self.theme.value
        if self.visited_spots:
            ctx["visited_names"] = ", ".join(
                self._spot_name(s) for s in sorted(self.visited_spots)
            )
        if self.desired_spot:
            ctx["desired_spot_name"] = self._spot_name(self.desired_spot)
        for slot, spot_id in enumerate(self.introduced_spots, start=1):
            ctx[f"spot_{slot}_name"] = self._spot_name(spot_id)
            ctx[f"spot_{slot}_description"] = self._spot_description(spot_id)
        if self.plan is not None:
            first, second = self.plan.spots
            ctx["plan_spot_1_name"] = self._spot_name(first)
            ctx["plan_spot_2_name"] = self._spot_name(second)
            ctx["plan_rationale"] = self.plan.rationale_text
            ctx["plan_summary"] = (
                f"{self._spot_name(first)} and then {self._spot_name(second)}"
            )
        return ctx

    def summary_text(self) -> str:
        bits = [f"visitor age {self.user_age}"]
        if self.theme is not None:
            bits.append(f"recommended theme {self.theme.value}")
        if self.desired_spot:
            bits.append(f"wants to visit {self._spot_name(self.desired_spot)}")
        if self.visited_spots:
            bits.append(
                "already visited " + ", ".join(self._spot_name(s) for s in sorted(self.visited_spots))
            )
        if self.introduced_spots:
            bits.append(
                "introduced " + ", ".join(self._spot_name(s) for s in self.introduced_spots)
            )
        return "; ".join(bits)

    def history_text(self, turns: int = 6) -> str:
        lines = []
        for record in self.transcript[-turns:]:
            lines.append(f"User: {record.user_utterance}")
            lines.append(f"Guide: {record.system_utterance}")
        return "\n".join(lines)

    def _spot_name(self, spot_id: str) -> str:
        if self._catalog is not None:
            spot = self._catalog.get(spot_id)
            if spot is not None:
                return spot.name
        return spot_id

    def _spot_description(self, spot_id: str) -> str:
        if self._catalog is not None:
            spot = self._catalog.get(spot_id)
            if spot is not None:
                return spot.description
        return ""


@dataclass
class Signals:
    matched: str | None
    yes_no: YesNoResult
    sentiment: SentimentScore
    frame: SessionFrame


@dataclass
class TurnResult:
    system_utterance: str
    frame: SessionFrame
    ended: bool
    record: TurnRecord


_FRAME_KEYS = ("desired_spot", "theme", "visited_spots", "introduced_spots", "plan")


def frame_has(frame: SessionFrame, key: str) -> bool:
    value = getattr(frame, key)
    if isinstance(value, (set, list, dict)):
        return bool(value)
    return value is not None


def condition_holds(condition: Condition, signals: Signals) -> bool:
    kind = condition.kind
    if kind is ConditionKind.DEFAULT:
        return True
    if kind is ConditionKind.MATCHES:
        return signals.matched == condition.pattern_set
    if kind is ConditionKind.YES_NO_IS:
        return signals.yes_no.label == condition.label
    if kind is ConditionKind.SENTIMENT_AT_LEAST:
        return signals.sentiment.value >= condition.threshold
    if kind is ConditionKind.SENTIMENT_BELOW:
        return signals.sentiment.value < condition.threshold
    if kind is ConditionKind.FRAME_HAS:
        return frame_has(signals.frame, condition.key)
    raise DialogueError(f"unhandled condition kind {kind}")


def pick_transition(state: State, signals: Signals) -> Transition:
    """Lowest-priority transition whose condition holds."""
    if state.is_terminal:
        raise TerminalStateError(f"state {state.id!r} has no transitions")
    for transition in state.transitions:
        if condition_holds(transition.condition, signals):
            return transition
    raise DialogueError(f"no transition fired in state {state.id!r} (missing default?)")


_ACTION_RE = re.compile(r"^(\w+)(?:\((\w+)\))?$")
_SLOT_RE = re.compile(r"^spot_([123])$")

ACTION_NAMES = (
    "record_visited",
    "record_desired",
    "record_theme_probe",
    "record_interest",
    "set_theme",
    "decide_theme",
    "select_spots",
    "mark_plan_ready",
)


def parse_action(text: str) -> tuple[str, str | None]:
    m = _ACTION_RE.match(text.strip())
    if not m:
        raise DialogueError(f"malformed action {text!r}")
    name, arg = m.groups()
    if name not in ACTION_NAMES:
        raise DialogueError(f"unknown action {name!r}")
    if name in ("record_theme_probe", "set_theme"):
        if arg is None or arg not in Theme._value2member_map_:
            raise DialogueError(f"action {name} needs a theme argument, got {arg!r}")
    elif name == "record_interest":
        if arg is None or not _SLOT_RE.match(arg):
            raise DialogueError(f"action {name} needs a spot_1..spot_3 argument, got {arg!r}")
    elif arg is not None:
        raise DialogueError(f"action {name} takes no argument")
    return name, arg


class Engine:
    """Shared, read-only dialogue resources plus the advance pipeline.

    The scenario is validated once here; sessions then share it safely.
    """

    def __init__(
        self,
        scenario: Scenario,
        catalog: SpotCatalog,
        yesno_backend,
        sentiment_estimator: SentimentEstimator,
        policy: ResponsePolicy,
    ):
        report = validate(scenario)
        if not report.ok:
            raise InvalidScenarioError(report.findings)
        for state in scenario.states.values():
            for action in state.actions:
                parse_action(action)
            for t in state.transitions:
                if t.condition.kind is ConditionKind.FRAME_HAS and t.condition.key not in _FRAME_KEYS:
                    raise DialogueError(
                        f"state {state.id!r}: frame_has key {t.condition.key!r} "
                        f"is not one of {_FRAME_KEYS}"
                    )
        self.scenario = scenario
        self.catalog = catalog
        self.yesno_backend = yesno_backend
        self.sentiment_estimator = sentiment_estimator
        self.policy = policy

    def create_session(self, metadata: dict) -> tuple[SessionFrame, str]:
        if "age" not in metadata:
            raise MissingMetadataError("session metadata needs the visitor's age")
        age = metadata["age"]
        if not isinstance(age, int) or isinstance(age, bool) or age < 0:
            raise MissingMetadataError(f"age must be a non-negative integer, got {age!r}")
        initial = self.scenario.states[self.scenario.initial_state]
        frame = SessionFrame(
            session_id=str(uuid.uuid4()),
            current_state=initial.id,
            phase=initial.phase,
            user_age=age,
            user_name=metadata.get("name"),
            _catalog=self.catalog,
        )
        opening = render_template(initial.system_utterance_template, frame.render_context())
        frame.last_system_utterance = opening
        return frame, opening

    def advance(self, frame: SessionFrame, user_utterance: str) -> TurnResult:
        state = self.scenario.states[frame.current_state]
        if state.is_terminal:
            raise TerminalStateError(f"session already ended at state {state.id!r}")

        matched = self._match_patterns(state, user_utterance)
        yes_no = classify_yes_no(frame.last_system_utterance, user_utterance, self.yesno_backend)
        sentiment = self.sentiment_estimator.estimate(user_utterance, frame.user_age)
        frame.sentiment_history.append(sentiment)

        signals = Signals(matched=matched, yes_no=yes_no, sentiment=sentiment, frame=frame)
        transition = pick_transition(state, signals)
        target = self.scenario.states[transition.target]
        frame.current_state = target.id
        frame.phase = target.phase

        turn = _TurnContext(
            frame=frame,
            utterance=user_utterance,
            yes_no=yes_no,
            sentiment=sentiment,
            llm_allowed=matched is None,
        )
        for action in target.actions:
            self._run_action(action, turn)

        utterance = self.policy.respond(target, user_utterance, frame, matched)
        ended = target.is_terminal

        frame.turn_count += 1
        record = TurnRecord(
            turn_index=frame.turn_count,
            user_utterance=user_utterance,
            nlu={
                "yes_no": {"label": yes_no.label, "scores": yes_no.scores},
                "sentiment": {"value": sentiment.value, "model_id": sentiment.model_id},
            },
            matched_pattern_set=matched,
            fired_transition=(state.id, transition.priority, target.id),
            system_utterance=utterance.text,
            response_source=utterance.source.value,
            plan=frame.plan.to_export(self.catalog) if ended and frame.plan else None,
        )
        frame.transcript.append(record)
        frame.last_system_utterance = utterance.text
        return TurnResult(utterance.text, frame, ended, record)

    def _match_patterns(self, state: State, utterance: str) -> str | None:
        """First pattern set referenced by the state that matches, in
        transition priority order."""
        for t in state.transitions:
            if t.condition.kind is ConditionKind.MATCHES:
                if self.scenario.pattern_set_matches(t.condition.pattern_set, utterance):
                    return t.condition.pattern_set
        return None

    def _run_action(self, action: str, turn: _TurnContext) -> None:
        name, arg = parse_action(action)
        frame = turn.frame
        if name == "record_visited":
            for spot in scan_catalog_names(turn.utterance, self.catalog):
                frame.visited_spots.add(spot.id)
        elif name == "record_desired":
            found = extract_desired_spot(
                turn.utterance,
                self.catalog,
                library=self.policy.library,
                backend=self.policy.backend,
                allow_llm=turn.llm_allowed,
            )
            if found is not None:
                frame.desired_spot = found
        elif name == "record_theme_probe":
            frame.theme_probes[Theme(arg)] = (turn.yes_no, turn.sentiment)
        elif name == "record_interest":
            slot = int(_SLOT_RE.match(arg).group(1))
            if slot > len(frame.introduced_spots):
                raise ActionDataError(
                    f"record_interest({arg}) but only {len(frame.introduced_spots)} spots introduced"
                )
            spot_id = frame.introduced_spots[slot - 1]
            frame.interest_answers[spot_id] = turn.yes_no
            frame.interest_sentiments[spot_id] = turn.sentiment
            frame.spot_in_focus = (
                frame.introduced_spots[slot] if slot < len(frame.introduced_spots) else None
            )
        elif name == "set_theme":
            frame.theme = Theme(arg)
        elif name == "decide_theme":
            frame.theme = determine_theme(frame, self.catalog)
        elif name == "select_spots":
            if frame.theme is None:
                raise ActionDataError("select_spots needs the theme to be decided first")
            spots = select_introduction_spots(
                self.catalog, frame.theme, frame.visited_spots, frame.desired_spot
            )
            frame.introduced_spots = [s.id for s in spots]
            frame.spot_in_focus = frame.introduced_spots[0]
        elif name == "mark_plan_ready":
            plan = build_plan(
                frame.introduced_spots,
                frame.interest_answers,
                frame.interest_sentiments,
                frame.desired_spot,
            )
            rationale = render_recommendation_reason(plan, frame, self.catalog)
            if turn.llm_allowed:
                names = [self._spot_name(s) for s in plan.spots]
                rationale = self.policy.polish_rationale(rationale, names)
            frame.plan = plan.with_rationale(rationale)

    def _spot_name(self, spot_id: str) -> str:
        spot = self.catalog.get(spot_id)
        return spot.name if spot else spot_id


@dataclass
class _TurnContext:
    frame: SessionFrame
    utterance: str
    yes_no: YesNoResult
    sentiment: SentimentScore
    llm_allowed: bool


def transcript_jsonl(frame: SessionFrame) -> str:
    """One TurnRecord per line, stable field order."""
    import json

    return "\n".join(json.dumps(r.to_json_dict(), ensure_ascii=False) for r in frame.transcript)
