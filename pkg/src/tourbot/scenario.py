"""Data-defined state-transition network that scripts the dialogue.

A scenario is authored as a tab-separated UTF-8 text file with three
sections, so dialogue content stays out of the code:

    [states]       state_id <TAB> phase <TAB> utterance_template <TAB> actions
    [transitions]  from_state <TAB> priority <TAB> condition_expr <TAB> to_state
    [patterns]     pattern_set_id <TAB> pattern

Lines starting with ``#`` are comments.  The first row of ``[states]`` is
the initial state.  Parsing is lenient about graph-level problems
(dangling targets, missing defaults, ...); those are reported by
:func:`tourbot.validation.validate` instead of raised here.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field


class Phase(enum.Enum):
    ICEBREAKER = "Icebreaker"
    THEME_DETERMINATION = "ThemeDetermination"
    SPOT_INTRODUCTION = "SpotIntroduction"
    PLAN_PROPOSAL = "PlanProposal"


PHASE_ORDER = [
    Phase.ICEBREAKER,
    Phase.THEME_DETERMINATION,
    Phase.SPOT_INTRODUCTION,
    Phase.PLAN_PROPOSAL,
]


class ConditionKind(enum.Enum):
    MATCHES = "matches"
    YES_NO_IS = "yes_no_is"
    SENTIMENT_AT_LEAST = "sentiment_at_least"
    SENTIMENT_BELOW = "sentiment_below"
    FRAME_HAS = "frame_has"
    DEFAULT = "default"


class ScenarioError(Exception):
    """Problem in a scenario document, with its file location."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


@dataclass(frozen=True)
class Condition:
    kind: ConditionKind
    pattern_set: str | None = None
    label: str | None = None  # "yes" | "no" | "other"
    threshold: float | None = None
    key: str | None = None

    def to_expr(self) -> str:
        if self.kind is ConditionKind.MATCHES:
            return f"matches({self.pattern_set})"
        if self.kind is ConditionKind.YES_NO_IS:
            return f"yes_no = {self.label}"
        if self.kind is ConditionKind.SENTIMENT_AT_LEAST:
            return f"sentiment >= {self.threshold!r}"
        if self.kind is ConditionKind.SENTIMENT_BELOW:
            return f"sentiment < {self.threshold!r}"
        if self.kind is ConditionKind.FRAME_HAS:
            return f"frame_has({self.key})"
        return "default"


@dataclass(frozen=True)
class Transition:
    priority: int
    condition: Condition
    target: str


@dataclass
class State:
    id: str
    phase: Phase
    system_utterance_template: str
    transitions: list[Transition] = field(default_factory=list)
    actions: list[str] = field(default_factory=list)

    @property
    def is_terminal(self) -> bool:
        return not self.transitions


@dataclass(frozen=True)
class MatchPattern:
    """Case-insensitive substring pattern; ``*`` makes it an anchored wildcard."""

    text: str

    def matches(self, utterance: str) -> bool:
        pat = self.text.lower()
        low = utterance.lower()
        if "*" in pat:
            regex = ".*".join(re.escape(part) for part in pat.split("*"))
            return re.fullmatch(regex, low, flags=re.DOTALL) is not None
        return pat in low


@dataclass
class Scenario:
    states: dict[str, State]
    pattern_sets: dict[str, list[MatchPattern]]
    initial_state: str
    metadata: dict[str, str] = field(default_factory=dict)

    def pattern_set_matches(self, set_id: str, utterance: str) -> bool:
        return any(p.matches(utterance) for p in self.pattern_sets.get(set_id, []))


_LABELS = ("yes", "no", "other")
_CALL_RE = re.compile(r"^(\w+)\(\s*([\w-]+)\s*\)$")
_YESNO_RE = re.compile(r"^yes_no\s*=\s*(\w+)$")
_SENT_RE = re.compile(r"^sentiment\s*(>=|<)\s*([0-9.eE+-]+)$")


def compile_condition(expr: str) -> Condition:
    """Compile a condition expression into a :class:`Condition`.

    Grammar: ``matches(<id>)`` | ``yes_no = <yes|no|other>`` |
    ``sentiment >= <x>`` | ``sentiment < <x>`` | ``frame_has(<key>)`` |
    ``default``.
    """
    text = expr.strip()
    if not text:
        raise ScenarioError("empty condition expression")
    if text == "default":
        return Condition(ConditionKind.DEFAULT)
    m = _YESNO_RE.match(text)
    if m:
        label = m.group(1).lower()
        if label not in _LABELS:
            raise ScenarioError(f"unknown yes_no label {label!r}")
        return Condition(ConditionKind.YES_NO_IS, label=label)
    m = _SENT_RE.match(text)
    if m:
        try:
            threshold = float(m.group(2))
        except ValueError:
            raise ScenarioError(f"bad sentiment threshold {m.group(2)!r}") from None
        if not 0.0 <= threshold <= 1.0:
            raise ScenarioError(f"sentiment threshold {threshold} outside [0,1]")
        kind = (
            ConditionKind.SENTIMENT_AT_LEAST
            if m.group(1) == ">="
            else ConditionKind.SENTIMENT_BELOW
        )
        return Condition(kind, threshold=threshold)
    m = _CALL_RE.match(text)
    if m:
        func, arg = m.groups()
        if func == "matches":
            return Condition(ConditionKind.MATCHES, pattern_set=arg)
        if func == "frame_has":
            return Condition(ConditionKind.FRAME_HAS, key=arg)
        raise ScenarioError(f"unknown predicate {func!r}")
    raise ScenarioError(f"malformed condition expression {text!r}")


_SECTIONS = ("[states]", "[transitions]", "[patterns]")


def parse_scenario(document: str) -> Scenario:
    """Parse a scenario document into a fully linked :class:`Scenario`."""
    states: dict[str, State] = {}
    pattern_sets: dict[str, list[MatchPattern]] = {}
    pending: list[tuple[int, str, int, Condition, str]] = []
    section: str | None = None

    for lineno, raw in enumerate(document.splitlines(), start=1):
        line = raw.rstrip("\n")
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if stripped.startswith("[") and stripped.endswith("]"):
            if stripped not in _SECTIONS:
                raise ScenarioError(f"unknown section {stripped!r}", lineno)
            section = stripped
            continue
        if section is None:
            raise ScenarioError("content before any section header", lineno)
        cells = line.split("\t")
        if section == "[states]":
            if len(cells) == 3:
                cells = cells + [""]  # editors strip the trailing tab of empty actions
            if len(cells) != 4:
                raise ScenarioError(
                    f"expected 4 tab-separated cells in [states], got {len(cells)}", lineno
                )
            state_id, phase_name, template, actions_cell = (c.strip() for c in cells)
            if not state_id:
                raise ScenarioError("empty state id", lineno)
            if state_id in states:
                raise ScenarioError(f"duplicate state id {state_id!r}", lineno)
            try:
                phase = Phase(phase_name)
            except ValueError:
                raise ScenarioError(f"unknown phase name {phase_name!r}", lineno) from None
            actions = _split_actions(actions_cell)
            states[state_id] = State(state_id, phase, template, [], actions)
        elif section == "[transitions]":
            if len(cells) != 4:
                raise ScenarioError(
                    f"expected 4 tab-separated cells in [transitions], got {len(cells)}",
                    lineno,
                )
            from_state, pri_text, cond_text, to_state = (c.strip() for c in cells)
            try:
                priority = int(pri_text)
            except ValueError:
                raise ScenarioError(f"priority {pri_text!r} is not an integer", lineno) from None
            if priority < 0:
                raise ScenarioError(f"negative priority {priority}", lineno)
            try:
                condition = compile_condition(cond_text)
            except ScenarioError as exc:
                raise ScenarioError(str(exc), lineno) from None
            pending.append((lineno, from_state, priority, condition, to_state))
        else:  # [patterns]
            if len(cells) != 2:
                raise ScenarioError(
                    f"expected 2 tab-separated cells in [patterns], got {len(cells)}", lineno
                )
            set_id, pattern = cells[0].strip(), cells[1].strip()
            if not set_id or not pattern:
                raise ScenarioError("empty pattern set id or pattern", lineno)
            pattern_sets.setdefault(set_id, []).append(MatchPattern(pattern))

    if not states:
        raise ScenarioError("scenario defines no states")

    for lineno, from_state, priority, condition, to_state in pending:
        owner = states.get(from_state)
        if owner is None:
            raise ScenarioError(f"transition from unknown state {from_state!r}", lineno)
        if any(t.priority == priority for t in owner.transitions):
            raise ScenarioError(
                f"duplicate priority {priority} in state {from_state!r}", lineno
            )
        owner.transitions.append(Transition(priority, condition, to_state))

    for state in states.values():
        state.transitions.sort(key=lambda t: t.priority)

    initial = next(iter(states))
    return Scenario(states=states, pattern_sets=pattern_sets, initial_state=initial)


def _split_actions(cell: str) -> list[str]:
    """Split a comma-separated action list, ignoring commas inside parens."""
    if not cell:
        return []
    out: list[str] = []
    depth = 0
    current: list[str] = []
    for ch in cell:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            out.append("".join(current).strip())
            current = []
        else:
            current.append(ch)
    out.append("".join(current).strip())
    return [a for a in out if a]


def serialize_scenario(scenario: Scenario) -> str:
    """Render a scenario back into the tabular file format.

    ``parse_scenario(serialize_scenario(s))`` is structurally equal to ``s``.
    """
    lines: list[str] = ["[states]"]
    for state in scenario.states.values():
        lines.append(
            "\t".join(
                [
                    state.id,
                    state.phase.value,
                    state.system_utterance_template,
                    ",".join(state.actions),
                ]
            )
        )
    lines.append("[transitions]")
    for state in scenario.states.values():
        for t in state.transitions:
            lines.append("\t".join([state.id, str(t.priority), t.condition.to_expr(), t.target]))
    lines.append("[patterns]")
    for set_id, patterns in scenario.pattern_sets.items():
        for p in patterns:
            lines.append(f"{set_id}\t{p.text}")
    return "\n".join(lines) + "\n"


def load_scenario(path) -> Scenario:
    with open(path, encoding="utf-8") as fh:
        return parse_scenario(fh.read())
