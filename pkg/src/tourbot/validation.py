"""Static checks over a parsed scenario.

An empty report means the scenario is well-formed: every state is
reachable, every transition target exists, every non-terminal state can
always make progress, and the pattern data is consistent.
"""

from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass

from .scenario import ConditionKind, Scenario


class FindingKind(enum.Enum):
    UNREACHABLE = "UNREACHABLE"
    DANGLING_TARGET = "DANGLING_TARGET"
    MISSING_DEFAULT = "MISSING_DEFAULT"
    UNKNOWN_PATTERN_SET = "UNKNOWN_PATTERN_SET"
    UNREFERENCED_PATTERN_SET = "UNREFERENCED_PATTERN_SET"
    SHADOWED = "SHADOWED"
    NO_TERMINAL_STATE = "NO_TERMINAL_STATE"


@dataclass(frozen=True)
class Finding:
    kind: FindingKind
    subject: str
    detail: str

    def as_line(self) -> str:
        return f"{self.kind.value}\t{self.subject}\t{self.detail}"


@dataclass
class ValidationReport:
    findings: list[Finding]

    @property
    def ok(self) -> bool:
        return not self.findings

    def of_kind(self, kind: FindingKind) -> list[Finding]:
        return [f for f in self.findings if f.kind is kind]


def reachable_states(scenario: Scenario) -> set[str]:
    """States reachable from the initial state, ignoring dangling edges."""
    seen = {scenario.initial_state}
    queue = deque([scenario.initial_state])
    while queue:
        state = scenario.states[queue.popleft()]
        for t in state.transitions:
            if t.target in scenario.states and t.target not in seen:
                seen.add(t.target)
                queue.append(t.target)
    return seen


def _referenced_pattern_sets(scenario: Scenario) -> set[str]:
    refs = set()
    for state in scenario.states.values():
        for t in state.transitions:
            if t.condition.kind is ConditionKind.MATCHES:
                refs.add(t.condition.pattern_set)
    return refs


def validate(scenario: Scenario) -> ValidationReport:
    findings: list[Finding] = []

    if not any(state.is_terminal for state in scenario.states.values()):
        findings.append(
            Finding(
                FindingKind.NO_TERMINAL_STATE,
                scenario.initial_state,
                "no state is terminal, so the dialogue can never end",
            )
        )

    reached = reachable_states(scenario)
    for state_id in scenario.states:
        if state_id not in reached:
            findings.append(
                Finding(FindingKind.UNREACHABLE, state_id, "no path from the initial state")
            )

    for state in scenario.states.values():
        for t in state.transitions:
            if t.target not in scenario.states:
                findings.append(
                    Finding(
                        FindingKind.DANGLING_TARGET,
                        state.id,
                        f"transition priority {t.priority} targets unknown state {t.target!r}",
                    )
                )

    for state in scenario.states.values():
        if state.is_terminal:
            continue
        defaults = [t for t in state.transitions if t.condition.kind is ConditionKind.DEFAULT]
        if not defaults:
            findings.append(
                Finding(
                    FindingKind.MISSING_DEFAULT,
                    state.id,
                    "non-terminal state has no default transition",
                )
            )
            continue
        # Transitions ordered after a default can never fire.
        first_default = defaults[0].priority
        for t in state.transitions:
            if t.priority > first_default:
                findings.append(
                    Finding(
                        FindingKind.SHADOWED,
                        state.id,
                        f"transition priority {t.priority} ({t.condition.to_expr()}) "
                        f"is shadowed by the default at priority {first_default}",
                    )
                )

    referenced = _referenced_pattern_sets(scenario)
    for ref in sorted(referenced):
        if ref not in scenario.pattern_sets:
            findings.append(
                Finding(
                    FindingKind.UNKNOWN_PATTERN_SET,
                    ref,
                    "condition references a pattern set that is not defined",
                )
            )
    for set_id in scenario.pattern_sets:
        if set_id not in referenced:
            findings.append(
                Finding(
                    FindingKind.UNREFERENCED_PATTERN_SET,
                    set_id,
                    "pattern set is defined but never referenced by a condition",
                )
            )

    return ValidationReport(findings)
