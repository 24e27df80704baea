from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tourbot.scenario import (
    Condition,
    ConditionKind,
    MatchPattern,
    Phase,
    Scenario,
    ScenarioError,
    State,
    Transition,
    compile_condition,
    parse_scenario,
    serialize_scenario,
)

MINIMAL = """
[states]
greet\tIcebreaker\tHello there!\t
end\tPlanProposal\tGoodbye!\t
[transitions]
greet\t0\tdefault\tend
"""


def test_minimal_two_state_scenario():
    scenario = parse_scenario(MINIMAL)
    assert len(scenario.states) == 2
    assert scenario.initial_state == "greet"
    transitions = scenario.states["greet"].transitions
    assert len(transitions) == 1
    assert transitions[0].condition.kind is ConditionKind.DEFAULT
    assert transitions[0].target == "end"
    assert scenario.states["end"].is_terminal


def test_yes_no_condition_row():
    doc = MINIMAL.replace("default", "yes_no = yes")
    scenario = parse_scenario(doc)
    cond = scenario.states["greet"].transitions[0].condition
    assert cond.kind is ConditionKind.YES_NO_IS
    assert cond.label == "yes"


def test_twelve_state_fixture_covers_all_phases(scenario_dir):
    text = (scenario_dir / "clean_tourist_12.tsv").read_text(encoding="utf-8")
    scenario = parse_scenario(text)
    assert len(scenario.states) == 12
    phases = {state.phase for state in scenario.states.values()}
    assert phases == set(Phase)
    # round-trip re-serialization is the authoring check for this fixture
    assert parse_scenario(serialize_scenario(scenario)) == scenario


@pytest.mark.parametrize(
    "expr,kind",
    [
        ("default", ConditionKind.DEFAULT),
        ("matches(affirm_patterns)", ConditionKind.MATCHES),
        ("yes_no = other", ConditionKind.YES_NO_IS),
        ("frame_has(theme)", ConditionKind.FRAME_HAS),
    ],
)
def test_compile_condition_kinds(expr, kind):
    assert compile_condition(expr).kind is kind


def test_compile_condition_sentiment_threshold():
    cond = compile_condition("sentiment >= 0.6")
    assert cond.kind is ConditionKind.SENTIMENT_AT_LEAST
    assert cond.threshold == 0.6
    below = compile_condition("sentiment < 0.25")
    assert below.kind is ConditionKind.SENTIMENT_BELOW
    assert below.threshold == 0.25


def test_compile_condition_matches_id():
    cond = compile_condition("matches(affirm_patterns)")
    assert cond.pattern_set == "affirm_patterns"


@pytest.mark.parametrize(
    "expr",
    ["", "unknown(x)", "sentiment >= 1.5", "sentiment >= -0.1", "yes_no = maybe", "sentiment ="],
)
def test_compile_condition_rejects(expr):
    with pytest.raises(ScenarioError):
        compile_condition(expr)


@pytest.mark.parametrize(
    "mutate,fragment",
    [
        (lambda d: d.replace("greet\tIcebreaker", "greet\tWarmup"), "unknown phase"),
        (lambda d: d + "greet\t0\tdefault\tend\n", "duplicate priority"),
        (lambda d: d.replace("[transitions]", "[links]"), "unknown section"),
        (lambda d: d.replace("default", "sometimes"), "malformed condition"),
        (lambda d: d.replace("greet\t0\tdefault\tend", "greet\tdefault\tend"), "4 tab-separated"),
    ],
)
def test_parse_errors_carry_location(mutate, fragment):
    with pytest.raises(ScenarioError) as exc:
        parse_scenario(mutate(MINIMAL))
    assert fragment in str(exc.value)
    assert "line" in str(exc.value)


def test_duplicate_state_id_rejected():
    doc = MINIMAL + "[states]\ngreet\tIcebreaker\tAgain\t\n"
    with pytest.raises(ScenarioError) as exc:
        parse_scenario(doc)
    assert "duplicate state id" in str(exc.value)


def test_transition_from_unknown_state_rejected():
    doc = MINIMAL + "nowhere\t0\tdefault\tend\n"
    with pytest.raises(ScenarioError):
        parse_scenario(doc)


def test_comments_and_blank_lines_ignored():
    doc = "# heading\n\n" + MINIMAL + "\n# trailing\n"
    assert len(parse_scenario(doc).states) == 2


def test_actions_split_respects_parens():
    doc = MINIMAL.replace(
        "greet\tIcebreaker\tHello there!\t",
        "greet\tIcebreaker\tHello there!\trecord_interest(spot_1),mark_plan_ready",
    )
    scenario = parse_scenario(doc)
    assert scenario.states["greet"].actions == ["record_interest(spot_1)", "mark_plan_ready"]


def test_pattern_matching_substring_and_wildcard():
    assert MatchPattern("yes").matches("Oh YES please")
    assert not MatchPattern("yes").matches("maybe")
    assert MatchPattern("i want *").matches("I want to see the castle")
    assert not MatchPattern("i want *").matches("what do i want")
    assert MatchPattern("* castle *").matches("the castle gate")


# Round-trip property over generated scenarios.

_ids = st.sampled_from([f"s{i}" for i in range(6)])
_pattern_ids = st.sampled_from(["pats_a", "pats_b"])


@st.composite
def scenarios(draw):
    n = draw(st.integers(min_value=2, max_value=5))
    state_ids = [f"s{i}" for i in range(n)]
    states = {}
    conditions = st.one_of(
        st.just(Condition(ConditionKind.DEFAULT)),
        st.builds(
            Condition,
            st.just(ConditionKind.YES_NO_IS),
            st.none(),
            st.sampled_from(["yes", "no", "other"]),
        ),
        st.builds(
            Condition,
            st.just(ConditionKind.SENTIMENT_AT_LEAST),
            st.none(),
            st.none(),
            st.floats(min_value=0, max_value=1, allow_nan=False).map(lambda x: round(x, 3)),
        ),
        st.builds(
            Condition,
            st.just(ConditionKind.MATCHES),
            _pattern_ids,
        ),
    )
    for index, state_id in enumerate(state_ids):
        phase = draw(st.sampled_from(list(Phase)))
        terminal = index == n - 1
        transitions = []
        if not terminal:
            count = draw(st.integers(min_value=0, max_value=2))
            for priority in range(count):
                transitions.append(
                    Transition(priority, draw(conditions), draw(st.sampled_from(state_ids)))
                )
            transitions.append(
                Transition(count, Condition(ConditionKind.DEFAULT), draw(st.sampled_from(state_ids)))
            )
        states[state_id] = State(
            state_id, phase, draw(st.sampled_from(["Hi!", "Tell me.", "Bye."])), transitions, []
        )
    pattern_sets = {
        "pats_a": [MatchPattern("yes"), MatchPattern("sounds *")],
        "pats_b": [MatchPattern("no")],
    }
    return Scenario(states=states, pattern_sets=pattern_sets, initial_state=state_ids[0])


@given(scenarios())
@settings(max_examples=60, deadline=None)
def test_serialize_parse_round_trip(scenario):
    assert parse_scenario(serialize_scenario(scenario)) == scenario
