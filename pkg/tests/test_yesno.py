from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tourbot import data_path
from tourbot.nlu.data import load_yesno_dataset
from tourbot.nlu.yesno import YesNoResult, classify_yes_no


def test_affirmative_lexicon_hit(pattern_backend):
    result = classify_yes_no(
        "Are you interested in Kinkaku-ji?", "Yes, definitely.", pattern_backend
    )
    assert result.label == "yes"
    assert result.scores["yes"] == 1.0


def test_lexicon_miss_maps_to_other(pattern_backend):
    result = classify_yes_no(
        "Are you interested?", "How much is admission?", pattern_backend
    )
    assert result.label == "other"


def test_negation_lexicon_hit(pattern_backend):
    assert classify_yes_no("Shall we add it?", "no thanks", pattern_backend).label == "no"


@pytest.mark.parametrize("blank", ["", "   ", "\t\n"])
def test_blank_response_is_other(pattern_backend, blank):
    result = classify_yes_no("Anything?", blank, pattern_backend)
    assert result.label == "other"
    assert result.scores == {"yes": 0.0, "no": 0.0, "other": 1.0}


def test_earliest_match_wins(pattern_backend):
    # "skip" (negate) precedes "please do" (affirm)
    assert classify_yes_no("Add it?", "Skip that one, please do not.", pattern_backend).label == "no"
    # affirmation first
    assert classify_yes_no("Add it?", "Yes! Well, no, actually yes.", pattern_backend).label == "yes"


def test_token_matching_avoids_substring_traps(pattern_backend):
    # "no" must not fire inside "know"; "yes" not inside "yesterday"
    assert classify_yes_no("Q?", "I know that place", pattern_backend).label == "other"
    assert classify_yes_no("Q?", "I went yesterday", pattern_backend).label == "other"


def test_scores_form_simplex_with_argmax_label(pattern_backend):
    for response in ("yes", "never", "what time is it?"):
        result = classify_yes_no("Q?", response, pattern_backend)
        assert abs(sum(result.scores.values()) - 1.0) < 1e-6
        assert result.label == max(result.scores, key=result.scores.get)


def test_argmax_ties_break_in_fixed_order():
    tied = YesNoResult.from_scores({"yes": 0.4, "no": 0.4, "other": 0.2})
    assert tied.label == "yes"
    tied = YesNoResult.from_scores({"yes": 0.1, "no": 0.45, "other": 0.45})
    assert tied.label == "no"


def test_neural_backend_obeys_invariants(neural_backend):
    result = classify_yes_no("Shall we continue?", "absolutely, let's go", neural_backend)
    assert abs(sum(result.scores.values()) - 1.0) < 1e-6
    assert result.label == max(result.scores, key=result.scores.get)
    assert all(v >= 0.0 for v in result.scores.values())


@given(text=st.text(max_size=60))
@settings(max_examples=100, deadline=None)
def test_neural_backend_simplex_over_arbitrary_text(neural_backend, text):
    result = classify_yes_no("Would you like that?", text, neural_backend)
    assert abs(sum(result.scores.values()) - 1.0) < 1e-6
    assert all(v >= 0.0 for v in result.scores.values())
    assert result.label in ("yes", "no", "other")


def test_lexicon_fixture_accuracy_is_high(pattern_backend):
    examples = load_yesno_dataset(data_path("datasets", "yesno_lexicon_fixture.tsv"))
    assert len(examples) == 60
    correct = sum(
        1
        for e in examples
        if classify_yes_no(e.question, e.response, pattern_backend).label == e.label
    )
    assert correct / len(examples) >= 0.95
