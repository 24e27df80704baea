from __future__ import annotations

import pytest

from tourbot.prompts import (
    PromptError,
    PromptLibrary,
    TemplateKeyError,
    parse_prompt_file,
    render_template,
)

SAMPLE = """id: sample
temperature: 0.3
max_tokens: 99
---
@system
You are a guide for {city}.
@user
The visitor said "{utterance}".
"""


def test_parse_front_matter_and_blocks():
    template = parse_prompt_file(SAMPLE, "fallback")
    assert template.id == "sample"
    assert template.params.temperature == 0.3
    assert template.params.max_tokens == 99
    assert [role for role, _ in template.messages] == ["system", "user"]


def test_build_renders_placeholders_and_sets_prompt_id():
    template = parse_prompt_file(SAMPLE, "fallback")
    exchange = template.build({"city": "Kyoto", "utterance": "hello"})
    assert exchange.prompt_id == "sample"
    assert exchange.messages[0] == ("system", "You are a guide for Kyoto.")
    assert 'said "hello"' in exchange.messages[1][1]


def test_missing_separator_rejected():
    with pytest.raises(PromptError):
        parse_prompt_file("id: x\n@system\nhi\n", "x")


def test_unknown_role_rejected():
    with pytest.raises(PromptError):
        parse_prompt_file("---\n@wizard\nhi\n", "x")


def test_render_template_missing_key_raises():
    with pytest.raises(TemplateKeyError):
        render_template("hello {who}", {})
    assert render_template("hello {who}", {"who": "you"}) == "hello you"


def test_render_template_keeps_literal_braces():
    assert render_template("a {{literal}} {x}", {"x": 1}) == "a {literal} 1"


def test_library_lookup_order(tmp_path):
    (tmp_path / "fallback_default.prompt").write_text("---\n@system\ndefault\n")
    (tmp_path / "phase_icebreaker.prompt").write_text("---\n@system\nphase\n")
    (tmp_path / "state_greet.prompt").write_text("---\n@system\nstate\n")
    library = PromptLibrary.from_dir(tmp_path)
    assert library.lookup_fallback("greet", "Icebreaker").messages[0][1] == "state"
    assert library.lookup_fallback("other", "Icebreaker").messages[0][1] == "phase"
    assert library.lookup_fallback("other", "PlanProposal").messages[0][1] == "default"


def test_library_requires_default(tmp_path):
    (tmp_path / "state_greet.prompt").write_text("---\n@system\nstate\n")
    library = PromptLibrary.from_dir(tmp_path)
    with pytest.raises(PromptError):
        library.lookup_fallback("other", "PlanProposal")


def test_shipped_prompts_load(prompt_library):
    assert prompt_library.get("fallback_default") is not None
    assert prompt_library.get("spot_explanation") is not None
    assert prompt_library.get("desired_spot_extraction") is not None
    assert prompt_library.get("plan_polish") is not None
