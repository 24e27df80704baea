"""Prompt templates loaded from data files.

Template files carry front-matter ``param: value`` lines, a ``---``
separator, then ``@system`` / ``@user`` message blocks whose bodies may
contain ``{placeholder}`` slots.
"""

from __future__ import annotations

import string
from dataclasses import dataclass, field
from pathlib import Path

from .llm import ChatExchange, GenerationParams


class PromptError(Exception):
    pass


class TemplateKeyError(KeyError):
    """A template referenced a placeholder absent from the context."""


_FORMATTER = string.Formatter()


def render_template(template: str, context: dict[str, object]) -> str:
    """Resolve ``{key}`` slots; unknown keys raise instead of passing through."""
    out: list[str] = []
    for literal, key, spec, conversion in _FORMATTER.parse(template):
        out.append(literal)
        if key is None:
            continue
        if key == "":
            raise TemplateKeyError("positional placeholders are not supported")
        if key not in context:
            raise TemplateKeyError(key)
        value = context[key]
        if conversion:
            value = _FORMATTER.convert_field(value, conversion)
        out.append(format(value, spec or ""))
    return "".join(out)


@dataclass
class PromptTemplate:
    id: str
    messages: list[tuple[str, str]]  # (role, body template)
    params: GenerationParams = field(default_factory=GenerationParams)

    def build(self, context: dict[str, object]) -> ChatExchange:
        rendered = [(role, render_template(body, context)) for role, body in self.messages]
        return ChatExchange(messages=rendered, params=self.params, prompt_id=self.id)


def parse_prompt_file(text: str, fallback_id: str) -> PromptTemplate:
    lines = text.splitlines()
    try:
        sep = lines.index("---")
    except ValueError:
        raise PromptError("prompt file needs a --- line after the front matter") from None

    front: dict[str, str] = {}
    for raw in lines[:sep]:
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if ":" not in line:
            raise PromptError(f"bad front-matter line {line!r}")
        key, value = line.split(":", 1)
        front[key.strip()] = value.strip()

    params = GenerationParams()
    if "temperature" in front:
        params.temperature = float(front["temperature"])
    if "max_tokens" in front:
        params.max_tokens = int(front["max_tokens"])

    messages: list[tuple[str, str]] = []
    role: str | None = None
    body: list[str] = []
    for raw in lines[sep + 1 :]:
        if raw.startswith("@"):
            if role is not None:
                messages.append((role, "\n".join(body).strip()))
            role = raw[1:].strip()
            if role not in ("system", "user", "assistant"):
                raise PromptError(f"unknown message role {role!r}")
            body = []
        else:
            body.append(raw)
    if role is not None:
        messages.append((role, "\n".join(body).strip()))
    if not messages:
        raise PromptError("prompt file defines no message blocks")

    return PromptTemplate(id=front.get("id", fallback_id), messages=messages, params=params)


class PromptLibrary:
    """Directory of ``*.prompt`` files keyed by template id."""

    def __init__(self, templates: dict[str, PromptTemplate]):
        self.templates = templates

    @classmethod
    def from_dir(cls, directory) -> PromptLibrary:
        templates: dict[str, PromptTemplate] = {}
        for path in sorted(Path(directory).glob("*.prompt")):
            template = parse_prompt_file(path.read_text(encoding="utf-8"), path.stem)
            templates[template.id] = template
        return cls(templates)

    def get(self, template_id: str) -> PromptTemplate | None:
        return self.templates.get(template_id)

    def lookup_fallback(self, state_id: str, phase_name: str) -> PromptTemplate:
        """State-specific prompt, else phase-level, else the shared default."""
        for key in (f"state_{state_id}", f"phase_{phase_name.lower()}", "fallback_default"):
            template = self.templates.get(key)
            if template is not None:
                return template
        raise PromptError("prompt library is missing fallback_default")
