"""Response selection: hand-written template when the utterance matched a
candidate pattern, LLM generation otherwise.

Also houses the LLM-backed helpers: grounded spot explanations, desired-spot
keyword extraction, and the rationale polish pass.  No transport error ever
reaches the user; every path falls back to hand-written text.
"""

from __future__ import annotations

import enum
import logging
import re
import unicodedata
from dataclasses import dataclass

from .llm import ChatTransportError, chat
from .prompts import PromptLibrary, render_template
from .spots import Spot, SpotCatalog

log = logging.getLogger(__name__)


class ResponseSource(enum.Enum):
    RULE = "Rule"
    LLM = "Llm"


@dataclass(frozen=True)
class SystemUtterance:
    text: str
    source: ResponseSource


class ResponsePolicy:
    def __init__(self, library: PromptLibrary, backend, catalog: SpotCatalog | None = None):
        self.library = library
        self.backend = backend
        self.catalog = catalog

    def respond(self, state, user_utterance: str, frame, match: str | None) -> SystemUtterance:
        """Produce the system utterance for arrival at ``state``.

        A pattern match selects the state's hand-written template; an
        unmatched utterance goes to the LLM with the state's fallback
        prompt, grounded in the frame.  Transport failure silently falls
        back to the template.
        """
        rule_text = render_template(state.system_utterance_template, frame.render_context())
        if match is not None:
            return SystemUtterance(rule_text, ResponseSource.RULE)

        template = self.library.lookup_fallback(state.id, state.phase.value)
        context = dict(frame.render_context())
        context.update(
            user_utterance=user_utterance,
            next_question=rule_text,
            frame_summary=frame.summary_text(),
            history=frame.history_text(),
            spot_description=self._focus_description(frame),
        )
        try:
            text = chat(template.build(context), self.backend)
        except ChatTransportError as exc:
            log.warning("LLM fallback failed for state %s: %s", state.id, exc)
            return SystemUtterance(rule_text, ResponseSource.RULE)
        if not text.strip():
            return SystemUtterance(rule_text, ResponseSource.RULE)
        return SystemUtterance(text, ResponseSource.LLM)

    def _focus_description(self, frame) -> str:
        spot_id = getattr(frame, "spot_in_focus", None)
        if spot_id and self.catalog is not None:
            spot = self.catalog.get(spot_id)
            if spot is not None:
                return spot.description
        return ""

    def explain_spot(self, spot: Spot) -> str:
        """LLM explanation grounded in the catalog description; the raw
        description is the fallback."""
        template = self.library.get("spot_explanation")
        if template is None:
            return spot.description
        context = {"spot_name": spot.name, "spot_description": spot.description}
        try:
            text = chat(template.build(context), self.backend)
        except ChatTransportError as exc:
            log.warning("spot explanation failed for %s: %s", spot.id, exc)
            return spot.description
        return text if text.strip() else spot.description

    def polish_rationale(self, rationale: str, required_names: list[str]) -> str:
        """Optional LLM pass over the recommendation reason.

        The polished text is only kept when it still mentions every plan
        spot; anything else keeps the template text.
        """
        template = self.library.get("plan_polish")
        if template is None:
            return rationale
        try:
            text = chat(template.build({"rationale": rationale}), self.backend)
        except ChatTransportError:
            return rationale
        if not text.strip():
            return rationale
        low = text.lower()
        if all(name.lower() in low for name in required_names):
            return text
        return rationale


def normalize_name(text: str) -> str:
    norm = unicodedata.normalize("NFKC", text).lower()
    return re.sub(r"[^a-z0-9]+", "", norm)


def scan_catalog_names(utterance: str, catalog: SpotCatalog) -> list[Spot]:
    """Spots whose normalized name occurs inside the normalized utterance.

    Names shorter than 5 characters are too collision-prone for substring
    matching ("region" contains "gion"), so they must line up with one
    utterance token or a pair of adjacent tokens instead.
    """
    blob = normalize_name(utterance)
    if not blob:
        return []
    tokens = [normalize_name(t) for t in re.findall(r"[\w'-]+", utterance)]
    pairs = {a + b for a, b in zip(tokens, tokens[1:])}
    hits = []
    for spot in catalog:
        name = normalize_name(spot.name)
        if not name:
            continue
        if len(name) >= 5:
            if name in blob:
                hits.append(spot)
        elif name in tokens or name in pairs:
            hits.append(spot)
    return hits


def extract_desired_spot(
    utterance: str,
    catalog: SpotCatalog,
    library: PromptLibrary | None = None,
    backend=None,
    allow_llm: bool = True,
) -> str | None:
    """Identify the one spot the user most wants to visit.

    Exactly one catalog name in the utterance short-circuits without an
    LLM call.  Zero or several names ask the LLM to pick from the
    candidate list; its reply is matched back against catalog names.
    """
    if not utterance.strip():
        return None
    hits = scan_catalog_names(utterance, catalog)
    if len(hits) == 1:
        return hits[0].id
    if not allow_llm or backend is None or library is None:
        return None
    template = library.get("desired_spot_extraction")
    if template is None:
        return None
    candidates = hits if len(hits) > 1 else list(catalog)
    context = {
        "utterance": utterance,
        "candidates": "; ".join(s.name for s in candidates),
    }
    try:
        reply = chat(template.build(context), backend)
    except ChatTransportError:
        return None
    return _match_reply_to_catalog(reply, candidates)


def _match_reply_to_catalog(reply: str, candidates: list[Spot]) -> str | None:
    norm_reply = normalize_name(reply)
    if not norm_reply:
        return None
    for spot in candidates:
        if normalize_name(spot.name) == norm_reply:
            return spot.id
    containing = [
        s
        for s in candidates
        if normalize_name(s.name) and normalize_name(s.name) in norm_reply
    ]
    if containing:
        return min(containing, key=lambda s: (-len(normalize_name(s.name)), s.id)).id
    return None
