"""Yes/no/other classification over (system question, user response) pairs.

Two backends: a lexicon-driven pattern matcher and a neural head over
text embeddings.  Both return a probability simplex whose argmax is the
label, with argmax ties broken in the fixed order yes < no < other.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import LABELS, Lexicon
from .embedding import SEPARATOR_TOKEN, HashingEmbedder, tokenize
from .ffn import FfnModel, ffn_forward

OTHER_SCORES = {"yes": 0.0, "no": 0.0, "other": 1.0}


@dataclass(frozen=True)
class YesNoResult:
    label: str
    scores: dict[str, float]

    @staticmethod
    def from_scores(scores: dict[str, float]) -> YesNoResult:
        label = max(LABELS, key=lambda lbl: scores[lbl])  # max() keeps first on ties
        return YesNoResult(label, dict(scores))


def _token_match(pattern: str, tokens: list[str]) -> int | None:
    """Start index where the pattern's tokens appear contiguously, else None."""
    ptoks = tokenize(pattern)
    if not ptoks:
        return None
    for start in range(len(tokens) - len(ptoks) + 1):
        if tokens[start : start + len(ptoks)] == ptoks:
            return start
    return None


class PatternBackend:
    """Lexicon lookup: earliest match wins, longer patterns break ties.

    Patterns match as contiguous lowercased token sequences, so "no"
    does not fire inside "know".
    """

    def __init__(self, lexicon: Lexicon):
        self.lexicon = lexicon

    def classify(self, question: str, response: str) -> YesNoResult:
        tokens = tokenize(response)
        best: tuple[int, int, str] | None = None  # (start, -length, label)
        for label, patterns in (("yes", self.lexicon.affirm), ("no", self.lexicon.negate)):
            for pattern in patterns:
                start = _token_match(pattern, tokens)
                if start is None:
                    continue
                key = (start, -len(tokenize(pattern)), label)
                if best is None or key < best:
                    best = key
        if best is None:
            return YesNoResult("other", dict(OTHER_SCORES))
        label = best[2]
        scores = {lbl: 1.0 if lbl == label else 0.0 for lbl in LABELS}
        return YesNoResult(label, scores)


class NeuralBackend:
    """3-class FFN head over the embedded (question ⟂ response) pair."""

    def __init__(self, model: FfnModel, embedder: HashingEmbedder | None = None):
        if model.activation != "softmax" or model.output_dim != len(LABELS):
            raise ValueError("yes/no neural backend needs a 3-class softmax head")
        self.model = model
        self.embedder = embedder or HashingEmbedder(model.input_dim)

    def classify(self, question: str, response: str) -> YesNoResult:
        vec = self.embedder.embed(combine_pair(question, response))
        probs = ffn_forward(self.model, vec)
        return YesNoResult.from_scores({lbl: float(p) for lbl, p in zip(LABELS, probs)})


def combine_pair(question: str, response: str) -> str:
    return f"{question} {SEPARATOR_TOKEN} {response}"


def classify_yes_no(
    question: str, response: str, backend: PatternBackend | NeuralBackend
) -> YesNoResult:
    """Classify a response; blank responses map to "other" directly."""
    if not response.strip():
        return YesNoResult("other", dict(OTHER_SCORES))
    return backend.classify(question, response)


def encode_yesno_batch(
    examples, embedder: HashingEmbedder
) -> tuple[np.ndarray, np.ndarray]:
    """Embed a classifier dataset into (inputs, class-index targets)."""
    inputs = np.stack([embedder.embed(combine_pair(e.question, e.response)) for e in examples])
    targets = np.array([LABELS.index(e.label) for e in examples], dtype=np.int64)
    return inputs, targets
