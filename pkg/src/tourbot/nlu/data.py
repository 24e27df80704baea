"""Dataset and lexicon file loading for the recognizers.

Classifier datasets: one example per line, ``label<TAB>question<TAB>response``.
Sentiment datasets: ``score<TAB>response`` with score in [0,1].
Lexicon files: ``[affirm]`` / ``[negate]`` section headers, one pattern
per line, ``#`` comments.
"""

from __future__ import annotations

from dataclasses import dataclass

LABELS = ("yes", "no", "other")


class DatasetError(Exception):
    pass


@dataclass(frozen=True)
class YesNoExample:
    label: str
    question: str
    response: str


@dataclass(frozen=True)
class SentimentExample:
    score: float
    response: str


def load_yesno_dataset(path) -> list[YesNoExample]:
    examples = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            cells = line.split("\t")
            if len(cells) != 3:
                raise DatasetError(f"{path}:{lineno}: expected 3 cells, got {len(cells)}")
            label = cells[0].strip().lower()
            if label not in LABELS:
                raise DatasetError(f"{path}:{lineno}: unknown label {cells[0]!r}")
            examples.append(YesNoExample(label, cells[1].strip(), cells[2].strip()))
    return examples


def load_sentiment_dataset(path) -> list[SentimentExample]:
    examples = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            cells = line.split("\t")
            if len(cells) != 2:
                raise DatasetError(f"{path}:{lineno}: expected 2 cells, got {len(cells)}")
            try:
                score = float(cells[0])
            except ValueError:
                raise DatasetError(f"{path}:{lineno}: bad score {cells[0]!r}") from None
            if not 0.0 <= score <= 1.0:
                raise DatasetError(f"{path}:{lineno}: score {score} outside [0,1]")
            examples.append(SentimentExample(score, cells[1].strip()))
    return examples


@dataclass
class Lexicon:
    affirm: list[str]
    negate: list[str]


def load_lexicon(path) -> Lexicon:
    sections: dict[str, list[str]] = {"affirm": [], "negate": []}
    current: str | None = None
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if line.startswith("[") and line.endswith("]"):
                name = line[1:-1]
                if name not in sections:
                    raise DatasetError(f"{path}:{lineno}: unknown lexicon section {name!r}")
                current = name
                continue
            if current is None:
                raise DatasetError(f"{path}:{lineno}: pattern before any section header")
            sections[current].append(line)
    return Lexicon(affirm=sections["affirm"], negate=sections["negate"])
