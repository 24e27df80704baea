"""Age-switched sentiment estimation in [0,1].

Two sigmoid-head models, one per age band, switched at exactly 50
years.  Higher values mean the user is enjoying the dialogue more.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .embedding import HashingEmbedder
from .ffn import FfnModel, ffn_forward

AGE_SWITCH_YEARS = 50

# Downstream consumers treat sentiment at or above this value as positive.
POSITIVE_SENTIMENT_THRESHOLD = 0.6


class AgeBand(enum.Enum):
    UNDER_50 = "under50"
    AT_LEAST_50 = "atleast50"

    @staticmethod
    def for_age(age: int) -> AgeBand:
        if age < 0:
            raise ValueError("age must be non-negative")
        return AgeBand.UNDER_50 if age < AGE_SWITCH_YEARS else AgeBand.AT_LEAST_50


@dataclass(frozen=True)
class SentimentScore:
    value: float
    model_id: str


class SentimentEstimator:
    def __init__(
        self,
        under50: FfnModel,
        atleast50: FfnModel,
        embedder: HashingEmbedder | None = None,
    ):
        for band, model in ((AgeBand.UNDER_50, under50), (AgeBand.AT_LEAST_50, atleast50)):
            if model.activation != "sigmoid" or model.output_dim != 1:
                raise ValueError(f"sentiment model for {band.value} needs a sigmoid head")
        if under50.input_dim != atleast50.input_dim:
            raise ValueError("both band models must share one embedding dimension")
        self.models = {AgeBand.UNDER_50: under50, AgeBand.AT_LEAST_50: atleast50}
        self.embedder = embedder or HashingEmbedder(under50.input_dim)

    def estimate(self, response: str, age: int) -> SentimentScore:
        band = AgeBand.for_age(age)
        vec = self.embedder.embed(response)
        value = float(ffn_forward(self.models[band], vec)[0])
        return SentimentScore(value=value, model_id=band.value)


def encode_sentiment_batch(examples, embedder: HashingEmbedder) -> tuple[np.ndarray, np.ndarray]:
    inputs = np.stack([embedder.embed(e.response) for e in examples])
    targets = np.array([e.score for e in examples], dtype=np.float64)
    return inputs, targets
