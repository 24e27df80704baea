"""Machine-learned intention recognizers: yes/no classifier and sentiment."""

from .data import Lexicon, load_lexicon, load_sentiment_dataset, load_yesno_dataset
from .embedding import (
    DEFAULT_DIM,
    EmbeddingTransportError,
    HashingEmbedder,
    HttpEmbedder,
)
from .ffn import (
    FfnModel,
    TrainingConfig,
    TrainingDivergedError,
    ffn_forward,
    ffn_train,
    gradient_check,
    load_model,
    save_model,
)
from .sentiment import (
    POSITIVE_SENTIMENT_THRESHOLD,
    AgeBand,
    SentimentEstimator,
    SentimentScore,
)
from .yesno import NeuralBackend, PatternBackend, YesNoResult, classify_yes_no

__all__ = [
    "AgeBand",
    "DEFAULT_DIM",
    "EmbeddingTransportError",
    "FfnModel",
    "HashingEmbedder",
    "HttpEmbedder",
    "Lexicon",
    "NeuralBackend",
    "PatternBackend",
    "POSITIVE_SENTIMENT_THRESHOLD",
    "SentimentEstimator",
    "SentimentScore",
    "TrainingConfig",
    "TrainingDivergedError",
    "YesNoResult",
    "classify_yes_no",
    "ffn_forward",
    "ffn_train",
    "gradient_check",
    "load_lexicon",
    "load_model",
    "load_sentiment_dataset",
    "load_yesno_dataset",
    "save_model",
]
