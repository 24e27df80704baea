"""Pluggable text embedding providers.

The default provider is a dependency-free hashing embedder; an
OpenAI-compatible wire client can fetch vectors from an external
embedding service instead.
"""

from __future__ import annotations

import hashlib
import os
import re

import httpx
import numpy as np

DEFAULT_DIM = 256

_TOKEN_RE = re.compile(r"[\w']+|⟂")

# Literal token inserted between question and response when both condition
# the classifier.
SEPARATOR_TOKEN = "⟂"


class EmbeddingTransportError(Exception):
    """The embedding service could not produce a vector."""


def tokenize(text: str) -> list[str]:
    return _TOKEN_RE.findall(text.lower().replace("’", "'"))


def hash_bucket(token: str, dim: int) -> tuple[int, float]:
    """Bucket index and sign for a token.

    Uses the first 4 bytes of ``md5(token)`` little-endian modulo ``dim``
    for the bucket and the low bit of byte 4 for the sign.
    """
    digest = hashlib.md5(token.encode("utf-8")).digest()
    bucket = int.from_bytes(digest[:4], "little") % dim
    sign = -1.0 if digest[4] & 1 else 1.0
    return bucket, sign


class HashingEmbedder:
    """Feature hashing of lowercased word tokens with sign hashing.

    Deterministic: equal text always produces an equal vector.  Vectors
    are L2-normalized; text with no tokens embeds to the zero vector.
    """

    def __init__(self, dim: int = DEFAULT_DIM):
        if dim <= 0:
            raise ValueError("embedding dimension must be positive")
        self.dim = dim

    def embed(self, text: str) -> np.ndarray:
        vec = np.zeros(self.dim, dtype=np.float64)
        for token in tokenize(text):
            bucket, sign = hash_bucket(token, self.dim)
            vec[bucket] += sign
        norm = np.linalg.norm(vec)
        if norm > 0:
            vec /= norm
        return vec


class HttpEmbedder:
    """Wire client for an OpenAI-compatible ``/v1/embeddings`` endpoint.

    Transport problems surface as :class:`EmbeddingTransportError`; the
    caller decides whether to fall back to the hashing baseline.
    """

    def __init__(
        self,
        base_url: str,
        model: str,
        dim: int = DEFAULT_DIM,
        api_key_env: str = "TOURBOT_API_KEY",
        timeout_ms: int = 10_000,
    ):
        self.base_url = base_url.rstrip("/")
        self.model = model
        self.dim = dim
        self.api_key_env = api_key_env
        self.timeout_ms = timeout_ms

    def embed(self, text: str) -> np.ndarray:
        headers = {}
        key = os.environ.get(self.api_key_env)
        if key:
            headers["Authorization"] = f"Bearer {key}"
        try:
            response = httpx.post(
                f"{self.base_url}/v1/embeddings",
                json={"model": self.model, "input": [text]},
                headers=headers,
                timeout=self.timeout_ms / 1000.0,
            )
        except httpx.HTTPError as exc:
            raise EmbeddingTransportError(f"embedding request failed: {exc}") from exc
        if response.status_code // 100 != 2:
            raise EmbeddingTransportError(f"embedding service returned {response.status_code}")
        try:
            values = response.json()["data"][0]["embedding"]
        except (KeyError, IndexError, TypeError, ValueError) as exc:
            raise EmbeddingTransportError("malformed embedding response body") from exc
        vec = np.asarray(values, dtype=np.float64)
        if vec.shape != (self.dim,):
            raise EmbeddingTransportError(
                f"expected {self.dim}-dimensional vector, got shape {vec.shape}"
            )
        if not np.all(np.isfinite(vec)):
            raise EmbeddingTransportError("embedding contains non-finite values")
        return vec
