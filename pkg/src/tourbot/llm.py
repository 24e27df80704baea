"""Chat-completion backends: OpenAI-compatible HTTP client and a
deterministic mock for tests and offline runs.
"""

from __future__ import annotations

import hashlib
import os
import random
from dataclasses import dataclass, field


class ChatTransportError(Exception):
    """Completion could not be obtained (timeout, status, bad body)."""


@dataclass
class GenerationParams:
    temperature: float = 0.7
    max_tokens: int = 160


@dataclass
class ChatExchange:
    messages: list[tuple[str, str]]  # (role, content), role in {system,user,assistant}
    params: GenerationParams = field(default_factory=GenerationParams)
    prompt_id: str | None = None

    def __post_init__(self):
        if not self.messages:
            raise ValueError("exchange needs at least one message")
        if self.messages[0][0] != "system":
            raise ValueError("first message must have the system role")
        for role, _ in self.messages:
            if role not in ("system", "user", "assistant"):
                raise ValueError(f"unknown role {role!r}")


_CANNED = [
    "That sounds lovely! Tell me a little more.",
    "How interesting! I am glad you shared that.",
    "I see! That is good to know.",
    "Wonderful! Thank you for telling me.",
]


class MockChatBackend:
    """Deterministic stand-in for the chat service.

    Scripted entries map a prompt id to a fixed completion; anything
    unscripted gets a canned line picked by a seeded digest of the
    exchange.  ``failure_rate`` injects :class:`ChatTransportError`.
    """

    def __init__(
        self,
        script: dict[str, str] | None = None,
        seed: int = 0,
        failure_rate: float = 0.0,
    ):
        if not 0.0 <= failure_rate <= 1.0:
            raise ValueError("failure_rate must lie in [0,1]")
        self.script = dict(script or {})
        self.seed = seed
        self.failure_rate = failure_rate
        self.calls: list[ChatExchange] = []
        self._rng = random.Random(seed)

    @property
    def call_count(self) -> int:
        return len(self.calls)

    def complete(self, exchange: ChatExchange) -> str:
        self.calls.append(exchange)
        if self.failure_rate > 0.0 and (
            self.failure_rate >= 1.0 or self._rng.random() < self.failure_rate
        ):
            raise ChatTransportError("injected mock transport failure")
        if exchange.prompt_id and exchange.prompt_id in self.script:
            return self.script[exchange.prompt_id]
        digest = hashlib.md5(
            repr((self.seed, exchange.prompt_id, exchange.messages)).encode("utf-8")
        ).digest()
        return _CANNED[digest[0] % len(_CANNED)]


class HttpChatBackend:
    """POSTs to ``<base_url>/v1/chat/completions`` and reads
    ``choices[0].message.content``.
    """

    def __init__(
        self,
        base_url: str,
        model: str,
        api_key_env: str = "TOURBOT_API_KEY",
        timeout_ms: int = 15_000,
    ):
        self.base_url = base_url.rstrip("/")
        self.model = model
        self.api_key_env = api_key_env
        self.timeout_ms = timeout_ms

    def complete(self, exchange: ChatExchange) -> str:
        import httpx

        headers = {}
        key = os.environ.get(self.api_key_env)
        if key:
            headers["Authorization"] = f"Bearer {key}"
        body = {
            "model": self.model,
            "messages": [{"role": role, "content": content} for role, content in exchange.messages],
            "temperature": exchange.params.temperature,
            "max_tokens": exchange.params.max_tokens,
        }
        try:
            response = httpx.post(
                f"{self.base_url}/v1/chat/completions",
                json=body,
                headers=headers,
                timeout=self.timeout_ms / 1000.0,
            )
        except httpx.TimeoutException as exc:
            raise ChatTransportError(f"chat request timed out after {self.timeout_ms}ms") from exc
        except httpx.HTTPError as exc:
            raise ChatTransportError(f"chat request failed: {exc}") from exc
        if response.status_code // 100 != 2:
            raise ChatTransportError(f"chat service returned {response.status_code}")
        try:
            content = response.json()["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError, ValueError) as exc:
            raise ChatTransportError("malformed chat completion body") from exc
        if not isinstance(content, str):
            raise ChatTransportError("completion content is not text")
        return content


def chat(exchange: ChatExchange, backend) -> str:
    """Run one exchange against a backend; transport errors are typed."""
    return backend.complete(exchange)
