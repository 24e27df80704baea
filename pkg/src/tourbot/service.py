"""HTTP surface for the dialogue engine.

Sessions live in memory; every turn is appended to a JSONL transcript
and flushed to disk before the response goes out.  Concurrent posts to
one session serialize on a per-session lock.
"""

from __future__ import annotations

import json
import os
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from . import data_path
from .dialogue import Engine, SessionFrame, TerminalStateError
from .llm import HttpChatBackend, MockChatBackend
from .nlu.data import load_lexicon
from .nlu.ffn import load_model
from .nlu.sentiment import SentimentEstimator
from .nlu.yesno import NeuralBackend, PatternBackend
from .prompts import PromptLibrary
from .responses import ResponsePolicy
from .scenario import load_scenario
from .spots import load_genre_map, load_spots

DEFAULT_TTL_MINUTES = 30.0


class ConfigError(Exception):
    pass


@dataclass
class ServiceConfig:
    listen_addr: str = "127.0.0.1:8723"
    scenario: Path = field(default_factory=lambda: data_path("scenario.tsv"))
    catalog: Path = field(default_factory=lambda: data_path("spots.csv"))
    genre_map: Path = field(default_factory=lambda: data_path("genre_map.tsv"))
    lexicon: Path = field(default_factory=lambda: data_path("lexicon.txt"))
    prompts_dir: Path = field(default_factory=lambda: data_path("prompts"))
    model_yesno: Path = field(default_factory=lambda: data_path("models", "yesno.ffn"))
    model_sentiment_under50: Path = field(
        default_factory=lambda: data_path("models", "sentiment_under50.ffn")
    )
    model_sentiment_atleast50: Path = field(
        default_factory=lambda: data_path("models", "sentiment_atleast50.ffn")
    )
    yesno_backend: str = "pattern"  # "pattern" | "neural"
    llm_backend: str = "mock"  # "mock" | "http"
    llm_base_url: str = ""
    llm_model: str = "gpt-3.5-turbo"
    llm_api_key_env: str = "TOURBOT_API_KEY"
    llm_timeout_ms: int = 15_000
    mock_script: Path | None = None
    mock_seed: int = 0
    positive_threshold: float = 0.6
    log_dir: Path = Path("logs")
    session_ttl_minutes: float = DEFAULT_TTL_MINUTES
    cors_origin: str = "*"

    _PATH_KEYS = (
        "scenario",
        "catalog",
        "genre_map",
        "lexicon",
        "prompts_dir",
        "model_yesno",
        "model_sentiment_under50",
        "model_sentiment_atleast50",
        "mock_script",
        "log_dir",
    )

    @classmethod
    def load(cls, path=None, env=None) -> ServiceConfig:
        """Front-matter style ``key: value`` file with TOURBOT_* env overrides.

        Relative paths resolve against the config file's directory.
        """
        env = os.environ if env is None else env
        values: dict[str, str] = {}
        base = Path.cwd()
        if path is not None:
            base = Path(path).resolve().parent
            with open(path, encoding="utf-8") as fh:
                for lineno, raw in enumerate(fh, start=1):
                    line = raw.strip()
                    if not line or line.startswith("#"):
                        continue
                    if ":" not in line:
                        raise ConfigError(f"{path}:{lineno}: expected key: value")
                    key, value = line.split(":", 1)
                    values[key.strip()] = value.strip()
        for key in list(cls.__dataclass_fields__):
            override = env.get(f"TOURBOT_{key.upper()}")
            if override is not None:
                values[key] = override

        config = cls()
        for key, raw_value in values.items():
            if key not in cls.__dataclass_fields__ or key.startswith("_"):
                raise ConfigError(f"unknown config key {key!r}")
            current = getattr(config, key)
            if key in cls._PATH_KEYS:
                value: object = (base / raw_value).resolve() if raw_value else None
            elif isinstance(current, bool):
                value = raw_value.lower() in ("1", "true", "yes")
            elif isinstance(current, int):
                value = int(raw_value)
            elif isinstance(current, float):
                value = float(raw_value)
            else:
                value = raw_value
            setattr(config, key, value)
        config.check()
        return config

    def check(self) -> None:
        if not 0.0 <= self.positive_threshold <= 1.0:
            raise ConfigError("positive_threshold must lie in [0,1]")
        if self.yesno_backend not in ("pattern", "neural"):
            raise ConfigError(f"unknown yesno_backend {self.yesno_backend!r}")
        if self.llm_backend not in ("mock", "http"):
            raise ConfigError(f"unknown llm_backend {self.llm_backend!r}")
        required = [self.scenario, self.catalog, self.genre_map, self.lexicon, self.prompts_dir]
        if self.yesno_backend == "neural":
            required.append(self.model_yesno)
        required += [self.model_sentiment_under50, self.model_sentiment_atleast50]
        if self.mock_script is not None:
            required.append(self.mock_script)
        for p in required:
            if not Path(p).exists():
                raise ConfigError(f"configured file does not exist: {p}")


def build_engine(config: ServiceConfig) -> Engine:
    scenario = load_scenario(config.scenario)
    catalog = load_spots(config.catalog, load_genre_map(config.genre_map))
    if config.yesno_backend == "neural":
        yesno = NeuralBackend(load_model(config.model_yesno))
    else:
        yesno = PatternBackend(load_lexicon(config.lexicon))
    estimator = SentimentEstimator(
        load_model(config.model_sentiment_under50),
        load_model(config.model_sentiment_atleast50),
    )
    if config.llm_backend == "http":
        backend = HttpChatBackend(
            config.llm_base_url,
            config.llm_model,
            api_key_env=config.llm_api_key_env,
            timeout_ms=config.llm_timeout_ms,
        )
    else:
        script = {}
        if config.mock_script is not None:
            script = json.loads(Path(config.mock_script).read_text(encoding="utf-8"))
        backend = MockChatBackend(script=script, seed=config.mock_seed)
    policy = ResponsePolicy(PromptLibrary.from_dir(config.prompts_dir), backend, catalog)
    return Engine(scenario, catalog, yesno, estimator, policy)


@dataclass
class _Session:
    frame: SessionFrame
    ended: bool = False
    last_seen: float = field(default_factory=time.monotonic)
    lock: threading.Lock = field(default_factory=threading.Lock)
    log_path: Path | None = None


class SessionStore:
    def __init__(self, ttl_minutes: float = DEFAULT_TTL_MINUTES):
        self.ttl_seconds = ttl_minutes * 60.0
        self._sessions: dict[str, _Session] = {}
        self._lock = threading.Lock()

    def put(self, session: _Session) -> str:
        session_id = session.frame.session_id
        with self._lock:
            self._evict()
            self._sessions[session_id] = session
        return session_id

    def get(self, session_id: str) -> _Session | None:
        with self._lock:
            self._evict()
            session = self._sessions.get(session_id)
            if session is not None:
                session.last_seen = time.monotonic()
            return session

    def _evict(self) -> None:
        now = time.monotonic()
        stale = [
            sid for sid, s in self._sessions.items() if now - s.last_seen > self.ttl_seconds
        ]
        for sid in stale:
            del self._sessions[sid]


def _error(status: int, detail: str) -> JSONResponse:
    return JSONResponse(status_code=status, content={"detail": detail})


def create_app(config: ServiceConfig | None = None, engine: Engine | None = None) -> FastAPI:
    config = config or ServiceConfig()
    config.check()
    engine = engine or build_engine(config)
    store = SessionStore(ttl_minutes=config.session_ttl_minutes)
    log_dir = Path(config.log_dir)

    app = FastAPI(title="tourbot")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=[config.cors_origin] if config.cors_origin != "*" else ["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    app.state.engine = engine
    app.state.store = store

    @app.post("/sessions", status_code=201)
    async def create_session(request: Request):
        try:
            body = await request.json()
        except Exception:
            return _error(400, "request body must be JSON")
        if not isinstance(body, dict):
            return _error(400, "request body must be a JSON object")
        age = body.get("age")
        if not isinstance(age, int) or isinstance(age, bool) or age < 0:
            return _error(400, "age must be a non-negative integer")
        name = body.get("name")
        frame, opening = engine.create_session({"age": age, "name": name})
        session = _Session(frame=frame)
        log_dir.mkdir(parents=True, exist_ok=True)
        session.log_path = log_dir / f"session_{frame.session_id}.jsonl"
        store.put(session)
        return {
            "session_id": frame.session_id,
            "system_utterance": opening,
            "phase": frame.phase.value,
        }

    @app.post("/sessions/{session_id}/utterance")
    async def post_utterance(session_id: str, request: Request):
        session = store.get(session_id)
        if session is None:
            return _error(404, "unknown session")
        try:
            body = await request.json()
        except Exception:
            return _error(400, "request body must be JSON")
        text = body.get("text") if isinstance(body, dict) else None
        if not isinstance(text, str) or not text.strip():
            return _error(400, "text must be a non-empty string")
        with session.lock:
            if session.ended:
                return _error(409, "session already ended")
            try:
                result = engine.advance(session.frame, text)
            except TerminalStateError:
                return _error(409, "session already ended")
            session.ended = result.ended
            _append_transcript_line(session, result.record.to_json_dict())
            return {
                "system_utterance": result.system_utterance,
                "phase": session.frame.phase.value,
                "ended": result.ended,
                "response_source": result.record.response_source,
                "plan": result.record.plan,
            }

    @app.get("/sessions/{session_id}")
    async def get_session(session_id: str):
        session = store.get(session_id)
        if session is None:
            return _error(404, "unknown session")
        frame = session.frame
        return {
            "phase": frame.phase.value,
            "turn_count": frame.turn_count,
            "introduced_spots": list(frame.introduced_spots),
            "theme": frame.theme.value if frame.theme else None,
        }

    return app


def _append_transcript_line(session: _Session, record: dict) -> None:
    """Write-ahead the turn: the line hits disk before the HTTP response."""
    if session.log_path is None:
        return
    with open(session.log_path, "a", encoding="utf-8") as fh:
        fh.write(json.dumps(record, ensure_ascii=False) + "\n")
        fh.flush()
        os.fsync(fh.fileno())


def run_service(config: ServiceConfig) -> None:
    import uvicorn

    host, _, port = config.listen_addr.partition(":")
    uvicorn.run(create_app(config), host=host or "127.0.0.1", port=int(port or 8723))


__all__ = ["ServiceConfig", "SessionStore", "build_engine", "create_app", "run_service"]
