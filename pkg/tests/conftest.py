from __future__ import annotations

import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

import pytest

from tourbot import data_path
from tourbot.llm import MockChatBackend
from tourbot.nlu.data import load_lexicon
from tourbot.nlu.ffn import load_model
from tourbot.nlu.sentiment import SentimentEstimator
from tourbot.nlu.yesno import NeuralBackend, PatternBackend
from tourbot.prompts import PromptLibrary
from tourbot.responses import ResponsePolicy
from tourbot.scenario import load_scenario
from tourbot.service import ServiceConfig, build_engine
from tourbot.spots import load_genre_map, load_spots

SCENARIO_DIR = Path(__file__).parent / "data" / "scenarios"


@pytest.fixture(scope="session")
def catalog():
    return load_spots(data_path("spots.csv"), load_genre_map(data_path("genre_map.tsv")))


@pytest.fixture(scope="session")
def pattern_backend():
    return PatternBackend(load_lexicon(data_path("lexicon.txt")))


@pytest.fixture(scope="session")
def neural_backend():
    return NeuralBackend(load_model(data_path("models", "yesno.ffn")))


@pytest.fixture(scope="session")
def sentiment_estimator():
    return SentimentEstimator(
        load_model(data_path("models", "sentiment_under50.ffn")),
        load_model(data_path("models", "sentiment_atleast50.ffn")),
    )


@pytest.fixture(scope="session")
def prompt_library():
    return PromptLibrary.from_dir(data_path("prompts"))


@pytest.fixture(scope="session")
def tourist_scenario():
    return load_scenario(data_path("scenario.tsv"))


@pytest.fixture
def make_engine(tourist_scenario, catalog, pattern_backend, sentiment_estimator, prompt_library):
    """Engine factory wired to a fresh call-counting mock per test."""
    from tourbot.dialogue import Engine

    def build(script=None, failure_rate=0.0, seed=0, scenario=None):
        backend = MockChatBackend(script=script, seed=seed, failure_rate=failure_rate)
        policy = ResponsePolicy(prompt_library, backend, catalog)
        engine = Engine(
            scenario or tourist_scenario, catalog, pattern_backend, sentiment_estimator, policy
        )
        return engine, backend

    return build


@pytest.fixture
def service_client(tmp_path):
    from fastapi.testclient import TestClient
    from tourbot.service import create_app

    config = ServiceConfig(log_dir=tmp_path / "logs")
    app = create_app(config)
    with TestClient(app) as client:
        yield client, tmp_path / "logs"


class _StubHandler(BaseHTTPRequestHandler):
    behavior = {"status": 200, "body": None, "raw": None}
    requests: list[dict] = []

    def do_POST(self):
        length = int(self.headers.get("Content-Length", 0))
        payload = json.loads(self.rfile.read(length)) if length else {}
        type(self).requests.append(
            {"path": self.path, "body": payload, "headers": dict(self.headers)}
        )
        status = self.behavior["status"]
        if self.behavior["raw"] is not None:
            body = self.behavior["raw"]
        elif self.behavior["body"] is not None:
            body = json.dumps(self.behavior["body"])
        elif self.path.endswith("/chat/completions"):
            body = json.dumps(
                {"choices": [{"message": {"role": "assistant", "content": "stub completion"}}]}
            )
        else:
            body = json.dumps({"data": [{"embedding": [0.0] * 256}]})
        encoded = body.encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(encoded)))
        self.end_headers()
        self.wfile.write(encoded)

    def log_message(self, *args):
        pass


@pytest.fixture
def stub_server():
    """Local HTTP stub speaking just enough of the completions/embeddings wire."""
    server = ThreadingHTTPServer(("127.0.0.1", 0), _StubHandler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    _StubHandler.behavior = {"status": 200, "body": None, "raw": None}
    _StubHandler.requests = []
    yield f"http://127.0.0.1:{server.server_port}", _StubHandler
    server.shutdown()
    thread.join(timeout=5)


@pytest.fixture
def scenario_dir():
    return SCENARIO_DIR
