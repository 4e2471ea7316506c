"""Generation backends.

``MockBackend`` answers from a table keyed by the SHA-256 hex digest of the
prompt; unknown prompts get the signature echoed back with an empty body.
``HttpBackend`` speaks the OpenAI-compatible chat-completions protocol:

request (POST ``endpoint``)::

    {"model": "<model>",
     "messages": [{"role": "user", "content": "<prompt>"}],
     "temperature": <float>,
     "max_tokens": <int>,
     "seed": <int>}          (only when BackendConfig.seed is set)

response::

    {"choices": [{"message": {"content": "<text>"}}],
     "usage": {"prompt_tokens": <int>, "completion_tokens": <int>}}

``usage`` is optional. The bearer token comes from the environment variable
named in ``BackendConfig.token_env`` and is never logged or serialized.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import threading
import time
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Protocol

import requests

logger = logging.getLogger(__name__)


class BackendError(RuntimeError):
    def __init__(self, message: str, attempts: int = 1):
        super().__init__(message)
        self.attempts = attempts


class RetryableBackendError(BackendError):
    """Timeouts, connection failures, HTTP 429 and 5xx."""


class FatalBackendError(BackendError):
    """Other non-2xx statuses and malformed responses."""


@dataclass(frozen=True)
class BackendConfig:
    kind: str = "mock"
    endpoint: str | None = None
    model: str | None = None
    token_env: str | None = None
    timeout: float = 60.0
    temperature: float = 0.0
    max_tokens: int = 512
    retries: int = 2
    backoff: float = 0.5
    parallelism: int = 2
    mock_table: str | None = None
    seed: int | None = None

    def __post_init__(self):
        if self.kind not in ("mock", "http"):
            raise ValueError(f"backend kind must be mock or http, got {self.kind!r}")
        if self.kind == "http" and not (self.endpoint and self.model):
            raise ValueError("http backend needs endpoint and model")
        if self.retries < 0 or self.parallelism < 1:
            raise ValueError("retries must be >= 0 and parallelism >= 1")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class GenerationRequest:
    prompt: str
    temperature: float = 0.0
    max_tokens: int = 512
    signature: str = ""


@dataclass(frozen=True)
class GenerationResponse:
    text: str
    prompt_tokens: int | None = None
    completion_tokens: int | None = None
    latency: float = 0.0
    attempts: int = 1


class Backend(Protocol):
    def generate(self, request: GenerationRequest) -> GenerationResponse: ...


def prompt_hash(prompt: str) -> str:
    return hashlib.sha256(prompt.encode("utf-8")).hexdigest()


class MockBackend:
    def __init__(self, table: dict[str, str] | None = None):
        self.table = dict(table or {})

    @classmethod
    def from_file(cls, path: str | os.PathLike) -> MockBackend:
        return cls(json.loads(Path(path).read_text(encoding="utf-8")))

    def generate(self, request: GenerationRequest) -> GenerationResponse:
        text = self.table.get(prompt_hash(request.prompt))
        if text is None:
            text = f"{request.signature.strip()} {{\n}}"
        return GenerationResponse(text=text)


_ENDPOINT_SLOTS: dict[str, threading.BoundedSemaphore] = {}
_SLOTS_LOCK = threading.Lock()


def _slots(endpoint: str, parallelism: int) -> threading.BoundedSemaphore:
    with _SLOTS_LOCK:
        if endpoint not in _ENDPOINT_SLOTS:
            _ENDPOINT_SLOTS[endpoint] = threading.BoundedSemaphore(parallelism)
        return _ENDPOINT_SLOTS[endpoint]


class HttpBackend:
    def __init__(self, config: BackendConfig, session: requests.Session | None = None, sleep=time.sleep):
        if config.kind != "http":
            raise ValueError("HttpBackend needs an http config")
        self.config = config
        self.session = session or requests.Session()
        self._sleep = sleep

    def _headers(self) -> dict:
        headers = {"Content-Type": "application/json"}
        token = os.environ.get(self.config.token_env) if self.config.token_env else None
        if token:
            headers["Authorization"] = f"Bearer {token}"
        return headers

    def _attempt(self, request: GenerationRequest) -> GenerationResponse:
        cfg = self.config
        payload = {
            "model": cfg.model,
            "messages": [{"role": "user", "content": request.prompt}],
            "temperature": request.temperature,
            "max_tokens": request.max_tokens,
        }
        if cfg.seed is not None:
            payload["seed"] = cfg.seed
        start = time.perf_counter()
        try:
            with _slots(cfg.endpoint, cfg.parallelism):
                resp = self.session.post(cfg.endpoint, json=payload, headers=self._headers(), timeout=cfg.timeout)
        except (requests.Timeout, requests.ConnectionError) as exc:
            raise RetryableBackendError(f"{type(exc).__name__} contacting backend") from None
        except requests.RequestException as exc:
            raise FatalBackendError(f"request failed: {type(exc).__name__}") from None
        latency = time.perf_counter() - start
        if resp.status_code == 429 or resp.status_code >= 500:
            raise RetryableBackendError(f"backend returned HTTP {resp.status_code}")
        if not 200 <= resp.status_code < 300:
            raise FatalBackendError(f"backend returned HTTP {resp.status_code}")
        try:
            body = resp.json()
            text = body["choices"][0]["message"]["content"]
            if text is None:
                text = ""
            if not isinstance(text, str):
                raise TypeError("content is not a string")
            usage = body.get("usage") or {}
        except (ValueError, KeyError, IndexError, TypeError, AttributeError) as exc:
            raise FatalBackendError(f"malformed backend response ({type(exc).__name__})") from None
        return GenerationResponse(
            text=text,
            prompt_tokens=usage.get("prompt_tokens"),
            completion_tokens=usage.get("completion_tokens"),
            latency=latency,
        )

    def generate(self, request: GenerationRequest) -> GenerationResponse:
        attempts = 0
        while True:
            attempts += 1
            try:
                resp = self._attempt(request)
            except RetryableBackendError as exc:
                if attempts > self.config.retries:
                    raise RetryableBackendError(f"{exc} (after {attempts} attempts)", attempts) from None
                delay = self.config.backoff * 2 ** (attempts - 1)
                logger.info("retrying backend call in %.2fs: %s", delay, exc)
                self._sleep(delay)
                continue
            except FatalBackendError as exc:
                raise FatalBackendError(str(exc), attempts) from None
            return GenerationResponse(
                resp.text, resp.prompt_tokens, resp.completion_tokens, resp.latency, attempts
            )


def make_backend(config: BackendConfig) -> Backend:
    if config.kind == "mock":
        return MockBackend.from_file(config.mock_table) if config.mock_table else MockBackend()
    return HttpBackend(config)
