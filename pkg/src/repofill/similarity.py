"""Lexical, semantic and hybrid similarity plus exhaustive top-k retrieval."""

from __future__ import annotations

import logging
import math
import os
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import requests

from .tokens import SubwordSplitter, TokenBag, tokenize

logger = logging.getLogger(__name__)

MODES = ("lexical", "semantic", "hybrid")


class EmbeddingProviderError(RuntimeError):
    pass


@dataclass(frozen=True)
class EmbeddingVector:
    values: tuple[float, ...]
    provider_id: str

    def __post_init__(self):
        if not all(math.isfinite(v) for v in self.values):
            raise ValueError("embedding contains non-finite values")

    def __len__(self) -> int:
        return len(self.values)


class HttpEmbeddingProvider:
    """Client for an OpenAI-style ``/embeddings`` endpoint.

    Request: ``{"model": <id>, "input": [<text>, ...]}``.
    Response: ``{"data": [{"index": i, "embedding": [float, ...]}, ...]}``.
    The bearer token is read from the environment variable named by
    ``token_env`` at call time and never logged.
    """

    def __init__(
        self,
        url: str,
        model: str,
        token_env: str | None = None,
        timeout: float = 30.0,
        batch_size: int = 32,
        parallelism: int = 4,
    ):
        self.url = url
        self.model = model
        self.token_env = token_env
        self.timeout = timeout
        self.batch_size = batch_size
        self.parallelism = max(1, parallelism)
        self._cache: dict[str, EmbeddingVector] = {}
        self._lock = threading.Lock()

    @property
    def provider_id(self) -> str:
        return f"{self.url}#{self.model}"

    def describe(self) -> dict:
        return {"url": self.url, "model": self.model, "token_env": self.token_env}

    def _post(self, batch: list[str]) -> list[EmbeddingVector]:
        headers = {"Content-Type": "application/json"}
        if self.token_env and os.environ.get(self.token_env):
            headers["Authorization"] = f"Bearer {os.environ[self.token_env]}"
        try:
            resp = requests.post(
                self.url, json={"model": self.model, "input": batch}, headers=headers, timeout=self.timeout
            )
            resp.raise_for_status()
            data = sorted(resp.json()["data"], key=lambda d: d["index"])
            vectors = [EmbeddingVector(tuple(float(x) for x in d["embedding"]), self.provider_id) for d in data]
        except (requests.RequestException, KeyError, TypeError, ValueError) as exc:
            logger.warning("embedding request to %s failed: %s", self.url, type(exc).__name__)
            raise EmbeddingProviderError("embedding provider unavailable") from exc
        if len(vectors) != len(batch) or len({len(v) for v in vectors}) > 1:
            raise EmbeddingProviderError("embedding provider unavailable")
        return vectors

    def embed(self, texts: Sequence[str]) -> list[EmbeddingVector]:
        with self._lock:
            missing = sorted({t for t in texts if t not in self._cache})
        batches = [missing[i : i + self.batch_size] for i in range(0, len(missing), self.batch_size)]
        if batches:
            with ThreadPoolExecutor(max_workers=min(self.parallelism, len(batches))) as pool:
                results = list(pool.map(self._post, batches))
            with self._lock:
                for batch, vecs in zip(batches, results):
                    self._cache.update(zip(batch, vecs))
        return [self._cache[t] for t in texts]


@dataclass(frozen=True)
class SimilarityConfig:
    mode: str = "lexical"
    embedding_provider: object | None = field(default=None, compare=False)
    splitter: SubwordSplitter | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"similarity mode must be one of {MODES}, got {self.mode!r}")
        if self.mode != "lexical" and self.embedding_provider is None:
            raise ValueError(f"{self.mode} similarity needs an embedding provider")


LEXICAL = SimilarityConfig()


def jaccard(a: TokenBag, b: TokenBag) -> float:
    if not a.tokens and not b.tokens:
        return 1.0
    inter = len(a.tokens & b.tokens)
    return inter / (len(a.tokens) + len(b.tokens) - inter)


def cosine(a: EmbeddingVector, b: EmbeddingVector) -> float:
    if a.provider_id != b.provider_id:
        raise ValueError("embeddings come from different providers")
    if len(a) != len(b):
        raise ValueError(f"embedding length mismatch: {len(a)} != {len(b)}")
    va, vb = np.asarray(a.values, dtype=float), np.asarray(b.values, dtype=float)
    na, nb = np.linalg.norm(va), np.linalg.norm(vb)
    if na == 0.0 or nb == 0.0:
        return 0.0
    return float(np.clip(va @ vb / (na * nb), -1.0, 1.0))


def _lexical(query: str, texts: Sequence[str], cfg: SimilarityConfig) -> list[float]:
    q = tokenize(query, cfg.splitter)
    return [jaccard(q, tokenize(t, cfg.splitter)) for t in texts]


def _semantic(query: str, texts: Sequence[str], cfg: SimilarityConfig) -> list[float]:
    provider = cfg.embedding_provider
    if provider is None:
        raise EmbeddingProviderError("embedding provider unavailable")
    vectors = provider.embed([query, *texts])
    q = vectors[0]
    return [(cosine(q, v) + 1.0) / 2.0 for v in vectors[1:]]


def score_many(query: str, texts: Sequence[str], cfg: SimilarityConfig = LEXICAL) -> list[float]:
    """Similarity of ``query`` against each text, all in [0, 1]."""
    if not texts:
        return []
    if cfg.mode == "lexical":
        return _lexical(query, texts, cfg)
    if cfg.mode == "semantic":
        return _semantic(query, texts, cfg)
    lex = _lexical(query, texts, cfg)
    sem = _semantic(query, texts, cfg)
    return [(x + y) / 2.0 for x, y in zip(lex, sem)]


def sim(a: str, b: str, cfg: SimilarityConfig = LEXICAL) -> float:
    return score_many(a, [b], cfg)[0]


def name_sim(a: str, b: str) -> float:
    """Jaccard over the case/underscore/digit subtokens of two identifiers."""
    return jaccard(tokenize(a), tokenize(b))


def top_k(
    query: str,
    candidates: Sequence[tuple[str, str]],
    k: int,
    cfg: SimilarityConfig = LEXICAL,
) -> list[tuple[str, float]]:
    """Score every ``(id, text)`` candidate and keep the best ``k``.

    Ordering is by descending score, ties by ascending id.
    """
    if k < 0:
        raise ValueError("k must be >= 0")
    if k == 0 or not candidates:
        return []
    scores = score_many(query, [text for _, text in candidates], cfg)
    ranked = sorted(zip((cid for cid, _ in candidates), scores), key=lambda p: (-p[1], p[0]))
    return ranked[:k]
