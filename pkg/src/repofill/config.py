"""Run configuration: JSON file values overridden by command-line flags.

Environment variables are consulted only for secrets, by name, at request
time (``backend.token_env`` and ``similarity.token_env``).

Example file::

    {
      "mode": "normal",
      "k_signature": 5,
      "k_usages": 10,
      "budget": 4096,
      "backend": {"kind": "http", "endpoint": "http://localhost:8000/v1/chat/completions",
                  "model": "deepseek-coder-6.7b", "token_env": "LLM_TOKEN"},
      "similarity": {"mode": "lexical"}
    }
"""

from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

from .backend import BackendConfig
from .similarity import MODES, HttpEmbeddingProvider, SimilarityConfig


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class EmbeddingSettings:
    mode: str = "lexical"
    url: str | None = None
    model: str | None = None
    token_env: str | None = None
    parallelism: int = 4
    timeout: float = 30.0

    def __post_init__(self):
        if self.mode not in MODES:
            raise ConfigError(f"similarity mode must be one of {MODES}")
        if self.mode != "lexical" and not (self.url and self.model):
            raise ConfigError(f"{self.mode} similarity needs similarity.url and similarity.model")

    def build(self) -> SimilarityConfig:
        if self.mode == "lexical":
            return SimilarityConfig()
        provider = HttpEmbeddingProvider(self.url, self.model, self.token_env, self.timeout, parallelism=self.parallelism)
        return SimilarityConfig(self.mode, provider)


@dataclass(frozen=True)
class RunConfig:
    mode: str = "normal"
    k_signature: int = 5
    k_usages: int = 10
    sketch_budget: int = 2048
    budget: int = 4096
    min_name_sim: float = 0.5
    n_sketches: int = 1
    token_scale: float = 1.0
    marker: str = "{ <FILL_BODY> }"
    sketch_template: str = "sketch"
    completion_template: str = "completion"
    seed: int = 0
    context_lines: int = 50
    compile_hook: str | None = None
    hook_timeout: float = 300.0
    backend: BackendConfig = field(default_factory=BackendConfig)
    similarity: EmbeddingSettings = field(default_factory=EmbeddingSettings)

    def __post_init__(self):
        if self.mode not in ("normal", "oracle"):
            raise ConfigError("mode must be normal or oracle")
        if not 0 <= self.k_usages <= 50:
            raise ConfigError("k_usages must lie in 0..50")
        if self.k_signature < 0:
            raise ConfigError("k_signature must be >= 0")
        if self.budget <= 0 or self.sketch_budget <= 0:
            raise ConfigError("budgets must be positive")
        if self.n_sketches != 1:
            raise ConfigError("only n_sketches=1 is supported")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> RunConfig:
        data = dict(data)
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
        try:
            if "backend" in data:
                data["backend"] = BackendConfig(**data["backend"])
            if "similarity" in data:
                data["similarity"] = EmbeddingSettings(**data["similarity"])
            return cls(**data)
        except TypeError as exc:
            raise ConfigError(str(exc)) from None
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    @classmethod
    def load(cls, path: str | os.PathLike | None, overrides: dict | None = None) -> RunConfig:
        """Read ``path`` (if any) and apply flag ``overrides``.

        Override keys use dotted names for nested sections, e.g.
        ``{"backend.kind": "mock", "k_usages": 5}``; ``None`` values are ignored.
        """
        data: dict = {}
        if path is not None:
            try:
                data = json.loads(Path(path).read_text(encoding="utf-8"))
            except OSError as exc:
                raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
            except json.JSONDecodeError as exc:
                raise ConfigError(f"config {path} is not valid JSON: {exc.msg}") from None
            if not isinstance(data, dict):
                raise ConfigError("config file must hold a JSON object")
        for key, value in (overrides or {}).items():
            if value is None:
                continue
            section, _, name = key.partition(".")
            if name:
                data.setdefault(section, {})[name] = value
            else:
                data[key] = value
        return cls.from_dict(data)

    def with_overrides(self, **changes) -> RunConfig:
        return replace(self, **changes)
