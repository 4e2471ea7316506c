"""Language frontend interface and registry.

A frontend turns one source file into declarations plus usage edges, and knows
how to analyze free-standing method bodies (sketches, candidate completions).
Everything downstream of the frontend is language-agnostic.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

from .model import MethodDecl, ParsedFile


@dataclass
class SnippetFacts:
    calls: set[tuple[str, int]] = field(default_factory=set)
    fields: set[str] = field(default_factory=set)
    types: set[str] = field(default_factory=set)
    degraded: bool = False


class Frontend:
    name: str = ""
    comment_prefix: str = "//"
    include_globs: tuple[str, ...] = ()

    def parse_file(self, path: str, source: bytes, is_test: bool = False) -> ParsedFile:
        raise NotImplementedError

    def analyze_snippet(self, body_text: str, known_locals: frozenset[str] = frozenset()) -> SnippetFacts:
        raise NotImplementedError

    def accessor_kind(self, method: MethodDecl, field_names: set[str]) -> str | None:
        """Return ``"getter"``, ``"setter"`` or None for a method body."""
        raise NotImplementedError

    def is_parsable(self, code: str) -> bool:
        raise NotImplementedError

    def parse_header(self, signature_text: str) -> MethodDecl | None:
        """Parse a bare method header into a body-less declaration, or None."""
        raise NotImplementedError


_REGISTRY: dict[str, Callable[[], Frontend]] = {}
_INSTANCES: dict[str, Frontend] = {}


def register_frontend(name: str, factory: Callable[[], Frontend]) -> None:
    _REGISTRY[name] = factory


def get_frontend(name: str) -> Frontend:
    if name not in _INSTANCES:
        if name not in _REGISTRY:
            raise KeyError(f"unknown frontend {name!r}; available: {sorted(_REGISTRY)}")
        _INSTANCES[name] = _REGISTRY[name]()
    return _INSTANCES[name]
