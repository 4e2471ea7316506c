"""Immutable records describing what a repository declares and where it is used."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

CALL = "call"
FIELD_ACCESS = "field_access"
TYPE_USE = "type_use"
USAGE_KINDS = (CALL, FIELD_ACCESS, TYPE_USE)


@dataclass(frozen=True)
class SourceSpan:
    file_path: str
    start_line: int
    end_line: int
    start_byte: int
    end_byte: int

    def to_dict(self) -> dict:
        return {
            "file_path": self.file_path,
            "start_line": self.start_line,
            "end_line": self.end_line,
            "start_byte": self.start_byte,
            "end_byte": self.end_byte,
        }

    @classmethod
    def from_dict(cls, d: dict) -> SourceSpan:
        return cls(d["file_path"], d["start_line"], d["end_line"], d["start_byte"], d["end_byte"])


@dataclass(frozen=True)
class ClassDecl:
    qualified_name: str
    simple_name: str
    span: SourceSpan
    is_test: bool = False
    kind: str = "class"  # class | interface | enum | record | annotation

    category = "class"


@dataclass(frozen=True)
class MethodDecl:
    qualified_name: str
    simple_name: str
    owner_class: str
    return_type: str
    params: tuple[tuple[str, str], ...]
    body_text: str | None
    body_loc: int
    span: SourceSpan
    is_test: bool = False
    is_constructor: bool = False
    is_varargs: bool = False
    body_span: SourceSpan | None = None

    category = "method"

    @property
    def param_types(self) -> tuple[str, ...]:
        return tuple(t for t, _ in self.params)

    @property
    def param_names(self) -> tuple[str, ...]:
        return tuple(n for _, n in self.params)

    @property
    def signature_text(self) -> str:
        """``return_type name(param_types)``; constructors have no return type."""
        head = f"{self.simple_name}({', '.join(self.param_types)})"
        return f"{self.return_type} {head}" if self.return_type else head

    def accepts_arity(self, arg_count: int) -> bool:
        n = len(self.params)
        if self.is_varargs:
            return arg_count >= n - 1
        return arg_count == n


@dataclass(frozen=True)
class FieldDecl:
    qualified_name: str
    simple_name: str
    owner_class: str
    type_name: str
    span: SourceSpan
    is_test: bool = False

    category = "field"


Element = Union[ClassDecl, MethodDecl, FieldDecl]

KIND_FOR_CATEGORY = {"method": CALL, "field": FIELD_ACCESS, "class": TYPE_USE}


def element_key(element: Element) -> str:
    """Stable string reference for an element, e.g. ``field:pkg.Repo.routes``."""
    return f"{element.category}:{element.qualified_name}"


@dataclass(frozen=True)
class UsageEdge:
    user: str  # qualified_name of the using method
    kind: str
    target_simple_name: str
    arg_count: int
    site: SourceSpan


@dataclass
class ParsedFile:
    """Per-file facts produced by a language frontend, before qualification."""

    path: str
    classes: list[ClassDecl] = field(default_factory=list)
    methods: list[MethodDecl] = field(default_factory=list)
    fields: list[FieldDecl] = field(default_factory=list)
    edges: list[UsageEdge] = field(default_factory=list)
