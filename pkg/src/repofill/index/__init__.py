from .build import (
    EmptyIndexError,
    IndexConfig,
    IndexFormatError,
    RepositoryIndex,
    UnknownElementError,
    accessible_classes,
    accessible_fields,
    accessible_methods,
    build_index,
    glob_match,
    usages_of,
)
from .frontend import Frontend, SnippetFacts, get_frontend, register_frontend
from .model import (
    CALL,
    FIELD_ACCESS,
    TYPE_USE,
    ClassDecl,
    Element,
    FieldDecl,
    MethodDecl,
    SourceSpan,
    UsageEdge,
    element_key,
)

__all__ = [
    "CALL",
    "FIELD_ACCESS",
    "TYPE_USE",
    "ClassDecl",
    "Element",
    "EmptyIndexError",
    "FieldDecl",
    "Frontend",
    "IndexConfig",
    "IndexFormatError",
    "MethodDecl",
    "RepositoryIndex",
    "SnippetFacts",
    "SourceSpan",
    "UnknownElementError",
    "UsageEdge",
    "accessible_classes",
    "accessible_fields",
    "accessible_methods",
    "build_index",
    "element_key",
    "get_frontend",
    "glob_match",
    "register_frontend",
    "usages_of",
]
