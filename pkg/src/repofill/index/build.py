"""Build, query and persist a :class:`RepositoryIndex`."""

from __future__ import annotations

import hashlib
import json
import logging
import os
import re
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from functools import lru_cache
from pathlib import Path

from . import java  # noqa: F401  (registers the java frontend)
from .frontend import get_frontend
from .model import (
    KIND_FOR_CATEGORY,
    ClassDecl,
    Element,
    FieldDecl,
    MethodDecl,
    ParsedFile,
    SourceSpan,
    UsageEdge,
)

logger = logging.getLogger(__name__)

SCHEMA_NAME = "repofill.index"
SCHEMA_VERSION = 1

DEFAULT_TEST_GLOBS = ("**/test/**", "**/tests/**", "*Test.*")
DEFAULT_EXCLUDE_GLOBS = ("**/.git/**", "**/build/**", "**/target/**", "**/node_modules/**")


class EmptyIndexError(ValueError):
    pass


class UnknownElementError(KeyError):
    pass


class IndexFormatError(ValueError):
    pass


@dataclass(frozen=True)
class IndexConfig:
    frontend: str = "java"
    include_globs: tuple[str, ...] = ()  # empty -> frontend defaults
    exclude_globs: tuple[str, ...] = DEFAULT_EXCLUDE_GLOBS
    test_globs: tuple[str, ...] = DEFAULT_TEST_GLOBS
    workers: int = 1

    def to_dict(self) -> dict:
        return {
            "frontend": self.frontend,
            "include_globs": list(self.include_globs),
            "exclude_globs": list(self.exclude_globs),
            "test_globs": list(self.test_globs),
        }


@lru_cache(maxsize=256)
def _glob_regex(pattern: str) -> re.Pattern:
    out = []
    i = 0
    while i < len(pattern):
        if pattern.startswith("**/", i):
            out.append("(?:.*/)?")
            i += 3
        elif pattern.startswith("**", i):
            out.append(".*")
            i += 2
        elif pattern[i] == "*":
            out.append("[^/]*")
            i += 1
        elif pattern[i] == "?":
            out.append("[^/]")
            i += 1
        else:
            out.append(re.escape(pattern[i]))
            i += 1
    return re.compile("".join(out) + r"\Z")


def glob_match(rel_path: str, pattern: str) -> bool:
    """Match a POSIX relative path; slash-free patterns match the basename."""
    target = rel_path if "/" in pattern else rel_path.rsplit("/", 1)[-1]
    return _glob_regex(pattern).match(target) is not None


def _matches_any(rel_path: str, patterns) -> bool:
    return any(glob_match(rel_path, p) for p in patterns)


class RepositoryIndex:
    """Catalog of declarations and usage edges for one repository snapshot.

    Treat instances as immutable: all collections are tuples and the lookup
    tables are built once in the constructor.
    """

    def __init__(
        self,
        classes,
        methods,
        fields,
        usage_edges,
        snapshot_id: str,
        config: IndexConfig | None = None,
        warnings=(),
        file_count: int = 0,
    ):
        self.classes: tuple[ClassDecl, ...] = tuple(sorted(classes, key=lambda c: c.qualified_name))
        self.methods: tuple[MethodDecl, ...] = tuple(sorted(methods, key=lambda m: m.qualified_name))
        self.fields: tuple[FieldDecl, ...] = tuple(sorted(fields, key=lambda f: f.qualified_name))
        self.usage_edges: tuple[UsageEdge, ...] = tuple(
            sorted(usage_edges, key=lambda e: (e.site.file_path, e.site.start_byte, e.user, e.kind))
        )
        self.snapshot_id = snapshot_id
        self.config = config or IndexConfig()
        self.warnings: tuple[str, ...] = tuple(warnings)
        self.file_count = file_count

        self._by_key: dict[str, Element] = {}
        for group in (self.classes, self.methods, self.fields):
            for el in group:
                self._by_key[f"{el.category}:{el.qualified_name}"] = el
        by_simple: dict[str, list[Element]] = defaultdict(list)
        for group in (self.classes, self.methods, self.fields):
            for el in group:
                by_simple[el.simple_name].append(el)
        self.by_simple_name: dict[str, tuple[Element, ...]] = {k: tuple(v) for k, v in by_simple.items()}

        self._method_by_qname = {m.qualified_name: m for m in self.methods}
        # (kind, target) -> {user qname: [arg counts]}
        targets: dict[tuple[str, str], dict[str, list[int]]] = defaultdict(lambda: defaultdict(list))
        for e in self.usage_edges:
            targets[(e.kind, e.target_simple_name)][e.user].append(e.arg_count)
        self._edges_by_target = {k: {u: tuple(c) for u, c in v.items()} for k, v in targets.items()}
        edges_by_user: dict[str, list[UsageEdge]] = defaultdict(list)
        for e in self.usage_edges:
            edges_by_user[e.user].append(e)
        self._edges_by_user = {k: tuple(v) for k, v in edges_by_user.items()}
        self._nontest_method_names: dict[str, int] = defaultdict(int)
        for m in self.methods:
            if not m.is_test:
                self._nontest_method_names[m.simple_name] += 1

    # -- element pools -----------------------------------------------------

    def accessible_methods(self) -> list[MethodDecl]:
        return [m for m in self.methods if not m.is_test]

    def accessible_fields(self) -> list[FieldDecl]:
        return [f for f in self.fields if not f.is_test]

    def accessible_classes(self) -> list[ClassDecl]:
        return [c for c in self.classes if not c.is_test]

    def method(self, qualified_name: str) -> MethodDecl:
        return self._method_by_qname[qualified_name]

    def element(self, key: str) -> Element:
        try:
            return self._by_key[key]
        except KeyError:
            raise UnknownElementError(f"unknown element: {key}") from None

    def contains(self, element: Element) -> bool:
        return self._by_key.get(f"{element.category}:{element.qualified_name}") == element

    def edges_of(self, user_qname: str) -> tuple[UsageEdge, ...]:
        return self._edges_by_user.get(user_qname, ())

    def method_at(self, file_path: str, byte_offset: int) -> MethodDecl | None:
        """Innermost method whose declaration span contains ``byte_offset``."""
        best = None
        for m in self.methods:
            s = m.span
            if s.file_path == file_path and s.start_byte <= byte_offset < s.end_byte:
                if best is None or s.start_byte >= best.span.start_byte:
                    best = m
        return best

    # -- usages ------------------------------------------------------------

    def usages_of(self, element: Element) -> list[MethodDecl]:
        """Non-test methods that syntactically reference ``element``."""
        if not self.contains(element):
            raise UnknownElementError(f"unknown element: {element.qualified_name}")
        kind = KIND_FOR_CATEGORY[element.category]
        users = self._edges_by_target.get((kind, element.simple_name), {})
        unique = isinstance(element, MethodDecl) and self._nontest_method_names.get(element.simple_name, 0) == 1
        out = []
        for user, arg_counts in users.items():
            m = self._method_by_qname.get(user)
            if m is None or m.is_test:
                continue
            if isinstance(element, MethodDecl) and not unique:
                if not any(element.accepts_arity(c) for c in arg_counts):
                    continue
            out.append(m)
        out.sort(key=lambda m: m.qualified_name)
        return out

    # -- persistence -------------------------------------------------------

    def to_dict(self) -> dict:
        def span(s: SourceSpan | None):
            return None if s is None else [s.file_path, s.start_line, s.end_line, s.start_byte, s.end_byte]

        return {
            "schema": SCHEMA_NAME,
            "version": SCHEMA_VERSION,
            "snapshot_id": self.snapshot_id,
            "config": self.config.to_dict(),
            "file_count": self.file_count,
            "warnings": list(self.warnings),
            "classes": [[c.qualified_name, c.simple_name, span(c.span), c.is_test, c.kind] for c in self.classes],
            "methods": [
                {
                    "q": m.qualified_name,
                    "n": m.simple_name,
                    "owner": m.owner_class,
                    "ret": m.return_type,
                    "params": [list(p) for p in m.params],
                    "body": m.body_text,
                    "loc": m.body_loc,
                    "span": span(m.span),
                    "body_span": span(m.body_span),
                    "test": m.is_test,
                    "ctor": m.is_constructor,
                    "varargs": m.is_varargs,
                }
                for m in self.methods
            ],
            "fields": [
                [f.qualified_name, f.simple_name, f.owner_class, f.type_name, span(f.span), f.is_test]
                for f in self.fields
            ],
            "edges": [[e.user, e.kind, e.target_simple_name, e.arg_count, span(e.site)] for e in self.usage_edges],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, ensure_ascii=False, separators=(",", ":")) + "\n"

    def save(self, path: str | os.PathLike) -> None:
        Path(path).write_text(self.dumps(), encoding="utf-8", newline="\n")

    @classmethod
    def from_dict(cls, d: dict) -> RepositoryIndex:
        if d.get("schema") != SCHEMA_NAME:
            raise IndexFormatError(f"not an index file (schema={d.get('schema')!r})")
        if d.get("version") != SCHEMA_VERSION:
            raise IndexFormatError(f"unsupported index schema version {d.get('version')!r}")

        def span(v):
            return None if v is None else SourceSpan(*v)

        cfg = d.get("config", {})
        config = IndexConfig(
            frontend=cfg.get("frontend", "java"),
            include_globs=tuple(cfg.get("include_globs", ())),
            exclude_globs=tuple(cfg.get("exclude_globs", DEFAULT_EXCLUDE_GLOBS)),
            test_globs=tuple(cfg.get("test_globs", DEFAULT_TEST_GLOBS)),
        )
        return cls(
            classes=[ClassDecl(q, n, span(s), t, k) for q, n, s, t, k in d["classes"]],
            methods=[
                MethodDecl(
                    qualified_name=m["q"],
                    simple_name=m["n"],
                    owner_class=m["owner"],
                    return_type=m["ret"],
                    params=tuple(tuple(p) for p in m["params"]),
                    body_text=m["body"],
                    body_loc=m["loc"],
                    span=span(m["span"]),
                    is_test=m["test"],
                    is_constructor=m["ctor"],
                    is_varargs=m["varargs"],
                    body_span=span(m["body_span"]),
                )
                for m in d["methods"]
            ],
            fields=[FieldDecl(q, n, o, t, span(s), test) for q, n, o, t, s, test in d["fields"]],
            usage_edges=[UsageEdge(u, k, t, a, span(s)) for u, k, t, a, s in d["edges"]],
            snapshot_id=d["snapshot_id"],
            config=config,
            warnings=d.get("warnings", ()),
            file_count=d.get("file_count", 0),
        )

    @classmethod
    def load(cls, path: str | os.PathLike) -> RepositoryIndex:
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def accessible_methods(index: RepositoryIndex) -> list[MethodDecl]:
    return index.accessible_methods()


def accessible_fields(index: RepositoryIndex) -> list[FieldDecl]:
    return index.accessible_fields()


def accessible_classes(index: RepositoryIndex) -> list[ClassDecl]:
    return index.accessible_classes()


def usages_of(index: RepositoryIndex, element: Element) -> list[MethodDecl]:
    return index.usages_of(element)


# -- building ---------------------------------------------------------------


def discover_files(root: Path, config: IndexConfig) -> list[str]:
    frontend = get_frontend(config.frontend)
    includes = config.include_globs or frontend.include_globs
    found = []
    for dirpath, dirnames, filenames in os.walk(root):
        dirnames.sort()
        for fname in filenames:
            rel = Path(dirpath, fname).relative_to(root).as_posix()
            if _matches_any(rel, includes) and not _matches_any(rel, config.exclude_globs):
                found.append(rel)
    return sorted(found)


def _parse_one(args: tuple[str, str, bytes, bool]) -> ParsedFile:
    frontend_name, rel, data, is_test = args
    return get_frontend(frontend_name).parse_file(rel, data, is_test)


def _suffix(path: str) -> str:
    return "#" + hashlib.sha256(path.encode("utf-8")).hexdigest()[:8]


def _qualify(parsed: list[ParsedFile]) -> tuple[list, list, list, list]:
    """Merge per-file facts, making class and method keys unique."""
    owners: dict[str, set[str]] = defaultdict(set)
    for pf in parsed:
        for c in pf.classes:
            owners[c.qualified_name].add(pf.path)
    duplicated = {q for q, paths in owners.items() if len(paths) > 1}

    classes, methods, fields, edges = [], [], [], []
    seen_methods: dict[str, int] = defaultdict(int)
    for pf in parsed:
        rename = {q: q + _suffix(pf.path) for q in {c.qualified_name for c in pf.classes} & duplicated}
        method_rename: dict[str, str] = {}
        for c in pf.classes:
            classes.append(replace(c, qualified_name=rename.get(c.qualified_name, c.qualified_name)))
        for m in pf.methods:
            owner = rename.get(m.owner_class, m.owner_class)
            qname = f"{owner}.{m.qualified_name[len(m.owner_class) + 1:]}"
            seen_methods[qname] += 1
            if seen_methods[qname] > 1:
                qname = f"{qname}#{seen_methods[qname]}"
            method_rename[m.qualified_name] = qname
            methods.append(replace(m, qualified_name=qname, owner_class=owner))
        for f in pf.fields:
            owner = rename.get(f.owner_class, f.owner_class)
            fields.append(replace(f, owner_class=owner, qualified_name=f"{owner}.{f.simple_name}"))
        for e in pf.edges:
            edges.append(replace(e, user=method_rename.get(e.user, e.user)))
    return classes, methods, fields, edges


def build_index(root: str | os.PathLike, config: IndexConfig | None = None) -> RepositoryIndex:
    """Parse every matching file under ``root`` into a :class:`RepositoryIndex`.

    Unreadable files are skipped with a warning; raises :class:`EmptyIndexError`
    when no file could be parsed. ``snapshot_id`` hashes relative paths and raw
    contents, so identical trees give identical ids on any machine.
    """
    config = config or IndexConfig()
    root = Path(root)
    if not root.is_dir():
        raise FileNotFoundError(f"repository root not found: {root}")
    warnings: list[str] = []
    jobs = []
    digest = hashlib.sha256()
    for rel in discover_files(root, config):
        try:
            data = (root / rel).read_bytes()
        except OSError as exc:
            msg = f"skipped unreadable file {rel}: {exc.strerror or exc}"
            logger.warning(msg)
            warnings.append(msg)
            continue
        digest.update(rel.encode("utf-8") + b"\0" + hashlib.sha256(data).digest())
        jobs.append((config.frontend, rel, data, _matches_any(rel, config.test_globs)))
    if not jobs:
        raise EmptyIndexError("empty index")

    if config.workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            parsed = list(pool.map(_parse_one, jobs, chunksize=16))
    else:
        parsed = [_parse_one(j) for j in jobs]

    classes, methods, fields, edges = _qualify(parsed)
    return RepositoryIndex(
        classes, methods, fields, edges, digest.hexdigest(), config, warnings, file_count=len(jobs)
    )
