"""Benchmark mining: one sampled method per non-test class.

Constructors, abstract methods, getters, setters and bodies under three
non-blank lines are filtered out. Each problem keeps up to 50 non-blank lines
of file text on either side of the method, with import lines removed from the
left side.
"""

from __future__ import annotations

import json
import os
import random
import re
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from pathlib import Path

from ..index import MethodDecl, RepositoryIndex, get_frontend
from ..problem import MbcProblem, dump_problems, read_problems

FILTER_REASONS = ("selected", "not_selected", "constructor", "abstract", "getter", "setter", "too_short")
_IMPORT = re.compile(r"^\s*import\s+[\w.*\s]+;\s*$")


@dataclass(frozen=True)
class MiningConfig:
    context_lines: int = 50
    min_loc: int = 3
    repo_name: str | None = None

    def to_dict(self) -> dict:
        return {"context_lines": self.context_lines, "min_loc": self.min_loc, "repo_name": self.repo_name}


@dataclass
class BenchmarkManifest:
    problems: list[MbcProblem]
    repo: dict
    filter_stats: dict[str, int]
    seed: int
    config: dict = field(default_factory=dict)

    def meta(self) -> dict:
        return {
            "repo": self.repo,
            "filter_stats": self.filter_stats,
            "seed": self.seed,
            "config": self.config,
            "problem_count": len(self.problems),
        }

    def write(self, path: str | os.PathLike) -> None:
        """Problems go to ``path`` as JSON lines; metadata to ``<path>.meta.json``."""
        Path(path).write_text(dump_problems(self.problems), encoding="utf-8")
        Path(meta_path(path)).write_text(json.dumps(self.meta(), indent=2, sort_keys=True) + "\n", encoding="utf-8")

    @classmethod
    def read(cls, path: str | os.PathLike, repo_root: str | None = None) -> BenchmarkManifest:
        problems = read_problems(path, repo_root)
        mp = Path(meta_path(path))
        meta = json.loads(mp.read_text(encoding="utf-8")) if mp.exists() else {}
        return cls(problems, meta.get("repo", {}), meta.get("filter_stats", {}), meta.get("seed", 0), meta.get("config", {}))


def meta_path(path: str | os.PathLike) -> str:
    return f"{os.fspath(path)}.meta.json"


def strip_imports(text: str) -> str:
    return "".join(line for line in text.splitlines(keepends=True) if not _IMPORT.match(line))


def _clip_tail(text: str, n: int) -> str:
    """Suffix of ``text`` holding its last ``n`` non-blank lines."""
    lines = text.splitlines(keepends=True)
    seen = 0
    for i in range(len(lines) - 1, -1, -1):
        if lines[i].strip():
            seen += 1
            if seen == n:
                return "".join(lines[i:])
    return text


def _clip_head(text: str, n: int) -> str:
    lines = text.splitlines(keepends=True)
    seen = 0
    for i, line in enumerate(lines):
        if line.strip():
            seen += 1
            if seen == n:
                return "".join(lines[: i + 1])
    return text


def problem_for(method: MethodDecl, source: bytes, repo: str, context_lines: int = 50, repo_root=None) -> MbcProblem:
    decl, body = method.span, method.body_span
    line_start = source.rfind(b"\n", 0, decl.start_byte) + 1
    left = source[:line_start].decode("utf-8", "replace")
    signature = source[decl.start_byte : body.start_byte].decode("utf-8", "replace").strip()
    right = source[body.end_byte :].decode("utf-8", "replace")
    reference = source[body.start_byte : body.end_byte].decode("utf-8", "replace")
    return MbcProblem(
        repo=repo,
        path=method.span.file_path,
        signature=signature,
        left_context=_clip_tail(strip_imports(left), context_lines),
        right_context=_clip_head(right, context_lines),
        reference_body=reference,
        span=body,
        repo_root=repo_root,
    )


def classify(method: MethodDecl, field_names: set[str], frontend, min_loc: int) -> str | None:
    """Exclusion reason for ``method``, or None when it is eligible."""
    if method.is_constructor:
        return "constructor"
    if method.body_text is None:
        return "abstract"
    accessor = frontend.accessor_kind(method, field_names)
    if accessor is not None:
        return accessor
    if method.body_loc < min_loc:
        return "too_short"
    return None


def mine_problems(
    index: RepositoryIndex,
    root: str | os.PathLike,
    cfg: MiningConfig = MiningConfig(),
    rng_seed: int = 0,
) -> BenchmarkManifest:
    frontend = get_frontend(index.config.frontend)
    root = Path(root)
    repo = cfg.repo_name or root.resolve().name
    rng = random.Random(rng_seed)

    methods_by_class: dict[str, list[MethodDecl]] = defaultdict(list)
    for m in index.accessible_methods():
        methods_by_class[m.owner_class].append(m)
    fields_by_class: dict[str, set[str]] = defaultdict(set)
    for f in index.fields:
        fields_by_class[f.owner_class].add(f.simple_name)

    stats: Counter = Counter({reason: 0 for reason in FILTER_REASONS})
    classes_skipped = 0
    problems = []
    sources: dict[str, bytes] = {}
    for cls in index.accessible_classes():
        eligible = []
        for m in methods_by_class.get(cls.qualified_name, []):
            reason = classify(m, fields_by_class[cls.qualified_name], frontend, cfg.min_loc)
            if reason is None:
                eligible.append(m)
            else:
                stats[reason] += 1
        if not eligible:
            classes_skipped += 1
            continue
        chosen = rng.choice(eligible)
        stats["selected"] += 1
        stats["not_selected"] += len(eligible) - 1
        path = chosen.span.file_path
        if path not in sources:
            sources[path] = (root / path).read_bytes()
        problems.append(problem_for(chosen, sources[path], repo, cfg.context_lines, str(root)))

    filter_stats = dict(stats)
    filter_stats["classes_skipped"] = classes_skipped
    meta = {
        "name": repo,
        "snapshot_id": index.snapshot_id,
        "file_count": index.file_count,
        "method_count": len(index.accessible_methods()),
    }
    return BenchmarkManifest(problems, meta, filter_stats, rng_seed, cfg.to_dict())
