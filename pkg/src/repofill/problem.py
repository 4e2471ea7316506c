"""Completion problems and their line-delimited manifest format."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable

from .index.model import SourceSpan

MANIFEST_FIELDS = ("repo", "path", "signature", "left_context", "right_context", "reference_body", "span")


class ManifestError(ValueError):
    pass


@dataclass(frozen=True)
class MbcProblem:
    """One method-body completion task.

    ``span`` locates the reference body (braces included) in the original
    file. ``repo_root`` is runtime-only and never serialized.
    """

    repo: str
    path: str
    signature: str
    left_context: str
    right_context: str
    reference_body: str | None
    span: SourceSpan
    repo_root: str | None = None

    @property
    def problem_id(self) -> str:
        return f"{self.repo}/{self.path}#L{self.span.start_line}"

    def without_reference(self) -> MbcProblem:
        return replace(self, reference_body=None)

    def to_record(self) -> dict:
        return {
            "repo": self.repo,
            "path": self.path,
            "signature": self.signature,
            "left_context": self.left_context,
            "right_context": self.right_context,
            "reference_body": self.reference_body,
            "span": self.span.to_dict(),
        }

    @classmethod
    def from_record(cls, rec: dict, repo_root: str | None = None) -> MbcProblem:
        missing = [k for k in MANIFEST_FIELDS if k not in rec]
        if missing:
            raise ManifestError(f"manifest record lacks {', '.join(missing)}")
        return cls(
            repo=rec["repo"],
            path=rec["path"],
            signature=rec["signature"],
            left_context=rec["left_context"],
            right_context=rec["right_context"],
            reference_body=rec["reference_body"],
            span=SourceSpan.from_dict(rec["span"]),
            repo_root=repo_root,
        )


def dump_problems(problems: Iterable[MbcProblem]) -> str:
    return "".join(json.dumps(p.to_record(), sort_keys=True, ensure_ascii=False) + "\n" for p in problems)


def write_problems(path: str | os.PathLike, problems: Iterable[MbcProblem]) -> None:
    Path(path).write_text(dump_problems(problems), encoding="utf-8")


def read_problems(path: str | os.PathLike, repo_root: str | None = None) -> list[MbcProblem]:
    out = []
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ManifestError(f"{path}:{lineno}: not JSON ({exc.msg})") from None
        out.append(MbcProblem.from_record(rec, repo_root))
    return out
