"""Splice a candidate body into a scratch copy of the repository and run a build hook."""

from __future__ import annotations

import shlex
import shutil
import subprocess
import tempfile
from dataclasses import dataclass
from pathlib import Path

from ..problem import MbcProblem


@dataclass(frozen=True)
class CompileResult:
    ok: bool | None
    reason: str = ""


def splice(source: bytes, start: int, end: int, body: str) -> bytes:
    return source[:start] + body.encode("utf-8") + source[end:]


def compile_check(
    problem: MbcProblem,
    candidate: str,
    hook_cmd: str | None,
    repo_root: str | None = None,
    timeout: float = 300.0,
) -> CompileResult:
    """Exit status of ``hook_cmd`` run against the patched scratch tree.

    ``hook_cmd`` is split shell-style; ``{repo}`` in any argument becomes the
    scratch directory. No hook means no verdict.
    """
    if not hook_cmd:
        return CompileResult(None, "no compile hook configured")
    root = repo_root or problem.repo_root
    if root is None:
        return CompileResult(None, "repository root unknown")
    with tempfile.TemporaryDirectory(prefix="repofill-cc-") as tmp:
        scratch = Path(tmp) / "repo"
        shutil.copytree(root, scratch, symlinks=True, ignore=shutil.ignore_patterns(".git"))
        target = scratch / problem.path
        target.write_bytes(splice(target.read_bytes(), problem.span.start_byte, problem.span.end_byte, candidate))
        argv = [arg.replace("{repo}", str(scratch)) for arg in shlex.split(hook_cmd)]
        try:
            proc = subprocess.run(argv, cwd=scratch, capture_output=True, timeout=timeout)
        except subprocess.TimeoutExpired:
            return CompileResult(None, f"compile hook timed out after {timeout:g}s")
        except OSError as exc:
            return CompileResult(None, f"compile hook failed to start: {exc.strerror}")
        if proc.returncode == 0:
            return CompileResult(True)
        return CompileResult(False, f"exit status {proc.returncode}")
