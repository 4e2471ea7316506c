"""Budgeted prompt rendering shared by the sketch and completion stages.

Context snippets are embedded as line comments above the file text. Admission
is greedy from the most relevant snippet down; rendering order is the reverse,
so the most relevant snippet ends up adjacent to the code being completed.
"""

from __future__ import annotations

import textwrap
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from string import Template

from .index.model import MethodDecl
from .tokens import count_tokens

DEFAULT_MARKER = "{ <FILL_BODY> }"


class ContextBudgetError(ValueError):
    pass


@dataclass(frozen=True)
class Snippet:
    file_path: str
    qualified_name: str
    source: str
    relevance: float


@dataclass(frozen=True)
class RenderedPrompt:
    text: str
    token_count: int
    included_snippets: tuple[tuple[str, str], ...]
    relevances: tuple[float, ...]
    truncated: bool
    budget: int


def load_template(name_or_path: str) -> str:
    """``"completion"``/``"sketch"`` load a packaged template; anything else is a file path."""
    if name_or_path in ("completion", "sketch"):
        return resources.files("repofill.templates").joinpath(f"{name_or_path}.txt").read_text(encoding="utf-8")
    return Path(name_or_path).read_text(encoding="utf-8")


def declaration_text(method: MethodDecl) -> str:
    params = ", ".join(f"{t} {n}".strip() for t, n in method.params)
    head = f"{method.return_type} {method.simple_name}" if method.return_type else method.simple_name
    if method.body_text is None:
        return f"{head}({params});"
    first, _, rest = method.body_text.partition("\n")
    body = first + ("\n" + textwrap.dedent(rest) if rest else "")
    return f"{head}({params}) {body}"


def snippet_for(method: MethodDecl, relevance: float) -> Snippet:
    return Snippet(method.span.file_path, method.qualified_name, declaration_text(method), relevance)


def comment_block(snippet: Snippet, prefix: str) -> str:
    lines = [f"{prefix} path: {snippet.file_path}"]
    for line in snippet.source.splitlines():
        lines.append(f"{prefix} {line}".rstrip() if line.strip() else prefix)
    return "\n".join(lines) + "\n\n"


def _assemble(template: str, blocks: list[str], left: str, signature: str, right: str, marker: str, prefix: str) -> str:
    if left and not left.endswith("\n"):
        left += "\n"
    return Template(template).safe_substitute(
        snippets="".join(blocks),
        left_context=left,
        signature=signature.strip(),
        marker=marker,
        right_context=right,
        comment=prefix,
    )


def render(
    snippets: list[Snippet],
    left_context: str,
    signature: str,
    right_context: str,
    budget: int,
    template: str,
    marker: str = DEFAULT_MARKER,
    comment_prefix: str = "//",
    token_scale: float = 1.0,
) -> RenderedPrompt:
    """Render a prompt holding as many snippets as ``budget`` allows.

    ``snippets`` must be ordered most relevant first.
    """
    def assemble(chosen: list[Snippet]) -> str:
        blocks = [comment_block(s, comment_prefix) for s in reversed(chosen)]
        return _assemble(template, blocks, left_context, signature, right_context, marker, comment_prefix)

    base = count_tokens(assemble([]), token_scale)
    if budget <= 0 or base > budget:
        raise ContextBudgetError(f"context exceeds budget ({base} tokens > {budget})")

    chosen: list[Snippet] = []
    used = base
    for s in snippets:
        cost = count_tokens(comment_block(s, comment_prefix), token_scale)
        if used + cost > budget:
            break
        chosen.append(s)
        used += cost

    # Scaled counts are rounded per piece, so confirm against the full text.
    text = assemble(chosen)
    total = count_tokens(text, token_scale)
    while total > budget and chosen:
        chosen.pop()
        text = assemble(chosen)
        total = count_tokens(text, token_scale)

    rendered = list(reversed(chosen))
    return RenderedPrompt(
        text=text,
        token_count=total,
        included_snippets=tuple((s.file_path, s.qualified_name) for s in rendered),
        relevances=tuple(s.relevance for s in rendered),
        truncated=len(chosen) < len(snippets),
        budget=budget,
    )
