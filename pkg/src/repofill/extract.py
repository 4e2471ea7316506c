"""Pull a method body out of free-form LLM output.

Rules, first hit wins:

1. a header echo (``name(...)`` optionally followed by a ``throws`` clause)
   immediately followed by a balanced ``{...}`` block: that block;
2. output that itself starts with a balanced block: that block;
3. the contents of the first fenced code block;
4. nothing (extraction failed).

The brace scanner skips string, character and comment contents so braces in
literals do not unbalance the count.
"""

from __future__ import annotations

import re

_FENCE = re.compile(r"```[^\n`]*\n(.*?)```", re.S)
_THROWS = re.compile(r"\s*throws\s+[\w$.<>?,\s\[\]]+?(?=\s*\{)")


def _skip_literal(text: str, i: int) -> int:
    """If a literal or comment starts at ``i``, return the index just past it."""
    c = text[i]
    if c in "\"'":
        j = i + 1
        while j < len(text):
            if text[j] == "\\":
                j += 2
                continue
            if text[j] == c or text[j] == "\n":
                return j + 1
            j += 1
        return len(text)
    if text.startswith("//", i):
        j = text.find("\n", i)
        return len(text) if j < 0 else j
    if text.startswith("/*", i):
        j = text.find("*/", i + 2)
        return len(text) if j < 0 else j + 2
    return i


def matching_close(text: str, open_idx: int, pair: str = "{}") -> int | None:
    """Index of the bracket closing the one at ``open_idx``, or None."""
    opening, closing = pair
    depth = 0
    i = open_idx
    while i < len(text):
        j = _skip_literal(text, i)
        if j != i:
            i = j
            continue
        c = text[i]
        if c == opening:
            depth += 1
        elif c == closing:
            depth -= 1
            if depth == 0:
                return i
        i += 1
    return None


def balanced_block_at(text: str, start: int) -> str | None:
    if start >= len(text) or text[start] != "{":
        return None
    end = matching_close(text, start)
    return None if end is None else text[start : end + 1]


def _after_header_echo(text: str, name: str) -> str | None:
    for m in re.finditer(rf"(?<![\w$]){re.escape(name)}\s*\(", text):
        close = matching_close(text, m.end() - 1, "()")
        if close is None:
            continue
        rest = close + 1
        throws = _THROWS.match(text, rest)
        if throws:
            rest = throws.end()
        while rest < len(text) and text[rest].isspace():
            rest += 1
        block = balanced_block_at(text, rest)
        if block is not None:
            return block
    return None


def extract_body(raw: str, method_name: str | None) -> str | None:
    if not raw or not raw.strip():
        return None
    if method_name:
        block = _after_header_echo(raw, method_name)
        if block is not None:
            return block
    lead = len(raw) - len(raw.lstrip())
    block = balanced_block_at(raw, lead)
    if block is not None:
        return block
    fence = _FENCE.search(raw)
    if fence is not None and fence.group(1).strip():
        return fence.group(1).rstrip("\n")
    return None
