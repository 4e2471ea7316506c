"""Case- and whitespace-sensitive exact match."""

from __future__ import annotations


def _normalize(body: str) -> str:
    text = body.replace("\r\n", "\n").replace("\r", "\n")
    lines = text.split("\n")
    if len(lines) > 1 and not lines[0].strip():
        lines = lines[1:]
    if len(lines) > 1 and not lines[-1].strip():
        lines = lines[:-1]
    return "\n".join(lines)


def exact_match(candidate: str, reference: str) -> bool:
    """Equality after unifying line endings and dropping one blank line at each end."""
    return _normalize(candidate) == _normalize(reference)
