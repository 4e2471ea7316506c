"""Tokenization shared by retrieval, prompt budgeting and metrics.

Two views of the same text:

* a *bag* of lowercase subwords (identifier splitting on case, digit and
  underscore boundaries), used for lexical similarity;
* a *sequence* of code tokens (identifiers, numbers, single punctuation
  characters, case preserved), used for BLEU and for counting prompt tokens.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Callable, Iterable

_ALNUM_RUN = re.compile(r"[A-Za-z0-9]+")
_SUBWORD = re.compile(r"[A-Z]+(?=[A-Z][a-z])|[A-Z]?[a-z]+|[A-Z]+|[0-9]+")
_CODE_TOKEN = re.compile(r"\w+|[^\w\s]")

SubwordSplitter = Callable[[str], list[str]]


@dataclass(frozen=True)
class TokenBag:
    tokens: frozenset[str]
    source_len: int

    def __len__(self) -> int:
        return len(self.tokens)

    def __iter__(self):
        return iter(self.tokens)


def split_identifier(word: str) -> list[str]:
    """``"getHTTPResponse2"`` -> ``["get", "http", "response", "2"]``."""
    return [piece.lower() for piece in _SUBWORD.findall(word)]


def subwords(text: str, splitter: SubwordSplitter | None = None) -> list[str]:
    out: list[str] = []
    for run in _ALNUM_RUN.findall(text):
        pieces = split_identifier(run)
        if splitter is not None:
            pieces = [p for piece in pieces for p in splitter(piece)]
        out.extend(pieces)
    return out


@lru_cache(maxsize=200_000)
def _cached_bag(text: str) -> TokenBag:
    pieces = subwords(text)
    return TokenBag(frozenset(pieces), len(pieces))


def tokenize(text: str, splitter: SubwordSplitter | None = None) -> TokenBag:
    if splitter is None:
        return _cached_bag(text)
    pieces = subwords(text, splitter)
    return TokenBag(frozenset(pieces), len(pieces))


def code_tokens(text: str) -> list[str]:
    return _CODE_TOKEN.findall(text)


def count_tokens(text: str, scale: float = 1.0) -> int:
    n = len(_CODE_TOKEN.findall(text))
    return n if scale == 1.0 else math.ceil(n * scale)


class BpeSplitter:
    """Apply a ranked list of BPE merges to each subword.

    ``merges`` uses the common ``merges.txt`` layout: one ``left right`` pair
    per line, highest priority first, ``#`` lines ignored.
    """

    def __init__(self, merges: Iterable[tuple[str, str]]):
        self.ranks = {pair: i for i, pair in enumerate(merges)}
        self._cache: dict[str, list[str]] = {}

    @classmethod
    def from_file(cls, path: str | Path) -> BpeSplitter:
        pairs = []
        for line in Path(path).read_text(encoding="utf-8").splitlines():
            if not line.strip() or line.startswith("#"):
                continue
            left, right = line.split()[:2]
            pairs.append((left, right))
        return cls(pairs)

    def __call__(self, word: str) -> list[str]:
        if word in self._cache:
            return self._cache[word]
        parts = list(word)
        while len(parts) > 1:
            ranked = [(self.ranks.get((a, b), math.inf), i) for i, (a, b) in enumerate(zip(parts, parts[1:]))]
            rank, i = min(ranked)
            if rank == math.inf:
                break
            parts[i : i + 2] = [parts[i] + parts[i + 1]]
        self._cache[word] = parts
        return parts
