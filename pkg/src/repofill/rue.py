"""Relevant usage extraction and context assembly.

Methods that reference any essential element are collected, scored by how
similar their body is to the draft, and combined with the signature-similar
methods into one ranked context bundle.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass

from .eei import EssentialElements
from .index import MethodDecl, RepositoryIndex, element_key
from .problem import MbcProblem
from .rendering import Snippet, snippet_for
from .similarity import LEXICAL, SimilarityConfig, top_k
from .sketch import ScoredMethod, Sketch

NORMAL = "normal"
ORACLE = "oracle"


@dataclass(frozen=True)
class Usage:
    method: MethodDecl
    via_elements: frozenset[str]


@dataclass(frozen=True)
class RankedUsage:
    method: MethodDecl
    score: float
    via_elements: frozenset[str]


@dataclass(frozen=True)
class ContextBundle:
    usages: tuple[RankedUsage, ...] = ()
    signature_similar: tuple[ScoredMethod, ...] = ()
    sketch: Sketch | None = None
    mode: str = NORMAL
    degraded: bool = False

    def methods(self) -> list[MethodDecl]:
        """Bundle methods in priority order: similar signatures, then usages."""
        return [s.method for s in self.signature_similar] + [u.method for u in self.usages]

    def snippets(self) -> list[Snippet]:
        """Snippets most relevant first, relevance given by rank."""
        methods = self.methods()
        return [snippet_for(m, float(len(methods) - i)) for i, m in enumerate(methods)]


def extract_usages(
    index: RepositoryIndex, essentials: EssentialElements, exclude: str | None = None
) -> list[Usage]:
    """Every non-test method using at least one essential element, by qualified name."""
    via: dict[str, set[str]] = defaultdict(set)
    methods: dict[str, MethodDecl] = {}
    for el in essentials.all():
        key = element_key(el)
        for m in index.usages_of(el):
            if m.qualified_name == exclude:
                continue
            via[m.qualified_name].add(key)
            methods[m.qualified_name] = m
    return [Usage(methods[q], frozenset(via[q])) for q in sorted(methods)]


def rank_usages(usages: list[Usage], sketch_text: str, k: int, cfg: SimilarityConfig = LEXICAL) -> list[RankedUsage]:
    """Top-``k`` usages by similarity between their body and the draft body.

    An empty draft scores every usage 0, which leaves them in qualified-name
    order.
    """
    if k < 0:
        raise ValueError("k must be >= 0")
    by_name = {u.method.qualified_name: u for u in usages}
    if not sketch_text or not sketch_text.strip():
        chosen = sorted(by_name)[:k]
        return [RankedUsage(by_name[q].method, 0.0, by_name[q].via_elements) for q in chosen]
    candidates = [(q, by_name[q].method.body_text or "") for q in sorted(by_name)]
    ranked = top_k(sketch_text, candidates, k, cfg)
    return [RankedUsage(by_name[q].method, score, by_name[q].via_elements) for q, score in ranked]


def build_context(
    problem: MbcProblem,
    similar: list[ScoredMethod],
    ranked: list[RankedUsage],
    sketch: Sketch | None = None,
    mode: str = NORMAL,
    exclude: str | None = None,
) -> ContextBundle:
    """Combine the two retrieval results, keeping a method shared by both in the similar-signature slot."""
    similar = [s for s in similar if s.method.qualified_name != exclude]
    taken = {s.method.qualified_name for s in similar}
    usages = [u for u in ranked if u.method.qualified_name not in taken and u.method.qualified_name != exclude]
    degraded = sketch is None or not sketch.body_text.strip()
    return ContextBundle(tuple(usages), tuple(similar), sketch, mode, degraded)
