"""Essential element identification: map draft names onto declared elements.

Each name the draft calls, reads or mentions is matched to the single
repository element of the same category with the highest name similarity.
Matches below ``min_name_sim`` are discarded. Ties prefer the element whose
parameter count is closest to the call's argument count, then the smaller
qualified name.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass

from .index import ClassDecl, Element, FieldDecl, MethodDecl, RepositoryIndex, element_key
from .similarity import name_sim
from .sketch import SketchAnalysis


@dataclass(frozen=True)
class EeiConfig:
    min_name_sim: float = 0.5

    def __post_init__(self):
        if not 0.0 <= self.min_name_sim <= 1.0:
            raise ValueError("min_name_sim must lie in [0, 1]")


@dataclass(frozen=True)
class MatchTrace:
    category: str
    sketch_name: str
    arity: int
    element: str | None
    score: float

    def to_dict(self) -> dict:
        return {
            "category": self.category,
            "name": self.sketch_name,
            "arity": self.arity,
            "element": self.element if self.element is not None else "no match",
            "score": self.score,
        }


@dataclass(frozen=True)
class EssentialElements:
    methods: tuple[MethodDecl, ...] = ()
    fields: tuple[FieldDecl, ...] = ()
    classes: tuple[ClassDecl, ...] = ()
    match_trace: tuple[MatchTrace, ...] = ()

    def all(self) -> tuple[Element, ...]:
        return (*self.methods, *self.fields, *self.classes)

    def __len__(self) -> int:
        return len(self.methods) + len(self.fields) + len(self.classes)


def _arity_gap(m: MethodDecl, arity: int) -> int:
    if arity < 0 or m.accepts_arity(arity):
        return 0
    return abs(len(m.params) - arity)


def _best(name: str, arity: int, pool: dict[str, list[Element]], threshold: float) -> tuple[Element | None, float]:
    """Argmax of name similarity over ``pool`` (simple name -> elements)."""
    scored = [(name_sim(name, simple), simple) for simple in pool]
    if not scored:
        return None, 0.0
    top = max(s for s, _ in scored)
    if top < threshold:
        return None, top
    tied = [el for s, simple in scored if s == top for el in pool[simple]]

    def key(el: Element):
        gap = _arity_gap(el, arity) if isinstance(el, MethodDecl) else 0
        return (gap, el.qualified_name)

    return min(tied, key=key), top


def _pool(elements, exclude: str | None) -> dict[str, list[Element]]:
    out: dict[str, list[Element]] = defaultdict(list)
    for el in elements:
        if el.qualified_name != exclude:
            out[el.simple_name].append(el)
    return out


def identify_essentials(
    index: RepositoryIndex,
    analysis: SketchAnalysis,
    cfg: EeiConfig = EeiConfig(),
    exclude: str | None = None,
) -> EssentialElements:
    """Match every name in ``analysis`` to at most one accessible element.

    ``exclude`` is the qualified name of the method being completed, which is
    never a candidate.
    """
    trace: list[MatchTrace] = []
    found: dict[str, dict[str, Element]] = {"method": {}, "field": {}, "class": {}}

    queries = [("method", n, a) for n, a in sorted(analysis.called_methods)]
    queries += [("field", n, -1) for n in sorted(analysis.accessed_fields)]
    queries += [("class", n, -1) for n in sorted(analysis.used_types)]
    pools = {
        "method": _pool(index.accessible_methods(), exclude),
        "field": _pool(index.accessible_fields(), None),
        "class": _pool(index.accessible_classes(), None),
    }
    for category, name, arity in queries:
        el, score = _best(name, arity, pools[category], cfg.min_name_sim)
        if el is None:
            trace.append(MatchTrace(category, name, arity, None, score))
            continue
        found[category][element_key(el)] = el
        trace.append(MatchTrace(category, name, arity, element_key(el), score))

    def ordered(group: dict[str, Element]):
        return tuple(group[k] for k in sorted(group))

    return EssentialElements(ordered(found["method"]), ordered(found["field"]), ordered(found["class"]), tuple(trace))
