"""First retrieval pass: signature-similar methods, a draft body, and its names."""

from __future__ import annotations

import re
from dataclasses import dataclass

from .backend import Backend, GenerationRequest
from .extract import extract_body
from .index import Frontend, MethodDecl, RepositoryIndex, get_frontend
from .problem import MbcProblem
from .rendering import DEFAULT_MARKER, RenderedPrompt, load_template, render, snippet_for
from .similarity import LEXICAL, SimilarityConfig, top_k

_LAST_NAME_BEFORE_PAREN = re.compile(r"([A-Za-z_$][\w$]*)\s*\(")


@dataclass(frozen=True)
class ScoredMethod:
    method: MethodDecl
    score: float


@dataclass(frozen=True)
class Sketch:
    body_text: str
    raw_llm_output: str
    parse_ok: bool
    prompt: RenderedPrompt | None = None
    from_reference: bool = False


@dataclass(frozen=True)
class SketchAnalysis:
    called_methods: frozenset[tuple[str, int]] = frozenset()
    accessed_fields: frozenset[str] = frozenset()
    used_types: frozenset[str] = frozenset()
    degraded: bool = False

    def is_empty(self) -> bool:
        return not (self.called_methods or self.accessed_fields or self.used_types)


@dataclass(frozen=True)
class SketchConfig:
    k_signature: int = 5
    n_sketches: int = 1
    budget: int = 2048
    template: str = "sketch"
    marker: str = DEFAULT_MARKER
    token_scale: float = 1.0
    temperature: float = 0.0
    max_tokens: int = 512

    def __post_init__(self):
        if self.k_signature < 0:
            raise ValueError("k_signature must be >= 0")
        if self.n_sketches != 1:
            raise ValueError("only single-sketch generation is implemented (n_sketches=1)")
        if self.budget <= 0:
            raise ValueError("sketch budget must be positive")


def method_name(signature: str, frontend: Frontend | None = None) -> str | None:
    header = frontend.parse_header(signature) if frontend is not None else None
    if header is not None:
        return header.simple_name
    names = _LAST_NAME_BEFORE_PAREN.findall(signature)
    return names[0] if names else None


def target_method(index: RepositoryIndex, problem: MbcProblem) -> MethodDecl | None:
    """The indexed declaration whose body the problem asks for, if present."""
    m = index.method_at(problem.path, problem.span.start_byte)
    if m is not None and m.body_span is not None and m.body_span.start_byte == problem.span.start_byte:
        return m
    return None


def signature_query(problem: MbcProblem, frontend: Frontend) -> str:
    header = frontend.parse_header(problem.signature)
    return header.signature_text if header is not None else problem.signature.strip()


def retrieve_signature_similar(
    index: RepositoryIndex,
    problem: MbcProblem,
    k: int,
    cfg: SimilarityConfig = LEXICAL,
    frontend: Frontend | None = None,
    exclude: str | None = None,
) -> list[ScoredMethod]:
    """Top-``k`` non-test methods by similarity of ``return_type name(param_types)``.

    ``exclude`` names the infilling method; when omitted it is located from the
    problem span.
    """
    if k < 0:
        raise ValueError("k must be >= 0")
    if k == 0:
        return []
    frontend = frontend or get_frontend(index.config.frontend)
    if exclude is None:
        target = target_method(index, problem)
        exclude = target.qualified_name if target is not None else None
    candidates = [(m.qualified_name, m.signature_text) for m in index.accessible_methods() if m.qualified_name != exclude]
    ranked = top_k(signature_query(problem, frontend), candidates, k, cfg)
    return [ScoredMethod(index.method(qname), score) for qname, score in ranked]


def render_sketch_prompt(problem: MbcProblem, similar: list[ScoredMethod], cfg: SketchConfig, frontend: Frontend):
    n = len(similar)
    snippets = [snippet_for(s.method, float(n - i)) for i, s in enumerate(similar)]
    return render(
        snippets,
        problem.left_context,
        problem.signature,
        problem.right_context,
        cfg.budget,
        load_template(cfg.template),
        cfg.marker,
        frontend.comment_prefix,
        cfg.token_scale,
    )


def generate_sketch(
    problem: MbcProblem,
    similar: list[ScoredMethod],
    backend: Backend,
    cfg: SketchConfig = SketchConfig(),
    frontend: Frontend | None = None,
) -> Sketch:
    frontend = frontend or get_frontend("java")
    prompt = render_sketch_prompt(problem, similar, cfg, frontend)
    resp = backend.generate(GenerationRequest(prompt.text, cfg.temperature, cfg.max_tokens, problem.signature))
    body = extract_body(resp.text, method_name(problem.signature, frontend))
    if body is None:
        return Sketch("", resp.text, False, prompt)
    return Sketch(body, resp.text, True, prompt)


def oracle_sketch(problem: MbcProblem) -> Sketch:
    """Ground-truth body standing in for the generated draft."""
    if problem.reference_body is None:
        raise ValueError(f"{problem.problem_id}: oracle mode needs a reference body")
    return Sketch(problem.reference_body, problem.reference_body, True, None, from_reference=True)


def analyze_sketch(
    sketch: Sketch | str,
    frontend: Frontend | None = None,
    known_locals: frozenset[str] = frozenset(),
) -> SketchAnalysis:
    """Called methods with arity, read fields and referenced types of a draft body.

    ``known_locals`` holds names bound outside the body (the signature's
    parameters) that must not be reported as fields.
    """
    text = sketch.body_text if isinstance(sketch, Sketch) else sketch
    frontend = frontend or get_frontend("java")
    facts = frontend.analyze_snippet(text or "", frozenset(known_locals))
    return SketchAnalysis(
        frozenset(facts.calls), frozenset(facts.fields), frozenset(facts.types), facts.degraded
    )
