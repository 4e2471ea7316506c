"""Final prompt rendering and body generation."""

from __future__ import annotations

from dataclasses import dataclass

from .backend import Backend, GenerationRequest
from .extract import extract_body
from .index import Frontend, get_frontend
from .problem import MbcProblem
from .rendering import DEFAULT_MARKER, ContextBudgetError, RenderedPrompt, load_template, render
from .rue import ContextBundle
from .sketch import method_name

__all__ = ["Completion", "ContextBudgetError", "PromptConfig", "complete", "render_prompt"]


@dataclass(frozen=True)
class PromptConfig:
    budget: int = 4096
    template: str = "completion"
    marker: str = DEFAULT_MARKER
    token_scale: float = 1.0
    temperature: float = 0.0
    max_tokens: int = 512

    def __post_init__(self):
        if self.budget <= 0:
            raise ValueError("generation budget must be positive")
        if self.token_scale <= 0:
            raise ValueError("token_scale must be positive")


@dataclass(frozen=True)
class Completion:
    body_text: str
    raw_llm_output: str
    prompt: RenderedPrompt
    extracted: bool
    attempts: int = 1

    @property
    def empty(self) -> bool:
        return not self.extracted


def render_prompt(
    problem: MbcProblem,
    bundle: ContextBundle,
    budget: int,
    cfg: PromptConfig = PromptConfig(),
    frontend: Frontend | None = None,
) -> RenderedPrompt:
    frontend = frontend or get_frontend("java")
    return render(
        bundle.snippets(),
        problem.left_context,
        problem.signature,
        problem.right_context,
        budget,
        load_template(cfg.template),
        cfg.marker,
        frontend.comment_prefix,
        cfg.token_scale,
    )


def complete(
    problem: MbcProblem,
    bundle: ContextBundle,
    backend: Backend,
    cfg: PromptConfig = PromptConfig(),
    frontend: Frontend | None = None,
) -> Completion:
    """One backend call on the rendered prompt; backend errors propagate."""
    frontend = frontend or get_frontend("java")
    prompt = render_prompt(problem, bundle, cfg.budget, cfg, frontend)
    resp = backend.generate(GenerationRequest(prompt.text, cfg.temperature, cfg.max_tokens, problem.signature))
    body = extract_body(resp.text, method_name(problem.signature, frontend))
    if body is None:
        return Completion("", resp.text, prompt, False, resp.attempts)
    return Completion(body, resp.text, prompt, True, resp.attempts)
