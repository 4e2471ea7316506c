"""End-to-end completion of one problem and batch runs over a manifest."""

from __future__ import annotations

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .backend import Backend, BackendError
from .config import RunConfig
from .eei import EeiConfig, identify_essentials
from .index import Frontend, RepositoryIndex, get_frontend
from .problem import MbcProblem
from .prompting import PromptConfig, complete
from .rendering import ContextBudgetError
from .rue import ContextBundle, build_context, extract_usages, rank_usages
from .similarity import EmbeddingProviderError, SimilarityConfig
from .sketch import (
    ScoredMethod,
    Sketch,
    SketchConfig,
    analyze_sketch,
    generate_sketch,
    oracle_sketch,
    retrieve_signature_similar,
    target_method,
)

logger = logging.getLogger(__name__)


@dataclass
class ProblemResult:
    problem_id: str
    body: str = ""
    raw_output: str = ""
    extracted: bool = False
    error: str | None = None
    trace: dict = field(default_factory=dict)
    timings: dict = field(default_factory=dict)

    def completion_record(self) -> dict:
        return {
            "id": self.problem_id,
            "body": self.body,
            "raw_output": self.raw_output,
            "extracted": self.extracted,
            "error": self.error,
        }


@dataclass(frozen=True)
class Retrieval:
    similar: list[ScoredMethod]
    sketch: Sketch
    bundle: ContextBundle
    trace: dict


class Pipeline:
    """Retrieval and generation for one index, one backend and one configuration."""

    def __init__(
        self,
        index: RepositoryIndex,
        backend: Backend,
        cfg: RunConfig,
        similarity: SimilarityConfig | None = None,
        frontend: Frontend | None = None,
    ):
        self.index = index
        self.backend = backend
        self.cfg = cfg
        self.similarity = similarity or cfg.similarity.build()
        self.frontend = frontend or get_frontend(index.config.frontend)
        self.sketch_cfg = SketchConfig(
            k_signature=cfg.k_signature,
            n_sketches=cfg.n_sketches,
            budget=cfg.sketch_budget,
            template=cfg.sketch_template,
            marker=cfg.marker,
            token_scale=cfg.token_scale,
            temperature=cfg.backend.temperature,
            max_tokens=cfg.backend.max_tokens,
        )
        self.prompt_cfg = PromptConfig(
            budget=cfg.budget,
            template=cfg.completion_template,
            marker=cfg.marker,
            token_scale=cfg.token_scale,
            temperature=cfg.backend.temperature,
            max_tokens=cfg.backend.max_tokens,
        )
        self.eei_cfg = EeiConfig(cfg.min_name_sim)

    def retrieve(self, problem: MbcProblem, timings: dict | None = None) -> Retrieval:
        timings = timings if timings is not None else {}
        target = target_method(self.index, problem)
        exclude = target.qualified_name if target is not None else None
        header = self.frontend.parse_header(problem.signature)
        params = frozenset(n for n in (header.param_names if header else ()) if n)

        t0 = time.perf_counter()
        similar = retrieve_signature_similar(
            self.index, problem, self.cfg.k_signature, self.similarity, self.frontend, exclude
        )
        t1 = time.perf_counter()
        if self.cfg.mode == "oracle":
            sketch = oracle_sketch(problem)
        else:
            sketch = generate_sketch(problem, similar, self.backend, self.sketch_cfg, self.frontend)
        t2 = time.perf_counter()
        analysis = analyze_sketch(sketch, self.frontend, params)
        essentials = identify_essentials(self.index, analysis, self.eei_cfg, exclude)
        usages = extract_usages(self.index, essentials, exclude)
        ranked = rank_usages(usages, sketch.body_text, self.cfg.k_usages, self.similarity)
        bundle = build_context(problem, similar, ranked, sketch, self.cfg.mode, exclude)
        t3 = time.perf_counter()
        timings.update(signature_s=t1 - t0, sketch_s=t2 - t1, retrieval_s=(t1 - t0) + (t3 - t2))

        trace = {
            "target": exclude,
            "signature_similar": [[s.method.qualified_name, s.score] for s in similar],
            "sketch": {"parse_ok": sketch.parse_ok, "body": sketch.body_text, "from_reference": sketch.from_reference},
            "analysis": {
                "calls": sorted([n, a] for n, a in analysis.called_methods),
                "fields": sorted(analysis.accessed_fields),
                "types": sorted(analysis.used_types),
                "degraded": analysis.degraded,
            },
            "essentials": [t.to_dict() for t in essentials.match_trace],
            "usages": [
                {"method": u.method.qualified_name, "score": u.score, "via": sorted(u.via_elements)}
                for u in ranked
            ],
            "usage_count": len(usages),
            "context_usages": [u.method.qualified_name for u in bundle.usages],
            "context_degraded": bundle.degraded,
        }
        return Retrieval(similar, sketch, bundle, trace)

    def run(self, problem: MbcProblem) -> ProblemResult:
        result = ProblemResult(problem.problem_id)
        try:
            retrieval = self.retrieve(problem, result.timings)
            result.trace = retrieval.trace
            t0 = time.perf_counter()
            completion = complete(problem, retrieval.bundle, self.backend, self.prompt_cfg, self.frontend)
            result.timings["generation_s"] = time.perf_counter() - t0
        except (BackendError, ContextBudgetError, EmbeddingProviderError, ValueError) as exc:
            result.error = f"{type(exc).__name__}: {exc}"
            logger.warning("%s failed: %s", problem.problem_id, result.error)
            return result
        result.body = completion.body_text
        result.raw_output = completion.raw_llm_output
        result.extracted = completion.extracted
        result.trace["prompt"] = {
            "token_count": completion.prompt.token_count,
            "budget": completion.prompt.budget,
            "included_snippets": [list(s) for s in completion.prompt.included_snippets],
            "truncated": completion.prompt.truncated,
        }
        return result

    def run_all(self, problems: list[MbcProblem], workers: int = 1) -> list[ProblemResult]:
        """Results in input order whatever the worker count."""
        if workers <= 1:
            return [self.run(p) for p in problems]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(self.run, problems))

