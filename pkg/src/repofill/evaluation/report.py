"""Per-problem scoring and the aggregate metric report."""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

from ..problem import MbcProblem
from .bleu import bleu
from .codebleu import codebleu_detail
from .compile_check import compile_check
from .exact import exact_match


@dataclass(frozen=True)
class MetricRow:
    problem_id: str
    bleu: float
    codebleu: float
    codebleu_degraded: bool
    exact_match: bool
    compile_ok: bool | None = None
    compile_note: str = ""


@dataclass
class MetricReport:
    rows: list[MetricRow]
    mode: str = "normal"
    config: dict = field(default_factory=dict)
    snapshot_id: str | None = None
    unmatched: list[str] = field(default_factory=list)

    def aggregates(self) -> dict:
        n = len(self.rows)
        checked = [r.compile_ok for r in self.rows if r.compile_ok is not None]
        return {
            "problems": n,
            "bleu_mean": sum(r.bleu for r in self.rows) / n if n else 0.0,
            "codebleu_mean": sum(r.codebleu for r in self.rows) / n if n else 0.0,
            "exact_match_rate": sum(r.exact_match for r in self.rows) / n if n else 0.0,
            "compile_rate": sum(checked) / len(checked) if checked else None,
            "codebleu_degraded": sum(r.codebleu_degraded for r in self.rows),
        }

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "snapshot_id": self.snapshot_id,
            "config": self.config,
            "aggregates": self.aggregates(),
            "rows": [asdict(r) for r in self.rows],
            "unmatched": list(self.unmatched),
        }

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def table(self) -> str:
        agg = self.aggregates()
        lines = [f"{'problem':<60} {'BLEU':>7} {'CodeBLEU':>9} {'EM':>3} {'CR':>4}"]
        for r in self.rows:
            cr = "n/a" if r.compile_ok is None else ("yes" if r.compile_ok else "no")
            flag = "*" if r.codebleu_degraded else " "
            lines.append(f"{r.problem_id[-60:]:<60} {r.bleu:7.2f} {r.codebleu:8.2f}{flag} {int(r.exact_match):>3} {cr:>4}")
        cr_total = "n/a" if agg["compile_rate"] is None else f"{100 * agg['compile_rate']:.1f}%"
        lines.append(
            f"mean over {agg['problems']}: BLEU {agg['bleu_mean']:.2f}  CodeBLEU {agg['codebleu_mean']:.2f}  "
            f"EM {100 * agg['exact_match_rate']:.1f}%  CR {cr_total}"
        )
        if agg["codebleu_degraded"]:
            lines.append("* candidate did not parse; CodeBLEU uses the text components only")
        return "\n".join(lines)


def score_problem(
    problem: MbcProblem, candidate: str, hook_cmd: str | None = None, hook_timeout: float = 300.0
) -> MetricRow:
    reference = problem.reference_body or ""
    cb = codebleu_detail(candidate, reference)
    cc = compile_check(problem, candidate, hook_cmd, timeout=hook_timeout) if hook_cmd else None
    return MetricRow(
        problem_id=problem.problem_id,
        bleu=bleu(candidate, reference),
        codebleu=cb.score,
        codebleu_degraded=cb.degraded,
        exact_match=exact_match(candidate, reference),
        compile_ok=None if cc is None else cc.ok,
        compile_note="" if cc is None else cc.reason,
    )


def evaluate(
    problems: list[MbcProblem],
    completions: dict[str, str],
    hook_cmd: str | None = None,
    hook_timeout: float = 300.0,
    workers: int = 1,
    mode: str = "normal",
    config: dict | None = None,
    snapshot_id: str | None = None,
) -> MetricReport:
    """Score every problem; a problem without a completion scores an empty body.

    Completion ids that match no problem are listed in ``unmatched``.
    """
    known = {p.problem_id for p in problems}
    unmatched = sorted(set(completions) - known)

    def one(p: MbcProblem) -> MetricRow:
        return score_problem(p, completions.get(p.problem_id, ""), hook_cmd, hook_timeout)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(one, problems))
    else:
        rows = [one(p) for p in problems]
    return MetricReport(rows, mode, dict(config or {}), snapshot_id, unmatched)
