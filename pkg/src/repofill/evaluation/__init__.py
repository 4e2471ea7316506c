from .bleu import bleu
from .codebleu import CodeBleuScore, codebleu, codebleu_detail
from .compile_check import CompileResult, compile_check
from .exact import exact_match
from .mining import BenchmarkManifest, MiningConfig, mine_problems
from .report import MetricReport, MetricRow, evaluate, score_problem

__all__ = [
    "BenchmarkManifest",
    "CodeBleuScore",
    "CompileResult",
    "MetricReport",
    "MetricRow",
    "MiningConfig",
    "bleu",
    "codebleu",
    "codebleu_detail",
    "compile_check",
    "evaluate",
    "exact_match",
    "mine_problems",
    "score_problem",
]
