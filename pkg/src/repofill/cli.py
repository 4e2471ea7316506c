"""Command-line entry point: ``repofill {index,mine,complete,eval}``.

Exit status is 0 when everything succeeded, 1 when some problems failed or
some completion ids matched no problem, and 2 on configuration or IO errors.
Reports are written as sorted-key JSON and carry the resolved run
configuration plus the index snapshot id. Wall-clock timings go to stdout
only, so two runs over the same inputs write byte-identical files.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
from pathlib import Path

from .backend import make_backend
from .config import ConfigError, RunConfig
from .evaluation import BenchmarkManifest, MiningConfig, evaluate, mine_problems
from .index import EmptyIndexError, IndexConfig, IndexFormatError, RepositoryIndex, build_index
from .pipeline import Pipeline
from .problem import ManifestError, read_problems

logger = logging.getLogger("repofill")

OK, ITEM_FAILURES, FATAL = 0, 1, 2


class _Fatal(Exception):
    pass


def _default_workers() -> int:
    return os.cpu_count() or 1


def _write(path: str | os.PathLike, text: str) -> None:
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise _Fatal(f"cannot write {path}: {exc.strerror or exc}") from None


def _load_index(path: str) -> RepositoryIndex:
    try:
        return RepositoryIndex.load(path)
    except OSError as exc:
        raise _Fatal(f"cannot read index {path}: {exc.strerror or exc}") from None
    except (IndexFormatError, ValueError) as exc:
        raise _Fatal(f"index {path} is unusable: {exc}") from None


# -- index ------------------------------------------------------------------


def cmd_index(args) -> int:
    start = time.perf_counter()
    try:
        index = build_index(args.root, IndexConfig(workers=args.workers))
    except FileNotFoundError as exc:
        raise _Fatal(str(exc)) from None
    except EmptyIndexError:
        raise _Fatal(f"no parsable source files under {args.root}") from None
    try:
        index.save(args.out)
    except OSError as exc:
        raise _Fatal(f"cannot write {args.out}: {exc.strerror or exc}") from None
    elapsed = time.perf_counter() - start
    print(
        f"indexed {index.file_count} files: {len(index.classes)} classes, {len(index.methods)} methods, "
        f"{len(index.fields)} fields, {len(index.usage_edges)} usage edges"
    )
    print(f"snapshot {index.snapshot_id}")
    for warning in index.warnings:
        print(f"warning: {warning}")
    print(f"elapsed {elapsed:.2f}s")
    return OK


# -- mine -------------------------------------------------------------------


def cmd_mine(args) -> int:
    if args.index:
        index = _load_index(args.index)
    else:
        try:
            index = build_index(args.root)
        except FileNotFoundError as exc:
            raise _Fatal(str(exc)) from None
        except EmptyIndexError:
            raise _Fatal(f"no parsable source files under {args.root}") from None
    cfg = MiningConfig(context_lines=args.context_lines, repo_name=args.repo_name)
    try:
        manifest = mine_problems(index, args.root, cfg, args.seed)
        manifest.write(args.out)
    except OSError as exc:
        raise _Fatal(f"mining failed: {exc.strerror or exc}") from None
    stats = manifest.filter_stats
    print(f"mined {len(manifest.problems)} problems from {manifest.repo['name']}")
    print("filtered: " + ", ".join(f"{k}={stats[k]}" for k in sorted(stats)))
    return OK


# -- complete ---------------------------------------------------------------


def _run_config(args) -> RunConfig:
    overrides = {
        "mode": "oracle" if args.oracle else None,
        "k_usages": args.k_usages,
        "k_signature": args.k_signature,
        "budget": args.budget,
        "seed": args.seed,
        "backend.kind": args.backend,
        "backend.mock_table": args.mock_table,
        "backend.endpoint": args.endpoint,
        "backend.model": args.model,
        "backend.token_env": args.token_env,
        "similarity.mode": args.similarity,
    }
    try:
        return RunConfig.load(args.config, overrides)
    except ConfigError as exc:
        raise _Fatal(f"configuration error: {exc}") from None


def _mean(values) -> float:
    values = list(values)
    return sum(values) / len(values) if values else 0.0


def cmd_complete(args) -> int:
    cfg = _run_config(args)
    index = _load_index(args.index)
    try:
        problems = read_problems(args.problems, args.repo_root)
    except OSError as exc:
        raise _Fatal(f"cannot read problems {args.problems}: {exc.strerror or exc}") from None
    except ManifestError as exc:
        raise _Fatal(str(exc)) from None
    try:
        backend = make_backend(cfg.backend)
    except OSError as exc:
        raise _Fatal(f"cannot read mock table: {exc.strerror or exc}") from None
    except (ValueError, json.JSONDecodeError) as exc:
        raise _Fatal(f"backend setup failed: {exc}") from None

    pipeline = Pipeline(index, backend, cfg)
    start = time.perf_counter()
    results = pipeline.run_all(problems, args.workers)
    elapsed = time.perf_counter() - start

    _write(args.out, "".join(json.dumps(r.completion_record(), sort_keys=True) + "\n" for r in results))
    report = {
        "config": cfg.to_dict(),
        "snapshot_id": index.snapshot_id,
        "problems": len(results),
        "failures": sum(r.error is not None for r in results),
        "traces": [{"id": r.problem_id, "error": r.error, **r.trace} for r in results],
    }
    _write(f"{args.out}.report.json", json.dumps(report, indent=2, sort_keys=True) + "\n")

    failures = [r for r in results if r.error is not None]
    print(f"completed {len(results) - len(failures)}/{len(results)} problems in {elapsed:.2f}s")
    if results:
        retrieval = _mean(r.timings.get("retrieval_s", 0.0) for r in results)
        generation = _mean(r.timings.get("generation_s", 0.0) for r in results)
        print(f"mean per problem: retrieval {retrieval:.3f}s, generation {generation:.3f}s")
    for r in failures:
        print(f"failed {r.problem_id}: {r.error}")
    return ITEM_FAILURES if failures else OK


# -- eval -------------------------------------------------------------------


def _read_completions(path: str) -> dict[str, str]:
    completions: dict[str, str] = {}
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise _Fatal(f"cannot read completions {path}: {exc.strerror or exc}") from None
    for number, line in enumerate(lines, 1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
            completions[record["id"]] = record.get("body") or ""
        except (json.JSONDecodeError, KeyError, TypeError, AttributeError):
            raise _Fatal(f"{path}:{number}: not a completion record") from None
    return completions


def cmd_eval(args) -> int:
    cfg = RunConfig.load(args.config) if args.config else None
    hook = args.compile_hook or (cfg.compile_hook if cfg else None)
    hook_timeout = cfg.hook_timeout if cfg else 300.0
    try:
        manifest = BenchmarkManifest.read(args.manifest, args.repo_root)
    except OSError as exc:
        raise _Fatal(f"cannot read manifest {args.manifest}: {exc.strerror or exc}") from None
    except ManifestError as exc:
        raise _Fatal(str(exc)) from None
    completions = _read_completions(args.completions)
    report = evaluate(
        manifest.problems,
        completions,
        hook_cmd=hook,
        hook_timeout=hook_timeout,
        workers=args.workers,
        mode=cfg.mode if cfg else "normal",
        config=cfg.to_dict() if cfg else {},
        snapshot_id=manifest.repo.get("snapshot_id"),
    )
    _write(args.out, report.dumps())
    print(report.table())
    for pid in report.unmatched:
        print(f"unmatched completion id: {pid}")
    return ITEM_FAILURES if report.unmatched else OK


# -- argument parsing ---------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="repofill", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("index", help="parse a repository and save its index")
    p.add_argument("root")
    p.add_argument("--out", required=True)
    p.add_argument("--workers", type=int, default=1, help="parser processes")
    p.set_defaults(func=cmd_index)

    p = sub.add_parser("mine", help="sample one completion problem per class")
    p.add_argument("root")
    p.add_argument("--index", help="reuse a saved index of ROOT")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--repo-name")
    p.add_argument("--context-lines", type=int, default=50)
    p.set_defaults(func=cmd_mine)

    p = sub.add_parser("complete", help="retrieve context and generate bodies")
    p.add_argument("--index", required=True)
    p.add_argument("--problems", required=True)
    p.add_argument("--out", required=True, help="completions JSONL; the trace report goes to OUT.report.json")
    p.add_argument("--config")
    p.add_argument("--repo-root", help="override the repo_root stored with each problem")
    p.add_argument("--oracle", action="store_true", help="use the reference body as the sketch")
    p.add_argument("--similarity", choices=("lexical", "semantic", "hybrid"))
    p.add_argument("--backend", choices=("mock", "http"))
    p.add_argument("--mock-table")
    p.add_argument("--endpoint")
    p.add_argument("--model")
    p.add_argument("--token-env", help="name of the environment variable holding the API token")
    p.add_argument("--k-usages", type=int)
    p.add_argument("--k-signature", type=int)
    p.add_argument("--budget", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int, default=_default_workers())
    p.set_defaults(func=cmd_complete)

    p = sub.add_parser("eval", help="score completions against a mined manifest")
    p.add_argument("--completions", required=True)
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--config")
    p.add_argument("--compile-hook", help="command run in a patched copy of the repo; {repo} is replaced by its path")
    p.add_argument("--repo-root")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_eval)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except _Fatal as exc:
        print(f"error: {exc}", file=sys.stderr)
        return FATAL
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return FATAL


if __name__ == "__main__":
    sys.exit(main())
