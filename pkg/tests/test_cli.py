from __future__ import annotations

import json
import re

import pytest
from conftest import SHOP, write_tree

from repofill.cli import main
from repofill.index import RepositoryIndex

TOKEN = "cli-secret-token-5521"


@pytest.fixture
def workdir(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    write_tree(tmp_path / "shop", SHOP)
    return tmp_path


def _run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_index_prints_counts_and_is_repeatable(workdir, capsys):
    code, out, _ = _run(capsys, "index", "shop", "--out", "a.json")
    assert code == 0
    index = RepositoryIndex.load(workdir / "a.json")
    counts = re.search(r"indexed (\d+) files: (\d+) classes, (\d+) methods, (\d+) fields, (\d+) usage edges", out)
    assert tuple(map(int, counts.groups())) == (
        index.file_count,
        len(index.classes),
        len(index.methods),
        len(index.fields),
        len(index.usage_edges),
    )
    assert re.search(r"elapsed \d+\.\d\ds", out)
    _run(capsys, "index", "shop", "--out", "b.json")
    assert (workdir / "a.json").read_bytes() == (workdir / "b.json").read_bytes()


def test_index_errors(workdir, capsys):
    code, _, err = _run(capsys, "index", "nowhere", "--out", "x.json")
    assert code == 2 and "not found" in err
    (workdir / "empty").mkdir()
    code, _, err = _run(capsys, "index", "empty", "--out", "x.json")
    assert code == 2 and "no parsable source files" in err


def _mined(capsys):
    assert _run(capsys, "index", "shop", "--out", "index.json")[0] == 0
    code, out, _ = _run(capsys, "mine", "shop", "--index", "index.json", "--out", "problems.jsonl", "--seed", "1")
    assert code == 0
    return out


def test_mine_writes_manifest_and_sidecar(workdir, capsys):
    out = _mined(capsys)
    lines = (workdir / "problems.jsonl").read_text().splitlines()
    assert out.startswith(f"mined {len(lines)} problems from shop")
    meta = json.loads((workdir / "problems.jsonl.meta.json").read_text())
    assert meta["problem_count"] == len(lines) and meta["seed"] == 1


def test_complete_with_mock_backend_is_deterministic(workdir, capsys):
    _mined(capsys)
    args = ["complete", "--index", "index.json", "--problems", "problems.jsonl", "--backend", "mock"]
    code, out, _ = _run(capsys, *args, "--out", "c1.jsonl", "--workers", "1")
    assert code == 0
    assert re.search(r"mean per problem: retrieval \d+\.\d{3}s", out)
    _run(capsys, *args, "--out", "c2.jsonl", "--workers", "3")
    assert (workdir / "c1.jsonl").read_bytes() == (workdir / "c2.jsonl").read_bytes()
    assert (workdir / "c1.jsonl.report.json").read_bytes() == (workdir / "c2.jsonl.report.json").read_bytes()
    report = json.loads((workdir / "c1.jsonl.report.json").read_text())
    assert report["snapshot_id"] == RepositoryIndex.load(workdir / "index.json").snapshot_id
    assert report["config"]["k_usages"] == 10
    trace = report["traces"][0]
    for key in ("signature_similar", "essentials", "usages", "prompt", "sketch"):
        assert key in trace
    assert trace["prompt"]["token_count"] <= trace["prompt"]["budget"]


def test_oracle_flag_ranks_reference_holder_first(workdir, capsys):
    write_tree(workdir / "shop", {})
    assert _run(capsys, "index", "shop", "--out", "index.json")[0] == 0
    index = RepositoryIndex.load(workdir / "index.json")
    from repofill.evaluation.mining import problem_for
    from repofill.problem import write_problems

    target = index.method("shop.OrderDesk.placeOrder(Inventory,PriceBook,String,int)")
    problem = problem_for(target, (workdir / "shop" / target.span.file_path).read_bytes(), "shop")
    write_problems(workdir / "one.jsonl", [problem])
    code, _, _ = _run(
        capsys, "complete", "--index", "index.json", "--problems", "one.jsonl", "--out", "o.jsonl", "--oracle",
        "--k-usages", "3", "--k-signature", "2", "--budget", "3000", "--seed", "9",
    )
    assert code == 0
    report = json.loads((workdir / "o.jsonl.report.json").read_text())
    assert report["config"]["mode"] == "oracle"
    assert (report["config"]["k_usages"], report["config"]["k_signature"], report["config"]["budget"]) == (3, 2, 3000)
    usages = report["traces"][0]["usages"]
    assert usages[0]["method"] == "shop.Replay.replayOrder(Inventory,PriceBook,String,int)"
    assert len(usages) == 3


def test_backend_failures_are_counted_per_problem(workdir, capsys, monkeypatch):
    _mined(capsys)
    monkeypatch.setenv("CLI_TEST_TOKEN", TOKEN)
    (workdir / "run.json").write_text(
        json.dumps({"backend": {"kind": "http", "endpoint": "http://127.0.0.1:9/v1/chat/completions",
                                "model": "m", "token_env": "CLI_TEST_TOKEN", "retries": 0, "timeout": 2}}),
        encoding="utf-8",
    )
    code, out, err = _run(
        capsys, "complete", "--index", "index.json", "--problems", "problems.jsonl", "--out", "c.jsonl",
        "--config", "run.json", "--workers", "1",
    )
    assert code == 1
    records = [json.loads(line) for line in (workdir / "c.jsonl").read_text().splitlines()]
    assert records and all(r["error"].startswith("RetryableBackendError") for r in records)
    written = (workdir / "c.jsonl").read_text() + (workdir / "c.jsonl.report.json").read_text()
    assert TOKEN not in written + out + err


def test_complete_config_and_io_errors(workdir, capsys):
    _mined(capsys)
    base = ["complete", "--index", "index.json", "--problems", "problems.jsonl", "--out", "c.jsonl"]
    assert _run(capsys, *base, "--k-usages", "99")[0] == 2
    assert _run(capsys, *base, "--similarity", "semantic")[0] == 2
    assert _run(capsys, *base, "--backend", "mock", "--mock-table", "missing.json")[0] == 2
    assert _run(capsys, "complete", "--index", "nope.json", "--problems", "problems.jsonl", "--out", "c.jsonl")[0] == 2
    assert _run(capsys, "complete", "--index", "index.json", "--problems", "nope.jsonl", "--out", "c.jsonl")[0] == 2
    with pytest.raises(SystemExit):
        main(["complete", "--similarity", "fuzzy"])


def _identity_completions(workdir):
    lines = []
    for line in (workdir / "problems.jsonl").read_text().splitlines():
        rec = json.loads(line)
        pid = f"{rec['repo']}/{rec['path']}#L{rec['span']['start_line']}"
        lines.append(json.dumps({"id": pid, "body": rec["reference_body"]}))
    (workdir / "ident.jsonl").write_text("\n".join(lines) + "\n", encoding="utf-8")


def test_eval_identity_empty_and_unmatched(workdir, capsys):
    _mined(capsys)
    _identity_completions(workdir)
    code, out, _ = _run(capsys, "eval", "--completions", "ident.jsonl", "--manifest", "problems.jsonl", "--out", "r.json")
    assert code == 0 and "EM 100.0%" in out
    report = json.loads((workdir / "r.json").read_text())
    rows = report["rows"]
    assert report["aggregates"]["bleu_mean"] == pytest.approx(sum(r["bleu"] for r in rows) / len(rows))
    assert report["aggregates"]["exact_match_rate"] == 1.0

    (workdir / "empty.jsonl").write_text("", encoding="utf-8")
    code, _, _ = _run(capsys, "eval", "--completions", "empty.jsonl", "--manifest", "problems.jsonl", "--out", "z.json")
    assert code == 0
    agg = json.loads((workdir / "z.json").read_text())["aggregates"]
    assert (agg["bleu_mean"], agg["codebleu_mean"], agg["exact_match_rate"]) == (0.0, 0.0, 0.0)

    with open(workdir / "ident.jsonl", "a", encoding="utf-8") as fh:
        fh.write(json.dumps({"id": "ghost/X.java#L1", "body": "{ }"}) + "\n")
    code, out, _ = _run(capsys, "eval", "--completions", "ident.jsonl", "--manifest", "problems.jsonl", "--out", "u.json")
    assert code == 1 and "unmatched completion id: ghost/X.java#L1" in out


def test_eval_with_compile_hook(workdir, capsys):
    _mined(capsys)
    _identity_completions(workdir)
    code, out, _ = _run(
        capsys, "eval", "--completions", "ident.jsonl", "--manifest", "problems.jsonl", "--out", "r.json",
        "--compile-hook", "true", "--repo-root", "shop",
    )
    assert code == 0 and "CR 100.0%" in out


def test_eval_rejects_bad_completion_file(workdir, capsys):
    _mined(capsys)
    (workdir / "bad.jsonl").write_text("[1, 2]\n", encoding="utf-8")
    code, _, err = _run(capsys, "eval", "--completions", "bad.jsonl", "--manifest", "problems.jsonl", "--out", "r.json")
    assert code == 2 and "not a completion record" in err
