"""
From a Java tree to a metric table with the four subcommands
============================================================

Run with ``python demos/walkthrough.py``. Everything is written to a scratch
directory, and the default mock backend means no network is touched.
"""

import json
import sys
import tempfile
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))
from warehouse import write_warehouse  # noqa: E402

from repofill.cli import main  # noqa: E402

work = Path(tempfile.mkdtemp(prefix="repofill-demo-"))
repo = write_warehouse(work / "depot")
print("scratch directory:", work)

# 1. Index the tree. The printed counts come straight from the saved index.
main(["index", str(repo), "--out", str(work / "index.json")])

# 2. Turn every eligible method into a fill-in-the-body problem.
#    Getters, setters, constructors and bodies under three lines are skipped.
main(["mine", str(repo), "--index", str(work / "index.json"), "--out", str(work / "problems.jsonl"), "--seed", "0"])
for line in (work / "problems.jsonl").read_text().splitlines():
    rec = json.loads(line)
    print("  problem:", rec["path"], "line", rec["span"]["start_line"], "->", rec["signature"])

# 3. Complete them. Oracle mode uses the true body as the draft, which shows
#    the best case for retrieval. The mock backend answers with an empty body
#    for prompts it has no table entry for, so the scores below stay low.
main([
    "complete",
    "--index", str(work / "index.json"),
    "--problems", str(work / "problems.jsonl"),
    "--out", str(work / "completions.jsonl"),
    "--oracle",
    "--workers", "2",
])
report = json.loads((work / "completions.jsonl.report.json").read_text())
first = report["traces"][0]
print("first problem, retrieved usages:")
for usage in first["usages"]:
    print(f"  {usage['score']:.3f}  {usage['method']}  via {', '.join(usage['via'])}")

# 4. Score the completions against the mined reference bodies.
main([
    "eval",
    "--completions", str(work / "completions.jsonl"),
    "--manifest", str(work / "problems.jsonl"),
    "--out", str(work / "metrics.json"),
])
